use snipkit_core::search::porter_stem;

#[test]
fn reference_vectors() {
    let data = include_str!("data/porter_vectors.txt");
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for line in data.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (word, stem) = line.split_once(' ').expect("word stem");
        checked += 1;
        if porter_stem(word) != stem {
            mismatches.push(format!("{word}: expected {stem}, got {}", porter_stem(word)));
        }
    }
    assert!(checked >= 200, "only {checked} vectors");
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}
