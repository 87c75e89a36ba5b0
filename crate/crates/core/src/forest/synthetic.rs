use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FeatureVector, LabeledExample};

/// Ground-truth rule for synthetic data: an install example and an update
/// within the last two years.
pub fn synthetic_rule(fv: &FeatureVector) -> bool {
    fv.has_install_example == 1 && fv.days_since_update < 730
}

/// `n` random feature vectors labelled by [`synthetic_rule`].
pub fn synthetic_rule_examples(n: usize, seed: u64) -> Vec<LabeledExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let has_readme = u64::from(rng.gen_bool(0.9));
            let readme_code_blocks = has_readme * rng.gen_range(0..12);
            let features = FeatureVector {
                has_license: u64::from(rng.gen_bool(0.7)),
                has_readme,
                readme_lines: has_readme * rng.gen_range(1..400),
                readme_code_blocks,
                js_snippet_count: rng.gen_range(0..=readme_code_blocks),
                has_run_example: has_readme * u64::from(rng.gen_bool(0.5)),
                has_install_example: has_readme * u64::from(rng.gen_bool(0.5)),
                days_since_update: rng.gen_range(0..2_000),
            };
            LabeledExample { features, label: synthetic_rule(&features) }
        })
        .collect()
}
