use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::porter::porter_stem;
use super::stopwords::is_stop_word;
use crate::record::PackageRecord;

/// Deduplicated, stemmed, stop-word-free query or document terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSet(BTreeSet<String>);

impl TokenSet {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn extend(&mut self, other: TokenSet) {
        self.0.extend(other.0);
    }
}

impl<'a> FromIterator<&'a str> for TokenSet {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        Self(iter.into_iter().map(String::from).collect())
    }
}

/// Splits on anything that is not alphanumeric, lowercases, drops stop words
/// and stems what is left.
pub fn tokenize(text: &str) -> TokenSet {
    let mut tokens = BTreeSet::new();
    for word in text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
        let lower = word.to_lowercase();
        if is_stop_word(&lower) {
            continue;
        }
        let stem = porter_stem(&lower);
        if !is_stop_word(&stem) {
            tokens.insert(stem);
        }
    }
    TokenSet(tokens)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingMode {
    Stars,
    Runnability,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RankingInputs {
    pub stars: u64,
    /// Predicted probability that the package installs and builds.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub name: String,
    pub score: f64,
    pub stars: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub mode: RankingMode,
    pub entries: Vec<RankedEntry>,
}

impl RankedResult {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("query has no searchable words")]
    EmptyQuery,
}

/// Token to package-name postings plus the inputs needed for ranking.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<String>>,
    ranking: BTreeMap<String, RankingInputs>,
}

impl InvertedIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn build<'a>(records: impl IntoIterator<Item = &'a PackageRecord>) -> Self {
        let mut index = Self::new();
        for record in records {
            index.insert(record);
        }
        index
    }

    /// Tokens a package is filed under: its description and keywords.
    pub fn document_tokens(record: &PackageRecord) -> TokenSet {
        let mut tokens = tokenize(&record.description);
        for keyword in &record.keywords {
            tokens.extend(tokenize(keyword));
        }
        tokens
    }

    pub fn insert(&mut self, record: &PackageRecord) {
        for token in Self::document_tokens(record).iter() {
            let list = self.postings.entry(token.to_string()).or_default();
            if let Err(at) = list.binary_search(&record.name) {
                list.insert(at, record.name.clone());
            }
        }
        self.ranking.entry(record.name.clone()).or_default().stars = record.stars;
    }

    pub fn set_probability(&mut self, name: &str, probability: f64) {
        if let Some(inputs) = self.ranking.get_mut(name) {
            inputs.probability = probability;
        }
    }

    pub fn postings(&self, token: &str) -> &[String] {
        self.postings.get(token).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn ranking_inputs(&self, name: &str) -> Option<RankingInputs> {
        self.ranking.get(name).copied()
    }

    pub fn package_names(&self) -> impl Iterator<Item = &str> {
        self.ranking.keys().map(String::as_str)
    }

    pub fn package_count(&self) -> usize {
        self.ranking.len()
    }

    /// Packages present in the postings of every token, sorted by name. A
    /// token without postings empties the result.
    pub fn candidates(&self, tokens: &TokenSet) -> Vec<String> {
        let mut lists: Vec<&[String]> = tokens.iter().map(|t| self.postings(t)).collect();
        if lists.is_empty() {
            return Vec::new();
        }
        lists.sort_by_key(|l| l.len());
        let (first, rest) = lists.split_first().expect("non-empty");
        first
            .iter()
            .filter(|name| rest.iter().all(|l| l.binary_search(name).is_ok()))
            .cloned()
            .collect()
    }
}

fn by_stars(a: &RankedEntry, b: &RankedEntry) -> Ordering {
    b.stars.cmp(&a.stars).then_with(|| a.name.cmp(&b.name))
}

fn by_runnability(a: &RankedEntry, b: &RankedEntry) -> Ordering {
    (a.stars == 0)
        .cmp(&(b.stars == 0))
        .then_with(|| b.probability.total_cmp(&a.probability))
        .then_with(|| by_stars(a, b))
}

/// Intersects the postings of the query's tokens and orders the matches.
///
/// In runnability mode every zero-star package sorts after every starred one,
/// whatever its probability.
pub fn query_packages(
    query: &str,
    index: &InvertedIndex,
    mode: RankingMode,
) -> Result<RankedResult, SearchError> {
    let tokens = tokenize(query);
    if tokens.is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    let mut entries: Vec<RankedEntry> = index
        .candidates(&tokens)
        .into_iter()
        .map(|name| {
            let inputs = index.ranking_inputs(&name).unwrap_or_default();
            let score = match mode {
                RankingMode::Stars => inputs.stars as f64,
                RankingMode::Runnability => inputs.probability,
            };
            RankedEntry { name, score, stars: inputs.stars, probability: inputs.probability }
        })
        .collect();
    match mode {
        RankingMode::Stars => entries.sort_by(by_stars),
        RankingMode::Runnability => entries.sort_by(by_runnability),
    }
    Ok(RankedResult { mode, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn record(name: &str, description: &str, keywords: &[&str], stars: u64) -> PackageRecord {
        let mut r = PackageRecord::for_readme(name, "");
        r.description = description.to_string();
        r.keywords = keywords.iter().map(|k| k.to_string()).collect();
        r.stars = stars;
        r
    }

    fn set(words: &[&str]) -> TokenSet {
        words.iter().copied().collect()
    }

    #[test]
    fn tokenize_query() {
        assert_eq!(tokenize("connecting to sql"), set(&["connect", "sql"]));
        assert!(tokenize("").is_empty());
        assert!(tokenize("The THE the").is_empty());
        assert_eq!(tokenize("CSV-parser, parsers!"), set(&["csv", "parser"]));
    }

    #[test]
    fn postings_from_description_and_keywords() {
        let index = InvertedIndex::build(&[
            record("a", "fast csv writer", &[], 1),
            record("b", "json tools", &["parser"], 1),
        ]);
        assert_eq!(index.postings("csv"), ["a"]);
        assert_eq!(index.postings("parser"), ["b"]);
        assert!(index.postings("json").contains(&"b".to_string()));
    }

    #[test]
    fn intersection_of_postings() {
        let index = InvertedIndex::build(&[
            record("a", "connect", &[], 1),
            record("b", "connect sql", &[], 1),
            record("c", "sql", &[], 1),
        ]);
        let result = query_packages("connecting to sql", &index, RankingMode::Stars).unwrap();
        assert_eq!(result.names().collect::<Vec<_>>(), ["b"]);
    }

    #[test]
    fn zero_star_packages_sink_in_runnability_mode() {
        let mut index = InvertedIndex::build(&[record("x", "csv", &[], 5), record("y", "csv", &[], 0)]);
        index.set_probability("x", 0.2);
        index.set_probability("y", 0.9);
        let run = query_packages("csv", &index, RankingMode::Runnability).unwrap();
        assert_eq!(run.names().collect::<Vec<_>>(), ["x", "y"]);
        let stars = query_packages("csv", &index, RankingMode::Stars).unwrap();
        assert_eq!(stars.names().collect::<Vec<_>>(), ["x", "y"]);
        assert_eq!(stars.entries[0].score, 5.0);
        assert_eq!(run.entries[0].score, 0.2);
    }

    #[test]
    fn runnability_ties() {
        let mut index = InvertedIndex::build(&[
            record("b", "csv", &[], 3),
            record("a", "csv", &[], 3),
            record("c", "csv", &[], 9),
            record("d", "csv", &[], 1),
        ]);
        for name in ["a", "b", "c"] {
            index.set_probability(name, 0.5);
        }
        index.set_probability("d", 0.7);
        let run = query_packages("csv", &index, RankingMode::Runnability).unwrap();
        assert_eq!(run.names().collect::<Vec<_>>(), ["d", "c", "a", "b"]);
    }

    #[test]
    fn empty_query_and_no_match() {
        let index = InvertedIndex::build(&[record("a", "csv", &[], 1)]);
        assert_eq!(query_packages("the to", &index, RankingMode::Stars), Err(SearchError::EmptyQuery));
        assert!(query_packages("csv yaml", &index, RankingMode::Stars).unwrap().is_empty());
    }

    #[test]
    fn build_is_order_independent() {
        let records = vec![record("a", "csv tools", &["x"], 1), record("b", "tools", &[], 2)];
        let mut reversed = records.clone();
        reversed.reverse();
        assert_eq!(InvertedIndex::build(&records), InvertedIndex::build(&reversed));
    }
}
