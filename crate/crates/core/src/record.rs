//! Package records and corpus-level counts.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::readme::{compute_readme_stats, ReadmeStats};

/// Seconds since the Unix epoch, UTC.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const SECONDS_PER_DAY: i64 = 86_400;

    /// Whole days from `self` to `now`, zero when `self` lies in the future.
    pub fn days_until(self, now: Timestamp) -> u64 {
        let delta = now.0.saturating_sub(self.0);
        if delta <= 0 {
            0
        } else {
            (delta / Self::SECONDS_PER_DAY) as u64
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadmeSource {
    Registry,
    Repository,
    #[default]
    None,
}

/// One registry package: metadata, README and README-derived counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageRecord {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub readme_text: String,
    #[serde(default)]
    pub readme_source: ReadmeSource,
    #[serde(default)]
    pub repo_url: Option<String>,
    #[serde(default)]
    pub stars: u64,
    #[serde(default)]
    pub has_license: bool,
    #[serde(default)]
    pub last_modified: Timestamp,
    #[serde(default)]
    pub stats: ReadmeStats,
    #[serde(default)]
    pub snippet_count: u32,
}

impl PackageRecord {
    /// Bare record with only a name and a registry README; stats are filled in.
    pub fn for_readme(name: &str, readme: &str) -> Self {
        Self {
            name: name.to_string(),
            description: String::new(),
            keywords: Vec::new(),
            readme_text: readme.to_string(),
            readme_source: if readme.is_empty() { ReadmeSource::None } else { ReadmeSource::Registry },
            repo_url: None,
            stars: 0,
            has_license: false,
            last_modified: Timestamp(0),
            stats: compute_readme_stats(readme),
            snippet_count: 0,
        }
    }

    pub fn has_readme(&self) -> bool {
        self.readme_source != ReadmeSource::None
    }
}

/// Dataset funnel counts; each stage is a subset of the previous one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total_packages: u64,
    pub packages_with_readme: u64,
    pub packages_with_nonempty_readme: u64,
    pub packages_with_snippets: u64,
    pub total_snippets: u64,
}

impl CorpusStats {
    /// Tallies one parsed package given how many snippets it yielded.
    pub fn record(&mut self, record: &PackageRecord, snippets: usize) {
        self.total_packages += 1;
        if record.has_readme() {
            self.packages_with_readme += 1;
            if !record.readme_text.trim().is_empty() {
                self.packages_with_nonempty_readme += 1;
            }
        }
        if snippets > 0 {
            self.packages_with_snippets += 1;
            self.total_snippets += snippets as u64;
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.total_packages >= self.packages_with_readme
            && self.packages_with_readme >= self.packages_with_nonempty_readme
            && self.packages_with_nonempty_readme >= self.packages_with_snippets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn day_difference_floors_and_clamps() {
        let now = Timestamp(400 * 86_400 + 3_600);
        assert_eq!(Timestamp(0).days_until(now), 400);
        assert_eq!(now.days_until(now), 0);
        assert_eq!(Timestamp(now.0 + 10).days_until(now), 0);
        assert_eq!(Timestamp(now.0 - 86_399).days_until(now), 0);
    }

    #[test]
    fn stats_chain() {
        let mut stats = CorpusStats::default();
        stats.record(&PackageRecord::for_readme("a", "```js\nx\n```"), 1);
        stats.record(&PackageRecord::for_readme("b", ""), 0);
        let mut blank = PackageRecord::for_readme("c", "  \n");
        blank.readme_source = ReadmeSource::Registry;
        stats.record(&blank, 0);
        assert_eq!(
            stats,
            CorpusStats {
                total_packages: 3,
                packages_with_readme: 2,
                packages_with_nonempty_readme: 1,
                packages_with_snippets: 1,
                total_snippets: 1,
            }
        );
        assert!(stats.is_monotone());
    }
}
