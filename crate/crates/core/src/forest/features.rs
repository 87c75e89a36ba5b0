use serde::{Deserialize, Serialize};

use crate::record::{PackageRecord, Timestamp};

pub const FEATURE_COUNT: usize = 8;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "has_license",
    "has_readme",
    "readme_lines",
    "readme_code_blocks",
    "js_snippet_count",
    "has_run_example",
    "has_install_example",
    "days_since_update",
];

/// Tag stored in every model; a model is only applied to vectors built with
/// the same feature order.
pub const FEATURE_SCHEMA: &str = "runnability-v1:has_license,has_readme,readme_lines,\
readme_code_blocks,js_snippet_count,has_run_example,has_install_example,days_since_update";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureVector {
    pub has_license: u64,
    pub has_readme: u64,
    pub readme_lines: u64,
    pub readme_code_blocks: u64,
    pub js_snippet_count: u64,
    pub has_run_example: u64,
    pub has_install_example: u64,
    pub days_since_update: u64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.has_license as f64,
            self.has_readme as f64,
            self.readme_lines as f64,
            self.readme_code_blocks as f64,
            self.js_snippet_count as f64,
            self.has_run_example as f64,
            self.has_install_example as f64,
            self.days_since_update as f64,
        ]
    }
}

pub fn featurize(record: &PackageRecord, now: Timestamp) -> FeatureVector {
    let has_readme = record.has_readme();
    let readme = |v: u64| if has_readme { v } else { 0 };
    FeatureVector {
        has_license: u64::from(record.has_license),
        has_readme: u64::from(has_readme),
        readme_lines: readme(u64::from(record.stats.line_count)),
        readme_code_blocks: readme(u64::from(record.stats.code_block_count)),
        js_snippet_count: readme(u64::from(record.stats.js_snippet_count)),
        has_run_example: readme(u64::from(record.stats.has_run_example)),
        has_install_example: readme(u64::from(record.stats.has_install_example)),
        days_since_update: record.last_modified.days_until(now),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::readme::compute_readme_stats;
    use crate::record::ReadmeSource;
    use alloc::string::String;

    #[test]
    fn hand_counted_record() {
        // 120 lines: an install heading, three fences (two js, one sh).
        let mut readme = String::from("# demo\n## Installation\n```sh\nsetup\n```\n```js\na()\n```\n```js\nb()\n```\n");
        while readme.lines().count() < 120 {
            readme.push_str("text\n");
        }
        let now = Timestamp(1_700_000_000);
        let mut record = PackageRecord::for_readme("demo", &readme);
        record.has_license = true;
        record.last_modified = Timestamp(now.0 - 400 * 86_400 - 5);
        record.stats = compute_readme_stats(&readme);
        let fv = featurize(&record, now);
        assert_eq!(fv.to_array(), [1.0, 1.0, 120.0, 3.0, 2.0, 0.0, 1.0, 400.0]);
    }

    #[test]
    fn missing_readme_zeroes_readme_features() {
        let mut record = PackageRecord::for_readme("demo", "## Usage\n```js\nx\n```");
        record.readme_source = ReadmeSource::None;
        record.has_license = true;
        let fv = featurize(&record, Timestamp(86_400 * 3));
        assert_eq!(fv.to_array(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0]);
    }

    #[test]
    fn updated_now() {
        let mut record = PackageRecord::for_readme("demo", "");
        record.last_modified = Timestamp(1_000);
        assert_eq!(featurize(&record, Timestamp(1_000)).days_since_update, 0);
    }
}
