//! Allocation-only building blocks for mining README code snippets, searching
//! a package corpus, ranking packages by predicted runnability and repairing
//! JavaScript snippets.
//!
//! Nothing in this crate touches the filesystem, processes or the clock; the
//! `snipkit` crate layers IO, the CLI and the REPL on top of it.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod extract;
pub mod forest;
pub mod js;
pub mod readme;
pub mod record;
pub mod search;

pub use extract::{
    classify_block, extract_fenced_blocks, extract_snippets, DropReason, Extraction, FencedBlock,
    Snippet,
};
pub use readme::{compute_readme_stats, ReadmeStats};
pub use record::{CorpusStats, PackageRecord, ReadmeSource, Timestamp};
