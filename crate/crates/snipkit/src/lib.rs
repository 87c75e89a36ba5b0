//! Corpus mining, search, snippet correction and the interactive REPL.

pub mod cli;
pub mod corpus;
pub mod db;
pub mod labels;
pub mod model;
pub mod pm;
pub mod repl;
pub mod report;
pub mod sandbox;
