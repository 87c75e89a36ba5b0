//! Keyword search over package descriptions and keywords.

mod index;
mod porter;
mod stopwords;

pub use index::{
    query_packages, tokenize, InvertedIndex, RankedResult, RankingInputs, RankingMode,
    SearchError, TokenSet,
};
pub use porter::porter_stem;
pub use stopwords::{is_stop_word, STOP_WORDS};
