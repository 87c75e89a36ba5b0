//! Random-forest runnability model over eight README/metadata features.

mod codec;
mod features;
mod synthetic;
mod tree;

pub use codec::{MODEL_MAGIC, MODEL_VERSION};
pub use features::{featurize, FeatureVector, FEATURE_COUNT, FEATURE_NAMES, FEATURE_SCHEMA};
pub use synthetic::{synthetic_rule, synthetic_rule_examples};
pub use tree::{DecisionTree, Node};

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub tree_count: u32,
    pub max_depth: u32,
    pub min_leaf: u32,
    /// Features considered at each split.
    pub feature_subset: u32,
    pub seed: u64,
    /// Permit training when every example carries the same label.
    pub allow_single_class: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            tree_count: 100,
            max_depth: 8,
            min_leaf: 2,
            feature_subset: 3,
            seed: 42,
            allow_single_class: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: FeatureVector,
    /// Whether installing the package succeeded.
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set contains only {} examples", if *.0 { "positive" } else { "negative" })]
    SingleClass(bool),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(&'static str),
    #[error("feature schema mismatch: model has `{found}`, expected `{expected}`")]
    SchemaMismatch { expected: String, found: String },
    #[error("malformed model file: {0}")]
    Decode(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunnabilityModel {
    pub schema: String,
    pub hyperparams: Hyperparams,
    pub trees: Vec<DecisionTree>,
}

impl RunnabilityModel {
    pub fn check_schema(&self) -> Result<(), ModelError> {
        if self.schema == FEATURE_SCHEMA {
            Ok(())
        } else {
            Err(ModelError::SchemaMismatch {
                expected: FEATURE_SCHEMA.to_string(),
                found: self.schema.clone(),
            })
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        codec::encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        codec::decode(bytes)
    }
}

fn canonical_order(a: &LabeledExample, b: &LabeledExample) -> core::cmp::Ordering {
    let (fa, fb) = (a.features.to_array(), b.features.to_array());
    fa.iter()
        .zip(fb.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(core::cmp::Ordering::Equal)
        .then(a.label.cmp(&b.label))
}

/// Trains a bagged forest of Gini trees.
///
/// Examples are sorted canonically first, and tree `i` draws from ChaCha8
/// stream `i` of the seed, so the model depends only on the example multiset
/// and the hyperparameters.
pub fn train_forest(
    examples: &[LabeledExample],
    hyperparams: Hyperparams,
) -> Result<RunnabilityModel, ModelError> {
    if examples.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    if hyperparams.tree_count == 0 {
        return Err(ModelError::InvalidHyperparams("tree_count must be positive"));
    }
    if hyperparams.min_leaf == 0 {
        return Err(ModelError::InvalidHyperparams("min_leaf must be positive"));
    }
    if hyperparams.feature_subset == 0 || hyperparams.feature_subset as usize > FEATURE_COUNT {
        return Err(ModelError::InvalidHyperparams("feature_subset must be within 1..=8"));
    }
    let positives = examples.iter().filter(|e| e.label).count();
    if !hyperparams.allow_single_class && (positives == 0 || positives == examples.len()) {
        return Err(ModelError::SingleClass(positives > 0));
    }

    let mut sorted = examples.to_vec();
    sorted.sort_by(canonical_order);
    let rows: Vec<([f64; FEATURE_COUNT], bool)> =
        sorted.iter().map(|e| (e.features.to_array(), e.label)).collect();

    let trees = (0..hyperparams.tree_count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(hyperparams.seed);
            rng.set_stream(u64::from(i));
            tree::grow(&rows, &hyperparams, &mut rng)
        })
        .collect();
    Ok(RunnabilityModel { schema: FEATURE_SCHEMA.to_string(), hyperparams, trees })
}

/// Mean of the per-tree leaf fractions, always within `[0, 1]`.
pub fn predict(model: &RunnabilityModel, features: &FeatureVector) -> Result<f64, ModelError> {
    model.check_schema()?;
    if model.trees.is_empty() {
        return Err(ModelError::Decode("model has no trees".to_string()));
    }
    let x = features.to_array();
    let sum: f64 = model.trees.iter().map(|t| t.leaf_fraction(&x)).sum();
    Ok((sum / model.trees.len() as f64).clamp(0.0, 1.0))
}
