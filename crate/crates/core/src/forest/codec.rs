//! Versioned little-endian binary model format.
//!
//! ```text
//! magic "SKRF" | version u16 | schema (u16 len + utf8)
//! tree_count u32 | max_depth u32 | min_leaf u32 | feature_subset u32 | seed u64 | allow_single_class u8
//! trees u32, then per tree: nodes u32, then per node
//!   0 | positive_fraction f64
//!   1 | feature u8 | threshold f64 | left u32 | right u32
//! ```

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::features::FEATURE_COUNT;
use super::{DecisionTree, Hyperparams, ModelError, Node, RunnabilityModel};

pub const MODEL_MAGIC: &[u8; 4] = b"SKRF";
pub const MODEL_VERSION: u16 = 1;

pub(super) fn encode(model: &RunnabilityModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(model.schema.len() as u16).to_le_bytes());
    out.extend_from_slice(model.schema.as_bytes());
    let hp = &model.hyperparams;
    for v in [hp.tree_count, hp.max_depth, hp.min_leaf, hp.feature_subset] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&hp.seed.to_le_bytes());
    out.push(u8::from(hp.allow_single_class));
    out.extend_from_slice(&(model.trees.len() as u32).to_le_bytes());
    for tree in &model.trees {
        out.extend_from_slice(&(tree.nodes.len() as u32).to_le_bytes());
        for node in &tree.nodes {
            match *node {
                Node::Leaf { positive_fraction } => {
                    out.push(0);
                    out.extend_from_slice(&positive_fraction.to_le_bytes());
                }
                Node::Split { feature, threshold, left, right } => {
                    out.push(1);
                    out.push(feature);
                    out.extend_from_slice(&threshold.to_le_bytes());
                    out.extend_from_slice(&left.to_le_bytes());
                    out.extend_from_slice(&right.to_le_bytes());
                }
            }
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], ModelError> {
        let end = self.at + N;
        let slice = self
            .bytes
            .get(self.at..end)
            .ok_or_else(|| ModelError::Decode(format!("truncated at byte {}", self.at)))?;
        self.at = end;
        Ok(slice.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8, ModelError> {
        Ok(self.take::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16, ModelError> {
        self.take().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32, ModelError> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, ModelError> {
        self.take().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64, ModelError> {
        self.take().map(f64::from_le_bytes)
    }
}

fn bad(msg: &str) -> ModelError {
    ModelError::Decode(msg.to_string())
}

pub(super) fn decode(bytes: &[u8]) -> Result<RunnabilityModel, ModelError> {
    let mut r = Reader { bytes, at: 0 };
    if &r.take::<4>()? != MODEL_MAGIC {
        return Err(bad("not a runnability model"));
    }
    let version = r.u16()?;
    if version != MODEL_VERSION {
        return Err(ModelError::Decode(format!("unsupported model version {version}")));
    }
    let schema_len = r.u16()? as usize;
    let schema_bytes = bytes
        .get(r.at..r.at + schema_len)
        .ok_or_else(|| bad("truncated schema tag"))?;
    r.at += schema_len;
    let schema = String::from_utf8(schema_bytes.to_vec()).map_err(|_| bad("schema tag is not utf-8"))?;
    let hyperparams = Hyperparams {
        tree_count: r.u32()?,
        max_depth: r.u32()?,
        min_leaf: r.u32()?,
        feature_subset: r.u32()?,
        seed: r.u64()?,
        allow_single_class: r.u8()? != 0,
    };
    let tree_count = r.u32()?;
    let mut trees = Vec::new();
    for _ in 0..tree_count {
        let node_count = r.u32()?;
        if node_count == 0 {
            return Err(bad("empty tree"));
        }
        let mut nodes = Vec::new();
        for index in 0..node_count {
            let node = match r.u8()? {
                0 => {
                    let positive_fraction = r.f64()?;
                    if !(0.0..=1.0).contains(&positive_fraction) {
                        return Err(bad("leaf fraction outside [0, 1]"));
                    }
                    Node::Leaf { positive_fraction }
                }
                1 => {
                    let feature = r.u8()?;
                    let threshold = r.f64()?;
                    let (left, right) = (r.u32()?, r.u32()?);
                    if feature as usize >= FEATURE_COUNT || !threshold.is_finite() {
                        return Err(bad("invalid split"));
                    }
                    if left <= index || right <= index || left >= node_count || right >= node_count {
                        return Err(bad("child index out of order"));
                    }
                    Node::Split { feature, threshold, left, right }
                }
                _ => return Err(bad("unknown node tag")),
            };
            nodes.push(node);
        }
        let tree = DecisionTree { nodes };
        if tree.depth() > hyperparams.max_depth as usize {
            return Err(bad("tree deeper than max_depth"));
        }
        trees.push(tree);
    }
    if r.at != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    Ok(RunnabilityModel { schema, hyperparams, trees })
}
