use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::FEATURE_COUNT;
use super::Hyperparams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: u8, threshold: f64, left: u32, right: u32 },
    Leaf { positive_fraction: f64 },
}

/// Flat node array; the root is node 0 and children always follow parents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn leaf_fraction(&self, x: &[f64; FEATURE_COUNT]) -> f64 {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                Node::Leaf { positive_fraction } => return positive_fraction,
                Node::Split { feature, threshold, left, right } => {
                    at = if x[feature as usize] <= threshold { left } else { right } as usize;
                }
            }
        }
    }

    /// Edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, left as usize).max(walk(nodes, right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

type Row = ([f64; FEATURE_COUNT], bool);

fn gini(positives: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = positives as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

struct Grower<'a> {
    rows: &'a [Row],
    hp: &'a Hyperparams,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn best_split(&self, sample: &mut [usize], features: &[usize]) -> Option<SplitChoice> {
        let n = sample.len();
        let min_leaf = self.hp.min_leaf as usize;
        let total_pos = sample.iter().filter(|&&i| self.rows[i].1).count();
        let mut best: Option<SplitChoice> = None;
        for &feature in features {
            sample.sort_by(|&a, &b| self.rows[a].0[feature].total_cmp(&self.rows[b].0[feature]));
            let mut left_pos = 0;
            for k in 1..n {
                if self.rows[sample[k - 1]].1 {
                    left_pos += 1;
                }
                let lo = self.rows[sample[k - 1]].0[feature];
                let hi = self.rows[sample[k]].0[feature];
                if lo == hi || k < min_leaf || n - k < min_leaf {
                    continue;
                }
                let impurity = (k as f64 * gini(left_pos, k)
                    + (n - k) as f64 * gini(total_pos - left_pos, n - k))
                    / n as f64;
                if best.as_ref().map_or(true, |b| impurity < b.impurity) {
                    best = Some(SplitChoice { feature, threshold: lo + (hi - lo) / 2.0, impurity });
                }
            }
        }
        best
    }

    fn grow(&mut self, sample: &mut [usize], depth: u32, rng: &mut ChaCha8Rng) -> u32 {
        let id = self.nodes.len() as u32;
        let positives = sample.iter().filter(|&&i| self.rows[i].1).count();
        let fraction = positives as f64 / sample.len() as f64;
        self.nodes.push(Node::Leaf { positive_fraction: fraction });

        let pure = positives == 0 || positives == sample.len();
        if pure || depth >= self.hp.max_depth || sample.len() < 2 * self.hp.min_leaf as usize {
            return id;
        }

        let mut candidates: [usize; FEATURE_COUNT] = core::array::from_fn(|i| i);
        let k = self.hp.feature_subset as usize;
        for i in 0..k {
            let j = rng.gen_range(i..FEATURE_COUNT);
            candidates.swap(i, j);
        }
        let Some(choice) = self.best_split(sample, &candidates[..k]) else { return id };
        if choice.impurity >= gini(positives, sample.len()) {
            return id;
        }

        let feature = choice.feature;
        sample.sort_by(|&a, &b| self.rows[a].0[feature].total_cmp(&self.rows[b].0[feature]));
        let cut = sample.partition_point(|&i| self.rows[i].0[feature] <= choice.threshold);
        let (left_rows, right_rows) = sample.split_at_mut(cut);
        let left = self.grow(left_rows, depth + 1, rng);
        let right = self.grow(right_rows, depth + 1, rng);
        self.nodes[id as usize] =
            Node::Split { feature: feature as u8, threshold: choice.threshold, left, right };
        id
    }
}

/// Grows one tree on a bootstrap resample of `rows`.
pub(super) fn grow(rows: &[Row], hp: &Hyperparams, rng: &mut ChaCha8Rng) -> DecisionTree {
    let mut sample: Vec<usize> = (0..rows.len()).map(|_| rng.gen_range(0..rows.len())).collect();
    let mut grower = Grower { rows, hp, nodes: Vec::new() };
    grower.grow(&mut sample, 0, rng);
    DecisionTree { nodes: grower.nodes }
}
