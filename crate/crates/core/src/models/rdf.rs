//! Random regression forest: bootstrap samples, random feature subsets per
//! split, variance-reduction splits.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ModelError;
use crate::dramsim::splitmix64;

#[derive(Debug, Clone, PartialEq)]
pub struct RdfParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub bootstrap: bool,
    /// Features tried per split; `None` means round(√d).
    pub max_features: Option<usize>,
    pub seed: u64,
}

impl Default for RdfParams {
    fn default() -> Self {
        RdfParams { n_trees: 100, max_depth: None, min_leaf: 2, bootstrap: true, max_features: None, seed: 1 }
    }
}

/// Flattened node: a leaf when `feature == LEAF`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub feature: u32,
    /// Split threshold (`x <= value` goes left) or leaf mean.
    pub value: f64,
    pub left: u32,
    pub right: u32,
}

pub const LEAF: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0usize;
        loop {
            let n = &self.nodes[i];
            if n.feature == LEAF {
                return n.value;
            }
            i = if x[n.feature as usize] <= n.value { n.left } else { n.right } as usize;
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            let n = &t.nodes[i];
            if n.feature == LEAF {
                0
            } else {
                1 + go(t, n.left as usize).max(go(t, n.right as usize))
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    pub fn fit(x: &[Vec<f64>], y: &[f64], p: &RdfParams) -> Result<Forest, ModelError> {
        let n = x.len();
        if n == 0 {
            return Err(ModelError::EmptyDataset);
        }
        if y.len() != n {
            return Err(ModelError::Schema(format!("{n} points but {} targets", y.len())));
        }
        if p.n_trees == 0 {
            return Err(ModelError::Invalid("n_trees must be at least 1".into()));
        }
        if p.min_leaf == 0 {
            return Err(ModelError::Invalid("min_leaf must be at least 1".into()));
        }
        let d = x[0].len();
        let m = p.max_features.unwrap_or(((d as f64).sqrt().round() as usize).max(1)).clamp(1, d.max(1));
        let mut state = p.seed;
        let trees = (0..p.n_trees)
            .map(|_| {
                let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(&mut state));
                let idx: Vec<usize> =
                    if p.bootstrap { (0..n).map(|_| rng.random_range(0..n)).collect() } else { (0..n).collect() };
                let mut g = Grower { x, y, p, m, d, rng, nodes: Vec::new() };
                g.grow(idx, 0);
                Tree { nodes: g.nodes }
            })
            .collect();
        Ok(Forest { trees })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}

struct Grower<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    p: &'a RdfParams,
    m: usize,
    d: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Grower<'_> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        let mean = idx.iter().map(|&i| self.y[i]).sum::<f64>() / idx.len() as f64;
        self.nodes.push(Node { feature: LEAF, value: mean, left: 0, right: 0 });

        let pure = idx.iter().all(|&i| self.y[i] == self.y[idx[0]]);
        let deep = self.p.max_depth.is_some_and(|md| depth >= md);
        if pure || deep || idx.len() < 2 * self.p.min_leaf {
            return id;
        }
        let Some(split) = self.best_split(&idx) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][split.feature] <= split.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id as usize] = Node { feature: split.feature as u32, value: split.threshold, left, right };
        id
    }

    /// Tries features in random order; stops once `m` have been examined and
    /// some valid split exists.
    fn best_split(&mut self, idx: &[usize]) -> Option<Split> {
        let mut order: Vec<usize> = (0..self.d).collect();
        order.shuffle(&mut self.rng);
        let n = idx.len();
        let total: f64 = idx.iter().map(|&i| self.y[i]).sum();
        let parent = total * total / n as f64;
        let sse = idx.iter().map(|&i| self.y[i] * self.y[i]).sum::<f64>() - parent;
        let min_leaf = self.p.min_leaf;
        let mut best: Option<Split> = None;
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
        for (tried, &f) in order.iter().enumerate() {
            if tried >= self.m && best.is_some() {
                break;
            }
            pairs.clear();
            pairs.extend(idx.iter().map(|&i| (self.x[i][f], self.y[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_sum = 0.0;
            for j in 0..n - 1 {
                left_sum += pairs[j].1;
                let nl = j + 1;
                if pairs[j].0 == pairs[j + 1].0 || nl < min_leaf || n - nl < min_leaf {
                    continue;
                }
                let right_sum = total - left_sum;
                let score = left_sum * left_sum / nl as f64 + right_sum * right_sum / (n - nl) as f64 - parent;
                if score > 1e-12 * sse && best.as_ref().is_none_or(|b| score > b.score) {
                    best = Some(Split { feature: f, threshold: pairs[j].0, score });
                }
            }
        }
        best
    }
}
