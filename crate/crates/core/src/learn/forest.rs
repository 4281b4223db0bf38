use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClassWeights, Label, PosteriorMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RfParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    /// Class-weighted `[p_low, p_high]` of the training samples reaching it.
    Leaf([f64; 2]),
}

#[derive(Debug, Clone, PartialEq)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn leaf(&self, x: &[f64]) -> [f64; 2] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(p) => return *p,
                Node::Split { feature, threshold, left, right } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<Tree>,
    n_features: usize,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [Label],
    max_depth: usize,
    max_features: usize,
    nodes: Vec<Node>,
    rng: ChaCha8Rng,
}

/// Sample index with its bootstrap multiplicity times its class weight.
type Weighted = (usize, f64);

fn class_mass(y: &[Label], samples: &[Weighted]) -> [f64; 2] {
    let mut m = [0.0; 2];
    for &(i, w) in samples {
        m[y[i].index()] += w;
    }
    m
}

/// Sum of squared class masses over total mass; larger is purer.
fn purity(m: [f64; 2]) -> f64 {
    let t = m[0] + m[1];
    if t > 0.0 {
        (m[0] * m[0] + m[1] * m[1]) / t
    } else {
        0.0
    }
}

impl Builder<'_> {
    fn grow(&mut self, samples: Vec<Weighted>, depth: usize) -> usize {
        let mass = class_mass(self.y, &samples);
        let id = self.nodes.len();
        let total = mass[0] + mass[1];
        let leaf = if total > 0.0 { [mass[0] / total, mass[1] / total] } else { [0.5, 0.5] };
        self.nodes.push(Node::Leaf(leaf));
        if depth >= self.max_depth || samples.len() < 2 || mass[0] == 0.0 || mass[1] == 0.0 {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&samples, mass) else {
            return id;
        };
        let (l, r): (Vec<Weighted>, Vec<Weighted>) =
            samples.into_iter().partition(|&(i, _)| self.x[i][feature] <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }

    /// Visits features in random order; stops once `max_features` features
    /// with at least two distinct values have been scored.
    fn best_split(&mut self, samples: &[Weighted], mass: [f64; 2]) -> Option<(usize, f64)> {
        let d = self.x[0].len();
        let mut order: Vec<usize> = (0..d).collect();
        order.shuffle(&mut self.rng);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut scored = 0;
        let mut sorted: Vec<(f64, Label, f64)> = Vec::with_capacity(samples.len());
        for f in order {
            if scored >= self.max_features {
                break;
            }
            sorted.clear();
            sorted.extend(samples.iter().map(|&(i, w)| (self.x[i][f], self.y[i], w)));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            if sorted[0].0 == sorted[sorted.len() - 1].0 {
                continue;
            }
            scored += 1;
            let mut left = [0.0; 2];
            for j in 0..sorted.len() - 1 {
                left[sorted[j].1.index()] += sorted[j].2;
                if sorted[j].0 == sorted[j + 1].0 {
                    continue;
                }
                let right = [mass[0] - left[0], mass[1] - left[1]];
                let score = purity(left) + purity(right);
                if best.is_none_or(|(s, _, _)| score > s) {
                    let (a, b) = (sorted[j].0, sorted[j + 1].0);
                    let mid = a + (b - a) / 2.0;
                    let threshold = if mid < b { mid } else { a };
                    best = Some((score, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

fn fit_tree(
    x: &[Vec<f64>],
    y: &[Label],
    weights: &ClassWeights,
    params: &RfParams,
    tree_index: u64,
) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(tree_index);
    let n = x.len();
    let mut counts = vec![0u32; n];
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    let samples: Vec<Weighted> = counts
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .map(|(i, c)| (i, f64::from(*c) * weights.of(y[i])))
        .collect();
    let d = x[0].len();
    let max_features = ((d as f64).sqrt() as usize).clamp(1, d);
    let mut b = Builder { x, y, max_depth: params.max_depth, max_features, nodes: Vec::new(), rng };
    b.grow(samples, 0);
    Tree { nodes: b.nodes }
}

/// Bagged CART trees with weighted Gini splits over √d candidate features.
/// Tree `t` draws from ChaCha8 stream `t` of `params.seed`, so the forest is
/// identical for any thread count.
pub fn rf_fit(
    x: &[Vec<f64>],
    y: &[Label],
    params: &RfParams,
    weights: &ClassWeights,
) -> Result<RandomForest> {
    if x.is_empty() {
        return Err(Error::Learn("empty training set".into()));
    }
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!("{} rows but {} labels", x.len(), y.len())));
    }
    if params.n_estimators == 0 || params.max_depth == 0 {
        return Err(Error::Learn(format!(
            "estimators ({}) and depth ({}) must be at least 1",
            params.n_estimators, params.max_depth
        )));
    }
    let d = x[0].len();
    if d == 0 {
        return Err(Error::Learn("no features".into()));
    }
    if let Some(bad) = x.iter().find(|r| r.len() != d) {
        return Err(Error::ShapeMismatch(format!("expected {d} features, got {}", bad.len())));
    }
    let trees = (0..params.n_estimators as u64)
        .into_par_iter()
        .map(|t| fit_tree(x, y, weights, params, t))
        .collect();
    Ok(RandomForest { trees, n_features: d })
}

impl RandomForest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Mean of per-tree leaf distributions.
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<PosteriorMatrix> {
        if let Some(bad) = x.iter().find(|r| r.len() != self.n_features) {
            return Err(Error::ShapeMismatch(format!(
                "model has {} features, input has {}",
                self.n_features,
                bad.len()
            )));
        }
        let t = self.trees.len() as f64;
        let rows = x
            .iter()
            .map(|row| {
                let mut acc = [0.0; 2];
                for tree in &self.trees {
                    let p = tree.leaf(row);
                    acc[0] += p[0];
                    acc[1] += p[1];
                }
                let (lo, hi) = (acc[0] / t, acc[1] / t);
                [lo / (lo + hi), hi / (lo + hi)]
            })
            .collect();
        Ok(PosteriorMatrix { rows })
    }
}
