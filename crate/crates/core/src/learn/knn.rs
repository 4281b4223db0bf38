use super::{ClassWeights, Label, PosteriorMatrix};
use crate::error::{Error, Result};

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean K-nearest-neighbour posteriors. Neighbours are ranked by
/// (distance, training index); each vote counts with its class weight.
pub fn knn_predict(
    train_x: &[Vec<f64>],
    train_y: &[Label],
    test_x: &[Vec<f64>],
    k: usize,
    weights: &ClassWeights,
) -> Result<PosteriorMatrix> {
    if train_x.len() != train_y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} training rows but {} labels",
            train_x.len(),
            train_y.len()
        )));
    }
    if k == 0 || k > train_x.len() {
        return Err(Error::Learn(format!("K = {k} but {} training rows", train_x.len())));
    }
    let d = train_x[0].len();
    if let Some(bad) = train_x.iter().chain(test_x).find(|r| r.len() != d) {
        return Err(Error::ShapeMismatch(format!("expected {d} features, got {}", bad.len())));
    }
    let mut ranked: Vec<(f64, usize)> = Vec::with_capacity(train_x.len());
    let rows = test_x
        .iter()
        .map(|q| {
            ranked.clear();
            ranked.extend(train_x.iter().enumerate().map(|(i, t)| (sq_dist(q, t), i)));
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < ranked.len() {
                ranked.select_nth_unstable_by(k - 1, cmp);
            }
            let high = ranked[..k].iter().filter(|(_, i)| train_y[*i] == Label::High).count();
            let votes = [(k - high) as f64 * weights.low, high as f64 * weights.high];
            let total = votes[0] + votes[1];
            if total > 0.0 {
                [votes[0] / total, votes[1] / total]
            } else {
                [0.5, 0.5]
            }
        })
        .collect();
    Ok(PosteriorMatrix { rows })
}
