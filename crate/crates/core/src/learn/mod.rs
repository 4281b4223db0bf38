//! Binary classification harness: stratified folds, class weights, KNN and
//! random forests, cross-validation, grid search, posterior fusion and metrics.

mod cv;
mod folds;
mod forest;
mod io;
mod knn;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cv::{
    cross_validate, default_knn_grid, default_rf_grid, grid_search, ClassifierSpec, CvReport,
    FoldScore, GridPoint, GridReport,
};
pub use folds::{stratified_kfold, Folds};
pub use forest::{rf_fit, RandomForest, RfParams};
pub use io::{read_posterior_csv, write_posterior_csv};
pub use knn::knn_predict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Low = 0,
    High = 1,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Low, Label::High];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Low => "low",
            Label::High => "high",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "low" => Some(Label::Low),
            "high" => Some(Label::High),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    pub low: f64,
    pub high: f64,
}

impl ClassWeights {
    pub fn uniform() -> Self {
        ClassWeights { low: 1.0, high: 1.0 }
    }

    /// `n / (2 * n_c)` per class; a class absent from `labels` gets weight 0.
    pub fn balanced(labels: &[Label]) -> Self {
        let n = labels.len() as f64;
        let high = labels.iter().filter(|l| **l == Label::High).count() as f64;
        let low = n - high;
        let w = |c: f64| if c > 0.0 { n / (2.0 * c) } else { 0.0 };
        ClassWeights { low: w(low), high: w(high) }
    }

    pub fn of(&self, label: Label) -> f64 {
        match label {
            Label::Low => self.low,
            Label::High => self.high,
        }
    }
}

/// Per-column z-scoring fit on training rows. Zero-variance columns are
/// centred but not scaled.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[&[f64]]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::Learn("cannot standardise zero rows".into()))?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            check_width(r, d)?;
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; d];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var.into_iter().map(|s| {
            let sd = (s / n).sqrt();
            if sd > 0.0 { sd } else { 1.0 }
        });
        Ok(Standardizer { mean, scale: scale.collect() })
    }

    pub fn transform(&self, row: &[f64]) -> Result<Vec<f64>> {
        check_width(row, self.mean.len())?;
        Ok(row.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) / s).collect())
    }
}

fn check_width(row: &[f64], d: usize) -> Result<()> {
    if row.len() != d {
        return Err(Error::ShapeMismatch(format!("expected {d} features, got {}", row.len())));
    }
    Ok(())
}

/// Rows of `[p_low, p_high]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PosteriorMatrix {
    pub rows: Vec<[f64; 2]>,
}

impl PosteriorMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn p_high(&self, i: usize) -> f64 {
        self.rows[i][1]
    }

    /// Argmax per row; ties go to high.
    pub fn predictions(&self) -> Vec<Label> {
        self.rows.iter().map(|r| if r[1] >= r[0] { Label::High } else { Label::Low }).collect()
    }
}

/// Weighted mean of posterior matrices, renormalised per row.
pub fn late_fusion(inputs: &[PosteriorMatrix], weights: Option<&[f64]>) -> Result<PosteriorMatrix> {
    let first = inputs.first().ok_or_else(|| Error::Learn("nothing to fuse".into()))?;
    let n = first.len();
    if let Some(bad) = inputs.iter().find(|p| p.len() != n) {
        return Err(Error::ShapeMismatch(format!(
            "posterior matrices have {n} and {} rows",
            bad.len()
        )));
    }
    let uniform = vec![1.0; inputs.len()];
    let w = weights.unwrap_or(&uniform);
    if w.len() != inputs.len() || w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Learn(format!(
            "need {} finite non-negative fusion weights",
            inputs.len()
        )));
    }
    let rows = (0..n)
        .map(|i| {
            let mut acc = [0.0; 2];
            for (p, wk) in inputs.iter().zip(w) {
                acc[0] += wk * p.rows[i][0];
                acc[1] += wk * p.rows[i][1];
            }
            let total = acc[0] + acc[1];
            if total > 0.0 {
                [acc[0] / total, acc[1] / total]
            } else {
                [0.5, 0.5]
            }
        })
        .collect();
    Ok(PosteriorMatrix { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub weighted_f1: f64,
    pub accuracy: f64,
}

/// Support-weighted F1 over both classes, and accuracy. A class with no
/// predictions and no support contributes F1 = 0 with weight 0.
pub fn metrics(predicted: &[Label], truth: &[Label]) -> Result<Metrics> {
    if predicted.is_empty() || predicted.len() != truth.len() {
        return Err(Error::Learn(format!(
            "metrics need equal non-empty inputs, got {} and {}",
            predicted.len(),
            truth.len()
        )));
    }
    let n = truth.len() as f64;
    let mut f1 = 0.0;
    for c in Label::ALL {
        let tp = predicted.iter().zip(truth).filter(|(p, t)| **p == c && **t == c).count() as f64;
        let fp = predicted.iter().zip(truth).filter(|(p, t)| **p == c && **t != c).count() as f64;
        let fneg = predicted.iter().zip(truth).filter(|(p, t)| **p != c && **t == c).count() as f64;
        let support = tp + fneg;
        let denom = 2.0 * tp + fp + fneg;
        let f1_c = if denom > 0.0 { 2.0 * tp / denom } else { 0.0 };
        f1 += support / n * f1_c;
    }
    let correct = predicted.iter().zip(truth).filter(|(p, t)| p == t).count() as f64;
    Ok(Metrics { weighted_f1: f1, accuracy: correct / n })
}
