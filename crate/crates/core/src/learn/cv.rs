use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    knn_predict, metrics, rf_fit, ClassWeights, Folds, Label, Metrics, PosteriorMatrix, RfParams,
    Standardizer,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierSpec {
    Knn { k: usize },
    RandomForest { n_estimators: usize, max_depth: usize },
}

impl ClassifierSpec {
    /// Smaller is preferred among equally scored grid points.
    fn complexity(&self) -> (usize, usize, usize) {
        match *self {
            ClassifierSpec::Knn { k } => (0, 0, k),
            ClassifierSpec::RandomForest { n_estimators, max_depth } => (n_estimators, max_depth, 0),
        }
    }
}

/// Estimators 50..=300 step 50 crossed with depth 6..=18 step 2.
pub fn default_rf_grid() -> Vec<ClassifierSpec> {
    let mut grid = Vec::new();
    for n_estimators in (50..=300).step_by(50) {
        for max_depth in (6..=18).step_by(2) {
            grid.push(ClassifierSpec::RandomForest { n_estimators, max_depth });
        }
    }
    grid
}

pub fn default_knn_grid() -> Vec<ClassifierSpec> {
    [3, 5, 8].into_iter().map(|k| ClassifierSpec::Knn { k }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldScore {
    pub fold: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub weighted_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub classifier: ClassifierSpec,
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<FoldScore>,
    pub mean_accuracy: f64,
    pub mean_weighted_f1: f64,
    /// Metrics of the pooled out-of-fold predictions.
    pub pooled: Metrics,
    #[serde(skip)]
    pub posteriors: PosteriorMatrix,
}

fn gather(x: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| x[i].clone()).collect()
}

fn fit_predict(
    train_x: &[Vec<f64>],
    train_y: &[Label],
    test_x: &[Vec<f64>],
    spec: &ClassifierSpec,
    seed: u64,
) -> Result<PosteriorMatrix> {
    let refs: Vec<&[f64]> = train_x.iter().map(|r| r.as_slice()).collect();
    let scaler = Standardizer::fit(&refs)?;
    let tx = train_x.iter().map(|r| scaler.transform(r)).collect::<Result<Vec<_>>>()?;
    let qx = test_x.iter().map(|r| scaler.transform(r)).collect::<Result<Vec<_>>>()?;
    let weights = ClassWeights::balanced(train_y);
    match *spec {
        ClassifierSpec::Knn { k } => knn_predict(&tx, train_y, &qx, k, &weights),
        ClassifierSpec::RandomForest { n_estimators, max_depth } => {
            rf_fit(&tx, train_y, &RfParams { n_estimators, max_depth, seed }, &weights)?.predict(&qx)
        }
    }
}

/// K-fold evaluation with per-fold standardisation and balanced class
/// weights fit on the training part only. Fold `i` seeds its forest with
/// `seed + i`.
pub fn cross_validate(
    x: &[Vec<f64>],
    y: &[Label],
    spec: &ClassifierSpec,
    folds: &Folds,
    seed: u64,
) -> Result<CvReport> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!("{} rows but {} labels", x.len(), y.len())));
    }
    let covered: usize = folds.test.iter().map(|f| f.len()).sum();
    if covered != x.len() || folds.test.iter().flatten().any(|&i| i >= x.len()) {
        return Err(Error::ShapeMismatch(format!(
            "folds cover {covered} indices for {} rows",
            x.len()
        )));
    }
    let mut posteriors = PosteriorMatrix { rows: vec![[0.0; 2]; x.len()] };
    let mut scores = Vec::with_capacity(folds.k());
    for (fi, test) in folds.test.iter().enumerate() {
        let train = folds.train(fi);
        let ty: Vec<Label> = train.iter().map(|&i| y[i]).collect();
        let p = fit_predict(&gather(x, &train), &ty, &gather(x, test), spec, seed.wrapping_add(fi as u64))?;
        let truth: Vec<Label> = test.iter().map(|&i| y[i]).collect();
        let m = metrics(&p.predictions(), &truth)?;
        for (row, &i) in p.rows.iter().zip(test) {
            posteriors.rows[i] = *row;
        }
        scores.push(FoldScore { fold: fi, n_test: test.len(), accuracy: m.accuracy, weighted_f1: m.weighted_f1 });
    }
    let k = scores.len() as f64;
    let pooled = metrics(&posteriors.predictions(), y)?;
    Ok(CvReport {
        classifier: *spec,
        k: folds.k(),
        seed,
        mean_accuracy: scores.iter().map(|s| s.accuracy).sum::<f64>() / k,
        mean_weighted_f1: scores.iter().map(|s| s.weighted_f1).sum::<f64>() / k,
        folds: scores,
        pooled,
        posteriors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub classifier: ClassifierSpec,
    pub mean_accuracy: Option<f64>,
    pub mean_weighted_f1: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub points: Vec<GridPoint>,
    pub best: CvReport,
}

/// Scores every grid point on the same folds and keeps the best mean
/// weighted F1; ties go to fewer estimators, then smaller depth, then
/// smaller K. Failed points are reported, not dropped.
pub fn grid_search(
    x: &[Vec<f64>],
    y: &[Label],
    grid: &[ClassifierSpec],
    folds: &Folds,
    seed: u64,
) -> Result<GridReport> {
    if grid.is_empty() {
        return Err(Error::Learn("empty hyper-parameter grid".into()));
    }
    let results: Vec<Result<CvReport>> =
        grid.par_iter().map(|spec| cross_validate(x, y, spec, folds, seed)).collect();
    let points = grid
        .iter()
        .zip(&results)
        .map(|(spec, r)| match r {
            Ok(rep) => GridPoint {
                classifier: *spec,
                mean_accuracy: Some(rep.mean_accuracy),
                mean_weighted_f1: Some(rep.mean_weighted_f1),
                error: None,
            },
            Err(e) => GridPoint {
                classifier: *spec,
                mean_accuracy: None,
                mean_weighted_f1: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let best = results
        .into_iter()
        .filter_map(|r| r.ok())
        .min_by(|a, b| {
            b.mean_weighted_f1
                .total_cmp(&a.mean_weighted_f1)
                .then_with(|| a.classifier.complexity().cmp(&b.classifier.complexity()))
        });
    match best {
        Some(best) => Ok(GridReport { points, best }),
        None => {
            let first = points.iter().find_map(|p| p.error.as_deref()).unwrap_or("unknown");
            Err(Error::Learn(format!("every grid point failed; first error: {first}")))
        }
    }
}
