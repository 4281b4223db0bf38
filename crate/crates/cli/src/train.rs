use holoeeg::learn::{grid_search, stratified_kfold, write_posterior_csv, GridPoint, Label};
use holoeeg::pipeline::{majority_baseline, FeatureMatrix};
use serde::Serialize;

use crate::config::{set_of, Run};
use crate::output::{
    align_labels, features_dir, posteriors_dir, read_labels, reports_dir, stored_hash, write_file,
    write_json, LABELS_FILE,
};
use crate::{reference, DatasetKind, Failure, Reference};

#[derive(Serialize)]
struct LabelCounts {
    high: usize,
    low: usize,
}

#[derive(Serialize)]
struct Report<'a> {
    feature_set: &'a str,
    config_hash: &'a str,
    dimension: &'a str,
    n_trials: usize,
    dim: usize,
    seed: u64,
    folds: usize,
    label_counts: LabelCounts,
    majority_baseline: f64,
    grid: &'a [GridPoint],
    best: &'a holoeeg::learn::CvReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<Reference>,
}

pub fn run(run: &Run, kind: DatasetKind) -> Result<(), Failure> {
    let cfg = &run.config;
    let out = run.output_dir();
    let labels = read_labels(&out.join(LABELS_FILE), &cfg.labels)?;
    let names = if cfg.train.sets.is_empty() { cfg.matrix_names() } else { cfg.train.sets.clone() };
    for name in &names {
        let set = set_of(name).ok_or_else(|| Failure::validation(format!("unknown feature set {name:?}")))?;
        let path = features_dir(&out).join(format!("{name}.csv"));
        if !path.exists() {
            return Err(Failure::validation(format!("{} not found; run `extract` first", path.display())));
        }
        if let Some(h) = stored_hash(&path).filter(|h| *h != run.hash) {
            eprintln!("train-eval: note: {name} was extracted under config hash {h}");
        }
        let m = FeatureMatrix::read_csv(&path, set)?;
        let y = align_labels(&m.trial_ids, &labels, name)?;
        let folds = stratified_kfold(&y, cfg.train.folds, cfg.seed)?;
        let grid = grid_search(&m.rows, &y, &cfg.train.grid, &folds, cfg.seed)?;
        let high = y.iter().filter(|l| **l == Label::High).count();
        let report = Report {
            feature_set: name,
            config_hash: &run.hash,
            dimension: cfg.labels.dimension.name(),
            n_trials: m.n_rows(),
            dim: m.dim(),
            seed: cfg.seed,
            folds: cfg.train.folds,
            label_counts: LabelCounts { high, low: y.len() - high },
            majority_baseline: majority_baseline(&y),
            grid: &grid.points,
            best: &grid.best,
            reference: reference(kind, cfg.labels.dimension),
        };
        write_json(&reports_dir(&out).join(format!("{name}.json")), &report)?;
        let mut csv = Vec::new();
        write_posterior_csv(&mut csv, &m.trial_ids, &grid.best.posteriors, Some(&run.hash))?;
        write_file(&posteriors_dir(&out).join(format!("{name}.csv")), &csv)?;
        eprintln!(
            "train-eval: {name}: best {} CA {:.4} weighted F1 {:.4} (baseline {:.4})",
            serde_json::to_string(&grid.best.classifier).unwrap_or_default(),
            grid.best.mean_accuracy,
            grid.best.mean_weighted_f1,
            report.majority_baseline
        );
    }
    Ok(())
}
