use std::path::{Path, PathBuf};

use holoeeg::learn::{late_fusion, metrics, read_posterior_csv, write_posterior_csv, Metrics, PosteriorMatrix};
use serde::Serialize;

use crate::config::Run;
use crate::output::{align_labels, posteriors_dir, read_labels, write_file, write_json, LABELS_FILE};
use crate::{reference, DatasetKind, Failure, Reference};

#[derive(Serialize)]
struct Input {
    source: String,
    metrics: Metrics,
}

#[derive(Serialize)]
struct Report {
    config_hash: String,
    dimension: &'static str,
    n_trials: usize,
    inputs: Vec<Input>,
    weights: Vec<f64>,
    fused: Metrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<Reference>,
}

/// Reorders every input to the trial order of the first; any id not shared
/// by all inputs is an error.
fn align(inputs: Vec<(String, Vec<String>, PosteriorMatrix)>) -> Result<(Vec<String>, Vec<PosteriorMatrix>), Failure> {
    let ids = inputs[0].1.clone();
    let mut problems = Vec::new();
    for (src, other, _) in &inputs[1..] {
        let lacks: Vec<&str> = ids.iter().filter(|i| !other.contains(i)).map(String::as_str).collect();
        let extra: Vec<&str> = other.iter().filter(|i| !ids.contains(i)).map(String::as_str).collect();
        if !lacks.is_empty() {
            problems.push(format!("{src} lacks {}", lacks.join(", ")));
        }
        if !extra.is_empty() {
            problems.push(format!("{src} has extra {}", extra.join(", ")));
        }
        if other.len() != ids.len() && lacks.is_empty() && extra.is_empty() {
            problems.push(format!("{src} repeats trial ids"));
        }
    }
    if !problems.is_empty() {
        return Err(Failure::validation(format!(
            "trial ids differ from {}: {}",
            inputs[0].0,
            problems.join("; ")
        )));
    }
    let mats = inputs
        .into_iter()
        .map(|(_, other, pm)| {
            let rows = ids.iter().map(|i| pm.rows[other.iter().position(|o| o == i).unwrap()]).collect();
            PosteriorMatrix { rows }
        })
        .collect();
    Ok((ids, mats))
}

pub fn run(run: &Run, files: &[PathBuf], weights: Option<Vec<f64>>, kind: DatasetKind) -> Result<(), Failure> {
    let cfg = &run.config;
    let out = run.output_dir();
    let sources: Vec<(String, PathBuf)> = if files.is_empty() {
        let names = if cfg.fuse.inputs.is_empty() { cfg.matrix_names() } else { cfg.fuse.inputs.clone() };
        names
            .iter()
            .map(|n| (format!("posteriors/{n}.csv"), posteriors_dir(&out).join(format!("{n}.csv"))))
            .collect()
    } else {
        files.iter().map(|p| (p.display().to_string(), p.clone())).collect()
    };
    if sources.len() < 2 {
        return Err(Failure::validation(format!("fuse needs at least 2 posterior files, got {}", sources.len())));
    }
    let inputs = sources
        .iter()
        .map(|(src, p)| {
            let (ids, pm) = read_posterior_csv(Path::new(p))?;
            Ok((src.clone(), ids, pm))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let (ids, mats) = align(inputs)?;
    let weights = weights.or_else(|| cfg.fuse.weights.clone()).unwrap_or_else(|| vec![1.0; mats.len()]);
    let fused = late_fusion(&mats, Some(&weights))?;
    let labels = read_labels(&out.join(LABELS_FILE), &cfg.labels)?;
    let y = align_labels(&ids, &labels, "fuse")?;
    let inputs = sources
        .iter()
        .zip(&mats)
        .map(|((src, _), pm)| Ok(Input { source: src.clone(), metrics: metrics(&pm.predictions(), &y)? }))
        .collect::<Result<Vec<_>, Failure>>()?;
    let report = Report {
        config_hash: run.hash.clone(),
        dimension: cfg.labels.dimension.name(),
        n_trials: ids.len(),
        inputs,
        weights,
        fused: metrics(&fused.predictions(), &y)?,
        reference: reference(kind, cfg.labels.dimension),
    };
    let mut csv = Vec::new();
    write_posterior_csv(&mut csv, &ids, &fused, Some(&run.hash))?;
    write_file(&out.join("fused").join("posteriors.csv"), &csv)?;
    write_json(&out.join("fused").join("report.json"), &report)?;
    eprintln!(
        "fuse: {} inputs, fused CA {:.4} weighted F1 {:.4}",
        report.inputs.len(),
        report.fused.accuracy,
        report.fused.weighted_f1
    );
    Ok(())
}
