use holoeeg::pipeline::{
    build_feature_sets_from, index_dataset, reduce_channels, ExtractionParams, FeatureMatrix,
    FeatureSetSpec, QualityFlag,
};
use serde::Serialize;

use crate::config::{Run, FRONTAL_SUFFIX};
use crate::output::{features_dir, stored_hash, write_file, write_json, write_labels, LabelRow, LABELS_FILE};
use crate::Failure;

#[derive(Serialize)]
struct Sidecar<'a> {
    name: &'a str,
    config_hash: &'a str,
    spec: FeatureSetSpec,
    channels: Vec<String>,
    dim: usize,
    n_trials: usize,
    extraction: &'a ExtractionParams,
    quality_flags: &'a [QualityFlag],
}

pub fn run(run: &Run) -> Result<(), Failure> {
    let cfg = &run.config;
    let data = run.dataset_dir();
    if !data.is_dir() {
        return Err(Failure::validation(format!("dataset directory {} does not exist", data.display())));
    }
    let entries = index_dataset(&data)?;
    let out = run.output_dir();
    let specs: Vec<_> = cfg.sets.iter().map(|s| cfg.spec_for(*s)).collect();
    eprintln!("extract: {} trials, sets {}", entries.len(), cfg.matrix_names().join(", "));
    let mut mats = build_feature_sets_from(entries.len(), |i| entries[i].load(), &specs, &cfg.extraction)?;
    let frontal: Vec<(String, FeatureMatrix)> = cfg
        .frontal_sets
        .iter()
        .map(|s| {
            let m = mats.iter().find(|m| m.set == *s).expect("frontal sets are extracted");
            Ok((format!("{}{FRONTAL_SUFFIX}", s.name()), reduce_channels(m, &cfg.frontal_channels)?))
        })
        .collect::<Result<_, Failure>>()?;
    let mut named: Vec<(String, FeatureMatrix)> =
        mats.drain(..).map(|m| (m.set.name().to_string(), m)).collect();
    named.extend(frontal);

    let dir = features_dir(&out);
    let sidecar0 = dir.join(format!("{}.json", named[0].0));
    if stored_hash(&sidecar0).as_deref() == Some(run.hash.as_str()) {
        eprintln!("extract: config hash {} matches the previous run", run.hash);
    }
    for (name, m) in &named {
        let mut csv = Vec::new();
        m.write_csv(&mut csv, Some(&run.hash))?;
        write_file(&dir.join(format!("{name}.csv")), &csv)?;
        let spec = cfg.spec_for(m.set);
        write_json(
            &dir.join(format!("{name}.json")),
            &Sidecar {
                name,
                config_hash: &run.hash,
                spec,
                channels: m.channels(),
                dim: m.dim(),
                n_trials: m.n_rows(),
                extraction: &cfg.extraction,
                quality_flags: &m.flags,
            },
        )?;
        let note = if m.flags.is_empty() { String::new() } else { format!(", {} quality flags", m.flags.len()) };
        eprintln!("extract: {name}: {} x {}{note}", m.n_rows(), m.dim());
    }
    let rows: Vec<LabelRow> =
        entries.iter().map(|e| LabelRow { trial_id: e.id(), ratings: e.ratings }).collect();
    write_labels(&out.join(LABELS_FILE), &rows, &cfg.labels, &run.hash)?;
    Ok(())
}
