use holoeeg::pipeline::{synth_trial, trial_key, write_trial, SynthConfig, TRIAL_EXTENSION};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Run;
use crate::output::write_json;
use crate::Failure;

#[derive(Serialize)]
struct Manifest<'a> {
    config_hash: &'a str,
    n_trials: usize,
    synth: &'a SynthConfig,
}

pub fn run(run: &Run) -> Result<(), Failure> {
    let cfg = run.config.synth_config();
    cfg.validate()?;
    let dir = run.dataset_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Failure::runtime(format!("cannot create {}: {e}", dir.display())))?;
    let expected: Vec<String> = (0..cfg.len())
        .map(|i| {
            let (s, t) = cfg.ids(i);
            format!("{}.{TRIAL_EXTENSION}", trial_key(s, t))
        })
        .collect();
    let entries = std::fs::read_dir(&dir).map_err(|e| Failure::runtime(format!("{}: {e}", dir.display())))?;
    for e in entries.flatten() {
        let name = e.file_name().to_string_lossy().into_owned();
        if name.ends_with(&format!(".{TRIAL_EXTENSION}")) && !expected.contains(&name) {
            return Err(Failure::validation(format!(
                "{} already holds trial {name} that this config would not produce; use an empty directory",
                dir.display()
            )));
        }
    }
    (0..cfg.len()).into_par_iter().try_for_each(|i| {
        let (s, t) = cfg.ids(i);
        let trial = synth_trial(&cfg, s, t)?;
        write_trial(&dir, &trial)?;
        Ok::<(), Failure>(())
    })?;
    write_json(
        &dir.join("manifest.json"),
        &Manifest { config_hash: &run.hash, n_trials: cfg.len(), synth: &cfg },
    )?;
    eprintln!("synth: wrote {} trials to {}", cfg.len(), dir.display());
    Ok(())
}
