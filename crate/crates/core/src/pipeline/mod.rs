//! Dataset ingestion, labels, feature-set assembly, channel reduction,
//! IMF-count and feature-subset selection, and synthetic data.

mod dataset;
mod matrix;
mod select;
mod sets;
mod synth;

pub use dataset::{
    binarize, decode_trial, encode_trial, index_dataset, labels_for, load_dataset, trial_key, trial_path,
    write_trial, Dimension, LabelConfig, Ratings, Trial, TrialEntry, DEAP_CHANNELS, FORMAT_TAG,
    FRONTAL_CHANNELS, N_CHANNELS, SAMPLE_RATE, TRIAL_EXTENSION,
};
pub use matrix::{column_tag, parse_tag, reduce_channels, FeatureMatrix, QualityFlag};
pub use select::{
    cv_evaluator, greedy_forward, groups_by_feature, incremental_imf_eval, majority_baseline,
    subset_search, FeatureGroup, IncrementalReport, ScoredSubset, SubsetReport, DEFAULT_MARGIN,
    MAX_EXHAUSTIVE_GROUPS,
};
pub use sets::{
    build_feature_set, build_feature_sets, build_feature_sets_from, extract_trial,
    ExtractionParams, FeatureSetSpec, SetId,
};
pub use synth::{synth_dataset, synth_trial, SynthConfig};
