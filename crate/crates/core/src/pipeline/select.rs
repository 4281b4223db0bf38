//! IMF-count and feature-subset selection driven by a scoring callback.

use rayon::prelude::*;
use serde::Serialize;

use super::matrix::{parse_tag, FeatureMatrix};
use crate::error::{Error, Result};
use crate::learn::{cross_validate, stratified_kfold, ClassifierSpec, Label};

pub const MAX_EXHAUSTIVE_GROUPS: usize = 12;
pub const DEFAULT_MARGIN: f64 = 0.005;

/// Fraction of the most common label.
pub fn majority_baseline(labels: &[Label]) -> f64 {
    let high = labels.iter().filter(|l| **l == Label::High).count();
    high.max(labels.len() - high) as f64 / labels.len().max(1) as f64
}

/// Mean k-fold CV accuracy of `spec` on the given rows.
pub fn cv_evaluator(
    spec: ClassifierSpec,
    k: usize,
    seed: u64,
) -> impl Fn(&[Vec<f64>], &[Label]) -> Result<f64> + Sync {
    move |x, y| {
        let folds = stratified_kfold(y, k, seed)?;
        Ok(cross_validate(x, y, &spec, &folds, seed)?.mean_accuracy)
    }
}

fn imf_index(column: &str) -> Option<usize> {
    parse_tag(column)?.1.strip_prefix("imf")?.parse().ok()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementalReport {
    /// `scores[i]` belongs to IMFs 1..=i+1.
    pub scores: Vec<f64>,
    pub best_count: usize,
    pub baseline: f64,
}

/// Scores the IMF prefixes {1}, {1,2}, ... of a per-IMF matrix, up to the
/// highest IMF index among its columns.
pub fn incremental_imf_eval<E>(matrix: &FeatureMatrix, labels: &[Label], evaluator: E) -> Result<IncrementalReport>
where
    E: Fn(&[Vec<f64>], &[Label]) -> Result<f64> + Sync,
{
    let idx: Vec<Option<usize>> = matrix.columns.iter().map(|c| imf_index(c)).collect();
    let max = idx.iter().flatten().copied().max().ok_or_else(|| {
        Error::FeatureSet("matrix has no per-IMF columns (expected feature@imfK@channel)".into())
    })?;
    let scores = (1..=max)
        .into_par_iter()
        .map(|count| {
            let keep: Vec<usize> =
                (0..idx.len()).filter(|&j| idx[j].is_some_and(|i| i <= count)).collect();
            evaluator(&matrix.select_columns(&keep).rows, labels)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    Ok(IncrementalReport { scores, best_count: best + 1, baseline: majority_baseline(labels) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureGroup {
    pub name: String,
    pub columns: Vec<usize>,
}

/// One group per feature name, in order of first appearance.
pub fn groups_by_feature(matrix: &FeatureMatrix) -> Vec<FeatureGroup> {
    let mut groups: Vec<FeatureGroup> = Vec::new();
    for (j, c) in matrix.columns.iter().enumerate() {
        let name = parse_tag(c).map_or(c.as_str(), |t| t.0);
        match groups.iter_mut().find(|g| g.name == name) {
            Some(g) => g.columns.push(j),
            None => groups.push(FeatureGroup { name: name.to_string(), columns: vec![j] }),
        }
    }
    groups
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredSubset {
    pub groups: Vec<String>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetReport {
    /// Every subset that was scored, in evaluation order.
    pub evaluated: Vec<ScoredSubset>,
    /// Subsets within `margin` of the best score, smallest first.
    pub near_best: Vec<ScoredSubset>,
    pub selected: ScoredSubset,
    pub baseline: f64,
    pub margin: f64,
    /// False when no subset beats the majority baseline by more than `margin`.
    pub beats_baseline: bool,
}

fn check_groups(matrix: &FeatureMatrix, labels: &[Label], groups: &[FeatureGroup]) -> Result<()> {
    if groups.is_empty() {
        return Err(Error::FeatureSet("no feature groups".into()));
    }
    if labels.len() != matrix.n_rows() {
        return Err(Error::ShapeMismatch(format!("{} rows but {} labels", matrix.n_rows(), labels.len())));
    }
    for g in groups {
        if g.columns.is_empty() || g.columns.iter().any(|&j| j >= matrix.dim()) {
            return Err(Error::FeatureSet(format!("group {} has no valid columns", g.name)));
        }
    }
    Ok(())
}

fn score_subset<E>(matrix: &FeatureMatrix, labels: &[Label], groups: &[FeatureGroup], members: &[usize], evaluator: &E) -> Result<ScoredSubset>
where
    E: Fn(&[Vec<f64>], &[Label]) -> Result<f64> + Sync,
{
    let keep: Vec<usize> = members.iter().flat_map(|&g| groups[g].columns.iter().copied()).collect();
    Ok(ScoredSubset {
        groups: members.iter().map(|&g| groups[g].name.clone()).collect(),
        score: evaluator(&matrix.select_columns(&keep).rows, labels)?,
    })
}

fn report(evaluated: Vec<ScoredSubset>, labels: &[Label], margin: f64) -> SubsetReport {
    let best = evaluated.iter().map(|s| s.score).fold(f64::NEG_INFINITY, f64::max);
    let mut near_best: Vec<ScoredSubset> =
        evaluated.iter().filter(|s| s.score >= best - margin).cloned().collect();
    // stable sort keeps evaluation order among equals
    near_best.sort_by(|a, b| a.groups.len().cmp(&b.groups.len()).then(b.score.total_cmp(&a.score)));
    let baseline = majority_baseline(labels);
    SubsetReport {
        selected: near_best[0].clone(),
        near_best,
        beats_baseline: best > baseline + margin,
        evaluated,
        baseline,
        margin,
    }
}

/// Scores every non-empty union of groups. More than
/// `MAX_EXHAUSTIVE_GROUPS` groups is rejected; use `greedy_forward` instead.
pub fn subset_search<E>(
    matrix: &FeatureMatrix,
    labels: &[Label],
    groups: &[FeatureGroup],
    evaluator: E,
    margin: f64,
) -> Result<SubsetReport>
where
    E: Fn(&[Vec<f64>], &[Label]) -> Result<f64> + Sync,
{
    check_groups(matrix, labels, groups)?;
    if groups.len() > MAX_EXHAUSTIVE_GROUPS {
        return Err(Error::TooManyGroups { groups: groups.len(), limit: MAX_EXHAUSTIVE_GROUPS });
    }
    let evaluated = (1u32..1 << groups.len())
        .into_par_iter()
        .map(|mask| {
            let members: Vec<usize> = (0..groups.len()).filter(|g| mask >> g & 1 == 1).collect();
            score_subset(matrix, labels, groups, &members, &evaluator)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(evaluated, labels, margin))
}

/// Adds the best-scoring group one at a time while the score improves by
/// more than `margin`.
pub fn greedy_forward<E>(
    matrix: &FeatureMatrix,
    labels: &[Label],
    groups: &[FeatureGroup],
    evaluator: E,
    margin: f64,
) -> Result<SubsetReport>
where
    E: Fn(&[Vec<f64>], &[Label]) -> Result<f64> + Sync,
{
    check_groups(matrix, labels, groups)?;
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = f64::NEG_INFINITY;
    let mut evaluated = Vec::new();
    while chosen.len() < groups.len() {
        let round = (0..groups.len())
            .filter(|g| !chosen.contains(g))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|g| {
                let mut members = chosen.clone();
                members.push(g);
                members.sort_unstable();
                score_subset(matrix, labels, groups, &members, &evaluator).map(|s| (g, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let (g, best) = round
            .iter()
            .fold(None::<&(usize, ScoredSubset)>, |acc, r| match acc {
                Some(a) if a.1.score >= r.1.score => Some(a),
                _ => Some(r),
            })
            .cloned()
            .unwrap();
        evaluated.extend(round.into_iter().map(|(_, s)| s));
        if best.score <= current + margin {
            break;
        }
        current = best.score;
        chosen.push(g);
        chosen.sort_unstable();
    }
    let mut rep = report(evaluated, labels, margin);
    let chosen_names: Vec<String> = chosen.iter().map(|&g| groups[g].name.clone()).collect();
    if let Some(s) = rep.evaluated.iter().find(|s| s.groups == chosen_names) {
        rep.selected = s.clone();
    }
    Ok(rep)
}
