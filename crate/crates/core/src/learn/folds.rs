use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Label;
use crate::error::{Error, Result};

/// Test-fold index lists. Every index appears in exactly one fold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Folds {
    pub seed: u64,
    pub test: Vec<Vec<usize>>,
}

impl Folds {
    pub fn k(&self) -> usize {
        self.test.len()
    }

    /// Training indices of fold `i`, ascending.
    pub fn train(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .test
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Shuffles each class with a seeded RNG and deals its members round-robin
/// across folds; the dealer position carries over from one class to the next.
pub fn stratified_kfold(labels: &[Label], k: usize, seed: u64) -> Result<Folds> {
    if k < 2 {
        return Err(Error::Learn(format!("k must be at least 2, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test = vec![Vec::new(); k];
    let mut slot = 0usize;
    for class in Label::ALL {
        let mut members: Vec<usize> =
            (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::Learn(format!(
                "class {} has {} members, fewer than k = {k}",
                class.name(),
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for m in members {
            test[slot % k].push(m);
            slot += 1;
        }
    }
    for f in &mut test {
        f.sort_unstable();
    }
    Ok(Folds { seed, test })
}
