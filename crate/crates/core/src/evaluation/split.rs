//! Seeded stratified splits.
//!
//! Shuffles use `ChaCha8Rng::seed_from_u64(seed)` with a Fisher-Yates
//! shuffle, one class at a time in label order, over image ids sorted
//! lexicographically. Identical seed and manifest give identical splits;
//! nothing is promised across implementations.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::annotation::{DatasetManifest, Label};

fn ids_by_class(manifest: &DatasetManifest) -> BTreeMap<Label, Vec<String>> {
    let mut groups: BTreeMap<Label, Vec<String>> = BTreeMap::new();
    for img in &manifest.images {
        groups.entry(img.label).or_default().push(img.image_id.clone());
    }
    for ids in groups.values_mut() {
        ids.sort();
    }
    groups
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    /// image_id → fold index in `[0, k)`.
    pub folds: BTreeMap<String, usize>,
}

impl FoldAssignment {
    pub fn fold_of(&self, image_id: &str) -> Option<usize> {
        self.folds.get(image_id).copied()
    }

    /// Ids held out in fold `f`, sorted.
    pub fn members(&self, f: usize) -> Vec<&str> {
        self.folds
            .iter()
            .filter(|(_, &fold)| fold == f)
            .map(|(id, _)| id.as_str())
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.folds.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Deals each class's shuffled ids round-robin into `k` folds. The dealing
/// position carries over between classes so overall fold sizes stay within
/// one of each other as well.
pub fn stratified_kfold(manifest: &DatasetManifest, k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    let groups = ids_by_class(manifest);
    if let Some((label, ids)) = groups.iter().find(|(_, ids)| ids.len() < k) {
        return Err(EvalError::StratificationImpossible {
            class: label.as_str().into(),
            size: ids.len(),
            k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = BTreeMap::new();
    let mut next = 0usize;
    for mut ids in groups.into_values() {
        ids.shuffle(&mut rng);
        for id in ids {
            folds.insert(id, next);
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { k, seed, folds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsample {
    pub seed: u64,
    pub train: Vec<String>,
    pub test: Vec<String>,
    /// Set when some class had to be given a training image its
    /// proportional share did not cover.
    pub degraded: bool,
}

/// Draws `n` training images with class proportions preserved by
/// largest-remainder apportionment; the rest become the test set.
pub fn stratified_subsample(manifest: &DatasetManifest, n: usize, seed: u64) -> Result<Subsample, EvalError> {
    let total = manifest.images.len();
    if n == 0 || n >= total {
        return Err(EvalError::InvalidParameter(format!(
            "training size must be in (0, {total}), got {n}"
        )));
    }
    let groups = ids_by_class(manifest);
    let sizes: Vec<usize> = groups.values().map(Vec::len).collect();

    let mut quotas: Vec<usize> = sizes.iter().map(|&s| s * n / total).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    // Remainder of s*n/total is (s*n mod total)/total; larger first.
    order.sort_by_key(|&i| std::cmp::Reverse((sizes[i] * n) % total));
    let short = n - quotas.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        quotas[i] += 1;
    }

    let mut degraded = false;
    for q in quotas.iter_mut() {
        if *q == 0 {
            *q = 1;
            degraded = true;
        }
    }
    let mut excess = quotas.iter().sum::<usize>().saturating_sub(n);
    while excess > 0 {
        let Some(i) = (0..quotas.len()).filter(|&i| quotas[i] > 1).max_by_key(|&i| quotas[i]) else {
            break;
        };
        quotas[i] -= 1;
        excess -= 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(n);
    let mut test = Vec::with_capacity(total - n);
    for (mut ids, quota) in groups.into_values().zip(quotas) {
        ids.shuffle(&mut rng);
        let rest = ids.split_off(quota.min(ids.len()));
        train.extend(ids);
        test.extend(rest);
    }
    train.sort();
    test.sort();
    Ok(Subsample {
        seed,
        train,
        test,
        degraded,
    })
}
