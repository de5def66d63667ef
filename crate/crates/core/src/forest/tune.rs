use alloc::vec::Vec;
use rand::seq::SliceRandom;

use super::{auc, stream_rng, Dataset, ForestConfig, ForestError, Label, RandomForestModel};

// Stream ids reserved for data splitting, far away from tree indices.
const FOLD_STREAM: u64 = u64::MAX;
const SPLIT_STREAM_BASE: u64 = 1 << 62;

/// Fold number (`0..folds`) for every row.
///
/// Each class is shuffled on its own and dealt round-robin, with the deal
/// continuing from one class into the next, so every fold gets a near-equal
/// share of both classes.
pub fn stratified_folds(labels: &[Label], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = stream_rng(seed, FOLD_STREAM);
    let mut assignment = alloc::vec![0; labels.len()];
    let mut dealt = 0;
    for class in [Label::Bot, Label::Human] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = dealt % folds;
            dealt += 1;
        }
    }
    assignment
}

/// Splits row indices into `(train, test)` with `test_fraction` of each
/// class (rounded down, at least one) held out. `repetition` selects an
/// independent split for the same seed.
pub fn stratified_split(
    labels: &[Label],
    test_fraction: f64,
    seed: u64,
    repetition: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = stream_rng(seed, SPLIT_STREAM_BASE + repetition);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in [Label::Bot, Label::Human] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        let held = ((members.len() as f64 * test_fraction) as usize).clamp(1, members.len());
        test.extend_from_slice(&members[..held]);
        train.extend_from_slice(&members[held..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Rows predicted correctly under `folds`-fold stratified cross-validation.
pub fn cv_accuracy(
    data: &Dataset,
    config: &ForestConfig,
    folds: usize,
    fold_seed: u64,
) -> Result<usize, ForestError> {
    let assignment = stratified_folds(data.labels(), folds, fold_seed);
    let names: Vec<alloc::string::String> =
        (0..data.dim()).map(|i| alloc::format!("x{i}")).collect();
    let mut correct = 0;
    for fold in 0..folds {
        let train: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] != fold).collect();
        let test: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] == fold).collect();
        if test.is_empty() {
            continue;
        }
        let model = RandomForestModel::fit(&data.subset(&train), *config, names.clone())?;
        for i in test {
            if model.predict(data.row(i))? == data.label(i) {
                correct += 1;
            }
        }
    }
    Ok(correct)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneCell {
    pub ntree: usize,
    pub mtry: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneReport {
    pub best: ForestConfig,
    /// Every evaluated cell, ordered by `(ntree, mtry)`.
    pub cells: Vec<TuneCell>,
}

/// Grid search over `(ntree, mtry)` by cross-validated accuracy.
///
/// `base` supplies the seed and `min_node_size`. The best cell wins; ties go
/// to the smaller `ntree`, then the smaller `mtry`.
pub fn grid_tune(
    data: &Dataset,
    ntree_grid: &[usize],
    mtry_grid: &[usize],
    folds: usize,
    base: &ForestConfig,
) -> Result<TuneReport, ForestError> {
    if folds < 2 || folds > data.len() {
        return Err(ForestError::InvalidConfig("folds must be in 2..=rows"));
    }
    if ntree_grid.is_empty() || mtry_grid.is_empty() {
        return Err(ForestError::InvalidConfig("empty tuning grid"));
    }
    let mut ntrees = ntree_grid.to_vec();
    let mut mtrys = mtry_grid.to_vec();
    ntrees.sort_unstable();
    ntrees.dedup();
    mtrys.sort_unstable();
    mtrys.dedup();

    let mut cells = Vec::new();
    let mut best: Option<(usize, ForestConfig)> = None;
    for &ntree in &ntrees {
        for &mtry in &mtrys {
            let config = ForestConfig { ntree, mtry, ..*base };
            config.validate(data.dim())?;
            let correct = cv_accuracy(data, &config, folds, base.seed)?;
            cells.push(TuneCell {
                ntree,
                mtry,
                correct,
                accuracy: correct as f64 / data.len() as f64,
            });
            if best.is_none_or(|(c, _)| correct > c) {
                best = Some((correct, config));
            }
        }
    }
    let (_, best) = best.ok_or(ForestError::InvalidConfig("empty tuning grid"))?;
    Ok(TuneReport { best, cells })
}

/// Spread of held-out AUC over repeated stratified splits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub repetitions: usize,
}

/// Trains on `1 - test_fraction` of the rows and scores AUC on the rest,
/// `repetitions` times with independent splits.
pub fn repeated_holdout_auc(
    data: &Dataset,
    config: &ForestConfig,
    test_fraction: f64,
    repetitions: usize,
) -> Result<(AucSummary, Vec<f64>), ForestError> {
    if repetitions == 0 {
        return Err(ForestError::InvalidConfig("need at least one repetition"));
    }
    let names: Vec<alloc::string::String> =
        (0..data.dim()).map(|i| alloc::format!("x{i}")).collect();
    let mut aucs = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        let (train, test) = stratified_split(data.labels(), test_fraction, config.seed, rep as u64);
        let rep_config = ForestConfig { seed: config.seed.wrapping_add(rep as u64), ..*config };
        let model = RandomForestModel::fit(&data.subset(&train), rep_config, names.clone())?;
        let scores = test
            .iter()
            .map(|&i| model.predict_proba(data.row(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let labels: Vec<Label> = test.iter().map(|&i| data.label(i)).collect();
        aucs.push(auc(&scores, &labels)?);
    }
    let mut sorted = aucs.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 { (sorted[mid - 1] + sorted[mid]) / 2.0 } else { sorted[mid] };
    Ok((
        AucSummary { min: sorted[0], median, max: sorted[sorted.len() - 1], repetitions },
        aucs,
    ))
}
