use alloc::vec::Vec;

use super::tree::midpoint;
use super::{ForestError, Label};

/// One operating point of a score-based classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// A row is called bot when its score is strictly above this.
    pub threshold: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

/// `(1 - sensitivity)² + (1 - specificity)²`, the squared distance to the
/// top-left corner of ROC space.
pub fn closest_topleft(p: &RocPoint) -> f64 {
    let a = 1.0 - p.sensitivity;
    let b = 1.0 - p.specificity;
    a * a + b * b
}

fn check_labels(scores: &[f64], labels: &[Label]) -> Result<(usize, usize), ForestError> {
    if scores.len() != labels.len() {
        return Err(ForestError::DimensionMismatch { expected: labels.len(), got: scores.len() });
    }
    if scores.is_empty() {
        return Err(ForestError::EmptyInput);
    }
    let bots = labels.iter().filter(|l| l.is_bot()).count();
    let humans = labels.len() - bots;
    if bots == 0 || humans == 0 {
        return Err(ForestError::SingleClass);
    }
    Ok((bots, humans))
}

fn sorted_pairs(scores: &[f64], labels: &[Label]) -> Vec<(f64, Label)> {
    let mut pairs: Vec<(f64, Label)> = scores.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Area under the ROC curve as the Mann-Whitney probability that a random
/// bot outscores a random human, ties counting one half.
pub fn auc(scores: &[f64], labels: &[Label]) -> Result<f64, ForestError> {
    let (bots, humans) = check_labels(scores, labels)?;
    let pairs = sorted_pairs(scores, labels);

    // Twice the U statistic keeps the tie halves integral.
    let mut twice_u: u128 = 0;
    let mut humans_below: u128 = 0;
    for group in pairs.chunk_by(|a, b| a.0 == b.0) {
        let gb = group.iter().filter(|p| p.1.is_bot()).count() as u128;
        let gh = group.len() as u128 - gb;
        twice_u += gb * (2 * humans_below + gh);
        humans_below += gh;
    }
    Ok(twice_u as f64 / (2 * bots as u128 * humans as u128) as f64)
}

/// Operating points at every distinct cut: `-inf`, the midpoints between
/// adjacent distinct scores, and `+inf`, in ascending threshold order.
pub fn roc_curve(scores: &[f64], labels: &[Label]) -> Result<Vec<RocPoint>, ForestError> {
    let (bots, humans) = check_labels(scores, labels)?;
    let pairs = sorted_pairs(scores, labels);
    let groups: Vec<&[(f64, Label)]> = pairs.chunk_by(|a, b| a.0 == b.0).collect();

    let mut points = Vec::with_capacity(groups.len() + 1);
    // Everything above the threshold is called bot.
    let (mut bots_above, mut humans_at_or_below) = (bots, 0usize);
    let point = |threshold, bots_above: usize, humans_below: usize| RocPoint {
        threshold,
        sensitivity: bots_above as f64 / bots as f64,
        specificity: humans_below as f64 / humans as f64,
    };
    points.push(point(f64::NEG_INFINITY, bots_above, humans_at_or_below));
    for (i, group) in groups.iter().enumerate() {
        let gb = group.iter().filter(|p| p.1.is_bot()).count();
        bots_above -= gb;
        humans_at_or_below += group.len() - gb;
        let threshold = match groups.get(i + 1) {
            Some(next) => midpoint(group[0].0, next[0].0),
            None => f64::INFINITY,
        };
        points.push(point(threshold, bots_above, humans_at_or_below));
    }
    Ok(points)
}

/// The point closest to the top-left corner; ties go to the lower threshold.
pub fn select_threshold(points: &[RocPoint]) -> Result<RocPoint, ForestError> {
    let mut best: Option<(f64, RocPoint)> = None;
    for p in points {
        let c = closest_topleft(p);
        let better = match best {
            None => true,
            Some((bc, bp)) => c < bc || (c == bc && p.threshold < bp.threshold),
        };
        if better {
            best = Some((c, *p));
        }
    }
    best.map(|(_, p)| p).ok_or(ForestError::EmptyInput)
}
