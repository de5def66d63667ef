//! Random-forest classifier for two classes, plus ROC/AUC evaluation and
//! cross-validated hyperparameter search.
//!
//! Trees are grown on bootstrap resamples, with `mtry` candidate features
//! drawn at each node and splits chosen by weighted Gini impurity at
//! midpoints between adjacent distinct values. Every tree draws from its own
//! ChaCha stream keyed by `(seed, tree index)`, so trees can be grown in any
//! order or in parallel and still produce the same forest.

mod metrics;
mod tree;
mod tune;

pub use metrics::{auc, closest_topleft, roc_curve, select_threshold, RocPoint};
pub use tree::{bootstrap_sample, grow_tree, DecisionTree, Node};
pub use tune::{
    cv_accuracy, grid_tune, repeated_holdout_auc, stratified_folds, stratified_split, AucSummary,
    TuneCell, TuneReport,
};

use alloc::string::String;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Class label. `Bot` is the positive class throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Bot,
    Human,
}

impl Label {
    pub fn is_bot(self) -> bool {
        self == Label::Bot
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Bot => "bot",
            Label::Human => "human",
        }
    }

    /// Accepts `bot`/`human` (any case) and `1`/`0`.
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("bot") || t == "1" {
            Some(Label::Bot)
        } else if t.eq_ignore_ascii_case("human") || t == "0" {
            Some(Label::Human)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ForestError {
    #[error("no training rows")]
    EmptyInput,
    #[error("training data contains only one class")]
    SingleClass,
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid forest configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid tree structure: {0}")]
    InvalidTree(&'static str),
}

/// Labeled rows of a fixed dimension, stored row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    dim: usize,
    values: Vec<f64>,
    labels: Vec<Label>,
}

impl Dataset {
    pub fn new(dim: usize) -> Self {
        Self { dim, values: Vec::new(), labels: Vec::new() }
    }

    pub fn push(&mut self, row: &[f64], label: Label) -> Result<(), ForestError> {
        if row.len() != self.dim {
            return Err(ForestError::DimensionMismatch { expected: self.dim, got: row.len() });
        }
        self.values.extend_from_slice(row);
        self.labels.push(label);
        Ok(())
    }

    pub fn from_rows<R: AsRef<[f64]>>(
        dim: usize,
        rows: impl IntoIterator<Item = (R, Label)>,
    ) -> Result<Self, ForestError> {
        let mut data = Self::new(dim);
        for (row, label) in rows {
            data.push(row.as_ref(), label)?;
        }
        Ok(data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn value(&self, i: usize, feature: usize) -> f64 {
        self.values[i * self.dim + feature]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut out = Self::new(self.dim);
        for &i in indices {
            out.values.extend_from_slice(self.row(i));
            out.labels.push(self.labels[i]);
        }
        out
    }

    fn check_trainable(&self) -> Result<(), ForestError> {
        if self.len() < 2 {
            return Err(if self.is_empty() { ForestError::EmptyInput } else { ForestError::SingleClass });
        }
        let bots = self.labels.iter().filter(|l| l.is_bot()).count();
        if bots == 0 || bots == self.len() {
            return Err(ForestError::SingleClass);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestConfig {
    pub ntree: usize,
    pub mtry: usize,
    /// Nodes with fewer rows than this become leaves.
    pub min_node_size: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self { ntree: 100, mtry: 2, min_node_size: 1, seed: 0 }
    }
}

impl ForestConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self, dim: usize) -> Result<(), ForestError> {
        if self.ntree == 0 {
            return Err(ForestError::InvalidConfig("ntree must be positive"));
        }
        if self.mtry == 0 {
            return Err(ForestError::InvalidConfig("mtry must be positive"));
        }
        if self.mtry > dim {
            return Err(ForestError::InvalidConfig("mtry exceeds the feature dimension"));
        }
        if self.min_node_size == 0 {
            return Err(ForestError::InvalidConfig("min_node_size must be positive"));
        }
        Ok(())
    }
}

/// The RNG stream used for one tree.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForestModel {
    trees: Vec<DecisionTree>,
    config: ForestConfig,
    feature_names: Vec<String>,
}

impl RandomForestModel {
    /// Grows `config.ntree` trees serially.
    pub fn fit(
        data: &Dataset,
        config: ForestConfig,
        feature_names: Vec<String>,
    ) -> Result<Self, ForestError> {
        Self::check_fit(data, &config, &feature_names)?;
        let trees = (0..config.ntree).map(|t| grow_tree(data, &config, t)).collect();
        Ok(Self { trees, config, feature_names })
    }

    /// Validates inputs to [`fit`](Self::fit); callers growing trees
    /// themselves with [`grow_tree`] should call this first.
    pub fn check_fit(
        data: &Dataset,
        config: &ForestConfig,
        feature_names: &[String],
    ) -> Result<(), ForestError> {
        data.check_trainable()?;
        config.validate(data.dim())?;
        if feature_names.len() != data.dim() {
            return Err(ForestError::DimensionMismatch {
                expected: data.dim(),
                got: feature_names.len(),
            });
        }
        Ok(())
    }

    /// Reassembles a model from its parts, e.g. after loading from disk.
    pub fn from_parts(
        trees: Vec<DecisionTree>,
        config: ForestConfig,
        feature_names: Vec<String>,
    ) -> Result<Self, ForestError> {
        config.validate(feature_names.len())?;
        if trees.len() != config.ntree {
            return Err(ForestError::InvalidConfig("tree count differs from ntree"));
        }
        for tree in &trees {
            tree.check(feature_names.len())?;
        }
        Ok(Self { trees, config, feature_names })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// Number of trees whose leaf votes bot.
    pub fn votes(&self, x: &[f64]) -> Result<usize, ForestError> {
        if x.len() != self.dim() {
            return Err(ForestError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self.trees.iter().filter(|t| t.predict(x).is_bot()).count())
    }

    /// Fraction of trees voting bot, a multiple of `1 / ntree`.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64, ForestError> {
        Ok(self.votes(x)? as f64 / self.trees.len() as f64)
    }

    /// Majority vote; an exact half goes to human.
    pub fn predict(&self, x: &[f64]) -> Result<Label, ForestError> {
        let votes = self.votes(x)?;
        Ok(if 2 * votes > self.trees.len() { Label::Bot } else { Label::Human })
    }

    /// Mean Gini decrease per feature, averaged over trees.
    pub fn importance(&self) -> Vec<f64> {
        let mut total = alloc::vec![0.0; self.dim()];
        for tree in &self.trees {
            for node in tree.nodes() {
                if let Node::Split { feature, decrease, .. } = node {
                    total[*feature] += decrease;
                }
            }
        }
        for v in &mut total {
            *v /= self.trees.len() as f64;
        }
        total
    }
}
