//! Runs the three detectors on an author and combines them with a second
//! forest.
//!
//! The combining forest sees only `(bin, bim, bica)`; the author id plays no
//! part beyond the name detector.

use alloc::string::String;
use alloc::vec::Vec;

use crate::features::{extract_features, FEATURE_NAMES};
use crate::forest::{Dataset, ForestConfig, ForestError, Label, RandomForestModel};
use crate::ingest::AuthorActivity;
use crate::name_match::is_bot_name;
use crate::template::{bim_score, BimConfig, TemplateError};

/// Predictor names of the combining forest, in row order.
pub const ENSEMBLE_FEATURES: [&str; 3] = ["bin", "bim", "bica"];

/// Default cut on the combined probability.
pub const DEFAULT_ENSEMBLE_THRESHOLD: f64 = 0.5;

/// Share of authors assumed to be bots when converting a detection into a
/// posterior.
pub const DEFAULT_PREVALENCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetectError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("model expects {0} features")]
    WrongModel(usize),
    #[error("{name} = {value} is outside (0, 1)")]
    Domain { name: &'static str, value: f64 },
}

/// Per-author detector outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionScores {
    pub author_id: String,
    pub bin_flag: bool,
    pub bim_score: f64,
    pub bica_prob: f64,
    pub ensemble_prob: Option<f64>,
    pub verdict: Option<Label>,
}

impl DetectionScores {
    pub fn predictors(&self) -> [f64; 3] {
        [f64::from(u8::from(self.bin_flag)), self.bim_score, self.bica_prob]
    }

    /// Fills the combined probability and a verdict of bot iff it is
    /// strictly above `threshold`.
    pub fn apply_ensemble(
        &mut self,
        ensemble: &RandomForestModel,
        threshold: f64,
    ) -> Result<(), DetectError> {
        if ensemble.dim() != ENSEMBLE_FEATURES.len() {
            return Err(DetectError::WrongModel(ENSEMBLE_FEATURES.len()));
        }
        let p = ensemble.predict_proba(&self.predictors())?;
        self.ensemble_prob = Some(p);
        self.verdict = Some(if p > threshold { Label::Bot } else { Label::Human });
        Ok(())
    }
}

/// Runs name matching, template scoring and the commit-association forest.
pub fn score_author(
    author: &AuthorActivity,
    bica_model: &RandomForestModel,
    bim: &BimConfig,
) -> Result<DetectionScores, DetectError> {
    if bica_model.dim() != FEATURE_NAMES.len() {
        return Err(DetectError::WrongModel(FEATURE_NAMES.len()));
    }
    let features = extract_features(author);
    Ok(DetectionScores {
        author_id: author.author_id().into(),
        bin_flag: is_bot_name(author.author_id()).is_bot,
        bim_score: bim_score(author, bim)?,
        bica_prob: bica_model.predict_proba(&features.to_array())?,
        ensemble_prob: None,
        verdict: None,
    })
}

/// Trains the combining forest on labeled detector outputs.
pub fn ensemble_fit(
    rows: &[(DetectionScores, Label)],
    config: ForestConfig,
) -> Result<RandomForestModel, DetectError> {
    let data = Dataset::from_rows(3, rows.iter().map(|(s, l)| (s.predictors(), *l)))?;
    let names = ENSEMBLE_FEATURES.iter().map(|s| String::from(*s)).collect();
    Ok(RandomForestModel::fit(&data, config, names)?)
}

/// Chance that a flagged author really is a bot, by Bayes' rule.
pub fn bayes_posterior(
    sensitivity: f64,
    specificity: f64,
    prevalence: f64,
) -> Result<f64, DetectError> {
    for (name, value) in [
        ("sensitivity", sensitivity),
        ("specificity", specificity),
        ("prevalence", prevalence),
    ] {
        if !(value > 0.0 && value < 1.0) {
            return Err(DetectError::Domain { name, value });
        }
    }
    let true_pos = sensitivity * prevalence;
    Ok(true_pos / (true_pos + (1.0 - specificity) * (1.0 - prevalence)))
}

/// Share of all authors that are bots: the flagged share times the share of
/// flagged authors confirmed on inspection.
pub fn prevalence_estimate(flagged_fraction: f64, verified_fraction: f64) -> f64 {
    flagged_fraction * verified_fraction
}

/// Scores many authors, keeping input order.
pub fn score_authors(
    authors: &[AuthorActivity],
    bica_model: &RandomForestModel,
    bim: &BimConfig,
) -> Result<Vec<DetectionScores>, DetectError> {
    authors.iter().map(|a| score_author(a, bica_model, bim)).collect()
}
