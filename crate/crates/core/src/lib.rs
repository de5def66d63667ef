//! Bot-author detection over commit metadata.
//!
//! Three detectors score each author id:
//!
//! - [`name_match`]: does the id itself say `bot`?
//! - [`template`]: do the commit messages look generated from a few
//!   templates?
//! - [`features`] + [`forest`]: do the files and projects touched per commit
//!   look automated?
//!
//! [`detector`] combines the three with a second random forest, and
//! [`characterize`] describes detected bots by when they commit and what
//! kinds of files they touch.
//!
//! The crate is `no_std` and only needs `alloc`. Reading files and the
//! command line live in the `botminer` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod characterize;
pub mod detector;
pub mod features;
pub mod forest;
pub mod ingest;
pub mod name_match;
pub mod template;

pub use characterize::{ActivityProfile, BotClass, ClassifierConfig, LanguageTable};
pub use detector::DetectionScores;
pub use features::FeatureVector;
pub use forest::{Dataset, ForestConfig, Label, RandomForestModel, RocPoint};
pub use ingest::{AuthorActivity, CommitRecord};
pub use name_match::NameVerdict;
pub use template::{AlignmentMode, BimConfig, TemplateGrouping, TokenDoc};
