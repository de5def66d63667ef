//! Command-line front end: record files, CSV formats, model files,
//! synthetic data and the `botminer` subcommands.

pub mod cli;
pub mod error;
pub mod formats;
pub mod io;
pub mod model_file;
pub mod numfmt;
pub mod synth;

pub use cli::run;
pub use error::{Error, Result};
