//! Batch CSV front-end for the rating engine: ingestion, model artifacts,
//! threshold configuration, run reports and the worked-example check.

pub mod artifact;
pub mod commands;
pub mod csvio;
pub mod error;
pub mod report;
pub mod schema;
pub mod thresholds;

pub use error::{CliError, Result};
