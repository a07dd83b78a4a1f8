//! Metric records, empirical CDFs, output files and configuration loading.

pub mod cdf;
pub mod kv;
pub mod output;
pub mod preset;
pub mod record;

use std::path::Path;

use thiserror::Error;

use crate::sim::SimError;

pub use cdf::{compute_cdf, quantile, quantiles, CdfPoint};
pub use output::{write_campaign, write_outputs, write_summary};
pub use preset::{fig4_campaigns, run_fig4, write_fig4, Fig4};
pub use record::{records, MetricsRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("empty input")]
    EmptyInput,
    #[error("value {0} is not a number")]
    NotANumber(f64),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl MetricsError {
    /// Whether the error stems from invalid user input rather than a
    /// failure while running or writing.
    pub fn is_config(&self) -> bool {
        matches!(self, MetricsError::Config(_) | MetricsError::Sim(SimError::Config(_)))
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        MetricsError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
