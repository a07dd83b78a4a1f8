//! Monte Carlo campaigns: independent iterations run in parallel and
//! collected in iteration order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sim::config::{RunConfig, SimError};
use crate::sim::iteration::{run_iteration, IterationResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub config: RunConfig,
    pub iterations: Vec<IterationResult>,
}

impl CampaignResult {
    pub fn network_pdrs(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.network_pdr).collect()
    }

    pub fn per_ue_pdrs(&self) -> Vec<f64> {
        self.iterations
            .iter()
            .flat_map(|r| r.per_ue_pdr.iter().copied())
            .collect()
    }

    /// Pooled over every iteration; `None` when nothing was duplicated.
    pub fn duplication_efficiency(&self) -> Option<f64> {
        let dup: u64 = self.iterations.iter().map(|r| r.duplicated).sum();
        let failed: u64 = self.iterations.iter().map(|r| r.default_first_failed).sum();
        (dup > 0).then(|| failed as f64 / dup as f64)
    }

    pub fn mean_pdr(&self) -> f64 {
        let v = self.network_pdrs();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    }
}

/// Validates `cfg` and runs all iterations. The result does not depend on
/// the number of worker threads.
pub fn run_campaign(cfg: &RunConfig) -> Result<CampaignResult, SimError> {
    cfg.validate()?;
    let iterations = (0..cfg.iterations)
        .into_par_iter()
        .map(|i| run_iteration(cfg, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CampaignResult {
        config: cfg.clone(),
        iterations,
    })
}
