use serde::{Deserialize, Serialize};

use crate::control::SignalingOverhead;
use crate::radio::{Direction, Scenario};
use crate::sim::{CampaignResult, IterationResult};

/// Per-iteration metrics of one campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub iteration: usize,
    pub scenario: Scenario,
    pub direction: Direction,
    pub network_pdr: f64,
    pub dup_efficiency: Option<f64>,
    pub mean_latency_ms: Option<f64>,
    pub redundant_retx: u64,
    pub avoided_retx: u64,
    pub signaling_bytes: SignalingOverhead,
}

impl MetricsRecord {
    pub fn new(scenario: Scenario, direction: Direction, r: &IterationResult) -> Self {
        MetricsRecord {
            iteration: r.iteration,
            scenario,
            direction,
            network_pdr: r.network_pdr,
            dup_efficiency: r.duplication_efficiency,
            mean_latency_ms: r.mean_latency_ms,
            redundant_retx: r.redundant_retx,
            avoided_retx: r.avoided_retx,
            signaling_bytes: r.signaling,
        }
    }
}

pub fn records(c: &CampaignResult) -> Vec<MetricsRecord> {
    c.iterations
        .iter()
        .map(|r| MetricsRecord::new(c.config.scenario, c.config.direction, r))
        .collect()
}
