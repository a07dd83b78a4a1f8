//! Run configuration of a Monte Carlo campaign.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{ControlMode, TriggerCriteria, TriggerSide};
use crate::protocol::{RlcConfig, SnSpace};
use crate::radio::{Direction, LinkModelConfig, RadioError, Scenario, TopologyConfig};
use crate::SimTime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error("iteration {iteration} did not quiesce by {horizon} ms: {detail}")]
    Watchdog {
        iteration: usize,
        horizon: SimTime,
        detail: String,
    },
    #[error("iteration {iteration}: {detail}")]
    Invariant { iteration: usize, detail: String },
}

/// Dynamic duplication for two-leg bearers: duplication starts inactive and
/// is switched by the signal-level trigger.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicDuplication {
    pub criteria: TriggerCriteria,
    pub mode: ControlMode,
    pub side: TriggerSide,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub direction: Direction,
    pub iterations: usize,
    pub packets_per_user: usize,
    pub latency_budget_ms: f64,
    pub beta_db: f64,
    pub n_sc: usize,
    pub master_seed: u64,
    pub xn_latency_ms: f64,
    pub cross_leg_discard: bool,
    /// Split threshold of the S3 split bearer (moot while duplicating).
    pub split_threshold_bytes: u64,
    pub sn_bits: u8,
    pub rlc: RlcConfig,
    pub link: LinkModelConfig,
    /// Geometry; `n_sc` and the placement seed are overridden per iteration.
    pub topology: TopologyConfig,
    pub dynamic: Option<DynamicDuplication>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: Scenario::S1,
            direction: Direction::Downlink,
            iterations: 100,
            packets_per_user: 1000,
            latency_budget_ms: 5.0,
            beta_db: 10.0,
            n_sc: 2,
            master_seed: 1,
            xn_latency_ms: 2.0,
            cross_leg_discard: false,
            split_threshold_bytes: 1000,
            sn_bits: 12,
            rlc: RlcConfig::default(),
            link: LinkModelConfig::default(),
            topology: TopologyConfig::default(),
            dynamic: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if self.packets_per_user == 0 {
            return bad("packets per user must be at least 1".into());
        }
        if self.scenario.uses_tier2() && self.n_sc == 0 {
            return bad(format!("scenario {} requires Tier-2 nodes (nsc >= 1)", self.scenario));
        }
        if !self.latency_budget_ms.is_finite() || self.latency_budget_ms < 0.0 {
            return bad(format!(
                "latency budget must be a non-negative number, got {}",
                self.latency_budget_ms
            ));
        }
        if !self.xn_latency_ms.is_finite() || self.xn_latency_ms < 0.0 {
            return bad(format!(
                "Xn latency must be a non-negative number, got {}",
                self.xn_latency_ms
            ));
        }
        if self.beta_db.is_nan() {
            return bad("beta must be a number".into());
        }
        if !(2..=31).contains(&self.sn_bits) {
            return bad(format!("SN width must be 2..=31 bits, got {}", self.sn_bits));
        }
        if self.rlc.tti == SimTime::ZERO || self.rlc.pdus_per_tti == 0 {
            return bad("TTI and per-TTI capacity must be positive".into());
        }
        self.link_config().validate()?;
        self.topology_config(0).validate()?;
        Ok(())
    }

    pub fn link_config(&self) -> LinkModelConfig {
        LinkModelConfig {
            beta_db: self.beta_db,
            ..self.link.clone()
        }
    }

    pub fn topology_config(&self, placement_seed: u64) -> TopologyConfig {
        TopologyConfig {
            n_sc: self.n_sc,
            placement_seed,
            ..self.topology.clone()
        }
    }

    pub fn sn_space(&self) -> SnSpace {
        SnSpace::new(self.sn_bits)
    }

    pub fn latency_budget(&self) -> SimTime {
        SimTime::from_ms_f64(self.latency_budget_ms)
    }

    pub fn xn_latency(&self) -> SimTime {
        SimTime::from_ms_f64(self.xn_latency_ms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tier2_scenarios_need_small_cells() {
        for s in [Scenario::S2, Scenario::S3] {
            let c = RunConfig {
                scenario: s,
                n_sc: 0,
                ..RunConfig::default()
            };
            assert!(matches!(c.validate(), Err(SimError::Config(_))));
        }
        let c = RunConfig {
            n_sc: 0,
            ..RunConfig::default()
        };
        assert!(c.validate().is_ok());
    }

    #[test]
    fn other_rejections() {
        let base = RunConfig::default;
        assert!(RunConfig {
            iterations: 0,
            ..base()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            packets_per_user: 0,
            ..base()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            xn_latency_ms: -1.0,
            ..base()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            beta_db: f64::NAN,
            ..base()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            beta_db: f64::INFINITY,
            ..base()
        }
        .validate()
        .is_ok());
    }
}
