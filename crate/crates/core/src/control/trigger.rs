//! Signal-level trigger for dynamic duplication.

use serde::{Deserialize, Serialize};

use super::duplication::SignalingConfig;
use super::ControlError;
use crate::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriggerCriteria {
    /// Duplicate when every leg is weaker than this.
    pub activate_below_dbm: f64,
    /// Stop duplicating when any leg is stronger than this.
    pub deactivate_above_dbm: f64,
}

impl TriggerCriteria {
    /// Rejects a negative hysteresis gap.
    pub fn new(activate_below_dbm: f64, deactivate_above_dbm: f64) -> Result<Self, ControlError> {
        if deactivate_above_dbm.is_nan() || activate_below_dbm.is_nan() || deactivate_above_dbm < activate_below_dbm {
            return Err(ControlError::Script(format!(
                "deactivate threshold {deactivate_above_dbm} dBm is below activate threshold {activate_below_dbm} dBm"
            )));
        }
        Ok(TriggerCriteria {
            activate_below_dbm,
            deactivate_above_dbm,
        })
    }

    pub fn hysteresis_db(&self) -> f64 {
        self.deactivate_above_dbm - self.activate_below_dbm
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriggerDecision {
    Activate,
    Deactivate,
    NoChange,
}

/// Where the criteria are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriggerSide {
    Network,
    /// The UE's request travels one uplink RRC latency before the network
    /// acts on it.
    Ue,
}

impl TriggerSide {
    pub fn request_delay(self, cfg: &SignalingConfig) -> SimTime {
        match self {
            TriggerSide::Network => SimTime::ZERO,
            TriggerSide::Ue => cfg.rrc_latency,
        }
    }
}

/// `measurements` are long-term received powers of the legs in dBm.
pub fn evaluate_trigger(criteria: &TriggerCriteria, measurements: &[f64]) -> TriggerDecision {
    if measurements.is_empty() {
        return TriggerDecision::NoChange;
    }
    if measurements.iter().any(|&m| m > criteria.deactivate_above_dbm) {
        TriggerDecision::Deactivate
    } else if measurements.iter().all(|&m| m < criteria.activate_below_dbm) {
        TriggerDecision::Activate
    } else {
        TriggerDecision::NoChange
    }
}
