//! Control plane: duplication configuration and dynamic control, the
//! signal-level trigger, and the duplication-based handover.

pub mod duplication;
pub mod handover;
pub mod trigger;

use thiserror::Error;

use crate::protocol::{ConfigError, ProtocolError};
use crate::BearerId;

pub use duplication::{
    ControlMode, DuplicationPipeline, DuplicationState, RrcKind, RrcMessage, SignalingConfig, SignalingOverhead,
    UeDuplicationControl,
};
pub use handover::{run_handover, Entity, HandoverConfig, HandoverContext, HandoverOutcome, HoPhase, TraceRecord};
pub use trigger::{evaluate_trigger, TriggerCriteria, TriggerDecision, TriggerSide};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControlError {
    #[error("unknown bearer {0}")]
    UnknownBearer(BearerId),
    #[error("bearer {0}: duplication is not configured")]
    NotConfigured(BearerId),
    #[error("MAC CE control applies to all configured bearers; a subset was requested")]
    MacCeSubset,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("invalid handover script: {0}")]
    Script(String),
}
