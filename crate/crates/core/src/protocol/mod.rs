//! User-plane protocol entities.

pub mod bearer;
pub mod cross_leg;
pub mod mac;
pub mod pdcp;
pub mod rlc;

use thiserror::Error;

use crate::BearerId;

pub use bearer::{BearerConfig, BearerKind, CellGroup, DupMode, LegDescriptor, SrbType};
pub use cross_leg::{CrossLegDiscard, DiscardEffect, Notification};
pub use mac::MacEntity;
pub use pdcp::{route, DiscardReason, PdcpPdu, PdcpSdu, PdcpTransmitter, ReceiverWindow, Routing, RxOutcome, SnSpace};
pub use rlc::{Attempt, Feedback, LegId, RlcConfig, RlcEntity, RlcPdu, RlcStats};

/// Rejected bearer configuration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("bearer {0} has {1} legs, expected 1 or 2")]
    LegCount(BearerId, usize),
    #[error("bearer {0}: default leg {1} out of range")]
    DefaultLeg(BearerId, usize),
    #[error("bearer {0}: {1} bearers and duplication require exactly two legs")]
    NeedsTwoLegs(BearerId, &'static str),
    #[error("bearer {0}: duplication on the same carrier is not supported")]
    SameCarrier(BearerId),
    #[error("bearer {0}: CA legs must share one cell group and one gNB")]
    CaAcrossGroups(BearerId),
    #[error("bearer {0}: DC legs must belong to different cell groups")]
    DcSameGroup(BearerId),
    #[error("bearer {0}: duplication in CA is not supported while DC duplication is configured")]
    CaWhileDc(BearerId),
    #[error("bearer {0}: initial duplication state set without duplication configured")]
    ActiveWithoutConfigured(BearerId),
    #[error("bearer {0}: SRB type must be set for SRB bearers and only for them")]
    SrbType(BearerId),
    #[error("bearer {0}: logical channel ids of the two legs collide")]
    LcidCollision(BearerId),
}

/// Runtime protocol error raised by the PDCP transmitter.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("SDU for bearer {sdu} submitted to bearer {bearer}")]
    UnknownBearer { bearer: BearerId, sdu: BearerId },
    #[error("bearer {0}: duplication requested but not configured")]
    DuplicationNotConfigured(BearerId),
    #[error("bearer {0}: duplication requested on a single-leg bearer")]
    SingleLegDuplication(BearerId),
    #[error("bearer {0}: SDU payload must be non-empty")]
    EmptyPayload(BearerId),
    #[error("bearer {0}: SDU creation time went backwards")]
    NonMonotonicSdu(BearerId),
}
