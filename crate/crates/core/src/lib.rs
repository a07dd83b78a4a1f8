//! Discrete-event simulation of PDCP packet duplication in dual-connectivity
//! (DC) and carrier-aggregation (CA) 5G deployments.
//!
//! The crate is organised bottom-up:
//!
//! - [`protocol`]: user-plane entities. PDCP sequencing, duplication and
//!   duplicate elimination, RLC acknowledged-mode ARQ, MAC logical-channel
//!   multiplexing and the bearer configuration model.
//! - [`control`]: control-plane state machines. RRC configuration of
//!   duplication, dynamic activation through RRC, PDCP control PDUs or MAC
//!   CEs, signal-level triggers and the make-before-break handover.
//! - [`radio`]: two-tier indoor topology, path loss, shadowing, block fading,
//!   SINR and UE association.
//! - [`sim`]: the deterministic event scheduler, Xn backhaul, traffic, the
//!   per-iteration engine and Monte Carlo campaigns.
//! - [`metrics`]: metric records, empirical CDFs, output files and the flat
//!   key/value configuration format used by the CLI.

pub mod control;
pub mod metrics;
pub mod protocol;
pub mod radio;
pub mod seed;
pub mod sim;
pub mod types;

pub use types::{BearerId, CarrierId, NodeId, SimTime, UeId};
