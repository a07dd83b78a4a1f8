//! Two-tier indoor industrial radio model.

pub mod association;
pub mod environment;
pub mod link;
pub mod propagation;
pub mod topology;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::CarrierId;

pub use association::{associate, associate_all, Association, Scenario, ServingLeg};
pub use environment::{Direction, RadioEnvironment};
pub use link::{
    attempt_outcome, noise_power_dbm, sinr_db, AttemptOutcome, ChannelRealization, FadingModel, LinkModelConfig,
    NodeOrUe,
};
pub use propagation::{db_to_linear, linear_to_db, pathloss_db};
pub use topology::{Node, Topology, TopologyConfig, Ue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadioError {
    #[error("distance must be positive, got {0} m")]
    Distance(f64),
    #[error("signal link has no finite received power")]
    EmptySignal,
    #[error("interferer on carrier {1} does not share the signal carrier {0}")]
    CarrierMismatch(CarrierId, CarrierId),
    #[error("invalid radio configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    /// Macro layer.
    One,
    /// Small cells.
    Two,
}

impl Tier {
    pub fn number(self) -> u8 {
        match self {
            Tier::One => 1,
            Tier::Two => 2,
        }
    }
}
