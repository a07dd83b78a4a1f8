//! Event scheduling, Xn backhaul, the per-iteration engine and Monte Carlo
//! campaigns.

pub mod campaign;
pub mod config;
pub mod engine;
pub mod iteration;
pub mod scheduler;
pub mod xn;

pub use campaign::{run_campaign, CampaignResult};
pub use config::{DynamicDuplication, RunConfig, SimError};
pub use engine::{
    duplication_efficiency, simulate, BernoulliOutcomes, EngineConfig, EngineOutput, OutcomeModel, RadioOutcomes,
    Scripted, UeOutcome, UeSetup,
};
pub use iteration::{iteration_seed, run_iteration, run_iteration_detailed, IterationResult, World};
pub use scheduler::Scheduler;
pub use xn::{xn_forward, XnLink};
