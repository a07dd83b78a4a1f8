//! One Monte Carlo iteration of a scenario: topology, association, radio
//! environment and the engine run.

use serde::{Deserialize, Serialize};

use crate::control::{SignalingConfig, SignalingOverhead};
use crate::protocol::{BearerConfig, BearerKind, CellGroup, DupMode, LegDescriptor};
use crate::radio::{associate_all, Association, RadioEnvironment, Scenario, Topology};
use crate::seed::derive;
use crate::sim::config::{RunConfig, SimError};
use crate::sim::engine::{
    duplication_efficiency, simulate, EngineConfig, EngineOutput, RadioOutcomes, UeSetup, DATA_BEARER,
};

const STREAM_PLACEMENT: u64 = 1;
const STREAM_SHADOW: u64 = 2;
const STREAM_RADIO: u64 = 3;

/// Seed of iteration `index`. Scenario and direction do not enter, so runs
/// that differ only in those see the same drops, shadowing and fading.
pub fn iteration_seed(master_seed: u64, index: usize) -> u64 {
    derive(master_seed, &[index as u64])
}

/// Everything random about one iteration except the traffic outcome.
pub struct World {
    pub topology: Topology,
    pub associations: Vec<Association>,
    pub environment: RadioEnvironment,
    pub seed: u64,
}

impl World {
    pub fn build(cfg: &RunConfig, index: usize) -> Result<Self, SimError> {
        let seed = iteration_seed(cfg.master_seed, index);
        let link = cfg.link_config();
        let mut topology = Topology::generate(&cfg.topology_config(derive(seed, &[STREAM_PLACEMENT])))?;
        topology.sample_shadowing(&link, derive(seed, &[STREAM_SHADOW]));
        let associations = associate_all(&topology, &link, cfg.scenario);
        let environment = RadioEnvironment::new(
            &topology,
            &link,
            cfg.scenario,
            &associations,
            derive(seed, &[STREAM_RADIO]),
        );
        Ok(World {
            topology,
            associations,
            environment,
            seed,
        })
    }

    /// Bearer of every UE as the scenario prescribes.
    pub fn setups(&self, cfg: &RunConfig) -> Vec<UeSetup> {
        let link = cfg.link_config();
        self.associations
            .iter()
            .map(|a| {
                let measurements_dbm = a
                    .legs
                    .iter()
                    .map(|l| self.topology.mean_dl_dbm(a.ue, l.node, &link))
                    .collect();
                let (bearer, xn_leg) = match (cfg.scenario, a.legs.as_slice()) {
                    (Scenario::S1Ca, [p, s]) => (
                        BearerConfig::duplicate(
                            DATA_BEARER,
                            LegDescriptor::new(CellGroup::Mcg, p.node, p.carrier, 4),
                            LegDescriptor::new(CellGroup::Mcg, s.node, s.carrier, 5),
                            DupMode::Ca,
                            true,
                        ),
                        None,
                    ),
                    (_, [m, s]) => (
                        BearerConfig::dc_split(
                            DATA_BEARER,
                            LegDescriptor::new(CellGroup::Mcg, m.node, m.carrier, 4),
                            LegDescriptor::new(CellGroup::Scg, s.node, s.carrier, 4),
                            cfg.split_threshold_bytes,
                        )
                        .with_duplication(DupMode::Dc, true),
                        Some(1),
                    ),
                    (_, legs) => (
                        BearerConfig::single_leg(
                            DATA_BEARER,
                            BearerKind::Mcg,
                            LegDescriptor::new(CellGroup::Mcg, legs[0].node, legs[0].carrier, 4),
                        ),
                        None,
                    ),
                };
                UeSetup {
                    ue: a.ue,
                    bearer,
                    xn_leg,
                    measurements_dbm,
                }
            })
            .collect()
    }
}

pub fn engine_config(cfg: &RunConfig, index: usize) -> EngineConfig {
    EngineConfig {
        direction: cfg.direction,
        packets_per_user: cfg.packets_per_user,
        latency_budget: cfg.latency_budget(),
        xn_latency: cfg.xn_latency(),
        rlc: cfg.rlc,
        sn_space: cfg.sn_space(),
        cross_leg_discard: cfg.cross_leg_discard,
        signaling: SignalingConfig {
            tti: cfg.rlc.tti,
            ..SignalingConfig::default()
        },
        dynamic: cfg.dynamic,
        iteration: index,
    }
}

/// Aggregates of one iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub iteration: usize,
    pub seed: u64,
    pub generated: u64,
    pub delivered_within: u64,
    pub delivered_late: u64,
    pub lost: u64,
    /// Mean over UEs of the per-UE PDR.
    pub network_pdr: f64,
    pub per_ue_pdr: Vec<f64>,
    /// Mean first-delivery latency over delivered packets (ms).
    pub mean_latency_ms: Option<f64>,
    pub duplicated: u64,
    pub default_first_failed: u64,
    pub duplication_efficiency: Option<f64>,
    pub attempts: u64,
    pub avoided_retx: u64,
    pub redundant_retx: u64,
    pub dual_ues: usize,
    pub signaling: SignalingOverhead,
}

impl IterationResult {
    pub fn from_output(iteration: usize, seed: u64, out: &EngineOutput, cfg: &EngineConfig, dual_ues: usize) -> Self {
        let budget = cfg.latency_budget;
        let (mut generated, mut within, mut delivered) = (0u64, 0u64, 0u64);
        let (mut lat_sum_us, mut lat_n) = (0u64, 0u64);
        let mut signaling = SignalingOverhead::default();
        let mut per_ue_pdr = Vec::with_capacity(out.ues.len());
        for u in &out.ues {
            let w = u.within(budget);
            generated += u.generated() as u64;
            within += w as u64;
            delivered += u.delivered() as u64;
            per_ue_pdr.push(if u.generated() == 0 {
                0.0
            } else {
                w as f64 / u.generated() as f64
            });
            for l in u.latencies.iter().flatten() {
                lat_sum_us += l.as_us();
                lat_n += 1;
            }
            signaling.merge(&u.overhead);
        }
        // every UE generates the same quota, so the per-UE mean is the
        // pooled ratio; integer counts keep equal outcomes bit-identical
        let network_pdr = if generated == 0 {
            0.0
        } else {
            within as f64 / generated as f64
        };
        IterationResult {
            iteration,
            seed,
            generated,
            delivered_within: within,
            delivered_late: delivered - within,
            lost: generated - delivered,
            network_pdr,
            per_ue_pdr,
            mean_latency_ms: (lat_n > 0).then(|| lat_sum_us as f64 / lat_n as f64 / 1000.0),
            duplicated: out.ues.iter().map(|u| u.duplicated).sum(),
            default_first_failed: out.ues.iter().map(|u| u.default_first_failed).sum(),
            duplication_efficiency: duplication_efficiency(&out.ues),
            attempts: out.ues.iter().map(|u| u.attempts()).sum(),
            avoided_retx: out.ues.iter().map(|u| u.avoided_retx).sum(),
            redundant_retx: out.ues.iter().map(|u| u.redundant_retx).sum(),
            dual_ues,
            signaling,
        }
    }

    pub fn conserves(&self) -> bool {
        self.generated == self.delivered_within + self.delivered_late + self.lost
    }
}

/// Runs iteration `index` and returns the engine output alongside.
pub fn run_iteration_detailed(cfg: &RunConfig, index: usize) -> Result<(IterationResult, EngineOutput), SimError> {
    let world = World::build(cfg, index)?;
    let ecfg = engine_config(cfg, index);
    let model = RadioOutcomes {
        env: &world.environment,
        direction: cfg.direction,
    };
    let out = simulate(world.setups(cfg), &ecfg, &model)?;
    let dual = world.associations.iter().filter(|a| a.is_dual()).count();
    let res = IterationResult::from_output(index, world.seed, &out, &ecfg, dual);
    if !res.conserves() {
        return Err(SimError::Invariant {
            iteration: index,
            detail: "packet conservation violated".into(),
        });
    }
    Ok((res, out))
}

pub fn run_iteration(cfg: &RunConfig, index: usize) -> Result<IterationResult, SimError> {
    run_iteration_detailed(cfg, index).map(|(r, _)| r)
}
