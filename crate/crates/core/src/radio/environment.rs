//! Per-iteration radio state and per-TTI transmission outcomes.
//!
//! Long-term gains are fixed when the environment is built. Fast fading and
//! interferer activity are keyed on (UE, node, TTI) and (node, carrier, TTI)
//! so every attempt sees a reproducible channel regardless of event order,
//! and the same link in the same TTI always sees the same block.

use serde::{Deserialize, Serialize};

use super::association::{carrier_of, Association, Scenario, N_CARRIERS, TIER1_CA_CARRIER};
use super::link::{FadingModel, LinkModelConfig};
use super::propagation::{db_to_linear, linear_to_db};
use super::topology::Topology;
use super::Tier;
use crate::seed::{derive, unit, unit_open0};
use crate::{CarrierId, NodeId, UeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Uplink,
    Downlink,
}

impl Direction {
    fn index(self) -> usize {
        match self {
            Direction::Downlink => 0,
            Direction::Uplink => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Uplink => "uplink",
            Direction::Downlink => "downlink",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dl" | "downlink" | "DL" => Ok(Direction::Downlink),
            "ul" | "uplink" | "UL" => Ok(Direction::Uplink),
            other => Err(format!("unknown direction '{other}'")),
        }
    }
}

const STREAM_FADING: u64 = 1;
const STREAM_ACTIVITY: u64 = 2;
const STREAM_SCHEDULE: u64 = 3;

pub struct RadioEnvironment {
    fading: FadingModel,
    rho: f64,
    n_nodes: usize,
    dl_mw: Vec<f64>,
    ul_mw: Vec<f64>,
    /// Probability a node transmits on each carrier in a TTI.
    activity: [Vec<[f64; N_CARRIERS]>; 2],
    /// Nodes operating on each carrier.
    on_carrier: [Vec<NodeId>; N_CARRIERS],
    /// UEs counted towards each node's load (uplink interferer candidates).
    members: Vec<Vec<UeId>>,
    /// Indexed by direction, then carrier.
    noise_mw: [[f64; N_CARRIERS]; 2],
    beta_dl: f64,
    beta_ul: f64,
    seed: u64,
}

impl RadioEnvironment {
    /// `associations` must be the scenario's association of every UE of
    /// `topo`, in UE order.
    pub fn new(
        topo: &Topology,
        link: &LinkModelConfig,
        scenario: Scenario,
        associations: &[Association],
        seed: u64,
    ) -> Self {
        let n_nodes = topo.nodes.len();
        let mut dl_mw = Vec::with_capacity(topo.ues.len() * n_nodes);
        let mut ul_mw = Vec::with_capacity(topo.ues.len() * n_nodes);
        for u in &topo.ues {
            for n in &topo.nodes {
                dl_mw.push(db_to_linear(topo.mean_dl_dbm(u.id, n.id, link)));
                ul_mw.push(db_to_linear(topo.mean_ul_dbm(u.id, n.id, link)));
            }
        }
        let mut members = vec![Vec::new(); n_nodes];
        for a in associations {
            members[a.primary.0 as usize].push(a.ue);
        }
        let activity = [false, true].map(|uplink| {
            members
                .iter()
                .map(|m| {
                    std::array::from_fn(|c| {
                        (m.len() as f64 / link.carrier_packets_per_tti(CarrierId(c as u8), uplink)).min(1.0)
                    })
                })
                .collect()
        });
        let mut on_carrier: [Vec<NodeId>; N_CARRIERS] = Default::default();
        for n in &topo.nodes {
            if n.tier == Tier::Two && !scenario.uses_tier2() {
                continue;
            }
            on_carrier[carrier_of(n.tier, link).0 as usize].push(n.id);
            if n.tier == Tier::One && scenario == Scenario::S1Ca {
                on_carrier[TIER1_CA_CARRIER.0 as usize].push(n.id);
            }
        }
        let noise_mw = [false, true]
            .map(|uplink| std::array::from_fn(|c| db_to_linear(link.carrier_noise_dbm(CarrierId(c as u8), uplink))));
        RadioEnvironment {
            fading: link.fading,
            rho: link.ca_fading_correlation,
            n_nodes,
            dl_mw,
            ul_mw,
            activity,
            on_carrier,
            members,
            noise_mw,
            beta_dl: db_to_linear(link.beta_for(false)),
            beta_ul: db_to_linear(link.beta_for(true)),
            seed,
        }
    }

    pub fn activity(&self, dir: Direction, node: NodeId, carrier: CarrierId) -> f64 {
        self.activity[dir.index()][node.0 as usize][carrier.0 as usize]
    }

    /// Power gain of the fast fading on `carrier` for the UE-node pair in
    /// TTI `tti`.
    pub fn fading_gain(&self, ue: UeId, node: NodeId, carrier: CarrierId, tti: u64) -> f64 {
        match self.fading {
            FadingModel::None => 1.0,
            FadingModel::RayleighBlock => {
                let base = [STREAM_FADING, ue.0 as u64, node.0 as u64, tti];
                let h = derive(self.seed, &[base[0], base[1], base[2], base[3], 1 + carrier.0 as u64]);
                if self.rho <= 0.0 {
                    // |amplitude|^2 without the phase
                    return -unit_open0(h).ln();
                }
                let own = amplitude(h);
                let common = amplitude(derive(self.seed, &[base[0], base[1], base[2], base[3], 0]));
                let (a, b) = (self.rho.sqrt(), (1.0 - self.rho).sqrt());
                let re = a * common.0 + b * own.0;
                let im = a * common.1 + b * own.1;
                re * re + im * im
            }
        }
    }

    fn active(&self, dir: Direction, node: NodeId, carrier: CarrierId, tti: u64) -> bool {
        let p = self.activity(dir, node, carrier);
        p >= 1.0
            || (p > 0.0
                && unit(derive(
                    self.seed,
                    &[STREAM_ACTIVITY, node.0 as u64, carrier.0 as u64, tti],
                )) < p)
    }

    fn scheduled_ue(&self, node: NodeId, carrier: CarrierId, tti: u64) -> Option<UeId> {
        let m = &self.members[node.0 as usize];
        if m.is_empty() {
            return None;
        }
        let h = derive(self.seed, &[STREAM_SCHEDULE, node.0 as u64, carrier.0 as u64, tti]);
        Some(m[(h % m.len() as u64) as usize])
    }

    /// Received signal power and noise-plus-interference power, both in mW.
    pub fn signal_and_impairment(
        &self,
        dir: Direction,
        ue: UeId,
        node: NodeId,
        carrier: CarrierId,
        tti: u64,
    ) -> (f64, f64) {
        let idx = |u: UeId, n: NodeId| u.0 as usize * self.n_nodes + n.0 as usize;
        let mut imp = self.noise_mw[dir.index()][carrier.0 as usize];
        let signal;
        match dir {
            Direction::Downlink => {
                signal = self.dl_mw[idx(ue, node)] * self.fading_gain(ue, node, carrier, tti);
                for &j in &self.on_carrier[carrier.0 as usize] {
                    if j != node && self.active(dir, j, carrier, tti) {
                        imp += self.dl_mw[idx(ue, j)] * self.fading_gain(ue, j, carrier, tti);
                    }
                }
            }
            Direction::Uplink => {
                signal = self.ul_mw[idx(ue, node)] * self.fading_gain(ue, node, carrier, tti);
                for &j in &self.on_carrier[carrier.0 as usize] {
                    if j == node || !self.active(dir, j, carrier, tti) {
                        continue;
                    }
                    if let Some(k) = self.scheduled_ue(j, carrier, tti) {
                        if k != ue {
                            imp += self.ul_mw[idx(k, node)] * self.fading_gain(k, node, carrier, tti);
                        }
                    }
                }
            }
        }
        (signal, imp)
    }

    pub fn sinr_db(&self, dir: Direction, ue: UeId, node: NodeId, carrier: CarrierId, tti: u64) -> f64 {
        let (s, i) = self.signal_and_impairment(dir, ue, node, carrier, tti);
        linear_to_db(s / i)
    }

    /// Outcome of an attempt in TTI `tti`: success iff SINR >= beta.
    pub fn success(&self, dir: Direction, ue: UeId, node: NodeId, carrier: CarrierId, tti: u64) -> bool {
        let beta = match dir {
            Direction::Downlink => self.beta_dl,
            Direction::Uplink => self.beta_ul,
        };
        if beta == 0.0 {
            return true;
        }
        if beta.is_infinite() {
            return false;
        }
        let (s, i) = self.signal_and_impairment(dir, ue, node, carrier, tti);
        s >= beta * i
    }
}

/// Unit-power complex Gaussian sample via Box-Muller.
fn amplitude(h: u64) -> (f64, f64) {
    let u1 = unit_open0(h);
    let u2 = unit(crate::seed::splitmix64(h));
    let r = (-u1.ln()).sqrt();
    let th = std::f64::consts::TAU * u2;
    (r * th.cos(), r * th.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::association::associate_all;
    use crate::radio::topology::TopologyConfig;

    fn env(scenario: Scenario, link: &LinkModelConfig, seed: u64) -> (Topology, RadioEnvironment) {
        env_with(scenario, link, seed, 3)
    }

    fn env_with(scenario: Scenario, link: &LinkModelConfig, seed: u64, n_tier1: usize) -> (Topology, RadioEnvironment) {
        let cfg = TopologyConfig {
            placement_seed: seed,
            n_tier1,
            ..TopologyConfig::default()
        };
        let mut t = Topology::generate(&cfg).unwrap();
        t.sample_shadowing(link, seed + 1);
        let a = associate_all(&t, link, scenario);
        let e = RadioEnvironment::new(&t, link, scenario, &a, seed + 2);
        (t, e)
    }

    #[test]
    fn rayleigh_power_has_unit_mean_and_exponential_tail() {
        let (_, e) = env(Scenario::S1, &LinkModelConfig::default(), 1);
        let n = 100_000u64;
        let g: Vec<f64> = (0..n)
            .map(|t| e.fading_gain(UeId(0), NodeId(0), CarrierId(0), t))
            .collect();
        let mean = g.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.02);
        // P(|h|^2 < 0.1) = 1 - exp(-0.1)
        let p = g.iter().filter(|&&x| x < 0.1).count() as f64 / n as f64;
        assert!((p - (1.0 - (-0.1f64).exp())).abs() < 0.005);
    }

    #[test]
    fn ca_correlation_couples_carriers() {
        let link = LinkModelConfig {
            ca_fading_correlation: 0.8,
            ..LinkModelConfig::default()
        };
        let (_, e) = env(Scenario::S1Ca, &link, 2);
        let n = 50_000u64;
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|t| {
                (
                    e.fading_gain(UeId(3), NodeId(1), CarrierId(0), t),
                    e.fading_gain(UeId(3), NodeId(1), CarrierId(1), t),
                )
            })
            .collect();
        let m = |f: &dyn Fn(&(f64, f64)) -> f64| pairs.iter().map(f).sum::<f64>() / n as f64;
        let (ma, mb) = (m(&|p| p.0), m(&|p| p.1));
        let cov = m(&|p| (p.0 - ma) * (p.1 - mb));
        let va = m(&|p| (p.0 - ma).powi(2));
        let vb = m(&|p| (p.1 - mb).powi(2));
        // power correlation of jointly Gaussian amplitudes is rho^2
        let r = cov / (va * vb).sqrt();
        assert!((r - 0.64).abs() < 0.03, "{r}");
    }

    #[test]
    fn uplink_sinr_below_downlink_without_interference() {
        let link = LinkModelConfig {
            fading: FadingModel::None,
            ..LinkModelConfig::default()
        };
        // a single cell has no co-channel interferer
        let (t, e) = env_with(Scenario::S1, &link, 3, 1);
        for a in associate_all(&t, &link, Scenario::S1) {
            let l = a.legs[0];
            let ul = e.sinr_db(Direction::Uplink, a.ue, l.node, l.carrier, 0);
            let dl = e.sinr_db(Direction::Downlink, a.ue, l.node, l.carrier, 0);
            assert!(ul <= dl);
            // 12 dB less power, partly offset by noise over the narrower uplink
            let offset = 10.0 * link.uplink_bandwidth_share.log10();
            assert!((dl - ul - (12.0 + offset)).abs() < 1e-9);
        }
    }

    #[test]
    fn infinite_thresholds() {
        for (beta, expect) in [(f64::NEG_INFINITY, true), (f64::INFINITY, false)] {
            let link = LinkModelConfig {
                beta_db: beta,
                ..LinkModelConfig::default()
            };
            let (_, e) = env(Scenario::S2, &link, 4);
            for tti in 0..50 {
                assert_eq!(
                    e.success(Direction::Downlink, UeId(1), NodeId(0), CarrierId(0), tti),
                    expect
                );
                assert_eq!(
                    e.success(Direction::Uplink, UeId(1), NodeId(0), CarrierId(0), tti),
                    expect
                );
            }
        }
    }

    #[test]
    fn full_load_means_always_active() {
        let link = LinkModelConfig {
            bandwidth_mhz: 1.0,
            ..LinkModelConfig::default()
        };
        let (_, e) = env(Scenario::S1, &link, 5);
        assert!((0..3).all(|n| e.activity(Direction::Downlink, NodeId(n), CarrierId(0)) == 1.0));
    }

    #[test]
    fn direction_parsing() {
        assert_eq!("dl".parse::<Direction>().unwrap(), Direction::Downlink);
        assert_eq!("uplink".parse::<Direction>().unwrap(), Direction::Uplink);
        assert!("up".parse::<Direction>().is_err());
    }
}
