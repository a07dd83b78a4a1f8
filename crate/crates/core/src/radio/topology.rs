//! Hexagonal Tier-1 layout, random Tier-2 and UE drops, and log-normal
//! shadowing.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_pcg::Pcg64Mcg;
use serde::{Deserialize, Serialize};

use super::association::Association;
use super::link::LinkModelConfig;
use super::{RadioError, Tier};
use crate::{NodeId, UeId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyConfig {
    pub tier1_cell_radius_m: f64,
    pub tier2_cell_radius_m: f64,
    pub n_tier1: usize,
    /// Tier-2 gNBs per Tier-1 gNB.
    pub n_sc: usize,
    pub ues_per_tier1: usize,
    pub placement_seed: u64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            tier1_cell_radius_m: 30.0,
            tier2_cell_radius_m: 20.0,
            n_tier1: 3,
            n_sc: 2,
            ues_per_tier1: 50,
            placement_seed: 0,
        }
    }
}

impl TopologyConfig {
    /// Centre-to-centre distance of neighbouring hexagonal cells.
    pub fn inter_site_distance_m(&self) -> f64 {
        3f64.sqrt() * self.tier1_cell_radius_m
    }

    pub fn validate(&self) -> Result<(), RadioError> {
        if self.n_tier1 == 0 {
            return Err(RadioError::Config("at least one Tier-1 gNB is required".into()));
        }
        for (name, r) in [
            ("tier1_cell_radius_m", self.tier1_cell_radius_m),
            ("tier2_cell_radius_m", self.tier2_cell_radius_m),
        ] {
            if !(r > 0.0 && r.is_finite()) {
                return Err(RadioError::Config(format!("{name} must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub tier: Tier,
    pub x: f64,
    pub y: f64,
    /// Tier-1 gNB whose disc the node was dropped in.
    pub parent: Option<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ue {
    pub id: UeId,
    pub x: f64,
    pub y: f64,
    /// Tier-1 gNB whose disc the UE was dropped in.
    pub home: NodeId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    pub config: TopologyConfig,
    /// Tier-1 nodes first, then Tier-2 nodes grouped by parent.
    pub nodes: Vec<Node>,
    pub ues: Vec<Ue>,
    /// Shadowing in dB, indexed `ue * nodes.len() + node`; shared by uplink
    /// and downlink.
    shadow_db: Vec<f64>,
}

/// Hexagonal site centres, nearest rings first and counter-clockwise from
/// the positive x axis inside a ring.
pub fn hex_sites(n: usize, isd: f64) -> Vec<(f64, f64)> {
    let mut rings = 0i64;
    while ((3 * rings * (rings + 1) + 1) as usize) < n {
        rings += 1;
    }
    let mut axial = Vec::new();
    for q in -rings..=rings {
        for r in -rings..=rings {
            let dist = (q.abs() + r.abs() + (q + r).abs()) / 2;
            if dist <= rings {
                axial.push((dist, q, r));
            }
        }
    }
    let h = 3f64.sqrt() / 2.0;
    let mut sites: Vec<(i64, f64, f64, f64)> = axial
        .into_iter()
        .map(|(dist, q, r)| {
            let x = isd * (q as f64 + r as f64 / 2.0);
            let y = isd * h * r as f64;
            let angle = y.atan2(x).rem_euclid(std::f64::consts::TAU);
            (dist, angle, x, y)
        })
        .collect();
    sites.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    sites.truncate(n);
    sites.into_iter().map(|(_, _, x, y)| (clean(x), clean(y))).collect()
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-9 {
        0.0
    } else {
        v
    }
}

fn uniform_in_disc<R: Rng + ?Sized>(rng: &mut R, cx: f64, cy: f64, radius: f64) -> (f64, f64) {
    let r = radius * rng.random::<f64>().sqrt();
    let th = std::f64::consts::TAU * rng.random::<f64>();
    (cx + r * th.cos(), cy + r * th.sin())
}

impl Topology {
    /// Drops nodes and UEs from `placement_seed`. Shadowing stays zero until
    /// [`Topology::sample_shadowing`] is called, which must also follow any
    /// manual edit of `nodes` or `ues`.
    pub fn generate(config: &TopologyConfig) -> Result<Self, RadioError> {
        config.validate()?;
        let mut rng = Pcg64Mcg::seed_from_u64(config.placement_seed);
        let r1 = config.tier1_cell_radius_m;
        let mut nodes: Vec<Node> = hex_sites(config.n_tier1, config.inter_site_distance_m())
            .into_iter()
            .enumerate()
            .map(|(i, (x, y))| Node {
                id: NodeId(i as u32),
                tier: Tier::One,
                x,
                y,
                parent: None,
            })
            .collect();
        for p in 0..config.n_tier1 {
            let (cx, cy) = (nodes[p].x, nodes[p].y);
            for _ in 0..config.n_sc {
                let (x, y) = uniform_in_disc(&mut rng, cx, cy, r1);
                nodes.push(Node {
                    id: NodeId(nodes.len() as u32),
                    tier: Tier::Two,
                    x,
                    y,
                    parent: Some(NodeId(p as u32)),
                });
            }
        }
        let mut ues = Vec::with_capacity(config.n_tier1 * config.ues_per_tier1);
        for (p, home) in nodes.iter().take(config.n_tier1).enumerate() {
            for _ in 0..config.ues_per_tier1 {
                let (x, y) = uniform_in_disc(&mut rng, home.x, home.y, r1);
                ues.push(Ue {
                    id: UeId(ues.len() as u32),
                    x,
                    y,
                    home: NodeId(p as u32),
                });
            }
        }
        let shadow_db = vec![0.0; ues.len() * nodes.len()];
        Ok(Topology {
            config: config.clone(),
            nodes,
            ues,
            shadow_db,
        })
    }

    /// Draws one shadowing value per UE-node link with the tier's standard
    /// deviation. Called once per Monte Carlo iteration.
    pub fn sample_shadowing(&mut self, link: &LinkModelConfig, seed: u64) {
        let mut rng = Pcg64Mcg::seed_from_u64(seed);
        let n = self.nodes.len();
        self.shadow_db.resize(self.ues.len() * n, 0.0);
        for (i, s) in self.shadow_db.iter_mut().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            *s = z * link.shadow_std_db(self.nodes[i % n].tier);
        }
    }

    pub fn shadow_db(&self, ue: UeId, node: NodeId) -> f64 {
        self.shadow_db[ue.0 as usize * self.nodes.len() + node.0 as usize]
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn ue(&self, id: UeId) -> &Ue {
        &self.ues[id.0 as usize]
    }

    pub fn tier1(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.tier == Tier::One)
    }

    pub fn tier2(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.tier == Tier::Two)
    }

    pub fn distance_m(&self, ue: UeId, node: NodeId) -> f64 {
        let (u, n) = (self.ue(ue), self.node(node));
        (u.x - n.x).hypot(u.y - n.y)
    }

    pub fn coverage_radius_m(&self, tier: Tier) -> f64 {
        match tier {
            Tier::One => self.config.tier1_cell_radius_m,
            Tier::Two => self.config.tier2_cell_radius_m,
        }
    }

    pub fn covers(&self, node: NodeId, ue: UeId) -> bool {
        self.distance_m(ue, node) <= self.coverage_radius_m(self.node(node).tier)
    }

    /// Long-term downlink received power (path loss and shadowing only).
    pub fn mean_dl_dbm(&self, ue: UeId, node: NodeId, link: &LinkModelConfig) -> f64 {
        let tier = self.node(node).tier;
        link.dl_power_dbm(tier) - self.pathloss_db(ue, node, link) - self.shadow_db(ue, node)
    }

    pub fn mean_ul_dbm(&self, ue: UeId, node: NodeId, link: &LinkModelConfig) -> f64 {
        link.tx_power_ul_dbm - self.pathloss_db(ue, node, link) - self.shadow_db(ue, node)
    }

    pub fn pathloss_db(&self, ue: UeId, node: NodeId, link: &LinkModelConfig) -> f64 {
        let d = self.distance_m(ue, node).max(link.min_distance_m);
        super::propagation::pathloss_db_at(d, link.carrier_hz()).expect("distance is clamped to a positive floor")
    }

    /// Plain-text listing of nodes, UEs and (optionally) their serving sets.
    pub fn dump(&self, associations: Option<&[Association]>) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "# topology n_tier1={} n_sc={} ues={} tier1_radius_m={:.6} tier2_radius_m={:.6}",
            c.n_tier1,
            c.n_sc,
            self.ues.len(),
            c.tier1_cell_radius_m,
            c.tier2_cell_radius_m
        );
        let _ = writeln!(out, "# kind id tier x_m y_m parent");
        for n in &self.nodes {
            let parent = n.parent.map_or("-".to_string(), |p| p.0.to_string());
            let _ = writeln!(
                out,
                "node {} {} {:.6} {:.6} {}",
                n.id.0,
                n.tier.number(),
                n.x,
                n.y,
                parent
            );
        }
        let _ = writeln!(out, "# kind id home x_m y_m serving");
        for u in &self.ues {
            let serving = associations
                .and_then(|a| a.get(u.id.0 as usize))
                .map(|a| {
                    a.legs
                        .iter()
                        .map(|l| format!("{}@{}", l.node.0, l.carrier.0))
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(out, "ue {} {} {:.6} {:.6} {}", u.id.0, u.home.0, u.x, u.y, serving);
        }
        out
    }
}
