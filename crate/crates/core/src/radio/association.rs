//! Serving-node selection for the four deployment scenarios.

use serde::{Deserialize, Serialize};

use super::link::LinkModelConfig;
use super::topology::Topology;
use super::Tier;
use crate::{CarrierId, NodeId, UeId};

/// Primary Tier-1 carrier.
pub const TIER1_CARRIER: CarrierId = CarrierId(0);
/// Second Tier-1 component carrier used for CA duplication.
pub const TIER1_CA_CARRIER: CarrierId = CarrierId(1);
/// Tier-2 carrier when Tier-2 is not co-channel with Tier-1.
pub const TIER2_CARRIER: CarrierId = CarrierId(2);
pub const N_CARRIERS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    /// Tier-1 only, single connectivity.
    S1,
    /// Tier-1 only, duplication over two component carriers.
    S1Ca,
    /// Both tiers, single connectivity to the strongest node.
    S2,
    /// Both tiers, DC duplication where the UE is covered by both tiers.
    S3,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::S1, Scenario::S1Ca, Scenario::S2, Scenario::S3];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::S1 => "S1",
            Scenario::S1Ca => "S1_CA",
            Scenario::S2 => "S2",
            Scenario::S3 => "S3",
        }
    }

    pub fn uses_tier2(self) -> bool {
        matches!(self, Scenario::S2 | Scenario::S3)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "S1" | "s1" => Ok(Scenario::S1),
            "S1_CA" | "s1_ca" | "S1CA" => Ok(Scenario::S1Ca),
            "S2" | "s2" => Ok(Scenario::S2),
            "S3" | "s3" => Ok(Scenario::S3),
            other => Err(format!("unknown scenario '{other}'")),
        }
    }
}

pub fn carrier_of(tier: Tier, link: &LinkModelConfig) -> CarrierId {
    match tier {
        Tier::One => TIER1_CARRIER,
        Tier::Two if link.tier2_cochannel => TIER1_CARRIER,
        Tier::Two => TIER2_CARRIER,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServingLeg {
    pub node: NodeId,
    pub carrier: CarrierId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Association {
    pub ue: UeId,
    /// Leg 0 is the master (PDCP anchor, default leg); leg 1, when present,
    /// is the duplicate leg.
    pub legs: Vec<ServingLeg>,
    /// Node selected by maximum mean received power; the node whose load the
    /// UE counts towards.
    pub primary: NodeId,
}

impl Association {
    pub fn is_dual(&self) -> bool {
        self.legs.len() == 2
    }

    /// Distinct serving nodes.
    pub fn nodes(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.legs.iter().map(|l| l.node).collect();
        v.dedup();
        v
    }

    /// True when the duplicate leg terminates in another gNB (DC).
    pub fn is_dc(&self) -> bool {
        self.is_dual() && self.legs[0].node != self.legs[1].node
    }
}

fn strongest<'a>(
    topo: &Topology,
    link: &LinkModelConfig,
    ue: UeId,
    candidates: impl Iterator<Item = &'a super::Node>,
) -> Option<NodeId> {
    candidates
        .map(|n| (n.id, topo.mean_dl_dbm(ue, n.id, link)))
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(id, _)| id)
}

/// Serving legs of one UE. Every scenario has a Tier-1 candidate, so no UE
/// is left unserved.
pub fn associate(topo: &Topology, link: &LinkModelConfig, ue: UeId, scenario: Scenario) -> Association {
    let t1 = strongest(topo, link, ue, topo.tier1()).expect("topology has Tier-1 nodes");
    let leg = |node: NodeId| ServingLeg {
        node,
        carrier: carrier_of(topo.node(node).tier, link),
    };
    match scenario {
        Scenario::S1 => Association {
            ue,
            legs: vec![leg(t1)],
            primary: t1,
        },
        Scenario::S1Ca => Association {
            ue,
            legs: vec![
                ServingLeg {
                    node: t1,
                    carrier: TIER1_CARRIER,
                },
                ServingLeg {
                    node: t1,
                    carrier: TIER1_CA_CARRIER,
                },
            ],
            primary: t1,
        },
        Scenario::S2 | Scenario::S3 => {
            let best = strongest(topo, link, ue, topo.nodes.iter()).expect("non-empty");
            let single = Association {
                ue,
                legs: vec![leg(best)],
                primary: best,
            };
            if scenario == Scenario::S2 {
                return single;
            }
            let tier2 = match topo.node(best).tier {
                Tier::One => strongest(topo, link, ue, topo.tier2().filter(|n| topo.covers(n.id, ue))),
                Tier::Two => topo.covers(best, ue).then_some(best),
            };
            match tier2 {
                Some(t2) if topo.covers(t1, ue) => Association {
                    ue,
                    legs: vec![leg(t1), leg(t2)],
                    primary: best,
                },
                _ => single,
            }
        }
    }
}

pub fn associate_all(topo: &Topology, link: &LinkModelConfig, scenario: Scenario) -> Vec<Association> {
    topo.ues.iter().map(|u| associate(topo, link, u.id, scenario)).collect()
}
