//! Radio bearer configuration: kinds, legs and the duplication constraints
//! checked when RRC configures a bearer.

use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::{BearerId, CarrierId, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BearerKind {
    /// Terminated in the master cell group only.
    Mcg,
    /// Terminated in the secondary cell group only.
    Scg,
    /// PDCP in the master node, routing by split threshold over two legs.
    Split,
    /// Both legs kept; inactive duplication transmits on the default leg.
    Duplicate,
    /// Signaling radio bearer.
    Srb,
}

impl BearerKind {
    pub fn label(self) -> &'static str {
        match self {
            BearerKind::Mcg => "MCG",
            BearerKind::Scg => "SCG",
            BearerKind::Split => "split",
            BearerKind::Duplicate => "duplicate",
            BearerKind::Srb => "SRB",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellGroup {
    Mcg,
    Scg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DupMode {
    /// Legs in different cell groups (two MAC entities).
    Dc,
    /// Legs on different carriers of one MAC entity.
    Ca,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SrbType {
    Srb1,
    Srb2,
}

/// One RLC/MAC path of a bearer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LegDescriptor {
    pub cell_group: CellGroup,
    pub node: NodeId,
    pub carrier: CarrierId,
    pub lcid: u8,
}

impl LegDescriptor {
    pub fn new(cell_group: CellGroup, node: NodeId, carrier: CarrierId, lcid: u8) -> Self {
        LegDescriptor {
            cell_group,
            node,
            carrier,
            lcid,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BearerConfig {
    pub bearer_id: BearerId,
    pub kind: BearerKind,
    pub legs: Vec<LegDescriptor>,
    pub default_leg: usize,
    pub split_threshold_bytes: u64,
    pub duplication_configured: bool,
    pub initial_duplication_active: bool,
    pub dup_mode: DupMode,
    pub srb_type: Option<SrbType>,
}

impl BearerConfig {
    /// A bearer with one leg and no duplication.
    pub fn single_leg(bearer_id: BearerId, kind: BearerKind, leg: LegDescriptor) -> Self {
        BearerConfig {
            bearer_id,
            kind,
            legs: vec![leg],
            default_leg: 0,
            split_threshold_bytes: 0,
            duplication_configured: false,
            initial_duplication_active: false,
            dup_mode: DupMode::Dc,
            srb_type: None,
        }
    }

    /// Architecture-3C split bearer over an MCG and an SCG leg, default leg MCG.
    pub fn dc_split(bearer_id: BearerId, mcg: LegDescriptor, scg: LegDescriptor, split_threshold_bytes: u64) -> Self {
        BearerConfig {
            bearer_id,
            kind: BearerKind::Split,
            legs: vec![mcg, scg],
            default_leg: 0,
            split_threshold_bytes,
            duplication_configured: false,
            initial_duplication_active: false,
            dup_mode: DupMode::Dc,
            srb_type: None,
        }
    }

    /// Duplicate bearer with both legs configured.
    pub fn duplicate(
        bearer_id: BearerId,
        primary: LegDescriptor,
        secondary: LegDescriptor,
        dup_mode: DupMode,
        initial_active: bool,
    ) -> Self {
        BearerConfig {
            bearer_id,
            kind: BearerKind::Duplicate,
            legs: vec![primary, secondary],
            default_leg: 0,
            split_threshold_bytes: 0,
            duplication_configured: true,
            initial_duplication_active: initial_active,
            dup_mode,
            srb_type: None,
        }
    }

    pub fn srb(bearer_id: BearerId, srb_type: SrbType, legs: Vec<LegDescriptor>) -> Self {
        let two = legs.len() == 2;
        BearerConfig {
            bearer_id,
            kind: BearerKind::Srb,
            legs,
            default_leg: 0,
            split_threshold_bytes: 0,
            duplication_configured: two,
            initial_duplication_active: false,
            dup_mode: DupMode::Dc,
            srb_type: Some(srb_type),
        }
    }

    pub fn with_duplication(mut self, dup_mode: DupMode, initial_active: bool) -> Self {
        self.duplication_configured = true;
        self.dup_mode = dup_mode;
        self.initial_duplication_active = initial_active;
        self
    }

    pub fn is_two_leg(&self) -> bool {
        self.legs.len() == 2
    }

    pub fn other_leg(&self) -> usize {
        1 - self.default_leg.min(1)
    }

    /// MAC logical-channel priority; lower is served first.
    pub fn priority(&self) -> u8 {
        match self.srb_type {
            Some(SrbType::Srb1) => 1,
            Some(SrbType::Srb2) => 3,
            None => 8,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let id = self.bearer_id;
        let n = self.legs.len();
        if !(1..=2).contains(&n) {
            return Err(ConfigError::LegCount(id, n));
        }
        if self.default_leg >= n {
            return Err(ConfigError::DefaultLeg(id, self.default_leg));
        }
        match self.kind {
            BearerKind::Split | BearerKind::Duplicate if n != 2 => {
                return Err(ConfigError::NeedsTwoLegs(id, self.kind.label()));
            }
            _ if self.duplication_configured && n != 2 => {
                return Err(ConfigError::NeedsTwoLegs(id, "duplicated"));
            }
            BearerKind::Mcg | BearerKind::Scg if n == 2 && !self.duplication_configured => {
                return Err(ConfigError::LegCount(id, n));
            }
            _ => {}
        }
        if (self.kind == BearerKind::Srb) != self.srb_type.is_some() {
            return Err(ConfigError::SrbType(id));
        }
        if self.initial_duplication_active && !self.duplication_configured {
            return Err(ConfigError::ActiveWithoutConfigured(id));
        }
        if n == 2 {
            let (a, b) = (&self.legs[0], &self.legs[1]);
            if a.lcid == b.lcid && a.cell_group == b.cell_group {
                return Err(ConfigError::LcidCollision(id));
            }
            match self.dup_mode {
                DupMode::Ca => {
                    if a.cell_group != b.cell_group || a.node != b.node {
                        return Err(ConfigError::CaAcrossGroups(id));
                    }
                    if a.carrier == b.carrier {
                        return Err(ConfigError::SameCarrier(id));
                    }
                }
                DupMode::Dc => {
                    if a.cell_group == b.cell_group {
                        return Err(ConfigError::DcSameGroup(id));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leg(group: CellGroup, node: u32, carrier: u8, lcid: u8) -> LegDescriptor {
        LegDescriptor::new(group, NodeId(node), CarrierId(carrier), lcid)
    }

    #[test]
    fn dc_split_is_valid() {
        let b = BearerConfig::dc_split(
            BearerId(1),
            leg(CellGroup::Mcg, 0, 0, 4),
            leg(CellGroup::Scg, 5, 2, 4),
            1000,
        );
        assert_eq!(b.validate(), Ok(()));
        assert_eq!(b.with_duplication(DupMode::Dc, true).validate(), Ok(()));
    }

    #[test]
    fn same_carrier_ca_rejected() {
        let b = BearerConfig::duplicate(
            BearerId(1),
            leg(CellGroup::Mcg, 0, 0, 4),
            leg(CellGroup::Mcg, 0, 0, 5),
            DupMode::Ca,
            true,
        );
        assert_eq!(b.validate(), Err(ConfigError::SameCarrier(BearerId(1))));
    }

    #[test]
    fn ca_across_nodes_rejected() {
        let b = BearerConfig::duplicate(
            BearerId(1),
            leg(CellGroup::Mcg, 0, 0, 4),
            leg(CellGroup::Scg, 3, 1, 5),
            DupMode::Ca,
            false,
        );
        assert_eq!(b.validate(), Err(ConfigError::CaAcrossGroups(BearerId(1))));
    }

    #[test]
    fn split_needs_two_legs() {
        let mut b = BearerConfig::single_leg(BearerId(2), BearerKind::Split, leg(CellGroup::Mcg, 0, 0, 4));
        assert!(matches!(b.validate(), Err(ConfigError::NeedsTwoLegs(..))));
        b.kind = BearerKind::Mcg;
        b.duplication_configured = true;
        assert!(matches!(b.validate(), Err(ConfigError::NeedsTwoLegs(..))));
    }

    #[test]
    fn active_requires_configured() {
        let mut b = BearerConfig::single_leg(BearerId(2), BearerKind::Mcg, leg(CellGroup::Mcg, 0, 0, 4));
        b.initial_duplication_active = true;
        assert_eq!(b.validate(), Err(ConfigError::ActiveWithoutConfigured(BearerId(2))));
    }

    #[test]
    fn srb_priorities() {
        let s1 = BearerConfig::srb(BearerId(1), SrbType::Srb1, vec![leg(CellGroup::Mcg, 0, 0, 1)]);
        let s2 = BearerConfig::srb(BearerId(2), SrbType::Srb2, vec![leg(CellGroup::Mcg, 0, 0, 2)]);
        let d = BearerConfig::single_leg(BearerId(3), BearerKind::Mcg, leg(CellGroup::Mcg, 0, 0, 4));
        assert!(s1.priority() < s2.priority() && s2.priority() < d.priority());
        assert_eq!(s1.validate(), Ok(()));
        let mut bad = d.clone();
        bad.srb_type = Some(SrbType::Srb1);
        assert_eq!(bad.validate(), Err(ConfigError::SrbType(BearerId(3))));
    }
}
