//! RRC configuration of duplication and its dynamic activation.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::ControlError;
use crate::protocol::{
    BearerConfig, ConfigError, DupMode, LegDescriptor, LegId, PdcpPdu, PdcpSdu, PdcpTransmitter, RlcConfig, RlcEntity,
    SnSpace,
};
use crate::{BearerId, SimTime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ControlMode {
    Rrc,
    PdcpCtrlPdu,
    MacCe,
}

impl ControlMode {
    pub const ALL: [ControlMode; 3] = [ControlMode::Rrc, ControlMode::PdcpCtrlPdu, ControlMode::MacCe];

    pub fn label(self) -> &'static str {
        match self {
            ControlMode::Rrc => "rrc",
            ControlMode::PdcpCtrlPdu => "pdcp_ctrl_pdu",
            ControlMode::MacCe => "mac_ce",
        }
    }
}

impl std::str::FromStr for ControlMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rrc" | "RRC" => Ok(ControlMode::Rrc),
            "pdcp_ctrl_pdu" | "pdcp" | "PDCP_CTRL_PDU" => Ok(ControlMode::PdcpCtrlPdu),
            "mac_ce" | "MAC_CE" => Ok(ControlMode::MacCe),
            other => Err(format!("unknown control mode '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalingConfig {
    /// One-way RRC latency.
    pub rrc_latency: SimTime,
    pub tti: SimTime,
    pub rrc_reconfig_bytes: u64,
    pub rrc_complete_bytes: u64,
    pub pdcp_ctrl_pdu_bytes: u64,
    pub mac_ce_bytes: u64,
}

impl Default for SignalingConfig {
    fn default() -> Self {
        SignalingConfig {
            rrc_latency: SimTime::from_ms(10),
            tti: SimTime::from_ms(1),
            rrc_reconfig_bytes: 80,
            rrc_complete_bytes: 40,
            pdcp_ctrl_pdu_bytes: 2,
            mac_ce_bytes: 1,
        }
    }
}

impl SignalingConfig {
    /// Delay between the decision and the change taking effect: the
    /// reconfiguration plus its complete for RRC, one TTI otherwise.
    pub fn effect_latency(&self, mode: ControlMode) -> SimTime {
        match mode {
            ControlMode::Rrc => self.rrc_latency + self.rrc_latency,
            ControlMode::PdcpCtrlPdu | ControlMode::MacCe => self.tti,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalingOverhead {
    pub rrc_bytes: u64,
    pub pdcp_ctrl_bytes: u64,
    pub mac_ce_bytes: u64,
}

impl SignalingOverhead {
    pub fn get(&self, mode: ControlMode) -> u64 {
        match mode {
            ControlMode::Rrc => self.rrc_bytes,
            ControlMode::PdcpCtrlPdu => self.pdcp_ctrl_bytes,
            ControlMode::MacCe => self.mac_ce_bytes,
        }
    }

    fn add(&mut self, mode: ControlMode, bytes: u64) {
        match mode {
            ControlMode::Rrc => self.rrc_bytes += bytes,
            ControlMode::PdcpCtrlPdu => self.pdcp_ctrl_bytes += bytes,
            ControlMode::MacCe => self.mac_ce_bytes += bytes,
        }
    }

    pub fn total(&self) -> u64 {
        self.rrc_bytes + self.pdcp_ctrl_bytes + self.mac_ce_bytes
    }

    pub fn merge(&mut self, other: &SignalingOverhead) {
        self.rrc_bytes += other.rrc_bytes;
        self.pdcp_ctrl_bytes += other.pdcp_ctrl_bytes;
        self.mac_ce_bytes += other.mac_ce_bytes;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RrcKind {
    ReconfigAddSecondary,
    ReconfigActivateDup,
    ReconfigDeactivateDup,
    ReconfigComplete,
    HandoverCommand,
    PathSwitch,
    ReleaseSource,
}

impl RrcKind {
    pub fn label(self) -> &'static str {
        match self {
            RrcKind::ReconfigAddSecondary => "ReconfigAddSecondary",
            RrcKind::ReconfigActivateDup => "ReconfigActivateDup",
            RrcKind::ReconfigDeactivateDup => "ReconfigDeactivateDup",
            RrcKind::ReconfigComplete => "ReconfigComplete",
            RrcKind::HandoverCommand => "HandoverCommand",
            RrcKind::PathSwitch => "PathSwitch",
            RrcKind::ReleaseSource => "ReleaseSource",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RrcMessage {
    pub kind: RrcKind,
    pub bearer_ids: Vec<BearerId>,
    pub sent_at: SimTime,
    pub signaling_latency: SimTime,
}

impl RrcMessage {
    pub fn arrives_at(&self) -> SimTime {
        self.sent_at + self.signaling_latency
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicationState {
    pub bearer_id: BearerId,
    pub configured: bool,
    pub active: bool,
    pub control_mode: ControlMode,
    pub last_change_at: SimTime,
}

#[derive(Clone, Debug)]
struct Pending {
    bearers: Vec<BearerId>,
    active: bool,
    mode: ControlMode,
    effective_at: SimTime,
}

/// Duplication state of every bearer of one UE.
#[derive(Clone, Debug)]
pub struct UeDuplicationControl {
    cfg: SignalingConfig,
    bearers: BTreeMap<BearerId, (BearerConfig, DuplicationState)>,
    pending: Vec<Pending>,
    overhead: SignalingOverhead,
    messages: Vec<RrcMessage>,
}

impl UeDuplicationControl {
    pub fn new(cfg: SignalingConfig) -> Self {
        UeDuplicationControl {
            cfg,
            bearers: BTreeMap::new(),
            pending: Vec::new(),
            overhead: SignalingOverhead::default(),
            messages: Vec::new(),
        }
    }

    pub fn signaling(&self) -> &SignalingConfig {
        &self.cfg
    }

    fn dc_configured_elsewhere(&self) -> Option<BearerId> {
        self.bearers
            .values()
            .find(|(c, _)| c.duplication_configured && c.dup_mode == DupMode::Dc)
            .map(|(c, _)| c.bearer_id)
    }

    /// Registers a bearer as established by RRC.
    pub fn add_bearer(&mut self, config: BearerConfig) -> Result<DuplicationState, ControlError> {
        config.validate()?;
        if config.duplication_configured && config.dup_mode == DupMode::Ca && self.dc_configured_elsewhere().is_some() {
            return Err(ConfigError::CaWhileDc(config.bearer_id).into());
        }
        let state = DuplicationState {
            bearer_id: config.bearer_id,
            configured: config.duplication_configured,
            active: config.duplication_configured && config.initial_duplication_active,
            control_mode: ControlMode::Rrc,
            last_change_at: SimTime::ZERO,
        };
        self.bearers.insert(config.bearer_id, (config, state));
        Ok(state)
    }

    /// Sets up duplication and its initial state via an RRC
    /// reconfiguration. A single-leg bearer gets `secondary` as its second
    /// RLC entity and logical channel.
    pub fn configure_duplication(
        &mut self,
        bearer_id: BearerId,
        mode: DupMode,
        initial_active: bool,
        secondary: Option<LegDescriptor>,
        at: SimTime,
    ) -> Result<DuplicationState, ControlError> {
        let (config, _) = self
            .bearers
            .get(&bearer_id)
            .ok_or(ControlError::UnknownBearer(bearer_id))?;
        if mode == DupMode::Ca && self.dc_configured_elsewhere().is_some() {
            return Err(ConfigError::CaWhileDc(bearer_id).into());
        }
        let mut candidate = config.clone().with_duplication(mode, initial_active);
        if let (1, Some(leg)) = (candidate.legs.len(), secondary) {
            candidate.legs.push(leg);
        }
        candidate.validate()?;
        let lat = self.cfg.rrc_latency;
        self.messages.push(RrcMessage {
            kind: RrcKind::ReconfigAddSecondary,
            bearer_ids: vec![bearer_id],
            sent_at: at,
            signaling_latency: lat,
        });
        self.messages.push(RrcMessage {
            kind: RrcKind::ReconfigComplete,
            bearer_ids: vec![bearer_id],
            sent_at: at + lat,
            signaling_latency: lat,
        });
        self.overhead.add(
            ControlMode::Rrc,
            self.cfg.rrc_reconfig_bytes + self.cfg.rrc_complete_bytes,
        );
        let state = DuplicationState {
            bearer_id,
            configured: true,
            active: initial_active,
            control_mode: ControlMode::Rrc,
            last_change_at: at,
        };
        self.bearers.insert(bearer_id, (candidate, state));
        Ok(state)
    }

    pub fn activate(
        &mut self,
        bearer_ids: &[BearerId],
        mode: ControlMode,
        at: SimTime,
    ) -> Result<Option<SimTime>, ControlError> {
        self.request(bearer_ids, true, mode, at)
    }

    pub fn deactivate(
        &mut self,
        bearer_ids: &[BearerId],
        mode: ControlMode,
        at: SimTime,
    ) -> Result<Option<SimTime>, ControlError> {
        self.request(bearer_ids, false, mode, at)
    }

    /// State a bearer will have once every pending change has applied.
    fn projected_active(&self, id: BearerId) -> bool {
        self.pending
            .iter()
            .rev()
            .find(|p| p.bearers.contains(&id))
            .map_or(self.bearers[&id].1.active, |p| p.active)
    }

    /// Returns the time the change takes effect, or `None` when every
    /// addressed bearer already is (or is about to be) in the requested
    /// state. No-ops send nothing.
    fn request(
        &mut self,
        bearer_ids: &[BearerId],
        active: bool,
        mode: ControlMode,
        at: SimTime,
    ) -> Result<Option<SimTime>, ControlError> {
        let configured: Vec<BearerId> = self
            .bearers
            .values()
            .filter(|(_, s)| s.configured)
            .map(|(c, _)| c.bearer_id)
            .collect();
        for id in bearer_ids {
            match self.bearers.get(id) {
                None => return Err(ControlError::UnknownBearer(*id)),
                Some((_, s)) if !s.configured => return Err(ControlError::NotConfigured(*id)),
                _ => {}
            }
        }
        let addressed: Vec<BearerId> = if bearer_ids.is_empty() {
            configured.clone()
        } else {
            let mut v = bearer_ids.to_vec();
            v.sort();
            v.dedup();
            v
        };
        if mode == ControlMode::MacCe && addressed != configured {
            return Err(ControlError::MacCeSubset);
        }
        let changing: Vec<BearerId> = addressed
            .iter()
            .copied()
            .filter(|id| self.projected_active(*id) != active)
            .collect();
        if changing.is_empty() {
            return Ok(None);
        }
        let targets = if mode == ControlMode::MacCe {
            addressed
        } else {
            changing
        };
        let effective_at = at + self.cfg.effect_latency(mode);
        match mode {
            ControlMode::Rrc => {
                let lat = self.cfg.rrc_latency;
                let kind = if active {
                    RrcKind::ReconfigActivateDup
                } else {
                    RrcKind::ReconfigDeactivateDup
                };
                self.messages.push(RrcMessage {
                    kind,
                    bearer_ids: targets.clone(),
                    sent_at: at,
                    signaling_latency: lat,
                });
                self.messages.push(RrcMessage {
                    kind: RrcKind::ReconfigComplete,
                    bearer_ids: targets.clone(),
                    sent_at: at + lat,
                    signaling_latency: lat,
                });
                self.overhead
                    .add(mode, self.cfg.rrc_reconfig_bytes + self.cfg.rrc_complete_bytes);
            }
            ControlMode::PdcpCtrlPdu => {
                self.overhead
                    .add(mode, self.cfg.pdcp_ctrl_pdu_bytes * targets.len() as u64);
            }
            ControlMode::MacCe => self.overhead.add(mode, self.cfg.mac_ce_bytes),
        }
        self.pending.push(Pending {
            bearers: targets,
            active,
            mode,
            effective_at,
        });
        Ok(Some(effective_at))
    }

    /// Applies every change effective at or before `now`; returns the
    /// bearers whose state changed.
    pub fn apply_due(&mut self, now: SimTime) -> Vec<BearerId> {
        let mut due: Vec<Pending> = Vec::new();
        self.pending.retain(|p| {
            if p.effective_at <= now {
                due.push(p.clone());
                false
            } else {
                true
            }
        });
        due.sort_by_key(|p| p.effective_at);
        let mut changed = Vec::new();
        for p in due {
            for id in &p.bearers {
                let (_, s) = self.bearers.get_mut(id).expect("pending bearer exists");
                if s.active != p.active {
                    changed.push(*id);
                }
                s.active = p.active;
                s.control_mode = p.mode;
                s.last_change_at = p.effective_at;
            }
        }
        changed
    }

    pub fn next_effective(&self) -> Option<SimTime> {
        self.pending.iter().map(|p| p.effective_at).min()
    }

    pub fn is_active(&self, id: BearerId) -> bool {
        self.bearers.get(&id).is_some_and(|(_, s)| s.active)
    }

    pub fn state(&self, id: BearerId) -> Option<&DuplicationState> {
        self.bearers.get(&id).map(|(_, s)| s)
    }

    pub fn bearer(&self, id: BearerId) -> Option<&BearerConfig> {
        self.bearers.get(&id).map(|(c, _)| c)
    }

    pub fn states(&self) -> impl Iterator<Item = &DuplicationState> {
        self.bearers.values().map(|(_, s)| s)
    }

    pub fn overhead(&self) -> &SignalingOverhead {
        &self.overhead
    }

    pub fn messages(&self) -> &[RrcMessage] {
        &self.messages
    }
}

/// PDCP buffer, transmitter and per-leg RLC entities of one bearer.
///
/// SDUs wait in the PDCP buffer until the lower layers pull them. Numbering
/// and routing happen at pull time, so a duplication change applies to
/// everything still buffered and to nothing already handed to RLC.
#[derive(Clone, Debug)]
pub struct DuplicationPipeline {
    tx: PdcpTransmitter,
    buffer: VecDeque<PdcpSdu>,
    legs: Vec<RlcEntity>,
    duplicates_sent: u64,
}

impl DuplicationPipeline {
    pub fn new(bearer: BearerConfig, rlc: RlcConfig, sn_space: SnSpace) -> Result<Self, ControlError> {
        bearer.validate()?;
        let legs = (0..bearer.legs.len())
            .map(|i| RlcEntity::new(LegId(i as u32), rlc))
            .collect();
        Ok(DuplicationPipeline {
            tx: PdcpTransmitter::new(bearer, sn_space),
            buffer: VecDeque::new(),
            legs,
            duplicates_sent: 0,
        })
    }

    pub fn push_sdu(&mut self, sdu: PdcpSdu) {
        self.buffer.push_back(sdu);
    }

    pub fn pdcp_buffered(&self) -> usize {
        self.buffer.len()
    }

    pub fn pdcp_buffered_bytes(&self) -> u64 {
        self.buffer.iter().map(|s| s.payload_bytes as u64).sum()
    }

    /// Moves up to `n` SDUs from the PDCP buffer into RLC.
    pub fn pull(&mut self, n: usize, dup_active: bool, now: SimTime) -> Result<Vec<(usize, PdcpPdu)>, ControlError> {
        let mut out = Vec::new();
        for _ in 0..n {
            let Some(sdu) = self.buffer.front().copied() else { break };
            let volume = self.pdcp_buffered_bytes();
            let pdus = self.tx.submit(&sdu, dup_active, volume)?;
            self.buffer.pop_front();
            for (leg, pdu) in pdus {
                if pdu.is_duplicate {
                    self.duplicates_sent += 1;
                }
                self.legs[leg].enqueue(pdu, now);
                out.push((leg, pdu));
            }
        }
        Ok(out)
    }

    pub fn rlc(&self, leg: usize) -> &RlcEntity {
        &self.legs[leg]
    }

    pub fn rlc_mut(&mut self, leg: usize) -> &mut RlcEntity {
        &mut self.legs[leg]
    }

    pub fn duplicates_sent(&self) -> u64 {
        self.duplicates_sent
    }

    pub fn bearer(&self) -> &BearerConfig {
        self.tx.bearer()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{BearerKind, CellGroup, LegDescriptor, RlcConfig};
    use crate::{CarrierId, NodeId};
    use proptest::prelude::*;

    fn mcg(c: u8) -> LegDescriptor {
        LegDescriptor::new(CellGroup::Mcg, NodeId(0), CarrierId(c), 4 + c)
    }

    fn scg() -> LegDescriptor {
        LegDescriptor::new(CellGroup::Scg, NodeId(1), CarrierId(2), 4)
    }

    fn dc_dup(id: u32, active: bool) -> BearerConfig {
        BearerConfig::duplicate(BearerId(id), mcg(0), scg(), DupMode::Dc, active)
    }

    fn ctl() -> UeDuplicationControl {
        UeDuplicationControl::new(SignalingConfig::default())
    }

    #[test]
    fn configure_dc_bearer_inactive() {
        let mut c = ctl();
        c.add_bearer(BearerConfig::dc_split(BearerId(1), mcg(0), scg(), 1000))
            .unwrap();
        let s = c
            .configure_duplication(BearerId(1), DupMode::Dc, false, None, SimTime::ZERO)
            .unwrap();
        assert!(s.configured && !s.active);
        let mut p = DuplicationPipeline::new(
            c.bearer(BearerId(1)).unwrap().clone(),
            RlcConfig::default(),
            SnSpace::default(),
        )
        .unwrap();
        p.push_sdu(PdcpSdu::new(BearerId(1), SimTime::ZERO));
        let out = p.pull(1, c.is_active(BearerId(1)), SimTime::ZERO).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, 0);
    }

    #[test]
    fn same_carrier_ca_rejected() {
        let mut c = ctl();
        c.add_bearer(BearerConfig::single_leg(BearerId(2), BearerKind::Mcg, mcg(0)))
            .unwrap();
        let same = LegDescriptor::new(CellGroup::Mcg, NodeId(0), CarrierId(0), 5);
        assert_eq!(
            c.configure_duplication(BearerId(2), DupMode::Ca, false, Some(same), SimTime::ZERO),
            Err(ControlError::Config(ConfigError::SameCarrier(BearerId(2))))
        );
        assert!(!c.state(BearerId(2)).unwrap().configured);
        assert_eq!(c.bearer(BearerId(2)).unwrap().legs.len(), 1);
        let s = c
            .configure_duplication(BearerId(2), DupMode::Ca, true, Some(mcg(1)), SimTime::ZERO)
            .unwrap();
        assert!(s.configured && s.active);
    }

    #[test]
    fn ca_after_dc_rejected() {
        let mut c = ctl();
        c.add_bearer(dc_dup(1, false)).unwrap();
        let mut ca = BearerConfig::single_leg(BearerId(2), BearerKind::Mcg, mcg(0));
        c.add_bearer(ca.clone()).unwrap();
        let err = c.configure_duplication(BearerId(2), DupMode::Ca, false, Some(mcg(1)), SimTime::ZERO);
        assert_eq!(err, Err(ControlError::Config(ConfigError::CaWhileDc(BearerId(2)))));
        ca.legs.push(mcg(1));
        assert_eq!(
            c.add_bearer(ca.with_duplication(DupMode::Ca, false)),
            Err(ControlError::Config(ConfigError::CaWhileDc(BearerId(2))))
        );
    }

    #[test]
    fn only_pdcp_buffered_sdus_are_duplicated() {
        let mut c = ctl();
        c.add_bearer(dc_dup(1, false)).unwrap();
        let mut p = DuplicationPipeline::new(dc_dup(1, false), RlcConfig::default(), SnSpace::default()).unwrap();
        for _ in 0..8 {
            p.push_sdu(PdcpSdu::new(BearerId(1), SimTime::ZERO));
        }
        p.pull(3, c.is_active(BearerId(1)), SimTime::ZERO).unwrap();
        assert_eq!((p.pdcp_buffered(), p.rlc(0).buffered()), (5, 3));
        let eff = c
            .activate(&[BearerId(1)], ControlMode::MacCe, SimTime::ZERO)
            .unwrap()
            .unwrap();
        assert_eq!(eff, SimTime::from_ms(1));
        assert!(!c.is_active(BearerId(1)));
        c.apply_due(eff);
        p.pull(usize::MAX, c.is_active(BearerId(1)), eff).unwrap();
        assert_eq!(p.duplicates_sent(), 5);
        assert_eq!((p.rlc(0).buffered(), p.rlc(1).buffered()), (8, 5));
    }

    #[test]
    fn activation_is_idempotent() {
        let mut c = ctl();
        c.add_bearer(dc_dup(1, true)).unwrap();
        assert_eq!(c.activate(&[BearerId(1)], ControlMode::Rrc, SimTime::ZERO), Ok(None));
        assert_eq!(c.overhead().total(), 0);
        assert!(c.messages().is_empty());
        assert_eq!(
            c.deactivate(&[BearerId(1)], ControlMode::PdcpCtrlPdu, SimTime::ZERO),
            Ok(Some(SimTime::from_ms(1)))
        );
        // second identical request while the first is in flight
        assert_eq!(
            c.deactivate(&[BearerId(1)], ControlMode::PdcpCtrlPdu, SimTime::ZERO),
            Ok(None)
        );
    }

    #[test]
    fn rrc_is_19_ms_slower_than_mac_ce() {
        let t = SimTime::from_ms(100);
        let mut a = ctl();
        a.add_bearer(dc_dup(1, false)).unwrap();
        let rrc = a.activate(&[BearerId(1)], ControlMode::Rrc, t).unwrap().unwrap();
        let mut b = ctl();
        b.add_bearer(dc_dup(1, false)).unwrap();
        let mac = b.activate(&[], ControlMode::MacCe, t).unwrap().unwrap();
        assert_eq!((rrc - t, mac - t), (SimTime::from_ms(20), SimTime::from_ms(1)));
        assert_eq!(rrc - mac, SimTime::from_ms(19));
        let kinds: Vec<RrcKind> = a.messages().iter().map(|m| m.kind).collect();
        assert_eq!(kinds, vec![RrcKind::ReconfigActivateDup, RrcKind::ReconfigComplete]);
        assert_eq!(a.messages()[1].arrives_at(), rrc);
    }

    #[test]
    fn mac_ce_rejects_subsets() {
        let mut c = ctl();
        c.add_bearer(dc_dup(1, false)).unwrap();
        c.add_bearer(BearerConfig::duplicate(
            BearerId(2),
            LegDescriptor::new(CellGroup::Mcg, NodeId(0), CarrierId(0), 6),
            LegDescriptor::new(CellGroup::Scg, NodeId(1), CarrierId(2), 6),
            DupMode::Dc,
            false,
        ))
        .unwrap();
        assert_eq!(
            c.activate(&[BearerId(1)], ControlMode::MacCe, SimTime::ZERO),
            Err(ControlError::MacCeSubset)
        );
        assert!(c
            .activate(&[BearerId(1), BearerId(2)], ControlMode::MacCe, SimTime::ZERO)
            .unwrap()
            .is_some());
    }

    #[test]
    fn errors_for_unknown_and_unconfigured() {
        let mut c = ctl();
        c.add_bearer(BearerConfig::single_leg(BearerId(3), BearerKind::Mcg, mcg(0)))
            .unwrap();
        assert_eq!(
            c.activate(&[BearerId(9)], ControlMode::Rrc, SimTime::ZERO),
            Err(ControlError::UnknownBearer(BearerId(9)))
        );
        assert_eq!(
            c.activate(&[BearerId(3)], ControlMode::Rrc, SimTime::ZERO),
            Err(ControlError::NotConfigured(BearerId(3)))
        );
    }

    #[test]
    fn deactivated_duplicate_bearer_keeps_both_legs() {
        let mut c = ctl();
        c.add_bearer(dc_dup(1, true)).unwrap();
        let eff = c
            .deactivate(&[BearerId(1)], ControlMode::PdcpCtrlPdu, SimTime::ZERO)
            .unwrap()
            .unwrap();
        c.apply_due(eff);
        let b = c.bearer(BearerId(1)).unwrap();
        assert_eq!(b.legs.len(), 2);
        let mut p = DuplicationPipeline::new(b.clone(), RlcConfig::default(), SnSpace::default()).unwrap();
        for _ in 0..4 {
            p.push_sdu(PdcpSdu::new(BearerId(1), eff));
        }
        let out = p.pull(4, c.is_active(BearerId(1)), eff).unwrap();
        assert!(out.iter().all(|(leg, _)| *leg == 0));
    }

    #[test]
    fn deactivated_split_bearer_resumes_splitting() {
        let mut c = ctl();
        let b = BearerConfig::dc_split(BearerId(1), mcg(0), scg(), 150).with_duplication(DupMode::Dc, true);
        c.add_bearer(b.clone()).unwrap();
        let eff = c
            .deactivate(&[], ControlMode::PdcpCtrlPdu, SimTime::ZERO)
            .unwrap()
            .unwrap();
        c.apply_due(eff);
        let mut p = DuplicationPipeline::new(b, RlcConfig::default(), SnSpace::default()).unwrap();
        for _ in 0..4 {
            p.push_sdu(PdcpSdu::new(BearerId(1), eff));
        }
        let legs: Vec<usize> = p.pull(4, false, eff).unwrap().into_iter().map(|(l, _)| l).collect();
        // 400 and 300 buffered bytes are above the threshold, then 200, then 100
        assert!(legs.contains(&1));
        assert_eq!(legs[3], 0);
    }

    #[derive(Clone, Debug)]
    struct Toggle {
        activate: bool,
        at_ms: u64,
    }

    fn toggles() -> impl Strategy<Value = Vec<Toggle>> {
        proptest::collection::vec((any::<bool>(), 0u64..200), 0..30).prop_map(|v| {
            let mut t = 0;
            v.into_iter()
                .map(|(activate, dt)| {
                    t += dt;
                    Toggle { activate, at_ms: t }
                })
                .collect()
        })
    }

    fn run(mode: ControlMode, script: &[Toggle]) -> UeDuplicationControl {
        let mut c = ctl();
        c.add_bearer(dc_dup(1, false)).unwrap();
        c.add_bearer(BearerConfig::duplicate(
            BearerId(2),
            LegDescriptor::new(CellGroup::Mcg, NodeId(0), CarrierId(0), 6),
            LegDescriptor::new(CellGroup::Scg, NodeId(1), CarrierId(2), 6),
            DupMode::Dc,
            false,
        ))
        .unwrap();
        for t in script {
            let at = SimTime::from_ms(t.at_ms);
            c.apply_due(at);
            if t.activate {
                c.activate(&[], mode, at).unwrap();
            } else {
                c.deactivate(&[], mode, at).unwrap();
            }
            let states: Vec<bool> = c.states().map(|s| s.active).collect();
            assert!(states.windows(2).all(|w| w[0] == w[1]));
        }
        c.apply_due(SimTime::MAX);
        c
    }

    proptest! {
        #[test]
        fn overhead_ordering_and_mac_ce_atomicity(script in toggles()) {
            let rrc = run(ControlMode::Rrc, &script).overhead().total();
            let pdcp = run(ControlMode::PdcpCtrlPdu, &script).overhead().total();
            let mac = run(ControlMode::MacCe, &script).overhead().total();
            prop_assert!(rrc >= pdcp && pdcp >= mac);
        }
    }
}
