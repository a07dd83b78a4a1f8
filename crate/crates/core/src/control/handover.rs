//! Make-before-break handover with packet duplication.
//!
//! The target gNB is added as a second leg, traffic is duplicated over the
//! source and the target, the path is switched, and the source is released.
//! Duplicate elimination runs in the UE for downlink. For uplink it runs in
//! the source gNB until the path switch and in the target gNB afterwards;
//! the gNB that is not eliminating forwards what it receives over Xn.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ControlError;
use crate::protocol::{ReceiverWindow, RxOutcome, SnSpace};
use crate::radio::Direction;
use crate::sim::scheduler::Scheduler;
use crate::{BearerId, NodeId, SimTime, UeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HoPhase {
    Idle,
    BearerEstablished,
    Duplicating,
    PathSwitched,
    SourceReleased,
}

impl HoPhase {
    pub fn label(self) -> &'static str {
        match self {
            HoPhase::Idle => "Idle",
            HoPhase::BearerEstablished => "BearerEstablished",
            HoPhase::Duplicating => "Duplicating",
            HoPhase::PathSwitched => "PathSwitched",
            HoPhase::SourceReleased => "SourceReleased",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Entity {
    Ue,
    Source,
    Target,
    Core,
}

impl Entity {
    pub fn label(self) -> &'static str {
        match self {
            Entity::Ue => "UE",
            Entity::Source => "source-gNB",
            Entity::Target => "target-gNB",
            Entity::Core => "core",
        }
    }

    fn peer(self) -> Entity {
        match self {
            Entity::Source => Entity::Target,
            _ => Entity::Source,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandoverContext {
    pub ue_id: UeId,
    pub source_gnb: NodeId,
    pub target_gnb: NodeId,
    pub phase: HoPhase,
    pub direction: Direction,
    /// PDCP SNs carried over Xn as data.
    pub forwarded_sns: BTreeSet<u32>,
}

impl HandoverContext {
    pub fn new(ue_id: UeId, source_gnb: NodeId, target_gnb: NodeId, direction: Direction) -> Self {
        HandoverContext {
            ue_id,
            source_gnb,
            target_gnb,
            phase: HoPhase::Idle,
            direction,
            forwarded_sns: BTreeSet::new(),
        }
    }

    fn advance(&mut self, to: HoPhase) {
        assert!(to >= self.phase, "phase went back from {:?} to {:?}", self.phase, to);
        self.phase = to;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandoverConfig {
    pub direction: Direction,
    pub n_sdus: usize,
    /// SDUs generated before the path switch.
    pub switch_after: usize,
    pub sdu_interval: SimTime,
    pub xn_latency: SimTime,
    pub air_latency: SimTime,
    pub rrc_latency: SimTime,
    pub xn_available: bool,
    /// Per-SDU loss of the copy on the source air link.
    pub source_loss: Vec<bool>,
    /// Per-SDU loss of the copy on the target air link.
    pub target_loss: Vec<bool>,
    pub sn_space: SnSpace,
    /// PDCP COUNT of the first SDU.
    pub first_count: u64,
}

impl Default for HandoverConfig {
    fn default() -> Self {
        HandoverConfig {
            direction: Direction::Uplink,
            n_sdus: 20,
            switch_after: 10,
            sdu_interval: SimTime::from_ms(5),
            xn_latency: SimTime::from_ms(2),
            air_latency: SimTime::from_ms(1),
            rrc_latency: SimTime::from_ms(10),
            xn_available: true,
            source_loss: Vec::new(),
            target_loss: Vec::new(),
            sn_space: SnSpace::default(),
            first_count: 0,
        }
    }
}

impl HandoverConfig {
    pub fn validate(&self) -> Result<(), ControlError> {
        if self.switch_after > self.n_sdus {
            return Err(ControlError::Script(format!(
                "switch after SDU {} of {}",
                self.switch_after, self.n_sdus
            )));
        }
        // the SN status transfer must reach the new anchor before the first
        // post-switch copy does
        let need = self.air_latency + self.xn_latency + self.xn_latency;
        if self.sdu_interval < need {
            return Err(ControlError::Script(format!(
                "SDU interval {} ms is shorter than air + 2 Xn latency ({} ms)",
                self.sdu_interval, need
            )));
        }
        Ok(())
    }

    fn lost(&self, via: Entity, k: usize) -> bool {
        let mask = if via == Entity::Source {
            &self.source_loss
        } else {
            &self.target_loss
        };
        mask.get(k).copied().unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: SimTime,
    pub entity: Entity,
    pub phase: HoPhase,
    pub message_kind: String,
    pub sn_range: Option<(u32, u32)>,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sn = match self.sn_range {
            None => "-".to_string(),
            Some((a, b)) if a == b => a.to_string(),
            Some((a, b)) => format!("{a}-{b}"),
        };
        write!(
            f,
            "{:.3} | {} | {} | {} | {}",
            self.time.as_ms_f64(),
            self.entity.label(),
            self.phase.label(),
            self.message_kind,
            sn
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandoverOutcome {
    pub context: HandoverContext,
    pub trace: Vec<TraceRecord>,
    /// Upper-layer deliveries (core network for uplink, UE for downlink) by
    /// SDU index.
    pub deliveries: Vec<u32>,
    /// Entity whose PDCP delivered each SDU.
    pub delivered_at: Vec<Option<Entity>>,
    /// (SDU index, entity) for every copy discarded as a duplicate.
    pub eliminations: Vec<(usize, Entity)>,
    pub aborted: bool,
    /// Time the path switch took effect.
    pub path_switch_at: Option<SimTime>,
}

impl HandoverOutcome {
    pub fn trace_text(&self) -> String {
        let mut s = String::from("time_ms | entity | phase | message_kind | sn_range\n");
        for r in &self.trace {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }
}

enum Ev {
    Phase(HoPhase, Entity, &'static str),
    Note(Entity, &'static str, Option<usize>),
    /// Copy of SDU `k` that travelled over the air link of `via` arrives at
    /// `site` for PDCP reception.
    Arrive {
        k: usize,
        via: Entity,
        site: Entity,
    },
    StatusTransfer {
        to: Entity,
    },
}

struct Run<'a> {
    cfg: &'a HandoverConfig,
    ctx: HandoverContext,
    trace: Vec<TraceRecord>,
    sched: Scheduler<Ev>,
}

impl Run<'_> {
    fn sn(&self, k: usize) -> u32 {
        self.cfg.sn_space.sn_of(self.cfg.first_count + k as u64)
    }

    fn log(&mut self, time: SimTime, entity: Entity, kind: &str, sdu: Option<usize>) {
        let sn_range = sdu.map(|k| (self.sn(k), self.sn(k)));
        self.trace.push(TraceRecord {
            time,
            entity,
            phase: self.ctx.phase,
            message_kind: kind.to_string(),
            sn_range,
        });
    }

    fn at(&mut self, t: SimTime, ev: Ev) {
        self.sched.schedule(t, ev).expect("script is built in time order");
    }
}

/// Runs the scripted handover and returns the full message trace.
pub fn run_handover(ctx: HandoverContext, cfg: &HandoverConfig) -> Result<HandoverOutcome, ControlError> {
    cfg.validate()?;
    let n = cfg.n_sdus;
    let dir = ctx.direction;
    let mut run = Run {
        cfg,
        ctx,
        trace: Vec::new(),
        sched: Scheduler::new(),
    };
    let (xn, air, rrc) = (cfg.xn_latency, cfg.air_latency, cfg.rrc_latency);
    let t0 = SimTime::ZERO;
    run.log(t0, Entity::Ue, "MeasurementReport", None);
    run.log(t0, Entity::Source, "HandoverRequest", None);

    let mut deliveries = vec![0u32; n];
    let mut delivered_at = vec![None; n];
    let mut eliminations = Vec::new();

    if !cfg.xn_available {
        run.log(t0, Entity::Source, "XnUnavailable", None);
        run.log(t0, Entity::Source, "HandoverAborted", None);
        // single-link fallback on the source
        for k in 0..n {
            let tk = t0 + SimTime::from_us(cfg.sdu_interval.as_us() * k as u64);
            let site = if dir == Direction::Uplink {
                Entity::Source
            } else {
                Entity::Ue
            };
            let from = if dir == Direction::Uplink {
                Entity::Ue
            } else {
                Entity::Source
            };
            run.log(tk, from, "AirTx", Some(k));
            if cfg.lost(Entity::Source, k) {
                run.log(tk + air, site, "AirLoss", Some(k));
            } else {
                deliveries[k] += 1;
                delivered_at[k] = Some(site);
                run.log(tk + air, site, "Deliver", Some(k));
            }
        }
        return Ok(HandoverOutcome {
            context: run.ctx,
            trace: run.trace,
            deliveries,
            delivered_at,
            eliminations,
            aborted: true,
            path_switch_at: None,
        });
    }

    let t_ack = t0 + xn;
    run.log(t_ack, Entity::Target, "HandoverRequestAck", None);
    let t_cmd = t_ack + xn;
    run.log(t_cmd, Entity::Source, "HandoverCommand", None);
    let t_complete = t_cmd + rrc;
    run.log(t_complete, Entity::Ue, "ReconfigComplete", None);
    let t_dup = t_complete + rrc;
    run.at(
        t_dup,
        Ev::Phase(HoPhase::BearerEstablished, Entity::Target, "BearerEstablished"),
    );
    run.at(
        t_dup,
        Ev::Phase(HoPhase::Duplicating, Entity::Target, "DuplicationActive"),
    );

    let gen = |k: usize| t_dup + SimTime::from_us(cfg.sdu_interval.as_us() * k as u64);
    let s = cfg.switch_after;
    let t_switch = if s == 0 { t_dup } else { gen(s - 1) + air + xn };
    let t_last = if n == 0 { t_switch } else { gen(n - 1) + air + xn }.max(t_switch);

    for k in 0..n {
        let anchor = if k < s { Entity::Source } else { Entity::Target };
        let other = anchor.peer();
        let tk = gen(k);
        match dir {
            Direction::Uplink => {
                run.at(tk, Ev::Note(Entity::Ue, "PdcpSduDuplicated", Some(k)));
                run.at(
                    tk + air,
                    Ev::Arrive {
                        k,
                        via: anchor,
                        site: anchor,
                    },
                );
                run.at(tk + air, Ev::Note(other, "XnForward", Some(k)));
                run.at(
                    tk + air + xn,
                    Ev::Arrive {
                        k,
                        via: other,
                        site: anchor,
                    },
                );
            }
            Direction::Downlink => {
                run.at(tk, Ev::Note(anchor, "PdcpSduFromCore", Some(k)));
                run.at(tk, Ev::Note(anchor, "XnForward", Some(k)));
                run.at(
                    tk + air,
                    Ev::Arrive {
                        k,
                        via: anchor,
                        site: Entity::Ue,
                    },
                );
                run.at(
                    tk + xn + air,
                    Ev::Arrive {
                        k,
                        via: other,
                        site: Entity::Ue,
                    },
                );
            }
        }
    }
    run.at(t_switch, Ev::StatusTransfer { to: Entity::Target });
    run.at(t_switch, Ev::Phase(HoPhase::PathSwitched, Entity::Target, "PathSwitch"));
    run.at(
        t_last,
        Ev::Phase(HoPhase::SourceReleased, Entity::Target, "ReleaseSource"),
    );

    let bearer = BearerId(1);
    let mut windows = [
        ReceiverWindow::new(bearer, cfg.sn_space),
        ReceiverWindow::new(bearer, cfg.sn_space),
        ReceiverWindow::new(bearer, cfg.sn_space),
    ];
    let widx = |e: Entity| match e {
        Entity::Source => 0,
        Entity::Target => 1,
        _ => 2,
    };
    let skip = |w: &mut ReceiverWindow| {
        for k in 0..cfg.first_count {
            w.receive_sn(cfg.sn_space.sn_of(k));
        }
    };
    windows.iter_mut().for_each(skip);

    while let Some((t, ev)) = run.sched.pop() {
        match ev {
            Ev::Phase(p, e, kind) => {
                run.ctx.advance(p);
                run.log(t, e, kind, None);
                if p == HoPhase::SourceReleased {
                    run.log(t + rrc, Entity::Ue, "ReleaseComplete", None);
                }
            }
            Ev::Note(e, kind, k) => {
                if kind == "XnForward" {
                    if let Some(k) = k {
                        let sn = run.sn(k);
                        run.ctx.forwarded_sns.insert(sn);
                    }
                }
                run.log(t, e, kind, k);
            }
            Ev::StatusTransfer { to } => {
                // the anchor's receive state follows the path
                let from = to.peer();
                if dir == Direction::Uplink {
                    windows[widx(to)] = windows[widx(from)].clone();
                }
                let next = cfg.sn_space.sn_of(cfg.first_count + s as u64);
                run.trace.push(TraceRecord {
                    time: t,
                    entity: from,
                    phase: run.ctx.phase,
                    message_kind: "SnStatusTransfer".into(),
                    sn_range: Some((next, next)),
                });
            }
            Ev::Arrive { k, via, site } => {
                if cfg.lost(via, k) {
                    run.log(t, site, "AirLoss", Some(k));
                    continue;
                }
                let sn = run.sn(k);
                match windows[widx(site)].receive_sn(sn) {
                    RxOutcome::Deliver { .. } => {
                        deliveries[k] += 1;
                        delivered_at[k] = Some(site);
                        run.log(t, site, "Deliver", Some(k));
                    }
                    RxOutcome::Discard(_) => {
                        eliminations.push((k, site));
                        run.log(t, site, "DuplicateDiscard", Some(k));
                    }
                }
            }
        }
    }
    run.trace.sort_by_key(|r| r.time);
    Ok(HandoverOutcome {
        context: run.ctx,
        trace: run.trace,
        deliveries,
        delivered_at,
        eliminations,
        aborted: false,
        path_switch_at: Some(t_switch),
    })
}
