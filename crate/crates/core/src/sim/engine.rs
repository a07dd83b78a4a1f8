//! Discrete-event engine for one Monte Carlo iteration.
//!
//! Each TTI every UE produces one 100-byte SDU until it has generated its
//! quota. PDUs go through PDCP (numbering, routing, duplication), the RLC
//! entity of each leg, and the air interface; HARQ/ARQ feedback arrives at
//! the end of the attempt's TTI. The receiving PDCP entity removes
//! duplicates and records the first delivery of every packet.
//!
//! In dual connectivity the PDCP anchor is the master gNB. Downlink PDUs for
//! the secondary leg cross Xn before reaching its RLC entity; uplink PDUs
//! received by the secondary gNB cross Xn before reaching the anchor.

use crate::control::{evaluate_trigger, SignalingConfig, SignalingOverhead, TriggerDecision, UeDuplicationControl};
use crate::protocol::{
    Attempt, BearerConfig, CrossLegDiscard, Feedback, LegId, Notification, PdcpPdu, PdcpSdu, PdcpTransmitter,
    ReceiverWindow, RlcConfig, RlcEntity, RlcStats, RxOutcome, SnSpace,
};
use crate::radio::{Direction, RadioEnvironment};
use crate::seed::{derive, unit};
use crate::sim::config::{DynamicDuplication, SimError};
use crate::sim::scheduler::Scheduler;
use crate::sim::xn::{xn_forward, XnLink};
use crate::{BearerId, CarrierId, NodeId, SimTime, UeId};

/// Decides whether one transmission attempt gets through.
pub trait OutcomeModel {
    /// `tti` is the index of the TTI the attempt occupies.
    fn attempt_success(
        &self,
        ue: UeId,
        leg: usize,
        node: NodeId,
        carrier: CarrierId,
        tti: u64,
        attempt: &Attempt,
    ) -> bool;
}

/// SINR-threshold outcomes from the radio environment.
pub struct RadioOutcomes<'a> {
    pub env: &'a RadioEnvironment,
    pub direction: Direction,
}

impl OutcomeModel for RadioOutcomes<'_> {
    fn attempt_success(&self, ue: UeId, _: usize, node: NodeId, carrier: CarrierId, tti: u64, _: &Attempt) -> bool {
        self.env.success(self.direction, ue, node, carrier, tti)
    }
}

/// Independent per-attempt failures with a fixed probability per leg.
/// Outcomes are keyed on (UE, leg, PDCP COUNT, retransmission number), so
/// the same attempt fails or succeeds whatever else is going on.
#[derive(Clone, Debug)]
pub struct BernoulliOutcomes {
    pub failure: Vec<f64>,
    pub seed: u64,
}

impl OutcomeModel for BernoulliOutcomes {
    fn attempt_success(&self, ue: UeId, leg: usize, _: NodeId, _: CarrierId, _: u64, a: &Attempt) -> bool {
        let h = derive(
            self.seed,
            &[ue.0 as u64, leg as u64, a.pdcp.count, a.pdu.retx_count as u64],
        );
        unit(h) >= self.failure[leg]
    }
}

/// Outcomes from a closure, for hand-built fixtures.
pub struct Scripted<F>(pub F);

impl<F> OutcomeModel for Scripted<F>
where
    F: Fn(UeId, usize, &Attempt) -> bool,
{
    fn attempt_success(&self, ue: UeId, leg: usize, _: NodeId, _: CarrierId, _: u64, a: &Attempt) -> bool {
        (self.0)(ue, leg, a)
    }
}

/// One UE and its user-plane bearer.
#[derive(Clone, Debug)]
pub struct UeSetup {
    pub ue: UeId,
    pub bearer: BearerConfig,
    /// Leg whose RLC entity sits across Xn from the PDCP anchor.
    pub xn_leg: Option<usize>,
    /// Long-term received power per leg (dBm), input of the dynamic trigger.
    pub measurements_dbm: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub direction: Direction,
    pub packets_per_user: usize,
    pub latency_budget: SimTime,
    pub xn_latency: SimTime,
    pub rlc: RlcConfig,
    pub sn_space: SnSpace,
    pub cross_leg_discard: bool,
    pub signaling: SignalingConfig,
    pub dynamic: Option<DynamicDuplication>,
    /// Reported in errors.
    pub iteration: usize,
}

impl EngineConfig {
    /// Latest time any event may fire: generation, the full retransmission
    /// chain, two Xn hops and a dynamic activation, with a wide margin.
    pub fn horizon(&self) -> SimTime {
        let tti = self.rlc.tti.as_us();
        let gen = self.packets_per_user as u64 * tti;
        let chain = (self.rlc.max_retx as u64 + 1) * (self.rlc.retx_delay.as_us() + tti);
        let ctrl = 4 * self.signaling.rrc_latency.as_us();
        SimTime::from_us(2 * (gen + chain + 2 * self.xn_latency.as_us() + ctrl) + 1_000_000)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct UeOutcome {
    pub ue: UeId,
    /// First-delivery latency of each packet in generation order; `None`
    /// when it never arrived.
    pub latencies: Vec<Option<SimTime>>,
    /// Packets that were sent on both legs.
    pub duplicated: u64,
    /// Duplicated packets whose first attempt on the default leg failed.
    pub default_first_failed: u64,
    pub rlc: Vec<RlcStats>,
    pub avoided_retx: u64,
    pub redundant_retx: u64,
    pub overhead: SignalingOverhead,
    /// Copies dropped by the receiving PDCP entity.
    pub rx_discarded: u64,
}

impl UeOutcome {
    pub fn generated(&self) -> usize {
        self.latencies.len()
    }

    pub fn within(&self, budget: SimTime) -> usize {
        self.latencies.iter().filter(|l| l.is_some_and(|l| l <= budget)).count()
    }

    pub fn delivered(&self) -> usize {
        self.latencies.iter().filter(|l| l.is_some()).count()
    }

    pub fn attempts(&self) -> u64 {
        self.rlc.iter().map(|s| s.first_tx + s.retx).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineOutput {
    pub ues: Vec<UeOutcome>,
    pub events: u64,
    pub finished_at: SimTime,
}

#[derive(Clone, Copy, Debug)]
struct Resolved {
    ue: u32,
    leg: u8,
    attempt: Attempt,
    ack: bool,
}

enum Event {
    Tick,
    Feedback(Vec<Resolved>),
    /// Downlink PDU reaching the secondary gNB's RLC entity.
    XnDownlink {
        ue: u32,
        leg: u8,
        pdu: PdcpPdu,
    },
    /// Uplink PDU forwarded from the secondary gNB to the anchor.
    XnUplink {
        ue: u32,
        pdu: PdcpPdu,
    },
    Notify {
        ue: u32,
        n: Notification,
    },
    ControlDue {
        ue: u32,
    },
}

struct UeRt {
    setup: UeSetup,
    tx: PdcpTransmitter,
    rlc: Vec<RlcEntity>,
    rx: ReceiverWindow,
    cross: CrossLegDiscard,
    control: Option<UeDuplicationControl>,
    dup_active: bool,
    generated: usize,
    dup_flag: Vec<bool>,
    out: UeOutcome,
}

impl UeRt {
    fn idle(&self) -> bool {
        self.rlc.iter().all(RlcEntity::is_idle)
    }
}

struct Engine<'a, M> {
    cfg: &'a EngineConfig,
    model: &'a M,
    ues: Vec<UeRt>,
    sched: Scheduler<Event>,
    tick_pending: bool,
    xn_in_flight: usize,
    horizon: SimTime,
}

/// Runs one iteration to quiescence.
pub fn simulate<M: OutcomeModel>(
    setups: Vec<UeSetup>,
    cfg: &EngineConfig,
    model: &M,
) -> Result<EngineOutput, SimError> {
    let invariant = |detail: String| SimError::Invariant {
        iteration: cfg.iteration,
        detail,
    };
    let mut ues = Vec::with_capacity(setups.len());
    for s in setups {
        s.bearer
            .validate()
            .map_err(|e| SimError::Config(format!("UE {}: {e}", s.ue.0)))?;
        if s.xn_leg.is_some_and(|l| l >= s.bearer.legs.len()) {
            return Err(SimError::Config(format!("UE {}: Xn leg out of range", s.ue.0)));
        }
        let rlc = (0..s.bearer.legs.len())
            .map(|i| RlcEntity::new(LegId(i as u32), cfg.rlc))
            .collect();
        let same_node = s.bearer.legs.iter().all(|l| l.node == s.bearer.legs[0].node);
        let mut control = None;
        let mut dup_active = s.bearer.initial_duplication_active;
        if let Some(dynamic) = cfg
            .dynamic
            .filter(|_| s.bearer.is_two_leg() && s.bearer.duplication_configured)
        {
            let bearer = BearerConfig {
                initial_duplication_active: false,
                ..s.bearer.clone()
            };
            let mut c = UeDuplicationControl::new(cfg.signaling);
            c.add_bearer(bearer).map_err(|e| SimError::Config(e.to_string()))?;
            dup_active = false;
            if evaluate_trigger(&dynamic.criteria, &s.measurements_dbm) == TriggerDecision::Activate {
                let at = dynamic.side.request_delay(&cfg.signaling);
                c.activate(&[], dynamic.mode, at)
                    .map_err(|e| SimError::Config(e.to_string()))?;
            }
            control = Some(c);
        }
        let bearer_id = s.bearer.bearer_id;
        ues.push(UeRt {
            tx: PdcpTransmitter::new(s.bearer.clone(), cfg.sn_space),
            rlc,
            rx: ReceiverWindow::new(bearer_id, cfg.sn_space),
            cross: CrossLegDiscard::new(cfg.cross_leg_discard && s.bearer.is_two_leg(), SimTime::ZERO),
            control,
            dup_active,
            generated: 0,
            dup_flag: vec![false; cfg.packets_per_user],
            out: UeOutcome {
                ue: s.ue,
                latencies: vec![None; cfg.packets_per_user],
                rlc: vec![RlcStats::default(); s.bearer.legs.len()],
                ..UeOutcome::default()
            },
            setup: UeSetup {
                xn_leg: if same_node { None } else { s.xn_leg },
                ..s
            },
        });
    }
    let mut e = Engine {
        cfg,
        model,
        ues,
        sched: Scheduler::new(),
        tick_pending: false,
        xn_in_flight: 0,
        horizon: cfg.horizon(),
    };
    for i in 0..e.ues.len() {
        if let Some(t) = e.ues[i].control.as_ref().and_then(UeDuplicationControl::next_effective) {
            e.push(t, Event::ControlDue { ue: i as u32 });
        }
    }
    e.ensure_tick(SimTime::ZERO);
    let mut finished_at = SimTime::ZERO;
    while let Some((now, ev)) = e.sched.pop() {
        if now > e.horizon {
            return Err(SimError::Watchdog {
                iteration: cfg.iteration,
                horizon: e.horizon,
                detail: format!("event pending at {now} ms with {} more queued", e.sched.len()),
            });
        }
        finished_at = now;
        e.handle(now, ev)?;
    }
    let events = e.sched.processed();
    let mut out = Vec::with_capacity(e.ues.len());
    for mut u in e.ues {
        if !u.idle() {
            return Err(invariant(format!("UE {} has unfinished RLC work", u.setup.ue.0)));
        }
        let delivered = u.out.delivered() as u64;
        if u.generated != cfg.packets_per_user || delivered != u.rx.delivered() {
            return Err(invariant(format!(
                "UE {}: generated {} of {}, {} recorded deliveries vs {} at PDCP",
                u.setup.ue.0,
                u.generated,
                cfg.packets_per_user,
                delivered,
                u.rx.delivered()
            )));
        }
        for (dst, rlc) in u.out.rlc.iter_mut().zip(&u.rlc) {
            *dst = *rlc.stats();
        }
        u.out.avoided_retx = u.cross.avoided_retx();
        u.out.redundant_retx = u.cross.redundant_retx();
        u.out.rx_discarded = u.rx.discarded();
        if let Some(c) = &u.control {
            u.out.overhead = *c.overhead();
        }
        out.push(u.out);
    }
    Ok(EngineOutput {
        ues: out,
        events,
        finished_at,
    })
}

impl<M: OutcomeModel> Engine<'_, M> {
    fn push(&mut self, at: SimTime, ev: Event) {
        self.sched
            .schedule(at, ev)
            .expect("engine never schedules into the past");
    }

    fn ensure_tick(&mut self, at: SimTime) {
        if !self.tick_pending {
            self.tick_pending = true;
            let at = at.next_boundary(self.cfg.rlc.tti);
            self.push(at, Event::Tick);
        }
    }

    fn handle(&mut self, now: SimTime, ev: Event) -> Result<(), SimError> {
        match ev {
            Event::Tick => {
                self.tick_pending = false;
                self.tick(now)?;
            }
            Event::Feedback(batch) => {
                // NACKs first, so an ACK in the same instant can cancel the
                // retransmission they queue on the peer leg
                for r in batch.iter().filter(|r| !r.ack).chain(batch.iter().filter(|r| r.ack)) {
                    self.feedback(now, *r);
                }
            }
            Event::XnDownlink { ue, leg, pdu } => {
                self.xn_in_flight -= 1;
                let u = &mut self.ues[ue as usize];
                u.rlc[leg as usize].enqueue(pdu, now);
                self.ensure_tick(now);
            }
            Event::XnUplink { ue, pdu } => {
                self.xn_in_flight -= 1;
                self.receive(now, ue as usize, &pdu);
            }
            Event::Notify { ue, n } => {
                let u = &mut self.ues[ue as usize];
                u.cross.apply(&n, &mut u.rlc[n.target_leg]);
            }
            Event::ControlDue { ue } => {
                let u = &mut self.ues[ue as usize];
                if let Some(c) = u.control.as_mut() {
                    c.apply_due(now);
                    u.dup_active = c.is_active(u.setup.bearer.bearer_id);
                    if let Some(t) = c.next_effective() {
                        self.push(t, Event::ControlDue { ue });
                    }
                }
            }
        }
        Ok(())
    }

    fn tick(&mut self, now: SimTime) -> Result<(), SimError> {
        let cfg = self.cfg;
        let tti = cfg.rlc.tti;
        let tti_index = now.as_us() / tti.as_us();
        let mut batch = Vec::new();
        let mut attempts = Vec::new();
        let mut busy = false;
        for i in 0..self.ues.len() {
            let u = &mut self.ues[i];
            if u.generated < cfg.packets_per_user {
                let sdu = PdcpSdu::new(u.setup.bearer.bearer_id, now);
                let default = u.setup.bearer.default_leg;
                let volume = u.rlc[default].buffered_bytes();
                let pdus =
                    u.tx.submit(&sdu, u.dup_active, volume)
                        .map_err(|e| SimError::Config(e.to_string()))?;
                u.generated += 1;
                let dup = pdus.len() > 1;
                if dup {
                    let count = pdus[0].1.count as usize;
                    u.dup_flag[count] = true;
                    u.out.duplicated += 1;
                }
                u.cross.forget(pdus[0].1.sn);
                for (leg, pdu) in pdus {
                    if cfg.direction == Direction::Downlink
                        && u.setup.xn_leg == Some(leg)
                        && cfg.xn_latency > SimTime::ZERO
                    {
                        let legs = &u.setup.bearer.legs;
                        let link = XnLink {
                            latency: cfg.xn_latency,
                            master: legs[1 - leg].node,
                            secondary: legs[leg].node,
                        };
                        let d = xn_forward(&link, link.master, pdu, now);
                        self.xn_in_flight += 1;
                        self.sched
                            .schedule(
                                d.at,
                                Event::XnDownlink {
                                    ue: i as u32,
                                    leg: leg as u8,
                                    pdu: d.pdu,
                                },
                            )
                            .expect("future event");
                    } else {
                        u.rlc[leg].enqueue(pdu, now);
                    }
                }
            }
            let u = &mut self.ues[i];
            for leg in 0..u.rlc.len() {
                attempts.clear();
                u.rlc[leg].schedule_into(now, cfg.rlc.pdus_per_tti, &mut attempts);
                let desc = u.setup.bearer.legs[leg];
                for a in &attempts {
                    if a.is_retx() {
                        u.cross.on_retx_attempt(leg, a.pdcp.sn, now);
                    }
                    let ack = self
                        .model
                        .attempt_success(u.setup.ue, leg, desc.node, desc.carrier, tti_index, a);
                    batch.push(Resolved {
                        ue: i as u32,
                        leg: leg as u8,
                        attempt: *a,
                        ack,
                    });
                }
            }
            busy |= !u.idle() || u.generated < cfg.packets_per_user;
        }
        if !batch.is_empty() {
            self.push(now + tti, Event::Feedback(batch));
        }
        if busy || self.xn_in_flight > 0 {
            self.ensure_tick(now + tti);
        }
        Ok(())
    }

    fn feedback(&mut self, now: SimTime, r: Resolved) {
        let cfg = self.cfg;
        let ui = r.ue as usize;
        let leg = r.leg as usize;
        let u = &mut self.ues[ui];
        let a = r.attempt;
        let count = a.pdcp.count as usize;
        let duplicated = u.dup_flag.get(count).copied().unwrap_or(false);
        if duplicated && leg == u.setup.bearer.default_leg && !a.is_retx() && !r.ack {
            u.out.default_first_failed += 1;
        }
        let fb = u.rlc[leg].feedback(&a, r.ack);
        if let Feedback::Retransmit { .. } = fb {
            u.cross.on_nack(leg, a.pdcp.sn, &mut u.rlc[leg]);
        }
        if fb != Feedback::Acked {
            return;
        }
        let via_xn = u.setup.xn_leg == Some(leg) && cfg.xn_latency > SimTime::ZERO;
        // how long until the peer leg can learn of this ACK
        let delay = match (u.setup.xn_leg, cfg.direction) {
            (None, _) => SimTime::ZERO,
            (Some(_), Direction::Downlink) => cfg.xn_latency,
            (Some(x), Direction::Uplink) if x == leg => cfg.xn_latency,
            (Some(_), Direction::Uplink) => SimTime::ZERO,
        };
        if let Some(n) = u.cross.on_ack_after(leg, a.pdcp.sn, now, duplicated, delay) {
            if n.effective_at <= now {
                u.cross.apply(&n, &mut u.rlc[n.target_leg]);
            } else {
                self.push(n.effective_at, Event::Notify { ue: r.ue, n });
            }
        }
        if cfg.direction == Direction::Uplink && via_xn {
            self.xn_in_flight += 1;
            self.push(now + cfg.xn_latency, Event::XnUplink { ue: r.ue, pdu: a.pdcp });
        } else {
            self.receive(now, ui, &a.pdcp);
        }
    }

    fn receive(&mut self, now: SimTime, ui: usize, pdu: &PdcpPdu) {
        let u = &mut self.ues[ui];
        if let RxOutcome::Deliver { .. } = u.rx.receive(pdu) {
            if let Some(slot) = u.out.latencies.get_mut(pdu.count as usize) {
                *slot = Some(now - pdu.created_at);
            }
        }
    }
}

/// Share of duplicated packets whose first attempt on the default leg
/// failed, i.e. where the duplicate was needed. `None` without duplicates.
pub fn duplication_efficiency<'a>(ues: impl IntoIterator<Item = &'a UeOutcome>) -> Option<f64> {
    let (mut dup, mut failed) = (0u64, 0u64);
    for u in ues {
        dup += u.duplicated;
        failed += u.default_first_failed;
    }
    (dup > 0).then(|| failed as f64 / dup as f64)
}

/// Identifier used for the single user-plane bearer of every UE.
pub const DATA_BEARER: BearerId = BearerId(1);
