//! RLC acknowledged mode, one RLC PDU per PDCP PDU.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PdcpPdu;
use crate::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LegId(pub u32);

impl fmt::Display for LegId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "leg{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RlcConfig {
    pub max_retx: u8,
    /// Spacing between the start of a failed attempt and its retransmission.
    pub retx_delay: SimTime,
    pub tti: SimTime,
    pub buffer_limit: usize,
    pub pdus_per_tti: usize,
}

impl Default for RlcConfig {
    fn default() -> Self {
        RlcConfig {
            max_retx: 3,
            retx_delay: SimTime::from_ms(4),
            tti: SimTime::from_ms(1),
            buffer_limit: 4096,
            pdus_per_tti: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RlcPdu {
    pub leg_id: LegId,
    pub rlc_sn: u32,
    pub pdcp_sn: u32,
    pub retx_count: u8,
    pub size_bytes: u32,
}

/// A MAC transmission attempt handed out by [`RlcEntity::schedule`].
/// It resolves one TTI after `start` through [`RlcEntity::feedback`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Attempt {
    pub pdu: RlcPdu,
    pub pdcp: PdcpPdu,
    pub start: SimTime,
}

impl Attempt {
    pub fn end(&self, tti: SimTime) -> SimTime {
        self.start + tti
    }

    pub fn is_retx(&self) -> bool {
        self.pdu.retx_count > 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feedback {
    Acked,
    Retransmit { ready_at: SimTime },
    Lost,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RlcStats {
    pub first_tx: u64,
    pub retx: u64,
    pub acked: u64,
    pub lost: u64,
    pub dropped_overflow: u64,
    pub cancelled_first_tx: u64,
    pub cancelled_retx: u64,
}

#[derive(Clone, Copy, Debug)]
struct Queued {
    ready_at: SimTime,
    pdu: RlcPdu,
    pdcp: PdcpPdu,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CancelOutcome {
    Cancelled { was_retx: bool },
    NotPending,
}

/// Transmitting RLC entity of one leg.
#[derive(Clone, Debug)]
pub struct RlcEntity {
    leg_id: LegId,
    cfg: RlcConfig,
    next_sn: u32,
    new_queue: VecDeque<Queued>,
    retx_queue: VecDeque<Queued>,
    in_flight: usize,
    stats: RlcStats,
}

impl RlcEntity {
    pub fn new(leg_id: LegId, cfg: RlcConfig) -> Self {
        RlcEntity {
            leg_id,
            cfg,
            next_sn: 0,
            new_queue: VecDeque::new(),
            retx_queue: VecDeque::new(),
            in_flight: 0,
            stats: RlcStats::default(),
        }
    }

    pub fn leg_id(&self) -> LegId {
        self.leg_id
    }

    pub fn config(&self) -> &RlcConfig {
        &self.cfg
    }

    pub fn stats(&self) -> &RlcStats {
        &self.stats
    }

    pub fn buffered(&self) -> usize {
        self.new_queue.len() + self.retx_queue.len()
    }

    pub fn buffered_bytes(&self) -> u64 {
        self.new_queue
            .iter()
            .chain(self.retx_queue.iter())
            .map(|q| q.pdu.size_bytes as u64)
            .sum()
    }

    /// Nothing queued and nothing awaiting feedback.
    pub fn is_idle(&self) -> bool {
        self.buffered() == 0 && self.in_flight == 0
    }

    /// Accepts a PDCP PDU for transmission no earlier than `ready_at`.
    /// Returns the RLC SN, or `None` when the buffer is full and the PDU was
    /// dropped.
    pub fn enqueue(&mut self, pdcp: PdcpPdu, ready_at: SimTime) -> Option<u32> {
        if self.buffered() >= self.cfg.buffer_limit {
            self.stats.dropped_overflow += 1;
            return None;
        }
        let rlc_sn = self.next_sn;
        self.next_sn = self.next_sn.wrapping_add(1);
        self.new_queue.push_back(Queued {
            ready_at,
            pdu: RlcPdu {
                leg_id: self.leg_id,
                rlc_sn,
                pdcp_sn: pdcp.sn,
                retx_count: 0,
                size_bytes: pdcp.payload_bytes,
            },
            pdcp,
        });
        Some(rlc_sn)
    }

    /// Attempts for the TTI starting at `now`, capped at the configured
    /// per-TTI capacity.
    pub fn schedule(&mut self, now: SimTime) -> Vec<Attempt> {
        let mut out = Vec::new();
        self.schedule_into(now, self.cfg.pdus_per_tti, &mut out);
        out
    }

    /// Appends up to `budget` attempts starting at `now`: due
    /// retransmissions first, then first transmissions in FIFO order.
    /// Returns how many were appended.
    pub fn schedule_into(&mut self, now: SimTime, budget: usize, out: &mut Vec<Attempt>) -> usize {
        let mut n = 0;
        while n < budget {
            let q = match self.retx_queue.front() {
                Some(q) if q.ready_at <= now => self.retx_queue.pop_front(),
                _ => match self.new_queue.front() {
                    Some(q) if q.ready_at <= now => self.new_queue.pop_front(),
                    _ => None,
                },
            };
            let Some(q) = q else { break };
            if q.pdu.retx_count == 0 {
                self.stats.first_tx += 1;
            } else {
                self.stats.retx += 1;
            }
            out.push(Attempt {
                pdu: q.pdu,
                pdcp: q.pdcp,
                start: now,
            });
            n += 1;
        }
        self.in_flight += n;
        n
    }

    /// Applies the HARQ/ARQ outcome of an attempt. A NACKed PDU is requeued
    /// for `start + retx_delay` until it has used `max_retx` retransmissions,
    /// after which it is declared lost.
    pub fn feedback(&mut self, attempt: &Attempt, ack: bool) -> Feedback {
        self.in_flight = self.in_flight.saturating_sub(1);
        if ack {
            self.stats.acked += 1;
            return Feedback::Acked;
        }
        if attempt.pdu.retx_count >= self.cfg.max_retx {
            self.stats.lost += 1;
            return Feedback::Lost;
        }
        let ready_at = (attempt.start + self.cfg.retx_delay).next_boundary(self.cfg.tti);
        let q = Queued {
            ready_at,
            pdu: RlcPdu {
                retx_count: attempt.pdu.retx_count + 1,
                ..attempt.pdu
            },
            pdcp: attempt.pdcp,
        };
        // keep the retransmission queue ordered by ready time
        let pos = self
            .retx_queue
            .iter()
            .rposition(|e| e.ready_at <= ready_at)
            .map_or(0, |p| p + 1);
        self.retx_queue.insert(pos, q);
        Feedback::Retransmit { ready_at }
    }

    /// Earliest pending retransmission of the PDU carrying `pdcp_sn`.
    pub fn pending_retx_at(&self, pdcp_sn: u32) -> Option<SimTime> {
        self.retx_queue
            .iter()
            .find(|q| q.pdu.pdcp_sn == pdcp_sn)
            .map(|q| q.ready_at)
    }

    pub fn has_pending(&self, pdcp_sn: u32) -> bool {
        self.retx_queue
            .iter()
            .chain(self.new_queue.iter())
            .any(|q| q.pdu.pdcp_sn == pdcp_sn)
    }

    /// Drops any queued (re)transmission of the PDU carrying `pdcp_sn`.
    pub fn cancel(&mut self, pdcp_sn: u32) -> CancelOutcome {
        if let Some(i) = self.retx_queue.iter().position(|q| q.pdu.pdcp_sn == pdcp_sn) {
            self.retx_queue.remove(i);
            self.stats.cancelled_retx += 1;
            return CancelOutcome::Cancelled { was_retx: true };
        }
        if let Some(i) = self.new_queue.iter().position(|q| q.pdu.pdcp_sn == pdcp_sn) {
            self.new_queue.remove(i);
            self.stats.cancelled_first_tx += 1;
            return CancelOutcome::Cancelled { was_retx: false };
        }
        CancelOutcome::NotPending
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BearerId;

    fn pdu(sn: u32) -> PdcpPdu {
        PdcpPdu {
            bearer_id: BearerId(1),
            sn,
            count: sn as u64,
            payload_bytes: 100,
            is_duplicate: false,
            created_at: SimTime::ZERO,
        }
    }

    /// Drives one PDU through a scripted ACK/NACK sequence and returns the
    /// attempt start times (ms) plus the terminal outcome.
    fn timeline(outcomes: &[bool], max_retx: u8) -> (Vec<u64>, Feedback) {
        let cfg = RlcConfig {
            max_retx,
            ..RlcConfig::default()
        };
        let mut rlc = RlcEntity::new(LegId(0), cfg);
        rlc.enqueue(pdu(0), SimTime::ZERO).unwrap();
        let mut starts = Vec::new();
        let mut script = outcomes.iter();
        let mut last = Feedback::Lost;
        for tti in 0..100u64 {
            let now = SimTime::from_ms(tti);
            for a in rlc.schedule(now) {
                starts.push(tti);
                let ack = *script.next().expect("script exhausted");
                last = rlc.feedback(&a, ack);
            }
            if rlc.is_idle() {
                break;
            }
        }
        (starts, last)
    }

    #[test]
    fn first_attempt_success() {
        assert_eq!(timeline(&[true], 3), (vec![0], Feedback::Acked));
    }

    #[test]
    fn nack_nack_ack_delivers_on_third_attempt() {
        assert_eq!(timeline(&[false, false, true], 3), (vec![0, 4, 8], Feedback::Acked));
    }

    #[test]
    fn four_nacks_exhaust_max_retx() {
        assert_eq!(
            timeline(&[false, false, false, false], 3),
            (vec![0, 4, 8, 12], Feedback::Lost)
        );
    }

    #[test]
    fn retransmission_preempts_new_pdus() {
        let cfg = RlcConfig {
            pdus_per_tti: 1,
            ..RlcConfig::default()
        };
        let mut rlc = RlcEntity::new(LegId(0), cfg);
        for sn in 0..8 {
            rlc.enqueue(pdu(sn), SimTime::ZERO).unwrap();
        }
        let a = rlc.schedule(SimTime::ZERO);
        assert_eq!(a[0].pdu.pdcp_sn, 0);
        rlc.feedback(&a[0], false);
        for tti in 1..4 {
            let a = rlc.schedule(SimTime::from_ms(tti));
            assert_eq!(a[0].pdu.retx_count, 0);
            rlc.feedback(&a[0], true);
        }
        let a = rlc.schedule(SimTime::from_ms(4));
        assert_eq!((a[0].pdu.pdcp_sn, a[0].pdu.retx_count), (0, 1));
    }

    #[test]
    fn rlc_sn_increases_for_first_transmissions() {
        let mut rlc = RlcEntity::new(LegId(2), RlcConfig::default());
        let sns: Vec<u32> = (0..5)
            .map(|i| rlc.enqueue(pdu(i + 10), SimTime::ZERO).unwrap())
            .collect();
        assert_eq!(sns, vec![0, 1, 2, 3, 4]);
        let a = rlc.schedule(SimTime::ZERO);
        assert!(a.windows(2).all(|w| w[0].pdu.rlc_sn < w[1].pdu.rlc_sn));
    }

    #[test]
    fn overflow_drops_and_counts() {
        let cfg = RlcConfig {
            buffer_limit: 2,
            ..RlcConfig::default()
        };
        let mut rlc = RlcEntity::new(LegId(0), cfg);
        assert!(rlc.enqueue(pdu(0), SimTime::ZERO).is_some());
        assert!(rlc.enqueue(pdu(1), SimTime::ZERO).is_some());
        assert!(rlc.enqueue(pdu(2), SimTime::ZERO).is_none());
        assert_eq!(rlc.stats().dropped_overflow, 1);
    }

    #[test]
    fn cancel_pending_retx() {
        let mut rlc = RlcEntity::new(LegId(0), RlcConfig::default());
        rlc.enqueue(pdu(3), SimTime::ZERO).unwrap();
        let a = rlc.schedule(SimTime::ZERO);
        assert_eq!(
            rlc.feedback(&a[0], false),
            Feedback::Retransmit {
                ready_at: SimTime::from_ms(4)
            }
        );
        assert_eq!(rlc.pending_retx_at(3), Some(SimTime::from_ms(4)));
        assert_eq!(rlc.cancel(3), CancelOutcome::Cancelled { was_retx: true });
        assert_eq!(rlc.cancel(3), CancelOutcome::NotPending);
        assert!(rlc.is_idle());
    }

    #[test]
    fn pdus_wait_for_ready_time() {
        let mut rlc = RlcEntity::new(LegId(0), RlcConfig::default());
        rlc.enqueue(pdu(0), SimTime::from_ms(2)).unwrap();
        assert!(rlc.schedule(SimTime::from_ms(1)).is_empty());
        assert_eq!(rlc.schedule(SimTime::from_ms(2)).len(), 1);
    }
}
