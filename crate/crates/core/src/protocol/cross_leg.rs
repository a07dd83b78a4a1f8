//! Cross-leg retransmission cancellation for duplicated bearers.
//!
//! Once one leg has the PDU carrying a PDCP SN acknowledged, a pending
//! retransmission of the same SN on the other leg is wasted air time. With
//! the feature enabled the acknowledging leg notifies its peer after
//! `notify_delay` (zero when both RLC entities sit in the UE, the Xn latency
//! when they sit in different gNBs) and the peer drops the PDU. The PDCP SN
//! is the correlation key; RLC SNs of the two legs are independent.

use std::collections::{HashMap, HashSet};

use super::rlc::{CancelOutcome, RlcEntity};
use crate::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Notification {
    /// Leg index (0 or 1) that should drop the PDU.
    pub target_leg: usize,
    pub pdcp_sn: u32,
    pub effective_at: SimTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscardEffect {
    CancelledRetx,
    CancelledFirstTx,
    NoOp,
}

#[derive(Clone, Debug)]
pub struct CrossLegDiscard {
    enabled: bool,
    notify_delay: SimTime,
    /// PDCP SN -> (acking leg, ack time); first ACK wins.
    acked: HashMap<u32, (usize, SimTime)>,
    /// Notifications that found their PDU in flight: (leg, PDCP SN).
    in_flight: HashSet<(usize, u32)>,
    avoided_retx: u64,
    redundant_retx: u64,
}

impl CrossLegDiscard {
    pub fn new(enabled: bool, notify_delay: SimTime) -> Self {
        CrossLegDiscard {
            enabled,
            notify_delay,
            acked: HashMap::new(),
            in_flight: HashSet::new(),
            avoided_retx: 0,
            redundant_retx: 0,
        }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn avoided_retx(&self) -> u64 {
        self.avoided_retx
    }

    pub fn redundant_retx(&self) -> u64 {
        self.redundant_retx
    }

    /// Records an ACK on `leg` for a PDU that was duplicated. Returns the
    /// notification to deliver to the peer leg when the feature is on.
    /// Non-duplicated PDUs are ignored.
    pub fn on_ack(&mut self, leg: usize, pdcp_sn: u32, at: SimTime, duplicated: bool) -> Option<Notification> {
        self.on_ack_after(leg, pdcp_sn, at, duplicated, self.notify_delay)
    }

    /// [`CrossLegDiscard::on_ack`] with a per-ACK notification delay, for
    /// legs whose acknowledging side differs in how far it sits from the peer.
    pub fn on_ack_after(
        &mut self,
        leg: usize,
        pdcp_sn: u32,
        at: SimTime,
        duplicated: bool,
        delay: SimTime,
    ) -> Option<Notification> {
        if !duplicated {
            return None;
        }
        self.acked.entry(pdcp_sn).or_insert((leg, at));
        self.enabled.then(|| Notification {
            target_leg: 1 - leg.min(1),
            pdcp_sn,
            effective_at: at + delay,
        })
    }

    /// Applies a delivered notification to the peer leg's RLC entity. A PDU
    /// that is mid-attempt is remembered and dropped if its NACK comes back.
    pub fn apply(&mut self, n: &Notification, peer: &mut RlcEntity) -> DiscardEffect {
        let effect = self.cancel(peer, n.pdcp_sn);
        if effect == DiscardEffect::NoOp {
            self.in_flight.insert((n.target_leg, n.pdcp_sn));
        }
        effect
    }

    /// Called after a NACK on `leg` queued a retransmission; drops it when a
    /// notification for the SN arrived while the attempt was in the air.
    pub fn on_nack(&mut self, leg: usize, pdcp_sn: u32, rlc: &mut RlcEntity) -> DiscardEffect {
        if self.in_flight.remove(&(leg, pdcp_sn)) {
            self.cancel(rlc, pdcp_sn)
        } else {
            DiscardEffect::NoOp
        }
    }

    fn cancel(&mut self, peer: &mut RlcEntity, pdcp_sn: u32) -> DiscardEffect {
        match peer.cancel(pdcp_sn) {
            CancelOutcome::Cancelled { was_retx: true } => {
                self.avoided_retx += 1;
                DiscardEffect::CancelledRetx
            }
            CancelOutcome::Cancelled { was_retx: false } => DiscardEffect::CancelledFirstTx,
            CancelOutcome::NotPending => DiscardEffect::NoOp,
        }
    }

    /// Called for every retransmission attempt on `leg`; counts it as
    /// redundant when the peer leg already had the same SN acknowledged.
    pub fn on_retx_attempt(&mut self, leg: usize, pdcp_sn: u32, at: SimTime) -> bool {
        match self.acked.get(&pdcp_sn) {
            Some(&(acking, t)) if acking != leg && t <= at => {
                self.redundant_retx += 1;
                true
            }
            _ => false,
        }
    }

    /// Drops bookkeeping for SNs that can no longer be retransmitted.
    pub fn forget(&mut self, pdcp_sn: u32) {
        self.acked.remove(&pdcp_sn);
        self.in_flight.retain(|&(_, sn)| sn != pdcp_sn);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::rlc::{LegId, RlcConfig};
    use crate::protocol::PdcpPdu;
    use crate::BearerId;

    fn pdu(sn: u32) -> PdcpPdu {
        PdcpPdu {
            bearer_id: BearerId(1),
            sn,
            count: sn as u64,
            payload_bytes: 100,
            is_duplicate: true,
            created_at: SimTime::ZERO,
        }
    }

    /// Leg 2 has a NACKed copy of SN 0 waiting for its retransmission at
    /// 4 ms when leg 1 reports an ACK at 1 ms.
    fn race(enabled: bool, delay_ms: u64) -> (CrossLegDiscard, RlcEntity, bool) {
        let mut peer = RlcEntity::new(LegId(1), RlcConfig::default());
        peer.enqueue(pdu(0), SimTime::ZERO).unwrap();
        let a = peer.schedule(SimTime::ZERO);
        peer.feedback(&a[0], false);
        let retx_at = peer.pending_retx_at(0).unwrap();
        assert_eq!(retx_at, SimTime::from_ms(4));

        let mut x = CrossLegDiscard::new(enabled, SimTime::from_ms(delay_ms));
        let ack_at = SimTime::from_ms(1);
        if let Some(n) = x.on_ack(0, 0, ack_at, true) {
            if n.effective_at <= retx_at {
                x.apply(&n, &mut peer);
            }
        }
        let mut retransmitted = false;
        for a in peer.schedule(retx_at) {
            retransmitted = true;
            x.on_retx_attempt(1, a.pdu.pdcp_sn, a.start);
        }
        (x, peer, retransmitted)
    }

    #[test]
    fn ue_internal_notification_cancels_retx() {
        let (x, _, retransmitted) = race(true, 0);
        assert!(!retransmitted);
        assert_eq!((x.avoided_retx(), x.redundant_retx()), (1, 0));
    }

    #[test]
    fn late_xn_notification_cannot_cancel() {
        // ACK at 1 ms + 10 ms Xn arrives after the retransmission at 4 ms
        let (x, _, retransmitted) = race(true, 10);
        assert!(retransmitted);
        assert_eq!((x.avoided_retx(), x.redundant_retx()), (0, 1));
    }

    #[test]
    fn notification_during_the_attempt_drops_the_retx() {
        let mut peer = RlcEntity::new(LegId(1), RlcConfig::default());
        peer.enqueue(pdu(0), SimTime::ZERO).unwrap();
        let a = peer.schedule(SimTime::ZERO);
        let mut x = CrossLegDiscard::new(true, SimTime::ZERO);
        let n = x.on_ack(0, 0, SimTime::ZERO, true).unwrap();
        assert_eq!(x.apply(&n, &mut peer), DiscardEffect::NoOp);
        peer.feedback(&a[0], false);
        assert_eq!(x.on_nack(1, 0, &mut peer), DiscardEffect::CancelledRetx);
        assert!(peer.is_idle());
        assert_eq!(x.avoided_retx(), 1);
        // a second NACK for the same SN is not affected
        assert_eq!(x.on_nack(1, 0, &mut peer), DiscardEffect::NoOp);
    }

    #[test]
    fn disabled_feature_lets_redundant_retx_through() {
        let (x, _, retransmitted) = race(false, 0);
        assert!(retransmitted);
        assert_eq!((x.avoided_retx(), x.redundant_retx()), (0, 1));
    }

    #[test]
    fn non_duplicated_pdus_are_ignored() {
        let mut x = CrossLegDiscard::new(true, SimTime::ZERO);
        assert_eq!(x.on_ack(0, 5, SimTime::ZERO, false), None);
        assert!(!x.on_retx_attempt(1, 5, SimTime::from_ms(4)));
    }

    #[test]
    fn unknown_sn_is_a_noop() {
        let mut x = CrossLegDiscard::new(true, SimTime::ZERO);
        let mut peer = RlcEntity::new(LegId(1), RlcConfig::default());
        let n = x.on_ack(0, 77, SimTime::ZERO, true).unwrap();
        assert_eq!(x.apply(&n, &mut peer), DiscardEffect::NoOp);
        assert_eq!(x.avoided_retx(), 0);
    }
}
