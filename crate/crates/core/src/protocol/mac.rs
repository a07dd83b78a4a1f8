//! MAC logical-channel multiplexing for one leg.

use super::rlc::{Attempt, RlcEntity};
use crate::SimTime;

struct Channel {
    lcid: u8,
    priority: u8,
    rlc: RlcEntity,
}

/// A MAC entity serving several logical channels with a per-TTI PDU budget.
///
/// Channels are served in priority order (SRBs ahead of data), and inside a
/// channel the RLC entity puts due retransmissions ahead of new PDUs.
pub struct MacEntity {
    capacity_per_tti: usize,
    channels: Vec<Channel>,
}

impl MacEntity {
    pub fn new(capacity_per_tti: usize) -> Self {
        MacEntity {
            capacity_per_tti,
            channels: Vec::new(),
        }
    }

    /// Adds a logical channel. Ties in priority keep insertion order.
    pub fn add_channel(&mut self, lcid: u8, priority: u8, rlc: RlcEntity) {
        let pos = self.channels.partition_point(|c| c.priority <= priority);
        self.channels.insert(pos, Channel { lcid, priority, rlc });
    }

    pub fn rlc_mut(&mut self, lcid: u8) -> Option<&mut RlcEntity> {
        self.channels.iter_mut().find(|c| c.lcid == lcid).map(|c| &mut c.rlc)
    }

    /// Attempts for the TTI starting at `now`, tagged with their LCID.
    pub fn schedule_tti(&mut self, now: SimTime) -> Vec<(u8, Attempt)> {
        let mut out = Vec::new();
        let mut budget = self.capacity_per_tti;
        let mut buf = Vec::new();
        for ch in &mut self.channels {
            if budget == 0 {
                break;
            }
            buf.clear();
            budget -= ch.rlc.schedule_into(now, budget, &mut buf);
            out.extend(buf.iter().map(|a| (ch.lcid, *a)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::rlc::{LegId, RlcConfig};
    use crate::protocol::PdcpPdu;
    use crate::BearerId;

    fn pdu(bearer: u32, sn: u32) -> PdcpPdu {
        PdcpPdu {
            bearer_id: BearerId(bearer),
            sn,
            count: sn as u64,
            payload_bytes: 100,
            is_duplicate: false,
            created_at: SimTime::ZERO,
        }
    }

    #[test]
    fn srb_preempts_data_including_data_retransmissions() {
        let mut mac = MacEntity::new(2);
        mac.add_channel(4, 8, RlcEntity::new(LegId(0), RlcConfig::default()));
        mac.add_channel(1, 1, RlcEntity::new(LegId(0), RlcConfig::default()));
        let data = mac.rlc_mut(4).unwrap();
        data.enqueue(pdu(4, 0), SimTime::ZERO);
        let a = mac.schedule_tti(SimTime::ZERO);
        assert_eq!(a.len(), 1);
        mac.rlc_mut(4).unwrap().feedback(&a[0].1, false);

        for sn in 0..3 {
            mac.rlc_mut(1).unwrap().enqueue(pdu(1, sn), SimTime::ZERO);
        }
        mac.rlc_mut(4).unwrap().enqueue(pdu(4, 1), SimTime::ZERO);
        // TTI 4: the data retransmission is due, but SRB1 takes both slots
        let a = mac.schedule_tti(SimTime::from_ms(4));
        assert_eq!(a.iter().map(|(l, _)| *l).collect::<Vec<_>>(), vec![1, 1]);
        let a = mac.schedule_tti(SimTime::from_ms(5));
        assert_eq!(a[0].0, 1);
        // data channel: retransmission before its new PDU
        assert_eq!((a[1].0, a[1].1.pdu.retx_count, a[1].1.pdu.pdcp_sn), (4, 1, 0));
    }
}
