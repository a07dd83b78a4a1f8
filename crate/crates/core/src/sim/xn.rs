//! Xn backhaul between the master and the secondary gNB.

use serde::{Deserialize, Serialize};

use crate::protocol::PdcpPdu;
use crate::{NodeId, SimTime};

/// Reliable, constant-latency link; constant latency plus the scheduler's
/// insertion-order tie-break keeps deliveries FIFO.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XnLink {
    pub latency: SimTime,
    pub master: NodeId,
    pub secondary: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XnDelivery {
    pub at: SimTime,
    pub from: NodeId,
    pub to: NodeId,
    pub pdu: PdcpPdu,
}

/// Forwards `pdu` from `from` to the other endpoint.
pub fn xn_forward(link: &XnLink, from: NodeId, pdu: PdcpPdu, sent_at: SimTime) -> XnDelivery {
    let to = if from == link.master {
        link.secondary
    } else {
        link.master
    };
    XnDelivery {
        at: sent_at + link.latency,
        from,
        to,
        pdu,
    }
}
