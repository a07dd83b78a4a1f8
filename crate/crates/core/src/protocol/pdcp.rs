//! PDCP sequencing, transmit-side routing/duplication and receive-side
//! duplicate elimination.

use serde::{Deserialize, Serialize};

use super::{BearerConfig, BearerKind, ProtocolError};
use crate::{BearerId, SimTime};

/// Modular PDCP sequence-number space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnSpace {
    bits: u8,
}

impl SnSpace {
    pub const DEFAULT_BITS: u8 = 12;

    /// `bits` is clamped to `2..=31`.
    pub fn new(bits: u8) -> Self {
        SnSpace {
            bits: bits.clamp(2, 31),
        }
    }

    pub fn bits(self) -> u8 {
        self.bits
    }

    pub fn modulus(self) -> u32 {
        1 << self.bits
    }

    /// Receive window width, half the SN space.
    pub fn window(self) -> u32 {
        self.modulus() / 2
    }

    pub fn sn_of(self, count: u64) -> u32 {
        (count & (self.modulus() as u64 - 1)) as u32
    }
}

impl Default for SnSpace {
    fn default() -> Self {
        SnSpace::new(Self::DEFAULT_BITS)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdcpSdu {
    pub bearer_id: BearerId,
    pub payload_bytes: u32,
    pub created_at: SimTime,
}

impl PdcpSdu {
    pub const DEFAULT_PAYLOAD: u32 = 100;

    pub fn new(bearer_id: BearerId, created_at: SimTime) -> Self {
        PdcpSdu {
            bearer_id,
            payload_bytes: Self::DEFAULT_PAYLOAD,
            created_at,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdcpPdu {
    pub bearer_id: BearerId,
    pub sn: u32,
    /// Unwrapped sequence counter; `sn` is its low bits.
    pub count: u64,
    pub payload_bytes: u32,
    pub is_duplicate: bool,
    pub created_at: SimTime,
}

/// Transmit-side routing decision for one PDU.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Routing {
    Single(usize),
    Duplicate { primary: usize, secondary: usize },
}

/// Routing rule of the transmitting PDCP entity.
///
/// `split_turn` is the round-robin state used when a split bearer is above
/// its threshold; it is advanced only on that branch.
pub fn route(
    bearer: &BearerConfig,
    dup_active: bool,
    buffered_volume: u64,
    split_turn: &mut usize,
) -> Result<Routing, ProtocolError> {
    let id = bearer.bearer_id;
    if dup_active {
        if !bearer.is_two_leg() {
            return Err(ProtocolError::SingleLegDuplication(id));
        }
        if !bearer.duplication_configured {
            return Err(ProtocolError::DuplicationNotConfigured(id));
        }
        // split threshold and path restriction do not apply while duplicating
        return Ok(Routing::Duplicate {
            primary: bearer.default_leg,
            secondary: bearer.other_leg(),
        });
    }
    match bearer.kind {
        BearerKind::Split if bearer.is_two_leg() => {
            if buffered_volume < bearer.split_threshold_bytes {
                Ok(Routing::Single(bearer.default_leg))
            } else {
                let leg = if split_turn.is_multiple_of(2) {
                    bearer.default_leg
                } else {
                    bearer.other_leg()
                };
                *split_turn = split_turn.wrapping_add(1);
                Ok(Routing::Single(leg))
            }
        }
        _ => Ok(Routing::Single(bearer.default_leg)),
    }
}

/// Transmitting PDCP entity of one bearer.
#[derive(Clone, Debug)]
pub struct PdcpTransmitter {
    bearer: BearerConfig,
    sn_space: SnSpace,
    tx_next: u64,
    last_created: Option<SimTime>,
    split_turn: usize,
}

impl PdcpTransmitter {
    pub fn new(bearer: BearerConfig, sn_space: SnSpace) -> Self {
        PdcpTransmitter {
            bearer,
            sn_space,
            tx_next: 0,
            last_created: None,
            split_turn: 0,
        }
    }

    pub fn bearer(&self) -> &BearerConfig {
        &self.bearer
    }

    pub fn bearer_mut(&mut self) -> &mut BearerConfig {
        &mut self.bearer
    }

    pub fn next_count(&self) -> u64 {
        self.tx_next
    }

    /// Numbers the SDU and routes the resulting PDU. With duplication active
    /// both returned PDUs carry the same SN; the copy for the non-default
    /// leg is flagged `is_duplicate`.
    pub fn submit(
        &mut self,
        sdu: &PdcpSdu,
        dup_active: bool,
        buffered_volume: u64,
    ) -> Result<Vec<(usize, PdcpPdu)>, ProtocolError> {
        let id = self.bearer.bearer_id;
        if sdu.bearer_id != id {
            return Err(ProtocolError::UnknownBearer {
                bearer: id,
                sdu: sdu.bearer_id,
            });
        }
        if sdu.payload_bytes == 0 {
            return Err(ProtocolError::EmptyPayload(id));
        }
        if self.last_created.is_some_and(|t| sdu.created_at < t) {
            return Err(ProtocolError::NonMonotonicSdu(id));
        }
        let routing = route(&self.bearer, dup_active, buffered_volume, &mut self.split_turn)?;
        let count = self.tx_next;
        self.tx_next += 1;
        self.last_created = Some(sdu.created_at);
        let pdu = PdcpPdu {
            bearer_id: id,
            sn: self.sn_space.sn_of(count),
            count,
            payload_bytes: sdu.payload_bytes,
            is_duplicate: false,
            created_at: sdu.created_at,
        };
        Ok(match routing {
            Routing::Single(leg) => vec![(leg, pdu)],
            Routing::Duplicate { primary, secondary } => vec![
                (primary, pdu),
                (
                    secondary,
                    PdcpPdu {
                        is_duplicate: true,
                        ..pdu
                    },
                ),
            ],
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscardReason {
    Duplicate,
    /// Falls behind the start of the stream.
    Stale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RxOutcome {
    Deliver { sn: u32, count: u64 },
    Discard(DiscardReason),
}

impl RxOutcome {
    pub fn is_deliver(&self) -> bool {
        matches!(self, RxOutcome::Deliver { .. })
    }
}

/// Receive-side duplicate detection over a sliding window of half the SN
/// space.
///
/// SNs are unwrapped against `next_expected` (one past the highest count
/// seen): anything within half the space ahead is new, anything up to half
/// the space behind is looked up in the seen-bitmap. Slots are recycled as
/// the window advances, so a count is never forgotten while it is still
/// inside the window.
#[derive(Clone, Debug)]
pub struct ReceiverWindow {
    bearer_id: BearerId,
    sn_space: SnSpace,
    next_expected: u64,
    seen: Vec<u64>,
    delivered: u64,
    discarded: u64,
}

impl ReceiverWindow {
    pub fn new(bearer_id: BearerId, sn_space: SnSpace) -> Self {
        let words = (sn_space.modulus() as usize).div_ceil(64);
        ReceiverWindow {
            bearer_id,
            sn_space,
            next_expected: 0,
            seen: vec![0; words],
            delivered: 0,
            discarded: 0,
        }
    }

    pub fn bearer_id(&self) -> BearerId {
        self.bearer_id
    }

    pub fn next_expected_sn(&self) -> u32 {
        self.sn_space.sn_of(self.next_expected)
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn discarded(&self) -> u64 {
        self.discarded
    }

    fn slot(&self, count: u64) -> (usize, u64) {
        let idx = self.sn_space.sn_of(count) as usize;
        (idx / 64, 1u64 << (idx % 64))
    }

    fn is_seen(&self, count: u64) -> bool {
        let (w, bit) = self.slot(count);
        self.seen[w] & bit != 0
    }

    fn mark(&mut self, count: u64) {
        let (w, bit) = self.slot(count);
        self.seen[w] |= bit;
    }

    fn clear(&mut self, count: u64) {
        let (w, bit) = self.slot(count);
        self.seen[w] &= !bit;
    }

    pub fn receive(&mut self, pdu: &PdcpPdu) -> RxOutcome {
        self.receive_sn(pdu.sn)
    }

    pub fn receive_sn(&mut self, sn: u32) -> RxOutcome {
        let m = self.sn_space.modulus() as u64;
        let w = self.sn_space.window() as u64;
        let sn = sn as u64 & (m - 1);
        let ahead = (sn + m - (self.next_expected % m)) % m;
        let outcome = if ahead < w {
            let count = self.next_expected + ahead;
            // recycle the slots between the old and new window edge
            let span = (count + 1 - self.next_expected).min(m);
            for c in (count + 1 - span)..=count {
                self.clear(c);
            }
            self.mark(count);
            self.next_expected = count + 1;
            RxOutcome::Deliver { sn: sn as u32, count }
        } else {
            let behind = m - ahead;
            match self.next_expected.checked_sub(behind) {
                None => RxOutcome::Discard(DiscardReason::Stale),
                Some(count) if self.is_seen(count) => RxOutcome::Discard(DiscardReason::Duplicate),
                Some(count) => {
                    self.mark(count);
                    RxOutcome::Deliver { sn: sn as u32, count }
                }
            }
        };
        if outcome.is_deliver() {
            self.delivered += 1;
        } else {
            self.discarded += 1;
        }
        outcome
    }
}
