use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// Simulation time with microsecond resolution.
///
/// All protocol timers are integral multiples of a microsecond, so event
/// ordering and latency-budget comparisons are exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_us(us: u64) -> Self {
        SimTime(us)
    }

    pub const fn from_ms(ms: u64) -> Self {
        SimTime(ms * 1000)
    }

    /// Rounds to the nearest microsecond. Negative and non-finite inputs
    /// saturate to zero and [`SimTime::MAX`] respectively.
    pub fn from_ms_f64(ms: f64) -> Self {
        if ms.is_nan() || ms <= 0.0 {
            SimTime(0)
        } else if !ms.is_finite() || ms * 1000.0 >= u64::MAX as f64 {
            SimTime::MAX
        } else {
            SimTime((ms * 1000.0).round() as u64)
        }
    }

    pub const fn as_us(self) -> u64 {
        self.0
    }

    pub fn as_ms_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }

    pub fn saturating_add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_add(rhs.0))
    }

    /// Smallest multiple of `tti` that is `>= self`.
    pub fn next_boundary(self, tti: SimTime) -> SimTime {
        if tti.0 == 0 {
            return self;
        }
        SimTime(self.0.div_ceil(tti.0) * tti.0)
    }
}

impl Add for SimTime {
    type Output = SimTime;

    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl Sub for SimTime {
    type Output = SimTime;

    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}", self.as_ms_f64())
    }
}

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $inner:ty, $prefix:literal) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub struct $name(pub $inner);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(
    /// A gNB (Tier-1 or Tier-2).
    NodeId, u32, "gnb"
);
id_type!(UeId, u32, "ue");
id_type!(
    /// Radio bearer identity, unique within a UE.
    BearerId, u32, "rb"
);
id_type!(
    /// Component carrier index.
    CarrierId, u8, "cc"
);
