//! Link budget, SINR and the threshold link-level model.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::association::{TIER1_CARRIER, TIER1_CA_CARRIER};
use super::propagation::{db_to_linear, linear_to_db};
use super::{RadioError, Tier};
use crate::{CarrierId, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FadingModel {
    None,
    /// Rayleigh block fading, redrawn for every TTI of every link.
    RayleighBlock,
}

impl FadingModel {
    pub fn label(self) -> &'static str {
        match self {
            FadingModel::None => "none",
            FadingModel::RayleighBlock => "rayleigh_block",
        }
    }
}

impl std::str::FromStr for FadingModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(FadingModel::None),
            "rayleigh_block" | "rayleigh" => Ok(FadingModel::RayleighBlock),
            other => Err(format!("unknown fading model '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkModelConfig {
    pub carrier_ghz: f64,
    pub tx_power_dl_tier1_dbm: f64,
    pub tx_power_dl_tier2_dbm: f64,
    pub tx_power_ul_dbm: f64,
    pub shadow_std_tier1_db: f64,
    pub shadow_std_tier2_db: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    /// Tier-1 carrier bandwidth; sets thermal noise and packet capacity.
    pub bandwidth_mhz: f64,
    /// Tier-2 carrier bandwidth; `None` uses `bandwidth_mhz`.
    pub tier2_bandwidth_mhz: Option<f64>,
    /// Bandwidth of the second Tier-1 component carrier; `None` uses
    /// `bandwidth_mhz`.
    pub ca_bandwidth_mhz: Option<f64>,
    /// Share of each carrier's bandwidth available to the uplink.
    pub uplink_bandwidth_share: f64,
    /// Spectrum one 100-byte packet occupies in a TTI.
    pub packet_bandwidth_khz: f64,
    pub beta_db: f64,
    /// Uplink threshold override.
    pub beta_ul_db: Option<f64>,
    pub fading: FadingModel,
    /// Complex-amplitude correlation of the fading seen on two component
    /// carriers of the same link in the same TTI.
    pub ca_fading_correlation: f64,
    /// Tier-2 nodes share the Tier-1 carrier instead of a dedicated one.
    pub tier2_cochannel: bool,
    /// Geometry floor applied before evaluating path loss.
    pub min_distance_m: f64,
}

impl Default for LinkModelConfig {
    fn default() -> Self {
        LinkModelConfig {
            carrier_ghz: 5.2,
            tx_power_dl_tier1_dbm: 30.0,
            tx_power_dl_tier2_dbm: 23.0,
            tx_power_ul_dbm: 18.0,
            shadow_std_tier1_db: 8.0,
            shadow_std_tier2_db: 10.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 5.0,
            bandwidth_mhz: 11.7,
            tier2_bandwidth_mhz: Some(4.3),
            ca_bandwidth_mhz: Some(9.0),
            uplink_bandwidth_share: 0.75,
            packet_bandwidth_khz: 180.0,
            beta_db: 10.0,
            beta_ul_db: None,
            fading: FadingModel::RayleighBlock,
            ca_fading_correlation: 0.0,
            tier2_cochannel: false,
            min_distance_m: 1.0,
        }
    }
}

impl LinkModelConfig {
    pub fn carrier_hz(&self) -> f64 {
        self.carrier_ghz * 1e9
    }

    pub fn bandwidth_mhz_for(&self, tier: Tier) -> f64 {
        match tier {
            Tier::One => self.bandwidth_mhz,
            Tier::Two => self.tier2_bandwidth_mhz.unwrap_or(self.bandwidth_mhz),
        }
    }

    pub fn carrier_bandwidth_mhz(&self, carrier: CarrierId) -> f64 {
        match carrier {
            TIER1_CARRIER => self.bandwidth_mhz,
            TIER1_CA_CARRIER => self.ca_bandwidth_mhz.unwrap_or(self.bandwidth_mhz),
            _ => self.bandwidth_mhz_for(Tier::Two),
        }
    }

    /// Bandwidth of `carrier` usable in one direction.
    pub fn link_bandwidth_mhz(&self, carrier: CarrierId, uplink: bool) -> f64 {
        let share = if uplink { self.uplink_bandwidth_share } else { 1.0 };
        self.carrier_bandwidth_mhz(carrier) * share
    }

    pub fn carrier_noise_dbm(&self, carrier: CarrierId, uplink: bool) -> f64 {
        noise_power_dbm(
            self.noise_psd_dbm_hz,
            self.link_bandwidth_mhz(carrier, uplink) * 1e6,
            self.noise_figure_db,
        )
    }

    pub fn carrier_packets_per_tti(&self, carrier: CarrierId, uplink: bool) -> f64 {
        (self.link_bandwidth_mhz(carrier, uplink) * 1e3 / self.packet_bandwidth_khz)
            .floor()
            .max(1.0)
    }

    /// Thermal noise over the carrier: `psd + 10 log10(B) + NF`.
    pub fn noise_dbm(&self, tier: Tier) -> f64 {
        noise_power_dbm(
            self.noise_psd_dbm_hz,
            self.bandwidth_mhz_for(tier) * 1e6,
            self.noise_figure_db,
        )
    }

    /// Packets a carrier of this tier can schedule per TTI.
    pub fn packets_per_tti(&self, tier: Tier) -> f64 {
        (self.bandwidth_mhz_for(tier) * 1e3 / self.packet_bandwidth_khz)
            .floor()
            .max(1.0)
    }

    pub fn dl_power_dbm(&self, tier: Tier) -> f64 {
        match tier {
            Tier::One => self.tx_power_dl_tier1_dbm,
            Tier::Two => self.tx_power_dl_tier2_dbm,
        }
    }

    pub fn shadow_std_db(&self, tier: Tier) -> f64 {
        match tier {
            Tier::One => self.shadow_std_tier1_db,
            Tier::Two => self.shadow_std_tier2_db,
        }
    }

    pub fn beta_for(&self, uplink: bool) -> f64 {
        if uplink {
            self.beta_ul_db.unwrap_or(self.beta_db)
        } else {
            self.beta_db
        }
    }

    pub fn validate(&self) -> Result<(), RadioError> {
        let positive = [
            ("carrier_ghz", self.carrier_ghz),
            ("bandwidth_mhz", self.bandwidth_mhz),
            ("packet_bandwidth_khz", self.packet_bandwidth_khz),
            ("min_distance_m", self.min_distance_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(RadioError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, b) in [
            ("tier2_bandwidth_mhz", self.tier2_bandwidth_mhz),
            ("ca_bandwidth_mhz", self.ca_bandwidth_mhz),
        ] {
            if let Some(b) = b {
                if !(b > 0.0 && b.is_finite()) {
                    return Err(RadioError::Config(format!("{name} must be positive, got {b}")));
                }
            }
        }
        if !(self.uplink_bandwidth_share > 0.0 && self.uplink_bandwidth_share <= 1.0) {
            return Err(RadioError::Config(format!(
                "uplink_bandwidth_share must lie in (0, 1], got {}",
                self.uplink_bandwidth_share
            )));
        }
        if !(0.0..=1.0).contains(&self.ca_fading_correlation) {
            return Err(RadioError::Config(format!(
                "ca_fading_correlation must lie in [0, 1], got {}",
                self.ca_fading_correlation
            )));
        }
        if self.shadow_std_tier1_db < 0.0 || self.shadow_std_tier2_db < 0.0 {
            return Err(RadioError::Config("shadowing std must be non-negative".into()));
        }
        if self.beta_db.is_nan() || self.beta_ul_db.is_some_and(f64::is_nan) {
            return Err(RadioError::Config("beta must be a number".into()));
        }
        Ok(())
    }
}

pub fn noise_power_dbm(psd_dbm_hz: f64, bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    psd_dbm_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

/// One transmitter-receiver link as seen by a single transmission attempt.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub tx_id: NodeOrUe,
    pub rx_id: NodeOrUe,
    pub carrier: CarrierId,
    pub tx_power_dbm: f64,
    pub distance_m: f64,
    pub pathloss_db: f64,
    /// Fixed for a Monte Carlo iteration.
    pub shadow_db: f64,
    /// Redrawn per attempt; 0 dB without fading.
    pub fading_db: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeOrUe {
    Node(NodeId),
    Ue(crate::UeId),
}

impl ChannelRealization {
    /// `tx_power - pathloss - shadow + fading`.
    pub fn received_dbm(&self) -> f64 {
        self.tx_power_dbm - self.pathloss_db - self.shadow_db + self.fading_db
    }

    /// Long-term received power (no fast fading).
    pub fn mean_received_dbm(&self) -> f64 {
        self.tx_power_dbm - self.pathloss_db - self.shadow_db
    }
}

/// SINR of `signal` against `interferers` and the noise of `noise_dbm`.
pub fn sinr_db(
    signal: &ChannelRealization,
    interferers: &[ChannelRealization],
    noise_dbm: f64,
) -> Result<f64, RadioError> {
    let s_dbm = signal.received_dbm();
    if !s_dbm.is_finite() {
        return Err(RadioError::EmptySignal);
    }
    if let Some(bad) = interferers.iter().find(|i| i.carrier != signal.carrier) {
        return Err(RadioError::CarrierMismatch(signal.carrier, bad.carrier));
    }
    let interference: f64 = interferers.iter().map(|i| db_to_linear(i.received_dbm())).sum();
    Ok(s_dbm - linear_to_db(db_to_linear(noise_dbm) + interference))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttemptOutcome {
    Success,
    Failure,
}

/// Success iff the SINR reaches the threshold (boundary inclusive).
pub fn attempt_outcome(sinr_db: f64, beta_db: f64) -> AttemptOutcome {
    if sinr_db >= beta_db {
        AttemptOutcome::Success
    } else {
        AttemptOutcome::Failure
    }
}

/// Unit-power circularly symmetric complex Gaussian amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
}

impl Amplitude {
    pub const UNIT: Amplitude = Amplitude { re: 1.0, im: 0.0 };

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Amplitude {
            re: re * std::f64::consts::FRAC_1_SQRT_2,
            im: im * std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// `sqrt(rho) * common + sqrt(1 - rho) * own`; two carriers mixed from
    /// the same `common` draw have amplitude correlation `rho`.
    pub fn mix(common: Amplitude, own: Amplitude, rho: f64) -> Self {
        let a = rho.sqrt();
        let b = (1.0 - rho).sqrt();
        Amplitude {
            re: a * common.re + b * own.re,
            im: a * common.im + b * own.im,
        }
    }

    pub fn power(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn link(rx_dbm: f64) -> ChannelRealization {
        ChannelRealization {
            tx_id: NodeOrUe::Node(NodeId(0)),
            rx_id: NodeOrUe::Ue(crate::UeId(0)),
            carrier: CarrierId(0),
            tx_power_dbm: rx_dbm,
            distance_m: 10.0,
            pathloss_db: 0.0,
            shadow_db: 0.0,
            fading_db: 0.0,
        }
    }

    #[test]
    fn noise_over_20_mhz_is_minus_95_99() {
        let cfg = LinkModelConfig {
            bandwidth_mhz: 20.0,
            ..LinkModelConfig::default()
        };
        assert!((cfg.noise_dbm(Tier::One) - (-95.99)).abs() < 0.005);
        assert!((cfg.carrier_noise_dbm(CarrierId(0), false) - (-95.99)).abs() < 0.005);
    }

    #[test]
    fn per_carrier_and_uplink_capacity() {
        let cfg = LinkModelConfig {
            bandwidth_mhz: 20.0,
            tier2_bandwidth_mhz: Some(5.0),
            ca_bandwidth_mhz: None,
            uplink_bandwidth_share: 0.5,
            ..LinkModelConfig::default()
        };
        assert_eq!(cfg.carrier_packets_per_tti(CarrierId(0), false), 111.0);
        assert_eq!(cfg.carrier_packets_per_tti(CarrierId(1), false), 111.0);
        assert_eq!(cfg.carrier_packets_per_tti(CarrierId(2), false), 27.0);
        assert_eq!(cfg.carrier_packets_per_tti(CarrierId(0), true), 55.0);
        let d = cfg.carrier_noise_dbm(CarrierId(0), false) - cfg.carrier_noise_dbm(CarrierId(0), true);
        assert!((d - 3.0103).abs() < 1e-3);
        let bad = LinkModelConfig {
            uplink_bandwidth_share: 0.0,
            ..LinkModelConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn doubling_bandwidth_adds_3_01_db() {
        let a = noise_power_dbm(-174.0, 20e6, 5.0);
        let b = noise_power_dbm(-174.0, 40e6, 5.0);
        assert!((b - a - 3.01).abs() <= 0.01);
    }

    #[test]
    fn snr_without_interference() {
        let s = sinr_db(&link(-90.0), &[], -96.0).unwrap();
        assert!((s - 6.0).abs() < 1e-9);
    }

    #[test]
    fn interferer_at_noise_power_costs_3_01_db() {
        let s = sinr_db(&link(-90.0), &[link(-96.0)], -96.0).unwrap();
        assert!((s - (6.0 - 3.0103)).abs() < 1e-3);
    }

    #[test]
    fn sinr_errors() {
        let mut dead = link(-90.0);
        dead.tx_power_dbm = f64::NEG_INFINITY;
        assert_eq!(sinr_db(&dead, &[], -96.0), Err(RadioError::EmptySignal));
        let mut other = link(-100.0);
        other.carrier = CarrierId(1);
        assert!(matches!(
            sinr_db(&link(-90.0), &[other], -96.0),
            Err(RadioError::CarrierMismatch(..))
        ));
    }

    #[test]
    fn threshold_is_inclusive() {
        assert_eq!(attempt_outcome(12.0, 10.0), AttemptOutcome::Success);
        assert_eq!(attempt_outcome(10.0, 10.0), AttemptOutcome::Success);
        assert_eq!(attempt_outcome(9.99, 10.0), AttemptOutcome::Failure);
        assert_eq!(attempt_outcome(-500.0, f64::NEG_INFINITY), AttemptOutcome::Success);
        assert_eq!(attempt_outcome(500.0, f64::INFINITY), AttemptOutcome::Failure);
    }

    /// Lowering beta from 10 to 4 dB only ever adds successes.
    #[test]
    fn lower_beta_enlarges_success_set() {
        let mut rng = rand_pcg::Pcg64Mcg::seed_from_u64(3);
        let mut strictly_more = false;
        for _ in 0..10_000 {
            let s: f64 = rng.sample::<f64, _>(StandardNormal) * 10.0 + 7.0;
            let hi = attempt_outcome(s, 10.0);
            let lo = attempt_outcome(s, 4.0);
            if hi == AttemptOutcome::Success {
                assert_eq!(lo, AttemptOutcome::Success);
            } else if lo == AttemptOutcome::Success {
                strictly_more = true;
            }
        }
        assert!(strictly_more);
    }

    #[test]
    fn mixed_amplitudes_have_requested_correlation() {
        let mut rng = rand_pcg::Pcg64Mcg::seed_from_u64(11);
        let rho = 0.6;
        let n = 200_000;
        let (mut cross, mut pa, mut pb) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let c = Amplitude::sample(&mut rng);
            let a = Amplitude::mix(c, Amplitude::sample(&mut rng), rho);
            let b = Amplitude::mix(c, Amplitude::sample(&mut rng), rho);
            cross += a.re * b.re + a.im * b.im;
            pa += a.power();
            pb += b.power();
        }
        let n = n as f64;
        assert!((pa / n - 1.0).abs() < 0.02 && (pb / n - 1.0).abs() < 0.02);
        assert!((cross / n - rho).abs() < 0.02);
    }

    #[test]
    fn validate_rejects_bad_knobs() {
        let mut cfg = LinkModelConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.ca_fading_correlation = 1.5;
        assert!(cfg.validate().is_err());
        cfg = LinkModelConfig {
            bandwidth_mhz: 0.0,
            ..LinkModelConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
