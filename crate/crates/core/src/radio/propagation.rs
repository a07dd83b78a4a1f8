//! Indoor industrial path loss and dB helpers.

use super::RadioError;

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;
pub const DEFAULT_CARRIER_HZ: f64 = 5.2e9;

/// Breakpoint between the free-space and the industrial log-distance branch.
pub const BREAKPOINT_M: f64 = 15.0;
const INDUSTRIAL_INTERCEPT_DB: f64 = 70.28;
const INDUSTRIAL_SLOPE_DB: f64 = 25.9;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Friis free-space loss `20 log10(4 pi d / lambda)`.
pub fn free_space_db(d_m: f64, carrier_hz: f64) -> Result<f64, RadioError> {
    if d_m.is_nan() || d_m <= 0.0 {
        return Err(RadioError::Distance(d_m));
    }
    let wavelength = SPEED_OF_LIGHT_M_S / carrier_hz;
    Ok(20.0 * (4.0 * std::f64::consts::PI * d_m / wavelength).log10())
}

/// Log-distance branch, anchored at 70.28 dB at the breakpoint.
pub fn industrial_db(d_m: f64) -> Result<f64, RadioError> {
    if d_m.is_nan() || d_m <= 0.0 {
        return Err(RadioError::Distance(d_m));
    }
    Ok(INDUSTRIAL_INTERCEPT_DB + INDUSTRIAL_SLOPE_DB * (d_m / BREAKPOINT_M).log10())
}

/// Path loss at 5.2 GHz: industrial model beyond 15 m, free space otherwise.
pub fn pathloss_db(d_m: f64) -> Result<f64, RadioError> {
    pathloss_db_at(d_m, DEFAULT_CARRIER_HZ)
}

pub fn pathloss_db_at(d_m: f64, carrier_hz: f64) -> Result<f64, RadioError> {
    if d_m > BREAKPOINT_M {
        industrial_db(d_m)
    } else {
        free_space_db(d_m, carrier_hz)
    }
}
