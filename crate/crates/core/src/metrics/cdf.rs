//! Empirical CDFs and quantile read-off.

use serde::{Deserialize, Serialize};

use super::MetricsError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub value: f64,
    /// rank / n, in (0, 1].
    pub cum_prob: f64,
}

/// Empirical CDF with ties collapsed onto their highest rank.
pub fn compute_cdf(values: &[f64]) -> Result<Vec<CdfPoint>, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if let Some(v) = values.iter().find(|v| v.is_nan()) {
        return Err(MetricsError::NotANumber(*v));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<CdfPoint> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.value == v => last.cum_prob = p,
            _ => out.push(CdfPoint { value: v, cum_prob: p }),
        }
    }
    Ok(out)
}

/// Smallest value whose cumulative probability reaches `q`.
pub fn quantile(cdf: &[CdfPoint], q: f64) -> Option<f64> {
    // tolerate rank/n rounding, e.g. 80/100 against 0.8
    cdf.iter().find(|p| p.cum_prob >= q - 1e-12).map(|p| p.value)
}

/// p50, p80 and p95 of `values`.
pub fn quantiles(values: &[f64]) -> Result<[f64; 3], MetricsError> {
    let cdf = compute_cdf(values)?;
    Ok([0.5, 0.8, 0.95].map(|q| quantile(&cdf, q).expect("cdf reaches 1")))
}
