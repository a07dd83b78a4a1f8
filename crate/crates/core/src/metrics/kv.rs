//! Flat `key = value` run configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are the long
//! CLI flag names with `_` for `-` plus the model knobs listed in
//! [`KEYS`]. Later lines override earlier ones.

use std::path::Path;

use crate::control::{ControlMode, TriggerCriteria, TriggerSide};
use crate::radio::FadingModel;
use crate::sim::{DynamicDuplication, RunConfig};
use crate::SimTime;

use super::MetricsError;

pub const KEYS: &[&str] = &[
    "scenario",
    "direction",
    "beta_db",
    "beta_ul_db",
    "nsc",
    "iterations",
    "packets",
    "xn_latency_ms",
    "latency_budget_ms",
    "seed",
    "cross_leg_discard",
    "split_threshold_bytes",
    "sn_bits",
    "max_retx",
    "retx_delay_ms",
    "pdus_per_tti",
    "bandwidth_mhz",
    "tier2_bandwidth_mhz",
    "ca_bandwidth_mhz",
    "uplink_bandwidth_share",
    "ca_fading_correlation",
    "fading",
    "tier2_cochannel",
    "n_tier1",
    "ues_per_tier1",
    "tier1_radius_m",
    "tier2_radius_m",
    "dynamic",
    "trigger_activate_below_dbm",
    "trigger_deactivate_above_dbm",
    "control_mode",
    "trigger_side",
];

/// Dynamic-duplication preset used when a trigger key is given without
/// `dynamic = on`.
pub fn default_dynamic() -> DynamicDuplication {
    DynamicDuplication {
        criteria: TriggerCriteria {
            activate_below_dbm: -65.0,
            deactivate_above_dbm: -55.0,
        },
        mode: ControlMode::MacCe,
        side: TriggerSide::Network,
    }
}

/// Splits a file into (line number, key, value) entries.
pub fn parse_kv(text: &str) -> Result<Vec<(usize, String, String)>, MetricsError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(MetricsError::Config(format!(
                "line {}: expected key = value, got '{line}'",
                i + 1
            )));
        };
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, MetricsError> {
    v.parse()
        .map_err(|_| MetricsError::Config(format!("invalid value '{v}' for {key}")))
}

fn flag(key: &str, v: &str) -> Result<bool, MetricsError> {
    match v {
        "1" | "true" | "on" | "yes" => Ok(true),
        "0" | "false" | "off" | "no" => Ok(false),
        _ => Err(MetricsError::Config(format!(
            "invalid value '{v}' for {key} (expected on/off)"
        ))),
    }
}

fn parsed<T>(r: Result<T, String>) -> Result<T, MetricsError> {
    r.map_err(MetricsError::Config)
}

fn optional(key: &str, v: &str) -> Result<Option<f64>, MetricsError> {
    if v == "none" {
        Ok(None)
    } else {
        num(key, v).map(Some)
    }
}

/// Sets one key on `cfg`. Values are not range-checked here; that is
/// [`RunConfig::validate`]'s job.
pub fn apply_kv(cfg: &mut RunConfig, key: &str, v: &str) -> Result<(), MetricsError> {
    match key {
        "scenario" => cfg.scenario = parsed(v.parse())?,
        "direction" => cfg.direction = parsed(v.parse())?,
        "beta_db" => cfg.beta_db = num(key, v)?,
        "beta_ul_db" => cfg.link.beta_ul_db = optional(key, v)?,
        "nsc" => cfg.n_sc = num(key, v)?,
        "iterations" => cfg.iterations = num(key, v)?,
        "packets" => cfg.packets_per_user = num(key, v)?,
        "xn_latency_ms" => cfg.xn_latency_ms = num(key, v)?,
        "latency_budget_ms" => cfg.latency_budget_ms = num(key, v)?,
        "seed" => cfg.master_seed = num(key, v)?,
        "cross_leg_discard" => cfg.cross_leg_discard = flag(key, v)?,
        "split_threshold_bytes" => cfg.split_threshold_bytes = num(key, v)?,
        "sn_bits" => cfg.sn_bits = num(key, v)?,
        "max_retx" => cfg.rlc.max_retx = num(key, v)?,
        "retx_delay_ms" => cfg.rlc.retx_delay = SimTime::from_ms_f64(num(key, v)?),
        "pdus_per_tti" => cfg.rlc.pdus_per_tti = num(key, v)?,
        "bandwidth_mhz" => cfg.link.bandwidth_mhz = num(key, v)?,
        "tier2_bandwidth_mhz" => cfg.link.tier2_bandwidth_mhz = optional(key, v)?,
        "ca_bandwidth_mhz" => cfg.link.ca_bandwidth_mhz = optional(key, v)?,
        "uplink_bandwidth_share" => cfg.link.uplink_bandwidth_share = num(key, v)?,
        "ca_fading_correlation" => cfg.link.ca_fading_correlation = num(key, v)?,
        "fading" => cfg.link.fading = parsed(v.parse::<FadingModel>())?,
        "tier2_cochannel" => cfg.link.tier2_cochannel = flag(key, v)?,
        "n_tier1" => cfg.topology.n_tier1 = num(key, v)?,
        "ues_per_tier1" => cfg.topology.ues_per_tier1 = num(key, v)?,
        "tier1_radius_m" => cfg.topology.tier1_cell_radius_m = num(key, v)?,
        "tier2_radius_m" => cfg.topology.tier2_cell_radius_m = num(key, v)?,
        "dynamic" => cfg.dynamic = flag(key, v)?.then(|| cfg.dynamic.unwrap_or_else(default_dynamic)),
        "trigger_activate_below_dbm" => {
            cfg.dynamic
                .get_or_insert_with(default_dynamic)
                .criteria
                .activate_below_dbm = num(key, v)?
        }
        "trigger_deactivate_above_dbm" => {
            cfg.dynamic
                .get_or_insert_with(default_dynamic)
                .criteria
                .deactivate_above_dbm = num(key, v)?
        }
        "control_mode" => cfg.dynamic.get_or_insert_with(default_dynamic).mode = parsed(v.parse())?,
        "trigger_side" => {
            cfg.dynamic.get_or_insert_with(default_dynamic).side = match v {
                "network" => TriggerSide::Network,
                "ue" => TriggerSide::Ue,
                _ => {
                    return Err(MetricsError::Config(format!(
                        "invalid value '{v}' for {key} (network|ue)"
                    )))
                }
            }
        }
        _ => return Err(MetricsError::Config(format!("unknown key '{key}'"))),
    }
    Ok(())
}

pub fn apply_text(cfg: &mut RunConfig, text: &str) -> Result<(), MetricsError> {
    for (line, k, v) in parse_kv(text)? {
        apply_kv(cfg, &k, &v).map_err(|e| match e {
            MetricsError::Config(m) => MetricsError::Config(format!("line {line}: {m}")),
            other => other,
        })?;
    }
    Ok(())
}

/// Reads `path` on top of `cfg`.
pub fn load_into(cfg: &mut RunConfig, path: &Path) -> Result<(), MetricsError> {
    let text = std::fs::read_to_string(path).map_err(|e| MetricsError::io(path, e))?;
    apply_text(cfg, &text).map_err(|e| match e {
        MetricsError::Config(m) => MetricsError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn opt6(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), f6)
}

/// The configuration as `key = value` pairs that [`apply_kv`] reads back.
pub fn to_kv(cfg: &RunConfig) -> Vec<(&'static str, String)> {
    let mut v = vec![
        ("scenario", cfg.scenario.label().to_string()),
        ("direction", cfg.direction.label().to_string()),
        ("beta_db", f6(cfg.beta_db)),
        ("beta_ul_db", opt6(cfg.link.beta_ul_db)),
        ("nsc", cfg.n_sc.to_string()),
        ("iterations", cfg.iterations.to_string()),
        ("packets", cfg.packets_per_user.to_string()),
        ("xn_latency_ms", f6(cfg.xn_latency_ms)),
        ("latency_budget_ms", f6(cfg.latency_budget_ms)),
        ("seed", cfg.master_seed.to_string()),
        ("cross_leg_discard", cfg.cross_leg_discard.to_string()),
        ("split_threshold_bytes", cfg.split_threshold_bytes.to_string()),
        ("sn_bits", cfg.sn_bits.to_string()),
        ("max_retx", cfg.rlc.max_retx.to_string()),
        ("retx_delay_ms", f6(cfg.rlc.retx_delay.as_ms_f64())),
        ("pdus_per_tti", cfg.rlc.pdus_per_tti.to_string()),
        ("bandwidth_mhz", f6(cfg.link.bandwidth_mhz)),
        ("tier2_bandwidth_mhz", opt6(cfg.link.tier2_bandwidth_mhz)),
        ("ca_bandwidth_mhz", opt6(cfg.link.ca_bandwidth_mhz)),
        ("uplink_bandwidth_share", f6(cfg.link.uplink_bandwidth_share)),
        ("ca_fading_correlation", f6(cfg.link.ca_fading_correlation)),
        ("fading", cfg.link.fading.label().to_string()),
        ("tier2_cochannel", cfg.link.tier2_cochannel.to_string()),
        ("n_tier1", cfg.topology.n_tier1.to_string()),
        ("ues_per_tier1", cfg.topology.ues_per_tier1.to_string()),
        ("tier1_radius_m", f6(cfg.topology.tier1_cell_radius_m)),
        ("tier2_radius_m", f6(cfg.topology.tier2_cell_radius_m)),
        ("dynamic", cfg.dynamic.is_some().to_string()),
    ];
    if let Some(d) = cfg.dynamic {
        v.push(("trigger_activate_below_dbm", f6(d.criteria.activate_below_dbm)));
        v.push(("trigger_deactivate_above_dbm", f6(d.criteria.deactivate_above_dbm)));
        v.push(("control_mode", d.mode.label().to_string()));
        v.push((
            "trigger_side",
            match d.side {
                TriggerSide::Network => "network",
                TriggerSide::Ue => "ue",
            }
            .to_string(),
        ));
    }
    v
}
