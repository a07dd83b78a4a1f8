//! CSV, JSON and topology files of finished campaigns. Every float is
//! written with six decimals so repeated runs diff cleanly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::cdf::{compute_cdf, quantiles};
use super::kv::to_kv;
use super::MetricsError;
use crate::control::SignalingOverhead;
use crate::sim::{CampaignResult, RunConfig, World};

/// Float serialized with exactly six decimals; non-finite values become null.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.6}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quantiles {
    pub p50: Fixed,
    pub p80: Fixed,
    pub p95: Fixed,
    pub mean: Fixed,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        let [p50, p80, p95] = quantiles(values).ok()?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Some(Quantiles {
            p50: Fixed(p50),
            p80: Fixed(p80),
            p95: Fixed(p95),
            mean: Fixed(mean),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub scenario: String,
    pub direction: String,
    pub beta_db: Fixed,
    pub iterations: usize,
    pub pdr: Option<Quantiles>,
    pub ue_pdr: Option<Quantiles>,
    pub efficiency: Option<Quantiles>,
    pub pooled_efficiency: Option<Fixed>,
    pub mean_latency_ms: Option<Quantiles>,
    pub generated: u64,
    pub delivered_within: u64,
    pub delivered_late: u64,
    pub lost: u64,
    pub redundant_retx: u64,
    pub avoided_retx: u64,
    pub signaling_bytes: SignalingOverhead,
}

#[derive(Serialize)]
struct Summary<'a> {
    master_seed: u64,
    config: serde_json::Map<String, serde_json::Value>,
    campaigns: &'a [CampaignSummary],
}

fn write_file(path: &Path, contents: &str) -> Result<(), MetricsError> {
    fs::write(path, contents).map_err(|e| MetricsError::io(path, e))
}

fn write_cdf(path: &Path, values: &[f64]) -> Result<(), MetricsError> {
    let mut s = String::from("value,cum_prob\n");
    for p in compute_cdf(values)? {
        let _ = writeln!(s, "{:.6},{:.6}", p.value, p.cum_prob);
    }
    write_file(path, &s)
}

pub fn cdf_file_name(metric: &str, cfg: &RunConfig) -> String {
    format!("cdf_{metric}_{}_{}.csv", cfg.scenario.label(), cfg.direction.label())
}

/// Writes the CDF files and the iteration-0 topology of one campaign into
/// `dir` and returns its summary.
pub fn write_campaign(c: &CampaignResult, dir: &Path) -> Result<CampaignSummary, MetricsError> {
    let cfg = &c.config;
    let pdr = c.network_pdrs();
    let ue_pdr = c.per_ue_pdrs();
    let eff: Vec<f64> = c.iterations.iter().filter_map(|r| r.duplication_efficiency).collect();
    let lat: Vec<f64> = c.iterations.iter().filter_map(|r| r.mean_latency_ms).collect();
    for (metric, values) in [
        ("pdr", &pdr),
        ("ue_pdr", &ue_pdr),
        ("efficiency", &eff),
        ("latency", &lat),
    ] {
        if !values.is_empty() {
            write_cdf(&dir.join(cdf_file_name(metric, cfg)), values)?;
        }
    }
    let world = World::build(cfg, 0)?;
    let topo = world.topology.dump(Some(&world.associations));
    let topo_path = dir.join(format!(
        "topology_{}_{}_iter0.txt",
        cfg.scenario.label(),
        cfg.direction.label()
    ));
    write_file(&topo_path, &topo)?;
    let sum = |f: fn(&crate::sim::IterationResult) -> u64| c.iterations.iter().map(f).sum::<u64>();
    let mut signaling = SignalingOverhead::default();
    for r in &c.iterations {
        signaling.merge(&r.signaling);
    }
    Ok(CampaignSummary {
        scenario: cfg.scenario.label().to_string(),
        direction: cfg.direction.label().to_string(),
        beta_db: Fixed(cfg.beta_db),
        iterations: c.iterations.len(),
        pdr: Quantiles::of(&pdr),
        ue_pdr: Quantiles::of(&ue_pdr),
        efficiency: Quantiles::of(&eff),
        pooled_efficiency: c.duplication_efficiency().map(Fixed),
        mean_latency_ms: Quantiles::of(&lat),
        generated: sum(|r| r.generated),
        delivered_within: sum(|r| r.delivered_within),
        delivered_late: sum(|r| r.delivered_late),
        lost: sum(|r| r.lost),
        redundant_retx: sum(|r| r.redundant_retx),
        avoided_retx: sum(|r| r.avoided_retx),
        signaling_bytes: signaling,
    })
}

pub fn write_summary(dir: &Path, base: &RunConfig, campaigns: &[CampaignSummary]) -> Result<PathBuf, MetricsError> {
    let summary = Summary {
        master_seed: base.master_seed,
        config: to_kv(base)
            .into_iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
            .collect(),
        campaigns,
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| MetricsError::Config(e.to_string()))?;
    text.push('\n');
    let path = dir.join("summary.json");
    write_file(&path, &text)?;
    Ok(path)
}

/// Creates `dir` and writes every campaign plus `summary.json`, with the
/// first campaign's configuration as the echoed config.
pub fn write_outputs(campaigns: &[CampaignResult], dir: &Path) -> Result<Vec<CampaignSummary>, MetricsError> {
    fs::create_dir_all(dir).map_err(|e| MetricsError::io(dir, e))?;
    let summaries = campaigns
        .iter()
        .map(|c| write_campaign(c, dir))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(first) = campaigns.first() {
        write_summary(dir, &first.config, &summaries)?;
    }
    Ok(summaries)
}
