//! The reference preset: PDR campaigns for every scenario in both directions
//! at β = 10 dB with two small cells per macro cell, plus the duplication
//! efficiency of the dual-connectivity scenario at β = 4 dB.

use std::fmt::Write as _;
use std::path::Path;

use super::output::{write_outputs, CampaignSummary};
use super::MetricsError;
use crate::radio::{Direction, Scenario};
use crate::sim::{run_campaign, CampaignResult, RunConfig};

pub const FIG4_BETA_DB: f64 = 10.0;
pub const FIG4_LOW_BETA_DB: f64 = 4.0;
pub const FIG4_NSC: usize = 2;
/// Scenario of the efficiency panel.
pub const EFFICIENCY_SCENARIO: Scenario = Scenario::S3;
pub const EFFICIENCY_DIR: &str = "efficiency_beta_4db";

pub struct Fig4 {
    /// Downlink S1, S1_CA, S2, S3, then the same in uplink.
    pub pdr: Vec<CampaignResult>,
    /// The efficiency scenario at the low β, downlink then uplink.
    pub low_beta: Vec<CampaignResult>,
}

impl Fig4 {
    pub fn find(&self, scenario: Scenario, direction: Direction) -> Option<&CampaignResult> {
        self.pdr
            .iter()
            .find(|c| c.config.scenario == scenario && c.config.direction == direction)
    }

    pub fn find_low_beta(&self, direction: Direction) -> Option<&CampaignResult> {
        self.low_beta.iter().find(|c| c.config.direction == direction)
    }
}

/// Configurations of the preset; `base` supplies seed, iteration count and
/// model knobs.
pub fn fig4_campaigns(base: &RunConfig) -> (Vec<RunConfig>, Vec<RunConfig>) {
    let at = |scenario, direction, beta_db| RunConfig {
        scenario,
        direction,
        beta_db,
        n_sc: FIG4_NSC,
        ..base.clone()
    };
    let dirs = [Direction::Downlink, Direction::Uplink];
    let pdr = dirs
        .iter()
        .flat_map(|&d| Scenario::ALL.map(|s| at(s, d, FIG4_BETA_DB)))
        .collect();
    let low = dirs
        .iter()
        .map(|&d| at(EFFICIENCY_SCENARIO, d, FIG4_LOW_BETA_DB))
        .collect();
    (pdr, low)
}

pub fn run_fig4(base: &RunConfig) -> Result<Fig4, MetricsError> {
    let (pdr, low) = fig4_campaigns(base);
    let run = |v: Vec<RunConfig>| v.iter().map(run_campaign).collect::<Result<Vec<_>, _>>();
    Ok(Fig4 {
        pdr: run(pdr)?,
        low_beta: run(low)?,
    })
}

/// Writes the PDR campaigns into `dir`, the low-β campaigns into a
/// subdirectory, and `efficiency_sweep.csv` comparing both β values.
pub fn write_fig4(fig: &Fig4, dir: &Path) -> Result<(), MetricsError> {
    let main = write_outputs(&fig.pdr, dir)?;
    let low = write_outputs(&fig.low_beta, &dir.join(EFFICIENCY_DIR))?;
    let pick = |v: &[CampaignSummary], d: &str| {
        v.iter()
            .find(|s| s.scenario == EFFICIENCY_SCENARIO.label() && s.direction == d)
            .cloned()
    };
    let mut csv = String::from("scenario,direction,beta_db,p50,p80,p95,pooled\n");
    for d in [Direction::Downlink, Direction::Uplink] {
        for s in [pick(&main, d.label()), pick(&low, d.label())].into_iter().flatten() {
            let q = s.efficiency.as_ref();
            let f = |x: Option<f64>| x.map_or_else(String::new, |x| format!("{x:.6}"));
            let _ = writeln!(
                csv,
                "{},{},{:.6},{},{},{},{}",
                s.scenario,
                s.direction,
                s.beta_db.0,
                f(q.map(|q| q.p50.0)),
                f(q.map(|q| q.p80.0)),
                f(q.map(|q| q.p95.0)),
                f(s.pooled_efficiency.map(|p| p.0)),
            );
        }
    }
    let path = dir.join("efficiency_sweep.csv");
    std::fs::write(&path, csv).map_err(|e| MetricsError::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_layout() {
        let base = RunConfig {
            beta_db: 1.0,
            n_sc: 5,
            master_seed: 7,
            ..RunConfig::default()
        };
        let (pdr, low) = fig4_campaigns(&base);
        assert_eq!(pdr.len(), 8);
        assert_eq!(low.len(), 2);
        assert!(pdr
            .iter()
            .all(|c| c.beta_db == 10.0 && c.n_sc == 2 && c.master_seed == 7));
        assert!(low.iter().all(|c| c.beta_db == 4.0 && c.scenario == Scenario::S3));
        assert_eq!(pdr[..4].iter().map(|c| c.scenario).collect::<Vec<_>>(), Scenario::ALL);
        assert!(pdr[4..].iter().all(|c| c.direction == Direction::Uplink));
    }
}
