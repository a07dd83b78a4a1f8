use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dupsim::control::{run_handover, HandoverConfig, HandoverContext};
use dupsim::metrics::kv::load_into;
use dupsim::metrics::output::Quantiles;
use dupsim::metrics::preset::write_fig4;
use dupsim::metrics::{run_fig4, write_outputs, MetricsError};
use dupsim::radio::{Direction, Scenario};
use dupsim::sim::{run_campaign, CampaignResult, RunConfig};
use dupsim::{NodeId, UeId};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Target {
    Campaign(Scenario),
    HandoverDemo,
}

fn parse_target(s: &str) -> Result<Target, String> {
    if s == "handover-demo" {
        return Ok(Target::HandoverDemo);
    }
    s.parse().map(Target::Campaign)
}

/// Monte Carlo simulator of PDCP packet duplication over carrier
/// aggregation and dual connectivity.
#[derive(Parser, Debug)]
#[command(name = "dupsim", version)]
struct Cli {
    /// S1, S1_CA, S2, S3, or handover-demo to print the handover message trace
    #[arg(long, value_parser = parse_target)]
    scenario: Option<Target>,
    /// dl or ul
    #[arg(long, value_parser = |s: &str| s.parse::<Direction>())]
    direction: Option<Direction>,
    /// SINR threshold of a successful attempt (dB)
    #[arg(long, allow_negative_numbers = true)]
    beta_db: Option<f64>,
    /// Tier-2 gNBs per Tier-1 gNB
    #[arg(long)]
    nsc: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Packets generated per UE and iteration
    #[arg(long)]
    packets: Option<usize>,
    #[arg(long)]
    xn_latency_ms: Option<f64>,
    #[arg(long)]
    latency_budget_ms: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cancel pending retransmissions once the other leg has delivered
    #[arg(long)]
    cross_leg_discard: bool,
    /// key = value configuration file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for CDF files, summary.json and topology dumps
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the reference preset: every scenario in both directions and the
    /// β = 4 dB efficiency sweep
    #[arg(long)]
    paper_fig4: bool,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Run(e.to_string())
        }
    }
}

impl Cli {
    /// Defaults, then the config file, then flags.
    fn run_config(&self) -> Result<RunConfig, Failure> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            load_into(&mut cfg, path).map_err(|e| Failure::Config(e.to_string()))?;
        }
        if let Some(Target::Campaign(s)) = self.scenario {
            cfg.scenario = s;
        }
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$($field).+ = v; })*
            };
        }
        set! {
            direction => direction,
            beta_db => beta_db,
            nsc => n_sc,
            iterations => iterations,
            packets => packets_per_user,
            xn_latency_ms => xn_latency_ms,
            latency_budget_ms => latency_budget_ms,
            seed => master_seed,
        }
        if self.cross_leg_discard {
            cfg.cross_leg_discard = true;
        }
        Ok(cfg)
    }
}

fn fmt_q(q: &Option<Quantiles>) -> String {
    q.as_ref().map_or_else(
        || "-".to_string(),
        |q| format!("p50 {:.4} p80 {:.4} p95 {:.4}", q.p50.0, q.p80.0, q.p95.0),
    )
}

fn report(c: &CampaignResult) {
    let cfg = &c.config;
    let pdr = Quantiles::of(&c.network_pdrs());
    let eff: Vec<f64> = c.iterations.iter().filter_map(|r| r.duplication_efficiency).collect();
    println!(
        "{:<5} {:<8} beta {:>5.1} dB | PDR {} | efficiency {}",
        cfg.scenario.label(),
        cfg.direction.label(),
        cfg.beta_db,
        fmt_q(&pdr),
        fmt_q(&Quantiles::of(&eff)),
    );
}

fn handover_demo(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    let ho = HandoverConfig {
        direction: cfg.direction,
        xn_latency: cfg.xn_latency(),
        ..HandoverConfig::default()
    };
    let ctx = HandoverContext::new(UeId(0), NodeId(0), NodeId(1), cfg.direction);
    let out = run_handover(ctx, &ho).map_err(|e| Failure::Config(e.to_string()))?;
    let text = out.trace_text();
    print!("{text}");
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Run(format!("{}: {e}", dir.display())))?;
        let path = dir.join("handover_trace.txt");
        std::fs::write(&path, &text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = cli.run_config()?;
    if cli.scenario == Some(Target::HandoverDemo) {
        return handover_demo(cli, &cfg);
    }
    if cli.paper_fig4 {
        cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
        let fig = run_fig4(&cfg)?;
        fig.pdr.iter().chain(&fig.low_beta).for_each(report);
        if let Some(dir) = &cli.out {
            write_fig4(&fig, dir)?;
        }
        return Ok(());
    }
    let campaign = run_campaign(&cfg).map_err(MetricsError::from)?;
    report(&campaign);
    if let Some(dir) = &cli.out {
        write_outputs(std::slice::from_ref(&campaign), dir)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("dupsim: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("dupsim: {m}");
            ExitCode::FAILURE
        }
    }
}
