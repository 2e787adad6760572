use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use timecalc_cli::compare::{write_analyze, write_compare, write_simulate};
use timecalc_cli::{parse_scenario, run_analyze, run_compare, run_simulate, Overrides};

/// Analytic delay and backlog bounds checked against simulation.
#[derive(Parser)]
#[command(name = "timecalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute analytic bounds.
    Analyze(Common),
    /// Simulate the scenario and estimate CCDFs.
    Simulate(Common),
    /// Do both and check that every bound dominates its CCDF.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for CSV files and report.txt.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Packets per replication.
    #[arg(long)]
    packets: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    grid_step: Option<f64>,
    /// Confidence level of the DKW bands.
    #[arg(long)]
    alpha: Option<f64>,
    /// Continue when the stability precheck fails.
    #[arg(long)]
    allow_unstable: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            packets: self.packets,
            replications: self.replications,
            grid_step: self.grid_step,
            alpha: self.alpha,
            allow_unstable: self.allow_unstable,
        }
    }
}

/// `Ok(true)` when every dominance check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze(c) => {
            let s = parse_scenario(&c.scenario, &c.overrides())?;
            let b = run_analyze(&s)?;
            write_analyze(&s, &b, &c.out)?;
            println!("{} bounds written to {}", b.rows.len(), c.out.display());
            Ok(true)
        }
        Command::Simulate(c) => {
            let s = parse_scenario(&c.scenario, &c.overrides())?;
            let (_, rows) = run_simulate(&s)?;
            write_simulate(&s, &rows, &c.out)?;
            println!("{} empirical CCDFs written to {}", rows.len(), c.out.display());
            Ok(true)
        }
        Command::Compare(c) => {
            let s = parse_scenario(&c.scenario, &c.overrides())?;
            let report = run_compare(&s)?;
            write_compare(&s, &report, &c.out)?;
            let failed = report.failures().count();
            println!("{} checks, {failed} failed; report in {}", report.rows.len(), c.out.join("report.txt").display());
            Ok(report.all_dominated())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
