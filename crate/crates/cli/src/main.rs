//! `jcps` — phase-space portraits, correlation series, conditional maps, and
//! collapse/revival runs of the driven Jaynes–Cummings two-photon resonance.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jcps_cli::config::{Overrides, RunConfig};
use jcps_cli::output::Outcome;
use jcps_cli::{commands, verify};

#[derive(Parser)]
#[command(
    name = "jcps",
    version,
    about = "Driven Jaynes–Cummings two-photon resonance: steady and conditional phase-space maps, intensity correlations, and collapse/revival runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by the computing subcommands. Flags override config-file
/// values field by field.
#[derive(Args)]
struct CommonArgs {
    /// Flat key-value config file (TOML syntax)
    #[arg(long, value_name = "path")]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, value_name = "dir")]
    out: Option<PathBuf>,
    /// Upper-level occupation(s) in [0, 1/4), comma separated
    #[arg(long, value_delimiter = ',')]
    p3: Option<Vec<f64>>,
    /// Drive amplitude(s) in units of γ, comma separated (alternative to --p3)
    #[arg(long = "eps-d", value_delimiter = ',')]
    eps_d: Option<Vec<f64>>,
    /// Coupling g in units of γ
    #[arg(long = "g-over-gamma", value_name = "ratio")]
    g_over_gamma: Option<f64>,
    /// Phase-space window as xmin,xmax,ymin,ymax,nx,ny
    #[arg(long, value_name = "spec", allow_hyphen_values = true)]
    grid: Option<String>,
    /// Time list (γτ for dissipative commands, gt for revival), comma separated
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// Fock-space truncation of the full model
    #[arg(long = "nmax", value_name = "n")]
    n_max: Option<usize>,
    /// Seed for randomized cross-check point sets
    #[arg(long, value_name = "seed")]
    seed: Option<u64>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            p3: self.p3.clone(),
            eps_d: self.eps_d.clone(),
            g_over_gamma: self.g_over_gamma,
            grid: self.grid.clone(),
            times: self.times.clone(),
            n_max: self.n_max,
            seed: self.seed,
            out: self.out.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state Wigner maps: closed form and full model side by side
    Steady(CommonArgs),
    /// Intensity correlation g²(τ): beat-on and beat-averaged series with landmarks
    G2(CommonArgs),
    /// Conditional Wigner maps after a forwards photodetection
    Transient(CommonArgs),
    /// Collapse-and-revival photon trace and Q snapshots with an integration cross-check
    Revival(CommonArgs),
    /// Run the acceptance table and exit 0 only if the gate holds
    Verify,
}

fn run(args: &CommonArgs, command: fn(&RunConfig) -> anyhow::Result<Outcome>) -> ExitCode {
    let result = RunConfig::load(args.config.as_deref(), &args.overrides())
        .and_then(|cfg| command(&cfg));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.describe());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Steady(args) => run(&args, commands::steady::run),
        Command::G2(args) => run(&args, commands::g2::run),
        Command::Transient(args) => run(&args, commands::transient::run),
        Command::Revival(args) => run(&args, commands::revival::run),
        Command::Verify => {
            let results = verify::run_all();
            for line in verify::render_lines(&results) {
                println!("{line}");
            }
            let ok = verify::gate_holds(&results);
            println!(
                "gate: {}",
                if ok { "holds (all criteria pass or match their pinned expected failure)" } else { "BROKEN" }
            );
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
