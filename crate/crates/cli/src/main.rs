//! Command-line front end for the torus rotation-set toolkit.
//!
//! Exit codes: 0 success (including indeterminate-with-warning), 2
//! configuration error, 3 theorem-violation flag, 4 runtime evaluation
//! fault.

mod artifacts;
mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use commands::{ensure_out_dir, Invocation, EXIT_CONFIG};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rotor",
    about = "Rotation sets of torus maps: estimation, measure rotation vectors, deviation probes, lattice staircases, periodic orbits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the run configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Output directory (overrides run.output_dir).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads (0 = logical cores; overrides run.threads).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// RNG seed (overrides run.seed).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Refine the hull by directional support estimates.
    #[arg(long)]
    refine: bool,

    /// Record wall-clock timings in JSON artifacts (off by default so
    /// artifacts are byte-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the rotation set and emit hull artifacts.
    Rotset(CommonArgs),
    /// Area check, ρ(Leb), hull estimate, and the interior verdict.
    Boyland(CommonArgs),
    /// Probe directional deviation growth against the hull estimate.
    Deviate(CommonArgs),
    /// Build the greedy lattice staircase for a direction.
    Staircase {
        #[command(flatten)]
        common: CommonArgs,
        /// Exact rational direction "a/b" (overrides the config).
        #[arg(long, value_name = "A/B")]
        dir: Option<String>,
    },
    /// Newton search for periodic orbits realizing (p/q, s/q).
    Periodic(CommonArgs),
    /// Rotation vector of the area measure.
    Leb(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Rotset(c)
            | Command::Boyland(c)
            | Command::Deviate(c)
            | Command::Periodic(c)
            | Command::Leb(c) => c,
            Command::Staircase { common, .. } => common,
        }
    }
}

fn build_invocation(common: &CommonArgs) -> Result<Invocation, i32> {
    let mut config = match RunConfig::load(&common.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return Err(EXIT_CONFIG);
        }
    };
    if let Some(seed) = common.seed {
        config.run.seed = seed;
    }
    let threads = common.threads.unwrap_or(config.run.threads);
    if threads > 0 {
        // ignore the error if a pool already exists (tests re-enter main)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let out_dir = common
        .out
        .clone()
        .unwrap_or_else(|| config.run.output_dir.clone());
    if let Err(e) = ensure_out_dir(&out_dir) {
        eprintln!(
            "config error: cannot create output directory {}: {e}",
            out_dir.display()
        );
        return Err(EXIT_CONFIG);
    }
    Ok(Invocation {
        config,
        out_dir,
        refine: common.refine,
        timings: common.timings,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let inv = match build_invocation(cli.command.common()) {
        Ok(inv) => inv,
        Err(code) => return ExitCode::from(code as u8),
    };
    let code = match &cli.command {
        Command::Rotset(_) => commands::rotset::run(&inv),
        Command::Boyland(_) => commands::boyland::run(&inv),
        Command::Deviate(_) => commands::deviate::run(&inv),
        Command::Staircase { dir, .. } => commands::staircase::run(&inv, dir.as_deref()),
        Command::Periodic(_) => commands::periodic::run(&inv),
        Command::Leb(_) => commands::leb::run(&inv),
    };
    ExitCode::from(code as u8)
}
