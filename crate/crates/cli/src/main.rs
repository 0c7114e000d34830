//! `decopoles`: run pole-catalogue decoherence scenarios from a JSON config
//! and write the results as CSV.
//!
//! ```text
//! decopoles simulate --config model3.json --out runs/model3
//! decopoles omnes    --config omnes.json  --out runs/omnes
//! decopoles extract  --config extract.json --out runs/fit
//! decopoles init     --scenario model3 --config model3.json
//! ```
//!
//! Exit codes: 0 on success, 2 for an invalid config, 3 when a numerical
//! step fails.

mod config;
mod error;
mod io;
mod scenarios;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "decopoles", version, about = "Pole-catalogue decoherence scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Signal, preferred signal and timescales for model1/2/3 or bifriedrich.
    Simulate(RunArgs),
    /// Off-diagonal decay and decoherence-time sweep for a displaced pair.
    Omnes(RunArgs),
    /// Recover a pole catalogue from a `t,re,im` signal.
    Extract(RunArgs),
    /// Write a template configuration.
    Init {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        config: PathBuf,
    },
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let (args, want) = match cli.command {
        Command::Init { scenario, config } => {
            let cfg = config::template(&scenario)
                .ok_or_else(|| CliError::Config(format!("unknown scenario `{scenario}`")))?;
            io::write_json(&config, &cfg)?;
            return Ok(vec![format!("wrote {}", config.display())]);
        }
        Command::Simulate(a) => (a, "simulate"),
        Command::Omnes(a) => (a, "omnes"),
        Command::Extract(a) => (a, "extract"),
    };
    let cfg = config::load(&args.config)?;
    let base = base_dir(&args.config);
    let mismatch = || {
        CliError::Config(format!(
            "scenario `{}` cannot be run with `{want}`",
            cfg.scenario()
        ))
    };
    let out = io::ensure_dir(&args.out)?;
    log::info!("running {} into {}", cfg.scenario(), out.display());
    match (&cfg, want) {
        (RunConfig::Model1(c), "simulate") => scenarios::simulate("model1", c, &out),
        (RunConfig::Model2(c), "simulate") => scenarios::simulate("model2", c, &out),
        (RunConfig::Model3(c), "simulate") => scenarios::simulate("model3", c, &out),
        (RunConfig::Bifriedrich(c), "simulate") => scenarios::bifriedrich(c, &out),
        (RunConfig::Omnes(c), "omnes") => scenarios::omnes(c, &base, &out),
        (RunConfig::Extract(c), "extract") => scenarios::extract(c, &base, &out),
        _ => Err(mismatch()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
