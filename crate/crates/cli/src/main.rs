use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rgf_cli::commands;
use rgf_cli::config::RunConfig;
use rgf_cli::CliError;
use rgf_core::estimators::EstimatorMode;

#[derive(Parser, Debug)]
#[command(name = "rgf", version, about = "Retarded Green's functions from differentiated Trotter circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, env = "RGF_SEED")]
    seed: Option<u64>,
    /// Caps the number of worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the configured output directory.
    #[arg(long, env = "RGF_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ground-state energy and single-site expectations.
    GroundState(Common),
    /// Parameter-shift traces, one circuit per time point.
    Lcp(Common),
    /// Simultaneous-perturbation traces from one circuit template.
    Scp(Common),
    /// Finite-difference traces.
    Fd(Common),
    /// Dynamical structure factor from fitted SCP traces.
    Dsf {
        #[command(flatten)]
        common: Common,
        /// Use exact Lehmann data instead of sampled traces.
        #[arg(long)]
        oracle: bool,
    },
    /// LCP and SCP variance comparison.
    VarianceStudy(Common),
    /// Exact reference traces.
    Oracle(Common),
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.outputs = out.clone();
    }
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let files = match cli.command {
        Command::GroundState(c) => commands::run_ground_state(&load(&c)?)?,
        Command::Lcp(c) => commands::run_traces(&load(&c)?, EstimatorMode::Lcp)?,
        Command::Scp(c) => commands::run_traces(&load(&c)?, EstimatorMode::Scp)?,
        Command::Fd(c) => commands::run_traces(&load(&c)?, EstimatorMode::Fd)?,
        Command::Dsf { common, oracle } => commands::run_dsf(&load(&common)?, oracle)?,
        Command::VarianceStudy(c) => commands::run_variance_study(&load(&c)?)?,
        Command::Oracle(c) => commands::run_oracle(&load(&c)?)?,
    };
    for f in files {
        println!("{}  {}", f.sha256, f.path);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rgf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
