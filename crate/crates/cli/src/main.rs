//! `fasaris run` sweeps outage and throughput over one parameter and writes a
//! CSV table; `fasaris optimize` runs the rate search and writes JSON.
//!
//! Exit codes: 0 success, 2 bad invocation or configuration, 3 engine
//! failure.

mod config;
mod sweep;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fasaris::channel::SystemConfigFile;
use fasaris::ratemax::{optimize_rate, RateSearchOptions, RateSearchResult};
use serde::Serialize;

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "fasaris",
    version,
    about = "Outage and rate tools for fluid-antenna receivers behind an active surface"
)]
struct Cli {
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config Monte-Carlo trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep one parameter and write a CSV table.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rate search at the configured point, written as JSON.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Engine(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Config(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
            Failure::Engine(m) => {
                eprintln!("error: {m}");
                ExitCode::from(3)
            }
        }
    }
}

#[derive(Serialize)]
struct OptimizeReport {
    config: SystemConfigFile,
    n_bs: u32,
    options: RateSearchOptions,
    /// `log2((1 + lambda1) / (1 + lambda0))`.
    interval_bits: f64,
    result: RateSearchResult,
}

fn load(path: &Path, cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(path).map_err(Failure::Config)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        if t == 0 {
            return Err(Failure::Config("--trials must be >= 1".into()));
        }
        cfg.trials = t;
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: &Cli, config: &Path, out: &Path) -> Result<(), Failure> {
    let cfg = load(config, cli)?;
    let (var, points) = cfg.points().map_err(Failure::Config)?;
    let rows = sweep::run_sweep(&cfg, var, &points).map_err(|e| Failure::Engine(e.to_string()))?;
    sweep::write_csv(create(out)?, &rows)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", out.display())))
}

fn optimize(cli: &Cli, config: &Path, out: &Path) -> Result<(), Failure> {
    let cfg = load(config, cli)?;
    let point = cfg.base().map_err(Failure::Config)?;
    let (params, part) =
        sweep::prepare(&point).map_err(|(m, e)| Failure::Engine(format!("{m} failed: {e}")))?;
    let options = RateSearchOptions {
        quad: cfg.quadrature,
        ..cfg.ratemax
    };
    let result = optimize_rate(&point.system, &params, &part, &options)
        .map_err(|e| Failure::Engine(format!("ratemax failed: {e}")))?;
    let report = OptimizeReport {
        config: cfg.system.clone(),
        n_bs: cfg.n_bs,
        options,
        interval_bits: ((1.0 + result.lambda1) / (1.0 + result.lambda0)).log2(),
        result,
    };
    let mut w = create(out)?;
    serde_json::to_writer_pretty(&mut w, &report)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", out.display())))?;
    std::io::Write::write_all(&mut w, b"\n")
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", out.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Failure::Config("--threads must be >= 1".into()).report();
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            return Failure::Config(format!("thread pool: {e}")).report();
        }
    }
    let res = match &cli.cmd {
        Cmd::Run { config, out } => run(&cli, config, out),
        Cmd::Optimize { config, out } => optimize(&cli, config, out),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
