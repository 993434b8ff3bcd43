use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tailproc::config::{parse_ladder_arg, ExperimentConfig, Format};
use tailproc::error::{CliError, CliResult};
use tailproc::exec::{default_workers, RayonExecutor};
use tailproc::io::atomic_write;
use tailproc::run::{execute, sweep, write_outputs, Command};
use tailproc::verify::verify;

#[derive(Parser)]
#[command(name = "tailproc", version, about = "Simulate heavy-tailed series and study their extremes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Global {
    /// Experiment config (INI).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides `run.master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; default `run.workers`, then TAILPROC_WORKERS, then all CPUs.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Summary format; overrides `output.format`.
    #[arg(long, global = true, value_parser = ["csv", "jsonl"])]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate paths and write them as CSV.
    Simulate,
    /// Analytic and Monte Carlo limit quantities of the model.
    Analytic,
    /// Threshold estimators on simulated (or given) paths.
    Estimate {
        /// Read the path from this CSV instead of simulating.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Every configured operation.
    Run,
    /// Invariant battery; exits non-zero if any invariant fails.
    Verify,
    /// Cross product of parameter ladders, e.g. `--ladder n=1e4,1e5,1e6`.
    Sweep {
        #[arg(long)]
        ladder: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn real_main(cli: Cli) -> CliResult<()> {
    let g = cli.global;
    let path = g
        .config
        .ok_or_else(|| CliError::validation("--config", "a config file is required"))?;
    let mut cfg = ExperimentConfig::load(&path)?;
    if let Some(s) = g.seed {
        cfg.run.master_seed = s;
    }
    if let Some(f) = g.format {
        cfg.output.format = f.parse::<Format>().map_err(|e| CliError::validation("--format", e))?;
    }
    let workers = g.workers.or(cfg.run.workers).unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(CliError::validation("--workers", "must be >= 1"));
    }
    let exec = RayonExecutor::new(workers);
    let dir = g.out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));

    let report = match cli.command {
        Cmd::Verify => {
            let table = verify(&cfg, &exec)?;
            print!("{table}");
            atomic_write(&dir.join("verify.csv"), &table.csv())?;
            table.into_result()?;
            return Ok(());
        }
        Cmd::Sweep { ladder } => {
            let mut l = cfg.sweep.clone();
            for arg in &ladder {
                let (k, v) = parse_ladder_arg(arg)?;
                l.retain(|(kk, _)| *kk != k);
                l.push((k, v));
            }
            sweep(&cfg, &l, &exec)?
        }
        Cmd::Simulate => execute(&cfg, Command::Simulate, &exec, None)?,
        Cmd::Analytic => execute(&cfg, Command::Analytic, &exec, None)?,
        Cmd::Estimate { input } => execute(&cfg, Command::Estimate, &exec, input.as_deref())?,
        Cmd::Run => execute(&cfg, Command::Run, &exec, None)?,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let files = write_outputs(&report, &cfg, &dir)?;
    println!(
        "{}: {} records, {} files in {} ({:.2}s, {} workers)",
        report.model_id,
        report.records.len(),
        files.len(),
        dir.display(),
        report.wall_clock,
        report.workers
    );
    Ok(())
}
