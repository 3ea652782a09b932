//! Command-line front end: `sossm <simulate|online|iffit|optimize> --config job.toml --seed 1 --out run.csv`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sossm::harness::{run_job, JobConfig, JobKind};

#[derive(Parser)]
#[command(name = "sossm", version, about = "Parameter learning with vanishing artificial dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a model and write states and observations.
    Simulate(Common),
    /// Online parameter learning over an observation stream.
    Online(Common),
    /// Maximum likelihood by iterated filtering on cloned data.
    Iffit(Common),
    /// Noisy optimisation of the quadratic payoff.
    Optimize(Common),
}

/// Flags take precedence over the file.
#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long)]
    c_ess: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    passes: Option<usize>,
    #[arg(long)]
    length: Option<usize>,
}

fn run(kind: JobKind, c: Common) -> sossm::Result<()> {
    let mut cfg = match &c.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| sossm::Error::Config(format!("cannot read {}: {e}", p.display())))?;
            JobConfig::from_toml_str(&text)?
        }
        None => JobConfig::default(),
    };
    if let Some(k) = cfg.kind {
        if k != kind {
            return Err(sossm::Error::Config(format!(
                "kind: file says {} but the subcommand is {}",
                k.name(),
                kind.name()
            )));
        }
    }
    cfg.kind = Some(kind);
    if c.seed.is_some() {
        cfg.seed = c.seed;
    }
    if c.out.is_some() {
        cfg.data.output = c.out;
    }
    if c.model.is_some() {
        cfg.model.name = c.model;
    }
    if c.input.is_some() {
        cfg.data.input = c.input;
    }
    if c.particles.is_some() {
        cfg.filter.particles = c.particles;
    }
    if c.c_ess.is_some() {
        cfg.filter.c_ess = c.c_ess;
    }
    if c.alpha.is_some() {
        cfg.schedule.alpha = c.alpha;
    }
    if c.passes.is_some() {
        cfg.iffit.passes = c.passes;
    }
    if let Some(n) = c.length {
        if kind == JobKind::Optimize {
            cfg.optimize.length = Some(n);
        } else {
            cfg.model.length = Some(n);
        }
    }
    let cfg = cfg.resolve()?;
    run_job(&cfg)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match cli.command {
        Command::Simulate(c) => (JobKind::Simulate, c),
        Command::Online(c) => (JobKind::Online, c),
        Command::Iffit(c) => (JobKind::Iffit, c),
        Command::Optimize(c) => (JobKind::Optimize, c),
    };
    match run(kind, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace(['\n', '\r'], " ").replace('"', "'");
            eprintln!("error kind={} message=\"{msg}\"", e.kind());
            ExitCode::FAILURE
        }
    }
}
