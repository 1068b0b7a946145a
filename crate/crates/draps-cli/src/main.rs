//! `draps` — run and compare container-placement strategies on a
//! simulated cluster.
//!
//! Subcommands:
//!
//! * `run` — one scenario under one strategy, writing `metrics.csv`,
//!   `events.csv` and `summary.json` into an output directory;
//! * `compare` — the same scenario under several strategies, one
//!   subdirectory each plus a cross-strategy `compare.json`;
//! * `dom` — offline analysis of a usage log: per-service average
//!   demand and the dominant resource under given cluster limits.
//!
//! Exit status is non-zero exactly when a diagnostic was printed to
//! stderr; warnings on otherwise-successful runs go to stdout.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use draps_core::model::Resources;
use draps_core::report::{compare, CompareReport};
use draps_core::scheduler::SchedulerKind;
use draps_core::sim::{run, Scenario};
use draps_core::trace::StatsLog;

#[derive(Parser)]
#[command(name = "draps", version, about = "Container placement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario under one strategy.
    Run(RunArgs),
    /// Run one scenario under several strategies and rank them.
    Compare(CompareArgs),
    /// Analyze a usage log: average demand and dominant resource per service.
    Dom(DomArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario description (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Directory for metrics.csv, events.csv and summary.json.
    #[arg(long)]
    out: PathBuf,
    /// Override the scenario's strategy (spread|binpack|random|draps).
    #[arg(long)]
    scheduler: Option<SchedulerKind>,
    /// Override the scenario's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario description (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Directory for per-strategy subdirectories and compare.json.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated strategies to run.
    #[arg(long, default_value = "spread,binpack,random,draps")]
    schedulers: String,
    /// Override the scenario's RNG seed (applied to every strategy).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DomArgs {
    /// Usage log in stats CSV form.
    #[arg(long)]
    trace: PathBuf,
    /// Cluster-wide capacity as memory,cpu,network,block_io
    /// (bytes, cores, bytes/s, bytes/s).
    #[arg(long)]
    limits: String,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Dom(args) => cmd_dom(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn load_scenario(path: &PathBuf, scheduler: Option<SchedulerKind>, seed: Option<u64>) -> Result<Scenario> {
    let mut scenario = Scenario::load(path)
        .with_context(|| format!("loading scenario {}", path.display()))?;
    if let Some(kind) = scheduler {
        scenario = scenario.with_scheduler(kind);
    }
    if let Some(seed) = seed {
        scenario = scenario.with_seed(seed);
    }
    Ok(scenario)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let scenario = load_scenario(&args.scenario, args.scheduler, args.seed)?;
    // Simulate fully before touching the filesystem, so a failed run
    // leaves no partial output behind.
    let output = run(&scenario).context("running scenario")?;
    output
        .write_to_dir(&args.out)
        .with_context(|| format!("writing results to {}", args.out.display()))?;

    let s = &output.summary;
    println!(
        "scheduler={} ticks={} peak_nu={:.4} final_nu={:.4} kills={} migrations={} rejected={} overloads={} heartbeat_bytes={}",
        s.scheduler, s.ticks, s.peak_nu, s.final_nu, s.kills, s.migrations, s.rejected,
        s.worker_overloads, s.heartbeat_bytes
    );
    println!(
        "wrote {}",
        args.out.join("{metrics.csv,events.csv,summary.json}").display()
    );
    Ok(())
}

fn parse_schedulers(raw: &str) -> Result<Vec<SchedulerKind>> {
    let mut kinds = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let kind: SchedulerKind = part
            .parse()
            .map_err(|e: String| anyhow::anyhow!(e))
            .with_context(|| format!("parsing --schedulers entry `{part}`"))?;
        // Duplicates are allowed; determinism makes their rows identical.
        kinds.push(kind);
    }
    if kinds.is_empty() {
        bail!("--schedulers must name at least one strategy");
    }
    Ok(kinds)
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let kinds = parse_schedulers(&args.schedulers)?;
    let scenario = load_scenario(&args.scenario, None, args.seed)?;
    let outputs = compare(&scenario, &kinds).context("running comparison")?;
    let report = CompareReport::from_runs(&outputs);

    for output in &outputs {
        let dir = args.out.join(output.summary.scheduler.as_str());
        output
            .write_to_dir(&dir)
            .with_context(|| format!("writing results to {}", dir.display()))?;
    }
    std::fs::write(args.out.join("compare.json"), report.to_json())
        .with_context(|| format!("writing compare.json to {}", args.out.display()))?;

    println!(
        "{:<8} {:>9} {:>9} {:>6} {:>11} {:>9} {:>10} {:>16}",
        "strategy", "peak_nu", "final_nu", "kills", "migrations", "rejected", "overloads", "heartbeat_bytes"
    );
    for row in &report.rows {
        println!(
            "{:<8} {:>9.4} {:>9.4} {:>6} {:>11} {:>9} {:>10} {:>16}",
            row.scheduler.to_string(),
            row.peak_nu,
            row.final_nu,
            row.kills,
            row.migrations,
            row.rejected,
            row.worker_overloads,
            row.heartbeat_bytes
        );
    }
    println!("winner: {}", report.winner);
    Ok(())
}

fn parse_limits(raw: &str) -> Result<Resources> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!(
            "--limits needs four comma-separated values (memory,cpu,network,block_io), got {}",
            parts.len()
        );
    }
    let mut values = [0.0f64; 4];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .with_context(|| format!("parsing --limits entry `{part}`"))?;
        if !slot.is_finite() || *slot <= 0.0 {
            bail!("--limits entries must be positive and finite, got `{part}`");
        }
    }
    Ok(Resources::new(values[0], values[1], values[2], values[3]))
}

fn cmd_dom(args: DomArgs) -> Result<()> {
    let limits = parse_limits(&args.limits)?;
    let log = StatsLog::from_path(&args.trace)
        .with_context(|| format!("reading usage log {}", args.trace.display()))?;

    println!("service,mem_bytes,cpu_cores,net_bytes_per_s,blk_bytes_per_s,dominant");
    for (service, samples) in log.usage_samples() {
        let mean = Resources::mean(&samples).context("service has no samples")?;
        let shares = mean.normalized(&limits).context("normalizing by limits")?;
        let dominant = shares.argmax_kind();
        println!(
            "{},{},{},{},{},{}",
            service, mean.memory, mean.cpu, mean.network, mean.block_io,
            dominant.label()
        );
        if shares.argmax_is_tied() {
            println!(
                "warning: service `{service}` has tied dominant shares; reporting `{}`",
                dominant.label()
            );
        }
    }
    Ok(())
}
