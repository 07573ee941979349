//! `mrs`: simulate multi-rate sequential codes and check achievable regions.

mod config;
mod manifest;
mod region;
mod simulate;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use mrs_core::rational::Q;
use serde::Serialize;
use serde_json::Value;

use manifest::RunManifest;
use region::{Check, RegionConfig};
use simulate::SimulateConfig;
use sweep::SweepConfig;

#[derive(Parser)]
#[command(
    name = "mrs",
    version,
    about = "Multi-rate sequential erasure codes: simulation and region checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials of a code on an erasure channel.
    Simulate(SimulateArgs),
    /// Check a rate-capacity region condition exactly.
    Region(RegionArgs),
    /// Run trials over a grid of channels.
    Sweep(SweepArgs),
    /// Repeat a run from its manifest and compare output digests.
    Rerun(RerunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Base seed. Defaults to MRS_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for trials (0 uses every core).
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long, default_value = "mrs-out")]
    out_dir: PathBuf,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// JSON config with `code`, `channel`, `n`, `epsilon`, `rate`, `trials`, `seed`, `warmup`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Code spec JSON file.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Channel spec JSON file.
    #[arg(long)]
    channel: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Rate to test for admissibility; sets the exit code.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Lossless warmup super-slots.
    #[arg(long)]
    warmup: Option<u64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(clap::Args)]
struct RegionArgs {
    #[arg(long, value_enum)]
    check: Check,
    /// Pairs, network or instance JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Strict margin required of every pair.
    #[arg(long, value_parser = config::rational, default_value = "0")]
    xi: Q,
    /// Also write verdict.json and a manifest here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// JSON config with `code`, `grid`, `n`, `epsilon`, `trials`, `seed`, `warmup`, `theory`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    code: Option<PathBuf>,
    /// JSON array of channel specs.
    #[arg(long, conflicts_with = "line")]
    grid: Option<PathBuf>,
    /// Single-transmitter grid `FROM:TO:COUNT`, e.g. `1/10:1:10`.
    #[arg(long)]
    line: Option<String>,
    /// Theoretical rate step function JSON to overlay.
    #[arg(long)]
    theory: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    warmup: Option<u64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(clap::Args)]
struct RerunArgs {
    manifest: PathBuf,
    /// Write the regenerated outputs here as well.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads, overriding the manifest's.
    #[arg(long)]
    parallel: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Done,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Pass | Status::Done => 0,
            Status::Fail => 2,
        }
    }
}

/// Named file contents produced by a command.
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    status: Status,
}

fn pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<Status> {
    match command {
        Command::Simulate(a) => {
            let mut obj = config::read_object(a.config.as_deref())?;
            config::set_file(&mut obj, "code", a.code.as_deref())?;
            config::set_file(&mut obj, "channel", a.channel.as_deref())?;
            config::set(&mut obj, "n", a.n);
            config::set(&mut obj, "epsilon", a.epsilon);
            config::set(&mut obj, "rate", a.rate);
            config::set(&mut obj, "trials", a.trials);
            config::set(&mut obj, "warmup", a.warmup);
            config::resolve_seed(&mut obj, a.run.seed)?;
            let cfg: SimulateConfig = config::from_value(Value::Object(obj), "simulate config")?;
            execute(
                "simulate",
                &cfg,
                cfg.seed,
                a.run.parallel,
                &a.run.out_dir,
                simulate::run,
            )
        }
        Command::Sweep(a) => {
            let mut obj = config::read_object(a.config.as_deref())?;
            config::set_file(&mut obj, "code", a.code.as_deref())?;
            config::set_file(&mut obj, "grid", a.grid.as_deref())?;
            config::set_file(&mut obj, "theory", a.theory.as_deref())?;
            if let Some(spec) = &a.line {
                let grid = parse_line(spec)?;
                obj.insert("grid".into(), serde_json::to_value(grid)?);
            }
            config::set(&mut obj, "n", a.n);
            config::set(&mut obj, "epsilon", a.epsilon);
            config::set(&mut obj, "trials", a.trials);
            config::set(&mut obj, "warmup", a.warmup);
            config::resolve_seed(&mut obj, a.run.seed)?;
            let cfg: SweepConfig = config::from_value(Value::Object(obj), "sweep config")?;
            execute(
                "sweep",
                &cfg,
                cfg.seed,
                a.run.parallel,
                &a.run.out_dir,
                sweep::run,
            )
        }
        Command::Region(a) => {
            let cfg = RegionConfig {
                check: a.check,
                xi: a.xi,
                input: config::read_value(&a.input)?,
            };
            let started = manifest::now();
            let (out, verdict) = region::run(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&verdict)?);
            if let Some(dir) = &a.out_dir {
                let m = RunManifest {
                    command: "region".into(),
                    config: serde_json::to_value(&cfg)?,
                    seed: None,
                    version: env!("CARGO_PKG_VERSION").into(),
                    parallel: 1,
                    started,
                    finished: manifest::now(),
                    outputs: manifest::digests(&out.files),
                };
                manifest::write_outputs(dir, &out.files, &m)?;
            }
            Ok(out.status)
        }
        Command::Rerun(a) => rerun(&a),
    }
}

fn parse_line(spec: &str) -> Result<Vec<mrs_core::sim::ChannelSpec>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [from, to, count] = parts.as_slice() else {
        bail!("--line expects FROM:TO:COUNT, got `{spec}`");
    };
    let from = config::rational(from).map_err(|e| anyhow::anyhow!("--line FROM: {e}"))?;
    let to = config::rational(to).map_err(|e| anyhow::anyhow!("--line TO: {e}"))?;
    let count: u64 = count
        .parse()
        .map_err(|_| anyhow::anyhow!("--line COUNT must be a positive integer, got `{count}`"))?;
    if count == 0 {
        bail!("--line COUNT must be a positive integer");
    }
    Ok(sweep::line(&from, &to, count))
}

fn execute<C: Serialize>(
    command: &str,
    cfg: &C,
    seed: u64,
    threads: usize,
    out_dir: &Path,
    run: impl Fn(&C, usize) -> Result<Outputs>,
) -> Result<Status> {
    let started = manifest::now();
    let out = run(cfg, threads)?;
    let m = RunManifest {
        command: command.into(),
        config: serde_json::to_value(cfg)?,
        seed: Some(seed),
        version: env!("CARGO_PKG_VERSION").into(),
        parallel: threads,
        started,
        finished: manifest::now(),
        outputs: manifest::digests(&out.files),
    };
    manifest::write_outputs(out_dir, &out.files, &m)?;
    eprintln!(
        "wrote {} files and {} to {}",
        out.files.len(),
        manifest::MANIFEST_FILE,
        out_dir.display()
    );
    Ok(out.status)
}

fn rerun(a: &RerunArgs) -> Result<Status> {
    let m = manifest::read(&a.manifest)?;
    let threads = a.parallel.unwrap_or(m.parallel);
    let what = format!("{} config", m.command);
    let out = match m.command.as_str() {
        "simulate" => simulate::run(
            &config::from_value::<SimulateConfig>(m.config.clone(), &what)?,
            threads,
        )?,
        "sweep" => sweep::run(
            &config::from_value::<SweepConfig>(m.config.clone(), &what)?,
            threads,
        )?,
        "region" => {
            region::run(&config::from_value::<RegionConfig>(
                m.config.clone(),
                &what,
            )?)?
            .0
        }
        other => bail!(
            "{}: field `command`: unknown command `{other}`",
            a.manifest.display()
        ),
    };
    let got = manifest::digests(&out.files);
    let mut identical = got.len() == m.outputs.len();
    for (name, want) in &m.outputs {
        let same = got.get(name) == Some(want);
        identical &= same;
        println!("{} {name}", if same { "match   " } else { "MISMATCH" });
    }
    for name in got.keys().filter(|n| !m.outputs.contains_key(*n)) {
        println!("extra    {name}");
    }
    if let Some(dir) = &a.out_dir {
        let mut fresh = m.clone();
        fresh.parallel = threads;
        fresh.started = manifest::now();
        fresh.finished = fresh.started.clone();
        fresh.outputs = got;
        manifest::write_outputs(dir, &out.files, &fresh)?;
    }
    Ok(if identical {
        Status::Pass
    } else {
        Status::Fail
    })
}
