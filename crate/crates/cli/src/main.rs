//! `enactlab`: run single trials, parameter sweeps and window analyses.

mod config;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use enactlab::harness::csv_io::{self, log_file_name};
use enactlab::harness::{negative_valence_windows, run_sweep, run_trial_traced, AgentKind, TrialSummary};
use enactlab::HarnessError;

use crate::config::{KeyValues, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        if e.is_config_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "enactlab", version, about = "Enactive and value-iteration foraging agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one trial and write its summary, tick log and manifest.
    Run(RunArgs),
    /// Run every grid cell for a range of seeds and aggregate the gains.
    Sweep(SweepArgs),
    /// Per-window negative-valence statistics over the trials in a directory.
    Analyze(AnalyzeArgs),
}

/// Settings shared by `run` and `sweep`; each one overrides the config file.
#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    maze: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    /// First seed; also read from ENACTLAB_SEED when unset.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed of the food placement stream.
    #[arg(long)]
    env_seed: Option<u64>,
    #[arg(long)]
    ticks: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "enactlab-out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = ["enactive", "rl"])]
    agent: Option<String>,
    /// Foresight of the enactive agent.
    #[arg(long)]
    d: Option<usize>,
    /// Scope radius of the RL agent.
    #[arg(long)]
    delta: Option<f64>,
    /// Also write the final interaction memory (enactive only).
    #[arg(long)]
    dump_memory: bool,
    /// Print maze snapshots while running.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = 100, requires = "trace")]
    trace_every: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// `alpha=0,0.5;d=2,4;delta=2,8` or `standard`.
    #[arg(long)]
    grid: Option<String>,
    /// Number of consecutive seeds starting at `--seed`.
    #[arg(long)]
    seeds: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Directory holding trials.csv and logs/.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 100)]
    window: u64,
    /// Where to write windows.csv; defaults to the input directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["enactive", "rl"])]
    agent: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
}

fn flag<T: ToString>(out: &mut KeyValues, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        out.insert(key.to_string(), v.to_string());
    }
}

fn resolve(common: &Common, mut flags: KeyValues) -> Result<Settings, CliError> {
    flag(&mut flags, "maze", &common.maze.as_ref().map(|p| p.display().to_string()));
    flag(&mut flags, "alpha", &common.alpha);
    flag(&mut flags, "seed", &common.seed);
    flag(&mut flags, "env_seed", &common.env_seed);
    flag(&mut flags, "ticks", &common.ticks);
    let file = common.config.as_deref().map(config::read_config).transpose()?;
    let env_seed = std::env::var(config::SEED_ENV).ok();
    if let Some(s) = &env_seed {
        s.parse::<u64>().map_err(|e| CliError::Config(format!("{} = {s:?}: {e}", config::SEED_ENV)))?;
    }
    Settings::from_values(config::layer(file, env_seed, flags))
}

const LOG_DIR: &str = "logs";

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let mut flags = KeyValues::new();
    flag(&mut flags, "agent", &args.agent);
    flag(&mut flags, "d", &args.d);
    flag(&mut flags, "delta", &args.delta);
    let settings = resolve(&args.common, flags)?;
    let out = &args.common.out;
    std::fs::create_dir_all(out.join(LOG_DIR))?;

    let trace = args.trace.then_some(args.trace_every);
    let result = run_trial_traced(&settings.template, trace)?;
    let mut stdout = std::io::stdout().lock();
    for (tick, maze) in &result.trace {
        writeln!(stdout, "tick {tick}\n{maze}")?;
    }
    let summary = result.summary();
    let log_name = format!("{LOG_DIR}/{}", log_file_name(&summary));
    csv_io::write_trials(&out.join("trials.csv"), std::slice::from_ref(&summary))?;
    csv_io::write_log(&out.join(&log_name), &result.log)?;
    let mut outputs = vec!["trials.csv".to_string(), log_name];
    if args.dump_memory {
        match &result.memory_dump {
            Some(dump) => {
                std::fs::write(out.join("memory.txt"), dump)?;
                outputs.push("memory.txt".into());
            }
            None => eprintln!("note: --dump-memory ignored for the rl agent"),
        }
    }
    manifest::write(out, "run", &settings, outputs)?;
    writeln!(
        stdout,
        "{} alpha={} {}={} seed={} gain={} neg_valence_total={} ticks={}",
        summary.agent,
        summary.alpha,
        settings.template.agent.param().0,
        settings.template.agent.param().1,
        summary.seed,
        summary.gain,
        summary.neg_valence_total,
        summary.ticks
    )?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let mut flags = KeyValues::new();
    flag(&mut flags, "grid", &args.grid);
    flag(&mut flags, "seeds", &args.seeds);
    let settings = resolve(&args.common, flags)?;
    let workers = match args.workers {
        Some(0) => return Err(CliError::Config("--workers must be positive".into())),
        Some(w) => w,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let out = &args.common.out;
    std::fs::create_dir_all(out.join(LOG_DIR))?;

    let spec = settings.sweep_spec();
    let result = run_sweep(&spec, workers)?;
    csv_io::write_sweep(&out.join("sweep.csv"), &result.rows)?;
    csv_io::write_trials(&out.join("trials.csv"), &result.trials)?;
    for (t, log) in result.trials.iter().zip(&result.logs) {
        csv_io::write_log(&out.join(LOG_DIR).join(log_file_name(t)), log)?;
    }
    let alignment: String =
        result.alignment.iter().map(|a| format!("d={},delta={}\n", a.d, a.delta)).collect();
    std::fs::write(out.join("alignment.txt"), alignment)?;
    manifest::write(
        out,
        "sweep",
        &settings,
        vec!["sweep.csv".into(), "trials.csv".into(), "alignment.txt".into(), format!("{LOG_DIR}/")],
    )?;
    println!("{} cells, {} trials, {} workers -> {}", result.rows.len(), result.trials.len(), workers, out.display());
    Ok(())
}

fn matches_filter(t: &TrialSummary, args: &AnalyzeArgs) -> bool {
    args.agent.as_deref().is_none_or(|a| t.agent.name() == a)
        && args.alpha.is_none_or(|a| t.alpha == a)
        && args.d.is_none_or(|d| t.d == Some(d))
        && args.delta.is_none_or(|d| t.delta == Some(d))
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let trials_path = args.input.join("trials.csv");
    if !trials_path.exists() {
        return Err(CliError::Config(format!("{} not found", trials_path.display())));
    }
    let trials: Vec<TrialSummary> =
        csv_io::read_trials(&trials_path)?.into_iter().filter(|t| matches_filter(t, args)).collect();
    if trials.is_empty() {
        return Err(CliError::Config("no trials match the filters".into()));
    }
    let cells: std::collections::BTreeSet<(AgentKind, String, String)> =
        trials.iter().map(|t| (t.agent, t.alpha.to_string(), t.param_value().to_string())).collect();
    if cells.len() > 1 {
        return Err(CliError::Config(format!(
            "{} holds {} parameter cells; narrow it with --agent/--alpha/--d/--delta",
            args.input.display(),
            cells.len()
        )));
    }
    let logs = trials
        .iter()
        .map(|t| read_trial_log(&args.input, t))
        .collect::<Result<Vec<_>, _>>()?;
    let stats = negative_valence_windows(&logs, args.window)?;
    let out = args.out.as_deref().unwrap_or(&args.input);
    std::fs::create_dir_all(out)?;
    csv_io::write_windows(&out.join("windows.csv"), &stats)?;
    let mut stdout = std::io::stdout().lock();
    for (i, (s, m)) in stats.stds.iter().zip(&stats.means).enumerate() {
        writeln!(stdout, "window {:>3}  std {s:.4}  mean {m:.2}", i + 1)?;
    }
    let n = stats.windows();
    if n >= 2 {
        let half = n / 2;
        writeln!(
            stdout,
            "first {half} windows mean std {:.4}; last {} windows mean std {:.4}",
            stats.mean_std(1, half),
            n - half,
            stats.mean_std(half + 1, n)
        )?;
    }
    Ok(())
}

fn read_trial_log(dir: &Path, t: &TrialSummary) -> Result<enactlab::harness::TrialLog, CliError> {
    let path = dir.join(LOG_DIR).join(log_file_name(t));
    if !path.exists() {
        return Err(CliError::Runtime(format!("missing tick log {}", path.display())));
    }
    Ok(csv_io::read_log(&path, t.ticks)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
