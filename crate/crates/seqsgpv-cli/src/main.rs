//! Batch front-end for sequential SGPV monitoring: reads a config file,
//! optionally ingests a bootstrap outcome pool, runs the requested analysis,
//! and writes CSV results with a run metadata sidecar.

mod config;
mod output;
mod pool;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use seqsgpv::calibrate::{find_min_wait, CalibrationConfig};
use seqsgpv::oc::{
    reversal_analysis, simulate_oc, t1e_trajectory, OcConfig, ReversalConfig, TrajectoryConfig,
};
use seqsgpv::Monitor;

use config::{LoadedConfig, Resolved, RunKind};

/// Failure classes with distinct exit codes: 2 config, 3 data, 4 runtime.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "seqsgpv",
    version,
    about = "Sequentially monitored trials judged by second generation p-values: \
             design evaluation and Monte Carlo operating characteristics"
)]
struct Cli {
    /// Run configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides run.master_seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides run.workers from the config.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for CSV results and run metadata.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Outcome pool for bootstrap models, one value per line.
    #[arg(long, global = true, value_name = "PATH")]
    pool: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Evaluate SGPVs, the alert, and the conclusion for one interval.
    Sgpv,
    /// Operating characteristics over an effect grid.
    Simulate,
    /// Type I error as a function of the maximum sample size.
    Trajectory,
    /// Reversal rates under delayed outcomes.
    Reversals,
    /// Smallest wait meeting a Type I error target.
    Calibrate,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("{e}");
        std::process::exit(e.code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let kind = match cli.command {
        Command::Sgpv => RunKind::Sgpv,
        Command::Simulate => RunKind::Simulate,
        Command::Trajectory => RunKind::Trajectory,
        Command::Reversals => RunKind::Reversals,
        Command::Calibrate => RunKind::Calibrate,
    };
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut loaded = config::load(config_path, kind)?;

    if let Some(run) = loaded.resolved.run.as_mut() {
        if let Some(seed) = cli.seed {
            run.master_seed = seed;
        }
        if let Some(workers) = cli.workers {
            if workers == 0 {
                return Err(CliError::Config("--workers must be at least 1".into()));
            }
            run.workers = workers;
        }
    }

    match cli.command {
        Command::Sgpv => cmd_sgpv(&loaded.resolved),
        Command::Simulate => cmd_simulate(&cli, &loaded),
        Command::Trajectory => cmd_trajectory(&cli, &loaded),
        Command::Reversals => cmd_reversals(&cli, &loaded),
        Command::Calibrate => cmd_calibrate(&cli, &loaded),
    }
}

fn cmd_sgpv(r: &Resolved) -> Result<(), CliError> {
    let design = r.design.as_ref().expect("checked at load");
    let interval = r.sgpv_interval.expect("checked at load");
    let monitor = Monitor::new(design.clone());
    let (p_null, p_meaningful) = monitor
        .sgpv_pair(&interval)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let alert = monitor
        .alert(&interval)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let conclusion = monitor
        .classify(&interval)
        .map_err(|e| CliError::Config(e.to_string()))?;
    println!("design = {}", design.label());
    println!("interval = [{}, {}]", interval.lo(), interval.hi());
    println!("sgpv_null_side = {p_null}");
    println!("sgpv_meaningful_side = {p_meaningful}");
    println!("alert = {alert:?}");
    println!("category = {:?}", conclusion.category);
    println!("reject_null = {}", conclusion.reject_null);
    Ok(())
}

/// Shared preflight for the simulating subcommands: build the model from the
/// optional pool, prove the output directory writable, and hand back the
/// pieces every run needs.
struct Prepared {
    design: seqsgpv::DesignSpec,
    plan: seqsgpv::MonitoringPlan,
    model: seqsgpv::OutcomeModel,
    run: config::RunSpec,
    replicates: u32,
}

fn prepare(cli: &Cli, loaded: &LoadedConfig) -> Result<Prepared, CliError> {
    let r = &loaded.resolved;
    let design = r.design.clone().expect("checked at load");
    let plan = r.plan.clone().expect("checked at load");
    let run = r.run.expect("checked at load");
    let replicates = run.replicates.expect("checked at load");

    let pool_values = match &cli.pool {
        Some(path) => {
            let (values, summary) = pool::ingest_pool(path)?;
            println!("pool {}: {summary}", path.display());
            Some(values)
        }
        None => None,
    };
    let model = r
        .model
        .as_ref()
        .expect("checked at load")
        .build(pool_values)?;

    output::prepare_out_dir(&cli.out)?;
    Ok(Prepared {
        design,
        plan,
        model,
        run,
        replicates,
    })
}

fn finish(
    cli: &Cli,
    loaded: &LoadedConfig,
    run: &config::RunSpec,
    csv_name: &str,
    csv: &str,
) -> Result<(), CliError> {
    let path = output::write_file(&cli.out, csv_name, csv)?;
    output::write_file(
        &cli.out,
        "run_meta.toml",
        &output::sidecar_toml(&loaded.raw_bytes, run.master_seed, run.workers),
    )?;
    output::write_file(
        &cli.out,
        "effective_config.toml",
        &config::effective_toml(&loaded.resolved),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_simulate(cli: &Cli, loaded: &LoadedConfig) -> Result<(), CliError> {
    let p = prepare(cli, loaded)?;
    let effects = loaded.resolved.effects.clone().expect("checked at load");
    let cfg = OcConfig {
        design: p.design.clone(),
        plan: p.plan,
        model: p.model,
        effects,
        replicates: p.replicates,
        master_seed: p.run.master_seed,
        workers: p.run.workers,
        ceiling: p.run.ceiling,
    };
    let summary = simulate_oc(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let csv = output::simulate_csv(&p.design.label(), &summary);
    finish(cli, loaded, &p.run, "simulate.csv", &csv)
}

fn cmd_trajectory(cli: &Cli, loaded: &LoadedConfig) -> Result<(), CliError> {
    let p = prepare(cli, loaded)?;
    let section = loaded.resolved.trajectory.clone().expect("checked at load");
    let cfg = TrajectoryConfig {
        design: p.design.clone(),
        plan: p.plan,
        model: p.model,
        w_grid: section.w_grid,
        n_grid: section.n_grid,
        replicates: p.replicates,
        master_seed: p.run.master_seed,
        workers: p.run.workers,
        ceiling: p.run.ceiling,
    };
    let table = t1e_trajectory(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let csv = output::trajectory_csv(&p.design.label(), &table);
    finish(cli, loaded, &p.run, "trajectory.csv", &csv)
}

fn cmd_reversals(cli: &Cli, loaded: &LoadedConfig) -> Result<(), CliError> {
    let p = prepare(cli, loaded)?;
    let lag_grid = loaded.resolved.lag_grid.clone().expect("checked at load");
    let cfg = ReversalConfig {
        design: p.design.clone(),
        plan: p.plan,
        model: p.model,
        lag_grid,
        replicates: p.replicates,
        master_seed: p.run.master_seed,
        workers: p.run.workers,
        ceiling: p.run.ceiling,
    };
    let table = reversal_analysis(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let csv = output::reversals_csv(&p.design.label(), &table);
    finish(cli, loaded, &p.run, "reversals.csv", &csv)
}

fn cmd_calibrate(cli: &Cli, loaded: &LoadedConfig) -> Result<(), CliError> {
    let p = prepare(cli, loaded)?;
    let section = loaded.resolved.calibrate.clone().expect("checked at load");
    let cfg = CalibrationConfig {
        design: p.design.clone(),
        plan: p.plan,
        model: p.model,
        alpha_target: section.alpha_target,
        w_grid: section.w_grid,
        replicates: p.replicates,
        master_seed: p.run.master_seed,
        workers: p.run.workers,
        ceiling: p.run.ceiling,
    };
    let report = find_min_wait(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    match &report.chosen {
        Some(cell) => println!(
            "chosen W = {} (type1_error {} at n = {})",
            cell.wait, cell.t1e, cell.analyzed_n
        ),
        None => println!(
            "no wait on the grid meets alpha_target = {}",
            report.alpha_target
        ),
    }
    let csv = output::calibrate_csv(&p.design.label(), &report);
    finish(cli, loaded, &p.run, "calibrate.csv", &csv)
}
