use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use lblnav::filters::FilterKind;
use lblnav::obsv::{gramian, gramian_windows, IntegratorOptions, TrajectorySignals};
use lblnav::scenario::output::WindowSweep;
use lblnav::scenario::{emit_outputs, load_config, run_scenario, summarize_reports, write_gramian, ScenarioConfig};

/// LBL navigation simulator: augmented LTV Kalman filter, EKF and
/// trilateration baselines, observability Gramians.
#[derive(Parser)]
#[command(name = "lblnav", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the scenario and run the selected filters (default: proposed).
    Simulate(RunArgs),
    /// Run all filters (or --filters) on paired runs and print a comparison table.
    Compare(RunArgs),
    /// Observability Gramian of the noise-free scenario, printed as JSON.
    Gramian(GramianArgs),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON; defaults reproduce the reference survey.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Base seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated list of proposed, ekf, algebraic.
    #[arg(long, value_delimiter = ',')]
    filters: Option<Vec<FilterKind>>,
}

#[derive(Args)]
struct GramianArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, default_value_t = 10.0)]
    tf: f64,
    /// Split [t0, tf] into consecutive windows of this length.
    #[arg(long)]
    window: Option<f64>,
    /// Quadrature spacing (s); the default matches the 1 Hz range epochs.
    #[arg(long, default_value_t = 1.0)]
    sample_dt: f64,
}

fn load(common: &Common) -> anyhow::Result<ScenarioConfig> {
    let mut config = match &common.config {
        Some(path) => load_config(path).with_context(|| format!("loading {}", path.display()))?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run(args: RunArgs, all_by_default: bool) -> anyhow::Result<()> {
    let mut config = load(&args.common)?;
    if let Some(filters) = args.filters {
        config.filters = filters;
    } else if all_by_default {
        config.filters = FilterKind::ALL.to_vec();
    }
    config.validate()?;
    let reports = run_scenario(&config)?;
    emit_outputs(&reports, config.landmarks.len(), &args.common.out)
        .with_context(|| format!("writing to {}", args.common.out.display()))?;

    println!(
        "{:<10} {:>5} {:>9} {:>14} {:>14} {:>14} {:>12}",
        "filter", "runs", "diverged", "rmse_p [m]", "rmse_v [m/s]", "rmse_g [m/s2]", "t_conv [s]"
    );
    for (name, s) in summarize_reports(&reports) {
        let t_conv = s
            .mean_convergence_time
            .map_or_else(|| "-".to_string(), |t| format!("{t:.1}"));
        println!(
            "{:<10} {:>5} {:>9} {:>14.6} {:>14.6} {:>14.6} {:>12}",
            name, s.runs, s.diverged_runs, s.rmse_position, s.rmse_velocity, s.rmse_gravity, t_conv
        );
    }
    for r in reports.iter().filter(|r| r.failure.is_some()) {
        eprintln!(
            "{} run {}: {}",
            r.filter,
            r.run,
            r.failure.as_deref().unwrap_or_default()
        );
    }
    eprintln!("outputs written to {}", args.common.out.display());
    Ok(())
}

fn run_gramian(args: GramianArgs) -> anyhow::Result<()> {
    let config = load(&args.common)?;
    if !(args.t0.is_finite() && args.tf.is_finite()) || args.tf <= args.t0 {
        bail!("--t0 and --tf must be finite with --tf > --t0");
    }
    let landmarks = config.landmark_set();
    let trajectory = config.trajectory();
    let signals = TrajectorySignals::new(&trajectory, &landmarks);
    let guard = config.guard()?;
    let options = IntegratorOptions::default();
    let json = match args.window {
        Some(window) => {
            let reports = gramian_windows(
                args.t0,
                args.tf,
                window,
                args.sample_dt,
                &signals,
                &landmarks,
                guard,
                options,
            )?;
            let sweep = WindowSweep::new(window, &reports);
            write_gramian(&sweep, &args.common.out)?;
            serde_json::to_string_pretty(&sweep)?
        }
        None => {
            let report = gramian(args.t0, args.tf, args.sample_dt, &signals, &landmarks, guard, options)?;
            write_gramian(&report, &args.common.out)?;
            serde_json::to_string_pretty(&report)?
        }
    };
    println!("{json}");
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Simulate(args) => run(args, false),
        Command::Compare(args) => run(args, true),
        Command::Gramian(args) => run_gramian(args),
    }
}
