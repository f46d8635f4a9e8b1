use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::report::{summarize, EpochRecord, RunReport};
use crate::filters::{build_filter, FilterKind, FilterSettings};
use crate::truthsim::{simulate_sensors, LandmarkSet, SensorLog};
use crate::Result;

/// Runs every configured filter on every Monte Carlo run.
///
/// Reports are ordered by run, then by the order of `config.filters`. All
/// filters of a run consume the same sensor log.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<RunReport>> {
    config.validate()?;
    let per_run: Vec<Result<Vec<RunReport>>> = (0..config.monte_carlo_runs)
        .into_par_iter()
        .map(|run| run_single(config, run))
        .collect();
    let mut reports = Vec::with_capacity(config.monte_carlo_runs * config.filters.len());
    for r in per_run {
        reports.extend(r?);
    }
    Ok(reports)
}

/// Sensor log of Monte Carlo run `run`.
pub fn simulate_run(config: &ScenarioConfig, run: usize) -> Result<SensorLog> {
    let noise = config.noise.clone().with_seed(config.run_seed(run));
    simulate_sensors(
        &config.trajectory(),
        &config.landmark_set(),
        &noise,
        config.rates,
        config.duration,
        config.guard()?,
    )
}

pub fn run_single(config: &ScenarioConfig, run: usize) -> Result<Vec<RunReport>> {
    let log = simulate_run(config, run)?;
    let landmarks = config.landmark_set();
    let settings = config.settings()?;
    config
        .filters
        .iter()
        .map(|&kind| run_filter(kind, &log, &landmarks, &settings, run, config.run_seed(run)))
        .collect()
}

/// Drives one filter through a sensor log, initialized on the first fix.
///
/// Numerical failures after initialization (divergence, singular innovation,
/// a range estimate through the guard) end the run early and are reported
/// through [`RunReport::failure`] with the records gathered so far.
pub fn run_filter(
    kind: FilterKind,
    log: &SensorLog,
    landmarks: &LandmarkSet,
    settings: &FilterSettings,
    run: usize,
    seed: u64,
) -> Result<RunReport> {
    let mut filter = build_filter(kind, &log.fixes[0], landmarks, settings)?;
    let mut records = Vec::with_capacity(log.fixes.len().saturating_sub(1));
    let mut failure = None;
    'epochs: for j in 1..log.fixes.len() {
        for pair in log.imu_between_fixes(j).windows(2) {
            if let Err(e) = filter.propagate(&pair[0], &pair[1]) {
                failure = Some(e.to_string());
                break 'epochs;
            }
        }
        let fix = &log.fixes[j];
        let innovation = match filter.correct(fix) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        };
        let truth = &log.truth[j];
        records.push(EpochRecord::new(
            &filter.nav(),
            truth,
            &filter.range_estimates(),
            &landmarks.ranges_from(&truth.p),
            filter.restriction_residuals(&fix.attitude),
            innovation,
        ));
    }
    let summary = summarize(&records, failure.is_some());
    Ok(RunReport {
        filter: kind,
        run,
        seed,
        records,
        summary,
        failure,
    })
}
