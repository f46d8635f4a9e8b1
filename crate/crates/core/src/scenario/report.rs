use serde::{Deserialize, Serialize};

use crate::filters::{FilterKind, NavEstimate};
use crate::geo3d::Vec3;
use crate::truthsim::TruthState;

/// Position error below which the filter counts as converged (m).
pub const CONVERGENCE_THRESHOLD: f64 = 0.5;

/// Errors of one filter at one range epoch, taken after the update.
/// Velocity and gravity errors are in body axes.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub t: f64,
    pub ep: Vec3,
    pub ev: Vec3,
    pub eg: Vec3,
    /// Range estimate minus true range, per landmark.
    pub er: Vec<f64>,
    pub res_r1: f64,
    pub res_s8: f64,
    pub innovation_rms: f64,
}

impl EpochRecord {
    pub fn new(
        nav: &NavEstimate,
        truth: &TruthState,
        range_estimates: &[f64],
        true_ranges: &[f64],
        residuals: (f64, f64),
        innovation_rms: f64,
    ) -> Self {
        Self {
            t: truth.t,
            ep: nav.p_hat - truth.p,
            ev: nav.v_hat - truth.v,
            eg: nav.g_hat - truth.g,
            er: range_estimates.iter().zip(true_ranges).map(|(e, r)| e - r).collect(),
            res_r1: residuals.0,
            res_s8: residuals.1,
            innovation_rms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub rmse_position: f64,
    pub rmse_velocity: f64,
    pub rmse_gravity: f64,
    /// Time after which the position error stays below [`CONVERGENCE_THRESHOLD`].
    pub convergence_time: Option<f64>,
    pub diverged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub filter: FilterKind,
    pub run: usize,
    pub seed: u64,
    pub records: Vec<EpochRecord>,
    pub summary: RunSummary,
    /// Message of the error that stopped the filter, if any.
    pub failure: Option<String>,
}

/// The final half of the records; the steady-state window.
pub fn steady_state(records: &[EpochRecord]) -> &[EpochRecord] {
    &records[records.len() / 2..]
}

/// Root mean square of the norms of `errors`.
pub fn rmse<I: IntoIterator<Item = Vec3>>(errors: I) -> f64 {
    let (sum, n) = errors
        .into_iter()
        .fold((0.0, 0usize), |(s, n), e| (s + e.norm_squared(), n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

pub fn convergence_time(records: &[EpochRecord]) -> Option<f64> {
    let last_bad = records.iter().rposition(|r| !(r.ep.norm() < CONVERGENCE_THRESHOLD));
    match last_bad {
        None => records.first().map(|r| r.t),
        Some(i) => records.get(i + 1).map(|r| r.t),
    }
}

pub fn summarize(records: &[EpochRecord], diverged: bool) -> RunSummary {
    let window = steady_state(records);
    RunSummary {
        rmse_position: rmse(window.iter().map(|r| r.ep)),
        rmse_velocity: rmse(window.iter().map(|r| r.ev)),
        rmse_gravity: rmse(window.iter().map(|r| r.eg)),
        convergence_time: if diverged { None } else { convergence_time(records) },
        diverged,
    }
}

/// Pooled RMSE over several runs: square root of the mean squared RMSE.
pub fn pooled_rmse<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64, ep: f64) -> EpochRecord {
        EpochRecord {
            t,
            ep: Vec3::new(ep, 0.0, 0.0),
            ev: Vec3::zeros(),
            eg: Vec3::zeros(),
            er: vec![],
            res_r1: 0.0,
            res_s8: 0.0,
            innovation_rms: 0.0,
        }
    }

    #[test]
    fn convergence_time_is_last_crossing() {
        let records: Vec<_> = [3.0, 0.1, 0.7, 0.2, 0.1]
            .iter()
            .enumerate()
            .map(|(i, e)| record(i as f64 + 1.0, *e))
            .collect();
        assert_eq!(convergence_time(&records), Some(4.0));
        assert_eq!(convergence_time(&records[..3]), None);
        assert_eq!(convergence_time(&records[3..]), Some(4.0));
    }

    #[test]
    fn steady_state_rmse_uses_final_half() {
        let records: Vec<_> = [100.0, 100.0, 3.0, 4.0]
            .iter()
            .enumerate()
            .map(|(i, e)| record(i as f64, *e))
            .collect();
        let s = summarize(&records, false);
        assert!((s.rmse_position - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.rmse_velocity, 0.0);
    }
}
