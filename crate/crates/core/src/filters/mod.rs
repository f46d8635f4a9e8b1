//! Navigation filters.
//!
//! [`proposed`] is the augmented LTV Kalman filter driven directly by ranges,
//! accelerometer, gyro and attitude readings. [`ekf`] and [`algebraic`] are
//! the two reference solutions: an extended Kalman filter on the range
//! equations and a linear Kalman filter fed with trilaterated positions.

pub mod algebraic;
pub mod chain;
pub mod ekf;
pub mod proposed;
pub mod trilateration;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geo3d::{Mat3, Vec3};
use crate::truthsim::{ImuSample, LandmarkSet, SensorFrame};
use crate::{Error, Result};

pub use algebraic::LinearKf;
pub use chain::ChainTuning;
pub use ekf::Ekf;
pub use proposed::{AugmentedState, FilterTuning, InitialCovariance, ProposedFilter};
pub use trilateration::trilaterate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Proposed,
    Ekf,
    Algebraic,
}

impl FilterKind {
    pub const ALL: [FilterKind; 3] = [FilterKind::Proposed, FilterKind::Ekf, FilterKind::Algebraic];

    pub fn name(&self) -> &'static str {
        match self {
            FilterKind::Proposed => "proposed",
            FilterKind::Ekf => "ekf",
            FilterKind::Algebraic => "algebraic",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proposed" => Ok(FilterKind::Proposed),
            "ekf" => Ok(FilterKind::Ekf),
            "algebraic" => Ok(FilterKind::Algebraic),
            other => Err(Error::Validation(format!(
                "unknown filter '{other}' (expected proposed, ekf or algebraic)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NavEstimate {
    pub t: f64,
    /// Inertial position (m).
    pub p_hat: Vec3,
    /// Body velocity (m/s).
    pub v_hat: Vec3,
    /// Body gravity (m/s²).
    pub g_hat: Vec3,
}

/// Starting point of every filter: position, body velocity, body gravity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialGuess {
    pub position: Vec3,
    pub velocity: Vec3,
    pub gravity: Vec3,
}

impl Default for InitialGuess {
    fn default() -> Self {
        Self {
            position: Vec3::zeros(),
            velocity: Vec3::zeros(),
            gravity: Vec3::new(0.0, 0.0, 10.0),
        }
    }
}

/// Common driving interface used by the scenario runner.
pub trait NavFilter: Send {
    fn kind(&self) -> FilterKind;

    /// Time update across one IMU interval.
    fn propagate(&mut self, from: &ImuSample, to: &ImuSample) -> Result<()>;

    /// Measurement update; returns the RMS of the innovation vector.
    fn correct(&mut self, fix: &SensorFrame) -> Result<f64>;

    fn nav(&self) -> NavEstimate;

    /// Estimated range to every landmark.
    fn range_estimates(&self) -> Vec<f64>;

    /// `|x4 − ‖s1 − p̂‖|` and `|s8 − p̂·(R v̂)|`. Zero for filters whose
    /// state has no augmented entries.
    fn restriction_residuals(&self, attitude: &Mat3) -> (f64, f64);
}

/// Tuning of all filters of a scenario.
#[derive(Clone, Debug)]
pub struct FilterSettings {
    pub proposed: FilterTuning,
    pub ekf: ChainTuning,
    pub algebraic: ChainTuning,
    pub guess: InitialGuess,
}

impl FilterSettings {
    pub fn paper(n_landmarks: usize, range_interval: f64) -> Self {
        Self {
            proposed: FilterTuning::paper(n_landmarks, range_interval),
            ekf: ChainTuning::ekf_default(),
            algebraic: ChainTuning::algebraic_default(),
            guess: InitialGuess::default(),
        }
    }
}

pub fn build_filter(
    kind: FilterKind,
    first: &SensorFrame,
    landmarks: &LandmarkSet,
    settings: &FilterSettings,
) -> Result<Box<dyn NavFilter>> {
    Ok(match kind {
        FilterKind::Proposed => Box::new(ProposedFilter::new(
            first,
            landmarks,
            &settings.proposed,
            &settings.guess,
        )?),
        FilterKind::Ekf => Box::new(Ekf::new(first, landmarks, settings.ekf.clone(), &settings.guess)?),
        FilterKind::Algebraic => Box::new(LinearKf::new(
            first,
            landmarks,
            settings.algebraic.clone(),
            &settings.guess,
        )?),
    })
}

pub(crate) fn innovation_rms(innovation: &[f64]) -> f64 {
    if innovation.is_empty() {
        return 0.0;
    }
    (innovation.iter().map(|e| e * e).sum::<f64>() / innovation.len() as f64).sqrt()
}
