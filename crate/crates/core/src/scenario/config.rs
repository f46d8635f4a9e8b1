use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::filters::{ChainTuning, FilterKind, FilterSettings, FilterTuning, InitialCovariance, InitialGuess};
use crate::geo3d::Vec3;
use crate::ltv::{RangeGuard, StateLayout};
use crate::obsv::noncoplanar_check;
use crate::truthsim::{HelixParams, HelixTrajectory, LandmarkSet, NoiseConfig, SensorRates};
use crate::{Error, Result};

/// Tuning of the augmented filter and the two baselines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningConfig {
    /// `Qx = qx · I`.
    pub qx: f64,
    /// Diagonal of `Qy` for the range outputs.
    pub qy_range: f64,
    /// Diagonal of `Qy` for the pairwise outputs.
    pub qy_pair: f64,
    pub initial: InitialCovariance,
    pub ekf: ChainTuning,
    pub algebraic: ChainTuning,
}

impl Default for TuningConfig {
    fn default() -> Self {
        Self {
            qx: 1e-5,
            qy_range: 1.0,
            qy_pair: 2.0,
            initial: InitialCovariance::default(),
            ekf: ChainTuning::ekf_default(),
            algebraic: ChainTuning::algebraic_default(),
        }
    }
}

/// Scenario description as read from JSON. Every field is optional; the
/// defaults reproduce the reference survey.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub landmarks: Vec<Vec3>,
    pub noise: NoiseConfig,
    pub rates: SensorRates,
    /// Simulated time (s).
    pub duration: f64,
    pub trajectory: HelixParams,
    pub filters: Vec<FilterKind>,
    pub tuning: TuningConfig,
    pub initial_guess: InitialGuess,
    /// Smallest admissible range (m).
    pub range_guard: f64,
    pub monte_carlo_runs: usize,
    /// Run `k` draws its noise from seed `seed + k`.
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            landmarks: LandmarkSet::paper().positions().to_vec(),
            noise: NoiseConfig::paper(),
            rates: SensorRates::default(),
            duration: 600.0,
            trajectory: HelixParams::default(),
            filters: vec![FilterKind::Proposed],
            tuning: TuningConfig::default(),
            initial_guess: InitialGuess::default(),
            range_guard: 1.0,
            monte_carlo_runs: 1,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn landmark_set(&self) -> LandmarkSet {
        LandmarkSet::new(self.landmarks.clone())
    }

    pub fn trajectory(&self) -> HelixTrajectory {
        HelixTrajectory::new(self.trajectory.clone())
    }

    pub fn guard(&self) -> Result<RangeGuard> {
        RangeGuard::new(self.range_guard)
    }

    /// Number of range epochs after the initial one.
    pub fn epochs(&self) -> usize {
        (self.duration * self.rates.range_hz).round() as usize
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }

    pub fn settings(&self) -> Result<FilterSettings> {
        let n = self.landmarks.len();
        let mut proposed = FilterTuning::diagonal(
            n,
            self.tuning.qx,
            self.tuning.qy_range,
            self.tuning.qy_pair,
            1.0 / self.rates.range_hz,
        );
        proposed.initial = self.tuning.initial.clone();
        proposed.guard = self.guard()?;
        Ok(FilterSettings {
            proposed,
            ekf: self.tuning.ekf.clone(),
            algebraic: self.tuning.algebraic.clone(),
            guess: self.initial_guess.clone(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return fail(format!("duration must be > 0, got {}", self.duration));
        }
        self.rates.imu_per_range()?;
        if self.epochs() == 0 {
            return fail(format!(
                "duration {} s holds no range epoch at {} Hz",
                self.duration, self.rates.range_hz
            ));
        }
        if self.monte_carlo_runs < 1 {
            return fail("monte_carlo_runs must be >= 1".into());
        }
        if self.filters.is_empty() {
            return fail("filters must name at least one filter".into());
        }
        self.noise.validate()?;
        self.guard()?;
        if self.landmarks.is_empty() {
            return fail("at least one landmark is required".into());
        }
        if self.landmarks.iter().any(|s| !s.iter().all(|c| c.is_finite())) {
            return fail("landmark coordinates must be finite".into());
        }
        let needs_3d = self
            .filters
            .iter()
            .any(|k| matches!(k, FilterKind::Proposed | FilterKind::Algebraic));
        if needs_3d && !noncoplanar_check(&self.landmark_set()) {
            return fail("landmarks must contain at least 4 non-coplanar points".into());
        }
        for (name, v) in [
            ("tuning.qx", self.tuning.qx),
            ("tuning.qy_range", self.tuning.qy_range),
            ("tuning.qy_pair", self.tuning.qy_pair),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        let initial = &self.tuning.initial;
        let p0 = [initial.position, initial.velocity, initial.gravity, initial.range];
        if p0.iter().chain(&initial.scalars).any(|v| !(v.is_finite() && *v > 0.0)) {
            return fail("initial covariance entries must be finite and > 0".into());
        }
        for (name, t) in [("ekf", &self.tuning.ekf), ("algebraic", &self.tuning.algebraic)] {
            let entries = [
                t.process_intensity,
                t.measurement_variance,
                t.p0_position,
                t.p0_velocity,
                t.p0_gravity,
            ];
            if entries.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || t.measurement_variance <= 0.0 {
                return fail(format!(
                    "tuning.{name} entries must be finite and >= 0 with a positive measurement variance"
                ));
            }
        }
        self.settings()?
            .proposed
            .validate(StateLayout::new(self.landmarks.len()))
    }
}

/// Parses and validates a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_reference_scenario() {
        let config = parse_config("{}").unwrap();
        assert_eq!(config, ScenarioConfig::default());
        assert_eq!(config.landmarks.len(), 4);
        assert_eq!(config.landmarks[3], Vec3::new(0.0, 0.0, 500.0));
        assert_eq!(config.noise, NoiseConfig::paper());
        assert_eq!(config.epochs(), 600);
    }

    #[test]
    fn negative_sigma_is_rejected() {
        let err = parse_config(r#"{"noise": {"sigma_range": -1}}"#).unwrap_err();
        assert!(
            matches!(err, Error::Validation(ref m) if m.contains("sigma_range")),
            "{err}"
        );
    }

    #[test]
    fn range_rate_above_imu_rate_is_rejected() {
        let err = parse_config(r#"{"rates": {"imu_hz": 1, "range_hz": 10}}"#).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        let err = parse_config(r#"{"rates": {"imu_hz": 100, "range_hz": 3}}"#).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_config("{\n  \"duration\": 10,\n  \"seed\": ,\n}").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        let err = parse_config(r#"{"durration": 10}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { ref message, .. } if message.contains("durration")));
    }

    #[test]
    fn coplanar_landmarks_are_rejected_for_augmented_filter() {
        let text = r#"{"landmarks": [[0,0,1000],[1000,0,1000],[0,1000,1000],[1000,1000,1000]]}"#;
        assert!(parse_config(text).is_err());
        let ekf_only =
            r#"{"filters": ["ekf"], "landmarks": [[0,0,1000],[1000,0,1000],[0,1000,1000],[1000,1000,1000]]}"#;
        assert!(parse_config(ekf_only).is_ok());
    }

    #[test]
    fn zero_runs_are_rejected() {
        assert!(parse_config(r#"{"monte_carlo_runs": 0}"#).is_err());
        assert!(parse_config(r#"{"duration": 0}"#).is_err());
    }
}
