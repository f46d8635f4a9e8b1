//! Augmented LTV Kalman filter in body coordinates.
//!
//! The state is `chi = [p, v, g, r_1 … r_nL, s8, s9, s10, s11]` with `p`
//! inertial and `v`, `g` in body axes. Between range epochs the mean is
//! integrated with RK4 on `chi' = 𝒜(t) chi + B a`, where `𝒜` uses the
//! filter's own range states as denominators; the covariance goes through
//! `Phi_d = I + 𝒜 dt + 𝒜² dt² / 2` with `Q_d = Qx dt`. At range epochs the
//! linear output model built from the measured ranges is applied with a
//! Joseph-form update and `R = Qy / range_interval`.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::chain::DIVERGENCE_BOUND;
use super::{innovation_rms, FilterKind, InitialGuess, NavEstimate, NavFilter};
use crate::geo3d::{interpolate_attitude, Mat3, Vec3};
use crate::ltv::{body_derivative, build_body_a, build_output, RangeGuard, StateLayout};
use crate::truthsim::{ImuSample, LandmarkSet, SensorFrame};
use crate::{Error, Result};

/// Initial variances of the state blocks.
///
/// Sized for position errors up to about 2 km and velocity errors up to
/// 5 m/s. The scalar entries follow from the same bounds: `s8 ≈ p·(Rv)` and
/// `s9 ≈ p·(Rg)` start off by up to `‖p̃‖ ‖v‖` and `‖p̃‖ ‖g‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialCovariance {
    pub position: f64,
    pub velocity: f64,
    pub gravity: f64,
    pub range: f64,
    /// `s8`, `s9`, `s10`, `s11`.
    pub scalars: [f64; 4],
}

impl Default for InitialCovariance {
    fn default() -> Self {
        Self {
            position: 1e6,
            velocity: 25.0,
            gravity: 1.0,
            range: 1.0,
            scalars: [1e8, 1e9, 1e4, 1e4],
        }
    }
}

impl InitialCovariance {
    pub fn matrix(&self, layout: StateLayout) -> DMatrix<f64> {
        let mut diag = DVector::zeros(layout.dim());
        for i in 0..3 {
            diag[StateLayout::POSITION + i] = self.position;
            diag[StateLayout::VELOCITY + i] = self.velocity;
            diag[StateLayout::GRAVITY + i] = self.gravity;
        }
        for i in 0..layout.n_landmarks {
            diag[layout.range(i)] = self.range;
        }
        for (k, v) in self.scalars.iter().enumerate() {
            diag[layout.s8() + k] = *v;
        }
        DMatrix::from_diagonal(&diag)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterTuning {
    /// State disturbance intensity.
    pub qx: DMatrix<f64>,
    /// Output noise intensity, ranges first, then pairs in lexicographic order.
    pub qy: DMatrix<f64>,
    /// Spacing of range epochs (s); converts `qy` to a covariance.
    pub range_interval: f64,
    pub initial: InitialCovariance,
    pub guard: RangeGuard,
}

impl FilterTuning {
    pub fn diagonal(n_landmarks: usize, qx: f64, qy_range: f64, qy_pair: f64, range_interval: f64) -> Self {
        let layout = StateLayout::new(n_landmarks);
        let qy = DVector::from_fn(
            layout.output_dim(),
            |i, _| if i < n_landmarks { qy_range } else { qy_pair },
        );
        Self {
            qx: DMatrix::identity(layout.dim(), layout.dim()) * qx,
            qy: DMatrix::from_diagonal(&qy),
            range_interval,
            initial: InitialCovariance::default(),
            guard: RangeGuard::default(),
        }
    }

    /// `Qx = 1e-5 I`, `Qy = diag(1, …, 1, 2, …, 2)`.
    pub fn paper(n_landmarks: usize, range_interval: f64) -> Self {
        Self::diagonal(n_landmarks, 1e-5, 1.0, 2.0, range_interval)
    }

    pub fn validate(&self, layout: StateLayout) -> Result<()> {
        let (n, m) = (layout.dim(), layout.output_dim());
        if self.qx.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.qx.nrows(),
            });
        }
        if self.qy.shape() != (m, m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: self.qy.nrows(),
            });
        }
        if !(self.range_interval > 0.0) {
            return Err(Error::Validation(format!(
                "range interval must be > 0, got {}",
                self.range_interval
            )));
        }
        let asym = |q: &DMatrix<f64>| (q - q.transpose()).amax();
        if asym(&self.qx) > 1e-12 || asym(&self.qy) > 1e-12 {
            return Err(Error::Validation("Qx and Qy must be symmetric".into()));
        }
        if self.qx.clone().symmetric_eigenvalues().min() < 0.0 {
            return Err(Error::Validation("Qx must be positive semidefinite".into()));
        }
        if Cholesky::new(self.qy.clone()).is_none() {
            return Err(Error::Validation("Qy must be positive definite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedState {
    pub t: f64,
    pub chi: DVector<f64>,
    pub p: DMatrix<f64>,
    pub layout: StateLayout,
    /// Innovation of the most recent update.
    pub innovation: Option<DVector<f64>>,
}

impl AugmentedState {
    pub fn position(&self) -> Vec3 {
        self.chi.fixed_rows::<3>(StateLayout::POSITION).into_owned()
    }

    pub fn velocity(&self) -> Vec3 {
        self.chi.fixed_rows::<3>(StateLayout::VELOCITY).into_owned()
    }

    pub fn gravity(&self) -> Vec3 {
        self.chi.fixed_rows::<3>(StateLayout::GRAVITY).into_owned()
    }

    pub fn ranges(&self) -> Vec<f64> {
        (0..self.layout.n_landmarks)
            .map(|i| self.chi[self.layout.range(i)])
            .collect()
    }

    fn check_divergence(&self) -> Result<()> {
        match self
            .chi
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() <= DIVERGENCE_BOUND))
        {
            Some((index, &value)) => Err(Error::DivergenceDetected {
                t: self.t,
                index,
                value,
            }),
            None => Ok(()),
        }
    }
}

/// Filter state at the first frame with the default initial guess.
pub fn init_filter(
    first_frame: &SensorFrame,
    landmarks: &LandmarkSet,
    tuning: &FilterTuning,
) -> Result<AugmentedState> {
    init_filter_with_guess(first_frame, landmarks, tuning, &InitialGuess::default())
}

/// Range states start at the first measured ranges; `s8 … s10` at zero and
/// `s11` at `‖g_guess‖²`.
pub fn init_filter_with_guess(
    first_frame: &SensorFrame,
    landmarks: &LandmarkSet,
    tuning: &FilterTuning,
    guess: &InitialGuess,
) -> Result<AugmentedState> {
    let layout = StateLayout::new(landmarks.len());
    tuning.validate(layout)?;
    if first_frame.ranges.len() != landmarks.len() {
        return Err(Error::DimensionMismatch {
            expected: landmarks.len(),
            actual: first_frame.ranges.len(),
        });
    }
    tuning.guard.check(&first_frame.ranges)?;
    let mut chi = DVector::zeros(layout.dim());
    chi.fixed_rows_mut::<3>(StateLayout::POSITION)
        .copy_from(&guess.position);
    chi.fixed_rows_mut::<3>(StateLayout::VELOCITY)
        .copy_from(&guess.velocity);
    chi.fixed_rows_mut::<3>(StateLayout::GRAVITY).copy_from(&guess.gravity);
    for (i, r) in first_frame.ranges.iter().enumerate() {
        chi[layout.range(i)] = *r;
    }
    chi[layout.s11()] = guess.gravity.norm_squared();
    Ok(AugmentedState {
        t: first_frame.t,
        chi,
        p: tuning.initial.matrix(layout),
        layout,
        innovation: None,
    })
}

struct Input {
    accel: Vec3,
    gyro: Vec3,
    attitude: Mat3,
}

fn propagate(
    state: &AugmentedState,
    dt: f64,
    inputs: [&Input; 3],
    landmarks: &LandmarkSet,
    tuning: &FilterTuning,
) -> Result<AugmentedState> {
    if !(dt > 0.0) {
        return Err(Error::Validation(format!("prediction interval must be > 0, got {dt}")));
    }
    let layout = state.layout;
    let guard = tuning.guard;
    let f = |chi: &DVector<f64>, input: &Input| -> Result<DVector<f64>> {
        let ranges: Vec<f64> = (0..layout.n_landmarks).map(|i| chi[layout.range(i)]).collect();
        guard.check(&ranges)?;
        Ok(body_derivative(
            chi,
            &input.accel,
            &input.gyro,
            &input.attitude,
            landmarks,
        ))
    };
    let [start, mid, end] = inputs;
    let chi = &state.chi;
    let k1 = f(chi, start)?;
    let k2 = f(&(chi + &k1 * (dt / 2.0)), mid)?;
    let k3 = f(&(chi + &k2 * (dt / 2.0)), mid)?;
    let k4 = f(&(chi + &k3 * dt), end)?;
    let chi_next = chi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);

    let a = build_body_a(
        &start.accel,
        &start.gyro,
        &start.attitude,
        &state.ranges(),
        landmarks,
        guard,
    )?;
    let n = layout.dim();
    let phi = DMatrix::identity(n, n) + &a * dt + (&a * &a) * (dt * dt / 2.0);
    let p = &phi * &state.p * phi.transpose() + &tuning.qx * dt;
    let next = AugmentedState {
        t: state.t + dt,
        chi: chi_next,
        p: (&p + p.transpose()) * 0.5,
        layout,
        innovation: state.innovation.clone(),
    };
    next.check_divergence()?;
    Ok(next)
}

/// Time update with the inertial and attitude readings held constant over `dt`.
pub fn predict(
    state: &AugmentedState,
    accel: &Vec3,
    gyro: &Vec3,
    attitude: &Mat3,
    dt: f64,
    landmarks: &LandmarkSet,
    tuning: &FilterTuning,
) -> Result<AugmentedState> {
    let input = Input {
        accel: *accel,
        gyro: *gyro,
        attitude: *attitude,
    };
    propagate(state, dt, [&input, &input, &input], landmarks, tuning)
}

/// Time update between two IMU samples, interpolating the readings
/// (linearly for accelerometer and gyro, geodesically for attitude).
pub fn predict_between(
    state: &AugmentedState,
    from: &ImuSample,
    to: &ImuSample,
    landmarks: &LandmarkSet,
    tuning: &FilterTuning,
) -> Result<AugmentedState> {
    let start = Input {
        accel: from.accel,
        gyro: from.gyro,
        attitude: from.attitude,
    };
    let mid = Input {
        accel: (from.accel + to.accel) * 0.5,
        gyro: (from.gyro + to.gyro) * 0.5,
        attitude: interpolate_attitude(&from.attitude, &to.attitude, 0.5),
    };
    let end = Input {
        accel: to.accel,
        gyro: to.gyro,
        attitude: to.attitude,
    };
    propagate(state, to.t - from.t, [&start, &mid, &end], landmarks, tuning)
}

/// Measurement update with the ranges of `frame`.
pub fn update(
    state: &AugmentedState,
    frame: &SensorFrame,
    landmarks: &LandmarkSet,
    tuning: &FilterTuning,
) -> Result<AugmentedState> {
    let (c, y) = build_output(&frame.ranges, landmarks, tuning.guard)?;
    let innovation = &y - &c * &state.chi;
    let r = &tuning.qy / tuning.range_interval;
    let pc_t = &state.p * c.transpose();
    let s = &c * &pc_t + &r;
    let chol = Cholesky::new(s).ok_or(Error::SingularInnovation)?;
    let k = chol.solve(&pc_t.transpose()).transpose();
    let chi = &state.chi + &k * &innovation;
    let n = state.layout.dim();
    let ikc = DMatrix::identity(n, n) - &k * &c;
    let p = &ikc * &state.p * ikc.transpose() + &k * r * k.transpose();
    let next = AugmentedState {
        t: state.t,
        chi,
        p: (&p + p.transpose()) * 0.5,
        layout: state.layout,
        innovation: Some(innovation),
    };
    next.check_divergence()?;
    Ok(next)
}

pub fn extract_nav(state: &AugmentedState) -> NavEstimate {
    NavEstimate {
        t: state.t,
        p_hat: state.position(),
        v_hat: state.velocity(),
        g_hat: state.gravity(),
    }
}

/// `|x4 − ‖s1 − p̂‖|` and `|s8 − p̂·(R v̂)|`.
pub fn restriction_residuals(state: &AugmentedState, landmarks: &LandmarkSet, attitude: &Mat3) -> (f64, f64) {
    let p = state.position();
    let range = match landmarks.positions().first() {
        Some(s1) => (state.chi[state.layout.range(0)] - (s1 - p).norm()).abs(),
        None => 0.0,
    };
    let s8 = (state.chi[state.layout.s8()] - p.dot(&(attitude * state.velocity()))).abs();
    (range, s8)
}

/// [`NavFilter`] wrapper owning the state, landmarks and tuning.
#[derive(Clone, Debug)]
pub struct ProposedFilter {
    pub state: AugmentedState,
    landmarks: LandmarkSet,
    tuning: FilterTuning,
}

impl ProposedFilter {
    pub fn new(
        first: &SensorFrame,
        landmarks: &LandmarkSet,
        tuning: &FilterTuning,
        guess: &InitialGuess,
    ) -> Result<Self> {
        Ok(Self {
            state: init_filter_with_guess(first, landmarks, tuning, guess)?,
            landmarks: landmarks.clone(),
            tuning: tuning.clone(),
        })
    }
}

impl NavFilter for ProposedFilter {
    fn kind(&self) -> FilterKind {
        FilterKind::Proposed
    }

    fn propagate(&mut self, from: &ImuSample, to: &ImuSample) -> Result<()> {
        self.state = predict_between(&self.state, from, to, &self.landmarks, &self.tuning)?;
        Ok(())
    }

    fn correct(&mut self, fix: &SensorFrame) -> Result<f64> {
        self.state = update(&self.state, fix, &self.landmarks, &self.tuning)?;
        Ok(self
            .state
            .innovation
            .as_ref()
            .map_or(0.0, |e| innovation_rms(e.as_slice())))
    }

    fn nav(&self) -> NavEstimate {
        extract_nav(&self.state)
    }

    fn range_estimates(&self) -> Vec<f64> {
        self.state.ranges()
    }

    fn restriction_residuals(&self, attitude: &Mat3) -> (f64, f64) {
        restriction_residuals(&self.state, &self.landmarks, attitude)
    }
}
