//! Observability tooling for the augmented model.
//!
//! The transition matrix of `A(t)` is obtained by integrating
//! `Phi' = A(t) Phi` with an adaptive Dormand–Prince 5(4) scheme. The
//! observability Gramian is then accumulated with the trapezoidal rule on the
//! sampling grid where the output matrix is defined.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Serialize, Serializer};

use crate::geo3d::Vec3;
use crate::ltv::{build_output, build_transformed_a, RangeGuard, StateLayout};
use crate::truthsim::{LandmarkSet, SensorLog, Trajectory};
use crate::{Error, Result};

/// True iff the landmarks span three-space, i.e. the differences `s_i − s_1`
/// have rank 3.
pub fn noncoplanar_check(landmarks: &LandmarkSet) -> bool {
    let s = landmarks.positions();
    if s.len() < 4 {
        return false;
    }
    let diffs = DMatrix::from_fn(3, s.len() - 1, |row, col| s[col + 1][row] - s[0][row]);
    let sv = diffs.singular_values();
    let spread = sv.max();
    let tol = 1e-9 * spread.max(1.0);
    sv.iter().filter(|&&x| x > tol).count() == 3
}

/// Input `u(t) = R(t) a(t)` and ranges `r_i(t)` driving `A(t)` and `C(t)`.
pub trait LtvSignals {
    fn input(&self, t: f64) -> Vec3;
    fn ranges(&self, t: f64) -> Vec<f64>;
}

/// Exact signals of an analytic trajectory.
pub struct TrajectorySignals<'a, T: Trajectory + ?Sized> {
    pub trajectory: &'a T,
    pub landmarks: &'a LandmarkSet,
}

impl<'a, T: Trajectory + ?Sized> TrajectorySignals<'a, T> {
    pub fn new(trajectory: &'a T, landmarks: &'a LandmarkSet) -> Self {
        Self { trajectory, landmarks }
    }
}

impl<T: Trajectory + ?Sized> LtvSignals for TrajectorySignals<'_, T> {
    fn input(&self, t: f64) -> Vec3 {
        self.trajectory.state(t).inertial_input()
    }

    fn ranges(&self, t: f64) -> Vec<f64> {
        self.landmarks.ranges_from(&self.trajectory.state(t).p)
    }
}

/// Recorded signals, linearly interpolated and clamped at the ends.
#[derive(Clone, Debug)]
pub struct SampledSignals {
    input_times: Vec<f64>,
    inputs: Vec<Vec3>,
    range_times: Vec<f64>,
    ranges: Vec<Vec<f64>>,
}

fn bracket(times: &[f64], t: f64) -> (usize, usize, f64) {
    let last = times.len() - 1;
    if t <= times[0] {
        return (0, 0, 0.0);
    }
    if t >= times[last] {
        return (last, last, 0.0);
    }
    let hi = times.partition_point(|&x| x <= t);
    let lo = hi - 1;
    (lo, hi, (t - times[lo]) / (times[hi] - times[lo]))
}

impl SampledSignals {
    pub fn new(input_times: Vec<f64>, inputs: Vec<Vec3>, range_times: Vec<f64>, ranges: Vec<Vec<f64>>) -> Result<Self> {
        if input_times.is_empty() || input_times.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: input_times.len(),
                actual: inputs.len(),
            });
        }
        if range_times.is_empty() || range_times.len() != ranges.len() {
            return Err(Error::DimensionMismatch {
                expected: range_times.len(),
                actual: ranges.len(),
            });
        }
        Ok(Self {
            input_times,
            inputs,
            range_times,
            ranges,
        })
    }

    /// Measured signals of a sensor log: `u = R_meas a_meas` at the IMU rate
    /// and the measured ranges at the range rate.
    pub fn from_log(log: &SensorLog) -> Result<Self> {
        Self::new(
            log.imu.iter().map(|s| s.t).collect(),
            log.imu.iter().map(|s| s.attitude * s.accel).collect(),
            log.fixes.iter().map(|f| f.t).collect(),
            log.fixes.iter().map(|f| f.ranges.clone()).collect(),
        )
    }
}

impl LtvSignals for SampledSignals {
    fn input(&self, t: f64) -> Vec3 {
        let (lo, hi, tau) = bracket(&self.input_times, t);
        self.inputs[lo] * (1.0 - tau) + self.inputs[hi] * tau
    }

    fn ranges(&self, t: f64) -> Vec<f64> {
        let (lo, hi, tau) = bracket(&self.range_times, t);
        self.ranges[lo]
            .iter()
            .zip(&self.ranges[hi])
            .map(|(a, b)| a * (1.0 - tau) + b * tau)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            max_step: 0.5,
            max_steps: 1_000_000,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `Phi' = A(t) Phi` forward in time.
pub struct TransitionPropagator<'a, S: LtvSignals + ?Sized> {
    signals: &'a S,
    landmarks: &'a LandmarkSet,
    guard: RangeGuard,
    options: IntegratorOptions,
    t: f64,
    phi: DMatrix<f64>,
    h: f64,
    steps: usize,
}

impl<'a, S: LtvSignals + ?Sized> TransitionPropagator<'a, S> {
    pub fn new(
        signals: &'a S,
        landmarks: &'a LandmarkSet,
        guard: RangeGuard,
        options: IntegratorOptions,
        t0: f64,
    ) -> Self {
        let n = StateLayout::new(landmarks.len()).dim();
        Self {
            signals,
            landmarks,
            guard,
            options,
            t: t0,
            phi: DMatrix::identity(n, n),
            h: options.max_step.min(0.01),
            steps: 0,
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// `Phi(t, t0)` at the current time.
    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    fn system(&self, t: f64) -> Result<DMatrix<f64>> {
        build_transformed_a(
            &self.signals.input(t),
            &self.signals.ranges(t),
            self.landmarks,
            self.guard,
        )
    }

    pub fn advance_to(&mut self, target: f64) -> Result<&DMatrix<f64>> {
        if target < self.t {
            return Err(Error::IntegrationFailure(format!(
                "cannot integrate backwards from {} to {target}",
                self.t
            )));
        }
        let opts = self.options;
        let mut k1 = self.system(self.t)? * &self.phi;
        while target - self.t > 1e-14 * target.abs().max(1.0) {
            if self.steps >= opts.max_steps {
                return Err(Error::IntegrationFailure(format!(
                    "step budget of {} exhausted",
                    opts.max_steps
                )));
            }
            let h = self.h.min(opts.max_step).min(target - self.t);
            let mut k: Vec<DMatrix<f64>> = Vec::with_capacity(7);
            k.push(k1.clone());
            for stage in 1..7 {
                let mut y = self.phi.clone();
                for (j, kj) in k.iter().enumerate() {
                    if A[stage][j] != 0.0 {
                        y += kj * (h * A[stage][j]);
                    }
                }
                k.push(self.system(self.t + C[stage] * h)? * y);
            }
            // The seventh stage is evaluated at the fifth-order solution.
            let mut y_new = self.phi.clone();
            let mut err = DMatrix::zeros(self.phi.nrows(), self.phi.ncols());
            for (j, kj) in k.iter().enumerate().take(6) {
                y_new += kj * (h * A[6][j]);
            }
            for (j, kj) in k.iter().enumerate() {
                let diff = if j < 6 { A[6][j] } else { 0.0 } - B4[j];
                if diff != 0.0 {
                    err += kj * (h * diff);
                }
            }
            let mut ratio: f64 = 0.0;
            for ((e, y0), y1) in err.iter().zip(self.phi.iter()).zip(y_new.iter()) {
                let scale = opts.atol + opts.rtol * y0.abs().max(y1.abs());
                ratio = ratio.max(e.abs() / scale);
            }
            if !ratio.is_finite() {
                return Err(Error::IntegrationFailure(format!(
                    "non-finite error estimate at t = {}",
                    self.t
                )));
            }
            self.steps += 1;
            if ratio <= 1.0 {
                self.t += h;
                self.phi = y_new;
                k1 = k.pop().unwrap();
            }
            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            self.h = h * factor;
            if self.h < 1e-12 {
                return Err(Error::IntegrationFailure(format!(
                    "step size underflow at t = {}",
                    self.t
                )));
            }
        }
        self.t = target;
        Ok(&self.phi)
    }
}

/// `Phi(tf, t0)` of the augmented model along `signals`.
pub fn transition_matrix<S: LtvSignals + ?Sized>(
    t0: f64,
    tf: f64,
    signals: &S,
    landmarks: &LandmarkSet,
    guard: RangeGuard,
    options: IntegratorOptions,
) -> Result<DMatrix<f64>> {
    let mut prop = TransitionPropagator::new(signals, landmarks, guard, options, t0);
    prop.advance_to(tf)?;
    Ok(prop.phi)
}

fn serialize_rows<S: Serializer>(m: &DMatrix<f64>, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(serializer)
}

#[derive(Clone, Debug, Serialize)]
pub struct GramianReport {
    #[serde(serialize_with = "serialize_rows")]
    pub w: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `max / min` eigenvalue; absent when `W` is not positive definite.
    pub condition_number: Option<f64>,
    pub interval: (f64, f64),
}

impl GramianReport {
    fn from_matrix(w: DMatrix<f64>, interval: (f64, f64)) -> Self {
        let sym = (&w + w.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym).eigenvalues;
        let min_eigenvalue = eig.min();
        let max_eigenvalue = eig.max();
        let condition_number = (min_eigenvalue > 0.0).then(|| max_eigenvalue / min_eigenvalue);
        Self {
            w,
            min_eigenvalue,
            max_eigenvalue,
            condition_number,
            interval,
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue > 0.0
    }
}

/// Sampling grid `t0, t0 + dt, …, tf` (the last interval may be shorter).
fn sample_grid(t0: f64, tf: f64, dt: f64) -> Vec<f64> {
    let mut grid = vec![t0];
    let mut k = 1usize;
    loop {
        let t = t0 + k as f64 * dt;
        if t >= tf - 1e-9 * dt {
            break;
        }
        grid.push(t);
        k += 1;
    }
    if tf > t0 {
        grid.push(tf);
    }
    grid
}

/// Observability Gramian `∫ Phiᵀ Cᵀ C Phi dt` on `[t0, tf]`, trapezoidal on
/// a grid of spacing `sample_dt`.
pub fn gramian<S: LtvSignals + ?Sized>(
    t0: f64,
    tf: f64,
    sample_dt: f64,
    signals: &S,
    landmarks: &LandmarkSet,
    guard: RangeGuard,
    options: IntegratorOptions,
) -> Result<GramianReport> {
    if tf < t0 {
        return Err(Error::Validation(format!("gramian interval is reversed: [{t0}, {tf}]")));
    }
    if !(sample_dt > 0.0) {
        return Err(Error::Validation(format!(
            "sample interval must be > 0, got {sample_dt}"
        )));
    }
    let n = StateLayout::new(landmarks.len()).dim();
    let mut w = DMatrix::zeros(n, n);
    let grid = sample_grid(t0, tf, sample_dt);
    let mut prop = TransitionPropagator::new(signals, landmarks, guard, options, t0);
    let integrand = |phi: &DMatrix<f64>, t: f64| -> Result<DMatrix<f64>> {
        let (c, _) = build_output(&signals.ranges(t), landmarks, guard)?;
        let c_phi = c * phi;
        Ok(c_phi.transpose() * c_phi)
    };
    let mut previous = integrand(prop.phi(), t0)?;
    for pair in grid.windows(2) {
        let (ta, tb) = (pair[0], pair[1]);
        let phi = prop.advance_to(tb)?.clone();
        let current = integrand(&phi, tb)?;
        w += (&previous + &current) * (0.5 * (tb - ta));
        previous = current;
    }
    Ok(GramianReport::from_matrix(w, (t0, tf)))
}

/// Gramians of consecutive windows of length `window` covering `[t0, tf]`.
#[allow(clippy::too_many_arguments)]
pub fn gramian_windows<S: LtvSignals + ?Sized>(
    t0: f64,
    tf: f64,
    window: f64,
    sample_dt: f64,
    signals: &S,
    landmarks: &LandmarkSet,
    guard: RangeGuard,
    options: IntegratorOptions,
) -> Result<Vec<GramianReport>> {
    if !(window > 0.0) {
        return Err(Error::Validation(format!("window must be > 0, got {window}")));
    }
    let count = ((tf - t0) / window + 1e-9).floor() as usize;
    (0..count)
        .map(|k| {
            let start = t0 + k as f64 * window;
            gramian(start, start + window, sample_dt, signals, landmarks, guard, options)
        })
        .collect()
}
