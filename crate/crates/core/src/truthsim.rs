//! Ground-truth trajectories and the sensor model.
//!
//! Trajectories are analytic, so every [`TruthState`] is exactly consistent
//! with the kinematics `p_dot = R v`, `a = v_dot + S(w) v − g` and
//! `g = Rᵀ g_inertial`. Sensor frames add independent Gaussian noise to the
//! ranges, the accelerometer and gyro triads, and the Euler angles of the
//! attitude.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::geo3d::{euler_rates_to_body_rate, euler_to_rotation, rotation_to_euler, EulerAngles, Mat3, Vec3};
use crate::ltv::RangeGuard;
use crate::{Error, Result};

/// Inertial positions of the acoustic transponders.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkSet(Vec<Vec3>);

impl LandmarkSet {
    pub fn new(positions: Vec<Vec3>) -> Self {
        Self(positions)
    }

    /// The four-transponder layout used throughout the reference scenario.
    pub fn paper() -> Self {
        Self(vec![
            Vec3::new(0.0, 0.0, 1000.0),
            Vec3::new(1000.0, 0.0, 1000.0),
            Vec3::new(0.0, 1000.0, 1000.0),
            Vec3::new(0.0, 0.0, 500.0),
        ])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec3> {
        self.0.iter()
    }

    /// Exact ranges `‖s_i − p‖`.
    pub fn ranges_from(&self, p: &Vec3) -> Vec<f64> {
        self.0.iter().map(|s| (s - p).norm()).collect()
    }

    /// Landmarks reordered so that entry `k` is the old entry `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self(order.iter().map(|&i| self.0[i]).collect())
    }
}

impl Default for LandmarkSet {
    fn default() -> Self {
        Self::paper()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruthState {
    pub t: f64,
    /// Inertial position (m).
    pub p: Vec3,
    /// Body velocity (m/s).
    pub v: Vec3,
    /// Gravity in body coordinates (m/s²).
    pub g: Vec3,
    /// Body-to-inertial rotation.
    pub r: Mat3,
    /// Body angular rate (rad/s).
    pub w: Vec3,
    /// Noise-free accelerometer reading (m/s²).
    pub a: Vec3,
}

impl TruthState {
    pub fn inertial_velocity(&self) -> Vec3 {
        self.r * self.v
    }

    pub fn inertial_gravity(&self) -> Vec3 {
        self.r * self.g
    }

    /// `u = R a`, the input of the transformed kinematics.
    pub fn inertial_input(&self) -> Vec3 {
        self.r * self.a
    }
}

pub trait Trajectory {
    fn state(&self, t: f64) -> TruthState;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HelixParams {
    /// Position at `t = 0` (m).
    pub start: Vec3,
    pub radius: f64,
    /// Time for one full turn (s).
    pub period: f64,
    pub vertical_speed: f64,
    /// Roll oscillation amplitude (rad) and period (s).
    pub roll_amplitude: f64,
    pub roll_period: f64,
    /// Pitch oscillation amplitude (rad) and period (s).
    pub pitch_amplitude: f64,
    pub pitch_period: f64,
    /// Magnitude of the inertial gravity vector `(0, 0, g)`.
    pub gravity: f64,
}

impl Default for HelixParams {
    fn default() -> Self {
        Self {
            start: Vec3::new(520.0, 500.0, 100.0),
            radius: 20.0,
            period: 100.0,
            vertical_speed: 0.1,
            roll_amplitude: 5f64.to_radians(),
            roll_period: 30.0,
            pitch_amplitude: 3f64.to_radians(),
            pitch_period: 45.0,
            gravity: 9.8,
        }
    }
}

/// Helical survey pattern around `start − (radius, 0, 0)`, heading along the
/// horizontal track with sinusoidal roll and pitch.
#[derive(Clone, Debug, PartialEq)]
pub struct HelixTrajectory {
    pub params: HelixParams,
}

impl HelixTrajectory {
    pub fn new(params: HelixParams) -> Self {
        Self { params }
    }

    pub fn gravity_inertial(&self) -> Vec3 {
        Vec3::new(0.0, 0.0, self.params.gravity)
    }

    fn turn_rate(&self) -> f64 {
        2.0 * PI / self.params.period
    }

    fn euler_and_rates(&self, t: f64) -> (EulerAngles, EulerAngles) {
        let p = &self.params;
        let (wr, wp) = (2.0 * PI / p.roll_period, 2.0 * PI / p.pitch_period);
        let angles = EulerAngles::new(
            p.roll_amplitude * (wr * t).sin(),
            p.pitch_amplitude * (wp * t).sin(),
            self.turn_rate() * t + FRAC_PI_2,
        );
        let rates = EulerAngles::new(
            p.roll_amplitude * wr * (wr * t).cos(),
            p.pitch_amplitude * wp * (wp * t).cos(),
            self.turn_rate(),
        );
        (angles, rates)
    }
}

impl Default for HelixTrajectory {
    fn default() -> Self {
        Self::new(HelixParams::default())
    }
}

impl Trajectory for HelixTrajectory {
    fn state(&self, t: f64) -> TruthState {
        let hp = &self.params;
        let omega = self.turn_rate();
        let (s, c) = (omega * t).sin_cos();
        let p = hp.start + Vec3::new(hp.radius * (c - 1.0), hp.radius * s, hp.vertical_speed * t);
        let p_dot = Vec3::new(-hp.radius * omega * s, hp.radius * omega * c, hp.vertical_speed);
        let p_ddot = Vec3::new(-hp.radius * omega * omega * c, -hp.radius * omega * omega * s, 0.0);

        let (angles, rates) = self.euler_and_rates(t);
        let r = euler_to_rotation(&angles);
        let rt = r.transpose();
        let g_inertial = self.gravity_inertial();
        TruthState {
            t,
            p,
            v: rt * p_dot,
            g: rt * g_inertial,
            r,
            w: euler_rates_to_body_rate(&angles, &rates),
            // a = v_dot + S(w) v − g reduces to Rᵀ (p_ddot − g_inertial).
            a: rt * (p_ddot - g_inertial),
        }
    }
}

/// Standard deviations of the additive sensor noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma_range: f64,
    pub sigma_accel: f64,
    pub sigma_gyro: f64,
    pub sigma_roll_pitch: f64,
    pub sigma_yaw: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl NoiseConfig {
    /// 1 m ranges, 2 mm/s² accelerometers, 0.05 °/s gyros, 0.03 ° roll and
    /// pitch, 0.3 ° yaw.
    pub fn paper() -> Self {
        Self {
            sigma_range: 1.0,
            sigma_accel: 2e-3,
            sigma_gyro: 0.05f64.to_radians(),
            sigma_roll_pitch: 0.03f64.to_radians(),
            sigma_yaw: 0.3f64.to_radians(),
            seed: 0,
        }
    }

    pub fn noiseless() -> Self {
        Self {
            sigma_range: 0.0,
            sigma_accel: 0.0,
            sigma_gyro: 0.0,
            sigma_roll_pitch: 0.0,
            sigma_yaw: 0.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("sigma_range", self.sigma_range),
            ("sigma_accel", self.sigma_accel),
            ("sigma_gyro", self.sigma_gyro),
            ("sigma_roll_pitch", self.sigma_roll_pitch),
            ("sigma_yaw", self.sigma_yaw),
        ];
        for (name, value) in named {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Validation(format!(
                    "noise.{name} must be finite and >= 0, got {value}"
                )));
            }
        }
        Ok(())
    }

    fn attitude_is_exact(&self) -> bool {
        self.sigma_roll_pitch == 0.0 && self.sigma_yaw == 0.0
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::paper()
    }
}

/// Inertial and attitude readings at one IMU/AHRS tick.
#[derive(Clone, Debug, PartialEq)]
pub struct ImuSample {
    pub t: f64,
    pub accel: Vec3,
    pub gyro: Vec3,
    pub attitude: Mat3,
}

/// One epoch with every sensor available.
#[derive(Clone, Debug, PartialEq)]
pub struct SensorFrame {
    pub t: f64,
    pub ranges: Vec<f64>,
    pub accel: Vec3,
    pub gyro: Vec3,
    pub attitude: Mat3,
}

impl SensorFrame {
    pub fn imu(&self) -> ImuSample {
        ImuSample {
            t: self.t,
            accel: self.accel,
            gyro: self.gyro,
            attitude: self.attitude,
        }
    }
}

fn gauss<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sigma * z
}

fn gauss3<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> Vec3 {
    Vec3::new(gauss(rng, sigma), gauss(rng, sigma), gauss(rng, sigma))
}

/// Noisy accelerometer, gyro and attitude readings.
pub fn measure_imu<R: Rng + ?Sized>(truth: &TruthState, noise: &NoiseConfig, rng: &mut R) -> ImuSample {
    let accel = truth.a + gauss3(rng, noise.sigma_accel);
    let gyro = truth.w + gauss3(rng, noise.sigma_gyro);
    let attitude = if noise.attitude_is_exact() {
        truth.r
    } else {
        let e = rotation_to_euler(&truth.r);
        euler_to_rotation(&EulerAngles::new(
            e.roll + gauss(rng, noise.sigma_roll_pitch),
            e.pitch + gauss(rng, noise.sigma_roll_pitch),
            e.yaw + gauss(rng, noise.sigma_yaw),
        ))
    };
    ImuSample {
        t: truth.t,
        accel,
        gyro,
        attitude,
    }
}

/// Full sensor frame: ranges plus the inertial and attitude readings.
pub fn measure<R: Rng + ?Sized>(
    truth: &TruthState,
    landmarks: &LandmarkSet,
    noise: &NoiseConfig,
    guard: RangeGuard,
    rng: &mut R,
) -> Result<SensorFrame> {
    let true_ranges = landmarks.ranges_from(&truth.p);
    guard.check(&true_ranges)?;
    let ranges = true_ranges.iter().map(|r| r + gauss(rng, noise.sigma_range)).collect();
    let imu = measure_imu(truth, noise, rng);
    Ok(SensorFrame {
        t: truth.t,
        ranges,
        accel: imu.accel,
        gyro: imu.gyro,
        attitude: imu.attitude,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorRates {
    pub imu_hz: f64,
    pub range_hz: f64,
}

impl Default for SensorRates {
    fn default() -> Self {
        Self {
            imu_hz: 100.0,
            range_hz: 1.0,
        }
    }
}

impl SensorRates {
    /// IMU ticks per range epoch.
    pub fn imu_per_range(&self) -> Result<usize> {
        if !(self.imu_hz > 0.0 && self.range_hz > 0.0) {
            return Err(Error::Validation(format!(
                "rates must be positive (imu_hz = {}, range_hz = {})",
                self.imu_hz, self.range_hz
            )));
        }
        if self.range_hz > self.imu_hz {
            return Err(Error::Validation(format!(
                "range_hz ({}) must not exceed imu_hz ({})",
                self.range_hz, self.imu_hz
            )));
        }
        let ratio = self.imu_hz / self.range_hz;
        let rounded = ratio.round();
        if (ratio - rounded).abs() > 1e-9 * ratio {
            return Err(Error::Validation(format!(
                "imu_hz ({}) must be an integer multiple of range_hz ({})",
                self.imu_hz, self.range_hz
            )));
        }
        Ok(rounded as usize)
    }
}

/// Simulated sensor record of one run.
///
/// `imu[k]` is the reading at `k / imu_hz`; `fixes[j]` and `truth[j]` belong
/// to the range epoch `j / range_hz` and share the IMU reading at that tick.
#[derive(Clone, Debug)]
pub struct SensorLog {
    pub imu: Vec<ImuSample>,
    pub fixes: Vec<SensorFrame>,
    pub truth: Vec<TruthState>,
    pub imu_per_range: usize,
}

impl SensorLog {
    /// IMU samples spanning range epoch `j − 1` to `j` (inclusive ends).
    pub fn imu_between_fixes(&self, j: usize) -> &[ImuSample] {
        let k = self.imu_per_range;
        &self.imu[(j - 1) * k..=j * k]
    }
}

/// Samples `trajectory` over `[0, duration]` and draws every sensor reading
/// from a single RNG stream seeded by `noise.seed`.
pub fn simulate_sensors<T: Trajectory + ?Sized>(
    trajectory: &T,
    landmarks: &LandmarkSet,
    noise: &NoiseConfig,
    rates: SensorRates,
    duration: f64,
    guard: RangeGuard,
) -> Result<SensorLog> {
    let per_range = rates.imu_per_range()?;
    let epochs = (duration * rates.range_hz).round() as usize;
    let ticks = epochs * per_range;
    let mut rng = noise.rng();
    let mut imu = Vec::with_capacity(ticks + 1);
    let mut fixes = Vec::with_capacity(epochs + 1);
    let mut truth = Vec::with_capacity(epochs + 1);
    for k in 0..=ticks {
        let state = trajectory.state(k as f64 / rates.imu_hz);
        if k % per_range == 0 {
            let frame = measure(&state, landmarks, noise, guard, &mut rng)?;
            imu.push(frame.imu());
            fixes.push(frame);
            truth.push(state);
        } else {
            imu.push(measure_imu(&state, noise, &mut rng));
        }
    }
    Ok(SensorLog {
        imu,
        fixes,
        truth,
        imu_per_range: per_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo3d::skew;
    use approx::assert_relative_eq;

    fn static_truth(p: Vec3) -> TruthState {
        TruthState {
            t: 0.0,
            p,
            v: Vec3::zeros(),
            g: Vec3::new(0.0, 0.0, 9.8),
            r: Mat3::identity(),
            w: Vec3::zeros(),
            a: Vec3::new(0.0, 0.0, -9.8),
        }
    }

    #[test]
    fn helix_starts_at_configured_point() {
        let traj = HelixTrajectory::default();
        assert_eq!(traj.state(0.0).p, traj.params.start);
    }

    #[test]
    fn position_derivative_matches_rotated_velocity() {
        let traj = HelixTrajectory::default();
        let h = 1e-4;
        for i in 0..50 {
            let t = 0.5 + 12.3 * i as f64;
            let fd = (traj.state(t + h).p - traj.state(t - h).p) / (2.0 * h);
            let s = traj.state(t);
            assert!((fd - s.r * s.v).norm() < 1e-5, "t = {t}");
        }
    }

    #[test]
    fn velocity_derivative_matches_accelerometer_model() {
        let traj = HelixTrajectory::default();
        let h = 1e-4;
        for i in 0..50 {
            let t = 0.5 + 12.3 * i as f64;
            let fd = (traj.state(t + h).v - traj.state(t - h).v) / (2.0 * h);
            let s = traj.state(t);
            let model = s.a - skew(&s.w) * s.v + s.g;
            assert!((fd - model).norm() < 1e-4, "t = {t}");
        }
    }

    #[test]
    fn gravity_is_constant_in_inertial_frame() {
        let traj = HelixTrajectory::default();
        let g0 = traj.state(0.0).inertial_gravity();
        for i in 0..600 {
            let g = traj.state(i as f64 * 1.01).inertial_gravity();
            assert!((g - g0).abs().max() < 1e-9);
        }
        assert_relative_eq!(g0, Vec3::new(0.0, 0.0, 9.8), epsilon = 1e-12);
    }

    #[test]
    fn attitude_integration_tracks_analytic_rotation() {
        let traj = HelixTrajectory::default();
        let mut integrator = crate::geo3d::AttitudeIntegrator::new(traj.state(0.0).r);
        let dt = 1e-3;
        for k in 0..10_000 {
            // Midpoint rate keeps the comparison second-order accurate.
            let w = traj.state((k as f64 + 0.5) * dt).w;
            integrator.step(&w, dt);
        }
        let r_true = traj.state(10.0).r;
        assert!((integrator.rotation() - r_true).abs().max() < 1e-6);
    }

    #[test]
    fn noiseless_ranges_at_origin() {
        let mut rng = NoiseConfig::noiseless().rng();
        let truth = static_truth(Vec3::zeros());
        let frame = measure(
            &truth,
            &LandmarkSet::paper(),
            &NoiseConfig::noiseless(),
            RangeGuard::default(),
            &mut rng,
        )
        .unwrap();
        let expected = [1000.0, 1000.0 * 2f64.sqrt(), 1000.0 * 2f64.sqrt(), 500.0];
        assert_eq!(frame.ranges[0], 1000.0);
        assert_eq!(frame.ranges[3], 500.0);
        for (r, e) in frame.ranges.iter().zip(expected) {
            assert_relative_eq!(*r, e, epsilon = 1e-9);
        }
        assert_relative_eq!(frame.ranges[1], 1414.2136, epsilon = 1e-4);
        assert_eq!(frame.accel, truth.a);
        assert_eq!(frame.gyro, truth.w);
        assert_eq!(frame.attitude, truth.r);
    }

    #[test]
    fn range_noise_has_requested_spread() {
        let noise = NoiseConfig {
            sigma_range: 1.0,
            ..NoiseConfig::noiseless()
        }
        .with_seed(7);
        let mut rng = noise.rng();
        let truth = static_truth(Vec3::new(100.0, 200.0, 50.0));
        let landmarks = LandmarkSet::new(vec![Vec3::new(0.0, 0.0, 1000.0)]);
        let exact = landmarks.ranges_from(&truth.p)[0];
        let n = 100_000;
        let errors: Vec<f64> = (0..n)
            .map(|_| {
                measure(&truth, &landmarks, &noise, RangeGuard::default(), &mut rng)
                    .unwrap()
                    .ranges[0]
                    - exact
            })
            .collect();
        let mean = errors.iter().sum::<f64>() / n as f64;
        let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std = var.sqrt();
        assert!((0.98..=1.02).contains(&std), "std = {std}");
    }

    #[test]
    fn too_close_to_landmark_is_rejected() {
        let mut rng = NoiseConfig::noiseless().rng();
        let truth = static_truth(Vec3::new(0.0, 0.0, 999.5));
        let err = measure(
            &truth,
            &LandmarkSet::paper(),
            &NoiseConfig::noiseless(),
            RangeGuard::default(),
            &mut rng,
        );
        assert!(matches!(err, Err(Error::RangeTooSmall { landmark: 0, .. })));
    }

    #[test]
    fn fixed_seed_is_bit_reproducible() {
        let traj = HelixTrajectory::default();
        let noise = NoiseConfig::paper().with_seed(42);
        let run = || {
            simulate_sensors(
                &traj,
                &LandmarkSet::paper(),
                &noise,
                SensorRates::default(),
                5.0,
                RangeGuard::default(),
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.fixes, b.fixes);
        assert_eq!(a.imu, b.imu);
        assert_eq!(a.fixes.len(), 6);
        assert_eq!(a.imu.len(), 501);
        assert_eq!(a.imu_between_fixes(1).len(), 101);
    }

    #[test]
    fn rate_validation() {
        assert_eq!(SensorRates::default().imu_per_range().unwrap(), 100);
        let bad = SensorRates {
            imu_hz: 1.0,
            range_hz: 2.0,
        };
        assert!(bad.imu_per_range().is_err());
        let fractional = SensorRates {
            imu_hz: 100.0,
            range_hz: 3.0,
        };
        assert!(fractional.imu_per_range().is_err());
    }
}
