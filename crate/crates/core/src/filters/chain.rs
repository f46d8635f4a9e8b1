//! Nine-state inertial integrator chain shared by the baseline filters.
//!
//! State `[x1, x2, x3]` in inertial coordinates with `x1' = x2`,
//! `x2' = x3 + u`, `x3' = 0` and `u = R a`.

use nalgebra::{Cholesky, DVector, Dyn, OMatrix, SMatrix, SVector, U9};
use serde::{Deserialize, Serialize};

use crate::geo3d::Vec3;
use crate::truthsim::ImuSample;
use crate::{Error, Result};

pub type ChainVector = SVector<f64, 9>;
pub type ChainMatrix = SMatrix<f64, 9, 9>;
pub type ChainJacobian = OMatrix<f64, Dyn, U9>;

/// States whose magnitude beyond this bound flag divergence.
pub const DIVERGENCE_BOUND: f64 = 1e9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainTuning {
    /// Process noise intensity, applied to every state.
    pub process_intensity: f64,
    /// Variance of each scalar measurement per update.
    pub measurement_variance: f64,
    pub p0_position: f64,
    pub p0_velocity: f64,
    pub p0_gravity: f64,
}

impl ChainTuning {
    /// Unit-variance ranges, matching the range weighting of the augmented filter.
    pub fn ekf_default() -> Self {
        Self {
            process_intensity: 1e-5,
            measurement_variance: 1.0,
            p0_position: 1e6,
            p0_velocity: 25.0,
            p0_gravity: 1.0,
        }
    }

    /// Trilaterated positions with 2 m per axis.
    pub fn algebraic_default() -> Self {
        Self {
            measurement_variance: 4.0,
            ..Self::ekf_default()
        }
    }
}

impl Default for ChainTuning {
    fn default() -> Self {
        Self::ekf_default()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InertialChain {
    pub x: ChainVector,
    pub p: ChainMatrix,
}

fn transition_matrix() -> ChainMatrix {
    let mut f = ChainMatrix::zeros();
    for i in 0..3 {
        f[(i, 3 + i)] = 1.0;
        f[(3 + i, 6 + i)] = 1.0;
    }
    f
}

fn derivative(x: &ChainVector, u: &Vec3) -> ChainVector {
    let mut d = ChainVector::zeros();
    d.fixed_rows_mut::<3>(0).copy_from(&x.fixed_rows::<3>(3));
    d.fixed_rows_mut::<3>(3).copy_from(&(x.fixed_rows::<3>(6) + u));
    d
}

impl InertialChain {
    pub fn new(position: Vec3, velocity: Vec3, gravity: Vec3, tuning: &ChainTuning) -> Self {
        let mut x = ChainVector::zeros();
        x.fixed_rows_mut::<3>(0).copy_from(&position);
        x.fixed_rows_mut::<3>(3).copy_from(&velocity);
        x.fixed_rows_mut::<3>(6).copy_from(&gravity);
        let mut diag = ChainVector::zeros();
        for i in 0..3 {
            diag[i] = tuning.p0_position;
            diag[3 + i] = tuning.p0_velocity;
            diag[6 + i] = tuning.p0_gravity;
        }
        Self {
            x,
            p: ChainMatrix::from_diagonal(&diag),
        }
    }

    pub fn position(&self) -> Vec3 {
        self.x.fixed_rows::<3>(0).into_owned()
    }

    pub fn velocity(&self) -> Vec3 {
        self.x.fixed_rows::<3>(3).into_owned()
    }

    pub fn gravity(&self) -> Vec3 {
        self.x.fixed_rows::<3>(6).into_owned()
    }

    /// RK4 on the mean with `u = R a` interpolated linearly across the
    /// interval; covariance through the second-order transition
    /// `I + F dt + F² dt² / 2`.
    pub fn predict(&mut self, from: &ImuSample, to: &ImuSample, intensity: f64) -> Result<()> {
        let dt = to.t - from.t;
        if !(dt > 0.0) {
            return Err(Error::Validation(format!("prediction interval must be > 0, got {dt}")));
        }
        let u0 = from.attitude * from.accel;
        let u1 = to.attitude * to.accel;
        let um = (u0 + u1) * 0.5;
        let k1 = derivative(&self.x, &u0);
        let k2 = derivative(&(self.x + k1 * (dt / 2.0)), &um);
        let k3 = derivative(&(self.x + k2 * (dt / 2.0)), &um);
        let k4 = derivative(&(self.x + k3 * dt), &u1);
        self.x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);

        let f = transition_matrix();
        let phi = ChainMatrix::identity() + f * dt + f * f * (dt * dt / 2.0);
        self.p = phi * self.p * phi.transpose() + ChainMatrix::identity() * (intensity * dt);
        self.p = (self.p + self.p.transpose()) * 0.5;
        self.check_divergence(to.t)
    }

    /// Joseph-form update with isotropic measurement variance. Returns the
    /// innovation vector.
    pub fn update(&mut self, h: &ChainJacobian, innovation: DVector<f64>, variance: f64) -> Result<DVector<f64>> {
        let m = h.nrows();
        let r = nalgebra::DMatrix::<f64>::identity(m, m) * variance;
        let ph_t = self.p * h.transpose();
        let s = h * &ph_t + &r;
        let chol = Cholesky::new(s).ok_or(Error::SingularInnovation)?;
        let k = chol.solve(&ph_t.transpose()).transpose();
        self.x += &k * &innovation;
        let ikh = ChainMatrix::identity() - &k * h;
        self.p = ikh * self.p * ikh.transpose() + &k * r * k.transpose();
        self.p = (self.p + self.p.transpose()) * 0.5;
        Ok(innovation)
    }

    fn check_divergence(&self, t: f64) -> Result<()> {
        match self.x.iter().enumerate().find(|(_, v)| !(v.abs() <= DIVERGENCE_BOUND)) {
            Some((index, &value)) => Err(Error::DivergenceDetected { t, index, value }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo3d::Mat3;

    fn sample(t: f64, accel: Vec3) -> ImuSample {
        ImuSample {
            t,
            accel,
            gyro: Vec3::zeros(),
            attitude: Mat3::identity(),
        }
    }

    #[test]
    fn constant_input_is_integrated_exactly() {
        let tuning = ChainTuning::default();
        let mut chain = InertialChain::new(
            Vec3::zeros(),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 0.0, 9.8),
            &tuning,
        );
        let a = Vec3::new(0.2, 0.0, -9.8);
        for k in 0..100 {
            chain
                .predict(&sample(k as f64 * 0.01, a), &sample((k + 1) as f64 * 0.01, a), 0.0)
                .unwrap();
        }
        // Net acceleration (0.2, 0, 0) for 1 s from (1, 0, 0) m/s.
        assert!((chain.position() - Vec3::new(1.1, 0.0, 0.0)).norm() < 1e-12);
        assert!((chain.velocity() - Vec3::new(1.2, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_innovation_keeps_mean() {
        let tuning = ChainTuning::default();
        let mut chain = InertialChain::new(Vec3::new(1.0, 2.0, 3.0), Vec3::zeros(), Vec3::zeros(), &tuning);
        let before = chain.x;
        let mut h = ChainJacobian::zeros(3);
        h.fixed_view_mut::<3, 3>(0, 0).fill_with_identity();
        chain.update(&h, DVector::zeros(3), 4.0).unwrap();
        assert_eq!(chain.x, before);
        assert!(chain.p[(0, 0)] < 100.0);
    }
}
