//! Extended Kalman filter on the range equations `r_i = ‖s_i − x1‖`.

use nalgebra::DVector;

use super::chain::{ChainJacobian, ChainTuning, InertialChain};
use super::{innovation_rms, FilterKind, InitialGuess, NavEstimate, NavFilter};
use crate::geo3d::{Mat3, Vec3};
use crate::ltv::RangeGuard;
use crate::truthsim::{ImuSample, LandmarkSet, SensorFrame};
use crate::Result;

/// Jacobian of the range map at `x1`: row `i` is `−(s_i − x1)ᵀ / r_i` on the
/// position block.
pub fn range_jacobian(x1: &Vec3, landmarks: &LandmarkSet) -> ChainJacobian {
    let mut h = ChainJacobian::zeros(landmarks.len());
    for (i, s) in landmarks.iter().enumerate() {
        let d = s - x1;
        let r = d.norm();
        h.fixed_view_mut::<1, 3>(i, 0).copy_from(&(-d.transpose() / r));
    }
    h
}

#[derive(Clone, Debug)]
pub struct Ekf {
    chain: InertialChain,
    landmarks: LandmarkSet,
    tuning: ChainTuning,
    guard: RangeGuard,
    t: f64,
    attitude: Mat3,
}

impl Ekf {
    pub fn new(
        first: &SensorFrame,
        landmarks: &LandmarkSet,
        tuning: ChainTuning,
        guess: &InitialGuess,
    ) -> Result<Self> {
        let guard = RangeGuard::default();
        guard.check(&first.ranges)?;
        let r = first.attitude;
        Ok(Self {
            chain: InertialChain::new(guess.position, r * guess.velocity, r * guess.gravity, &tuning),
            landmarks: landmarks.clone(),
            tuning,
            guard,
            t: first.t,
            attitude: r,
        })
    }

    pub fn chain(&self) -> &InertialChain {
        &self.chain
    }

    pub fn predict(&mut self, from: &ImuSample, to: &ImuSample) -> Result<()> {
        self.chain.predict(from, to, self.tuning.process_intensity)?;
        self.t = to.t;
        self.attitude = to.attitude;
        Ok(())
    }

    pub fn update(&mut self, fix: &SensorFrame) -> Result<DVector<f64>> {
        self.guard.check(&fix.ranges)?;
        let x1 = self.chain.position();
        let predicted = self.landmarks.ranges_from(&x1);
        let innovation =
            DVector::from_iterator(fix.ranges.len(), fix.ranges.iter().zip(&predicted).map(|(z, h)| z - h));
        let h = range_jacobian(&x1, &self.landmarks);
        self.attitude = fix.attitude;
        self.chain.update(&h, innovation, self.tuning.measurement_variance)
    }

    /// One IMU interval, followed by a range update when `fix` is present.
    pub fn ekf_step(&mut self, from: &ImuSample, to: &ImuSample, fix: Option<&SensorFrame>) -> Result<NavEstimate> {
        self.predict(from, to)?;
        if let Some(fix) = fix {
            self.update(fix)?;
        }
        Ok(self.nav())
    }
}

impl NavFilter for Ekf {
    fn kind(&self) -> FilterKind {
        FilterKind::Ekf
    }

    fn propagate(&mut self, from: &ImuSample, to: &ImuSample) -> Result<()> {
        self.predict(from, to)
    }

    fn correct(&mut self, fix: &SensorFrame) -> Result<f64> {
        let innovation = self.update(fix)?;
        Ok(innovation_rms(innovation.as_slice()))
    }

    fn nav(&self) -> NavEstimate {
        let rt = self.attitude.transpose();
        NavEstimate {
            t: self.t,
            p_hat: self.chain.position(),
            v_hat: rt * self.chain.velocity(),
            g_hat: rt * self.chain.gravity(),
        }
    }

    fn range_estimates(&self) -> Vec<f64> {
        self.landmarks.ranges_from(&self.chain.position())
    }

    fn restriction_residuals(&self, _attitude: &Mat3) -> (f64, f64) {
        (0.0, 0.0)
    }
}
