//! Linear Kalman filter on the inertial chain, corrected with positions
//! obtained by trilaterating each set of ranges.

use nalgebra::DVector;

use super::chain::{ChainJacobian, ChainTuning, InertialChain};
use super::trilateration::trilaterate;
use super::{innovation_rms, FilterKind, InitialGuess, NavEstimate, NavFilter};
use crate::geo3d::Mat3;
use crate::truthsim::{ImuSample, LandmarkSet, SensorFrame};
use crate::Result;

#[derive(Clone, Debug)]
pub struct LinearKf {
    chain: InertialChain,
    landmarks: LandmarkSet,
    tuning: ChainTuning,
    t: f64,
    attitude: Mat3,
}

fn position_selector() -> ChainJacobian {
    let mut h = ChainJacobian::zeros(3);
    h.fixed_view_mut::<3, 3>(0, 0).fill_with_identity();
    h
}

impl LinearKf {
    pub fn new(
        first: &SensorFrame,
        landmarks: &LandmarkSet,
        tuning: ChainTuning,
        guess: &InitialGuess,
    ) -> Result<Self> {
        let r = first.attitude;
        Ok(Self {
            chain: InertialChain::new(guess.position, r * guess.velocity, r * guess.gravity, &tuning),
            landmarks: landmarks.clone(),
            tuning,
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
        let z = trilaterate(&fix.ranges, &self.landmarks)?;
        let innovation = DVector::from_column_slice((z - self.chain.position()).as_slice());
        self.attitude = fix.attitude;
        self.chain
            .update(&position_selector(), innovation, self.tuning.measurement_variance)
    }

    /// One IMU interval, followed by a trilateration update when `fix` is present.
    pub fn linear_kf_step(
        &mut self,
        from: &ImuSample,
        to: &ImuSample,
        fix: Option<&SensorFrame>,
    ) -> Result<NavEstimate> {
        self.predict(from, to)?;
        if let Some(fix) = fix {
            self.update(fix)?;
        }
        Ok(self.nav())
    }
}

impl NavFilter for LinearKf {
    fn kind(&self) -> FilterKind {
        FilterKind::Algebraic
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
