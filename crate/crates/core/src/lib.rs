//! Long-baseline (LBL) acoustic navigation for underwater vehicles.
//!
//! The central piece is a Kalman filter built on an augmented linear
//! time-varying model: position, body velocity and body gravity are lifted
//! together with one state per landmark range and four scalar products of the
//! kinematic states, so the range measurements enter the filter linearly and
//! no linearization of the kinematics is needed.
//!
//! Modules:
//! - [geo3d]: skew matrices, Euler angles, attitude integration.
//! - [truthsim]: helical survey trajectory and the noisy sensor model.
//! - [ltv]: state lift and the system matrices in transformed and body coordinates.
//! - [obsv]: transition matrices, observability Gramians, landmark geometry checks.
//! - [filters]: the augmented filter plus the EKF and trilateration baselines.
//! - [scenario]: configuration, Monte Carlo execution, metrics and file output.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod filters;
pub mod geo3d;
pub mod ltv;
pub mod obsv;
pub mod scenario;
pub mod truthsim;

pub use error::{Error, Result};
pub use geo3d::{EulerAngles, Mat3, Vec3};
pub use truthsim::{LandmarkSet, NoiseConfig, SensorFrame, TruthState};
