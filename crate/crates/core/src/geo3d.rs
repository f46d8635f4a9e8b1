//! Attitude and rigid-body kinematics primitives.
//!
//! Rotation matrices map body-fixed coordinates to inertial coordinates and
//! Euler angles follow the ZYX (yaw, pitch, roll) convention, so that
//! `R = Rz(yaw) * Ry(pitch) * Rx(roll)`.

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Number of integration steps between two polar re-projections of an
/// integrated attitude.
pub const REORTHONORMALIZE_EVERY: usize = 1000;

/// Skew-symmetric matrix such that `skew(w) * x == w.cross(&x)`.
pub fn skew(w: &Vec3) -> Mat3 {
    Mat3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl EulerAngles {
    pub fn new(roll: f64, pitch: f64, yaw: f64) -> Self {
        Self { roll, pitch, yaw }
    }

    pub fn to_rotation(&self) -> Mat3 {
        euler_to_rotation(self)
    }
}

/// Body-to-inertial rotation for ZYX Euler angles.
pub fn euler_to_rotation(e: &EulerAngles) -> Mat3 {
    let (sr, cr) = e.roll.sin_cos();
    let (sp, cp) = e.pitch.sin_cos();
    let (sy, cy) = e.yaw.sin_cos();
    Mat3::new(
        cy * cp,
        cy * sp * sr - sy * cr,
        cy * sp * cr + sy * sr,
        sy * cp,
        sy * sp * sr + cy * cr,
        sy * sp * cr - cy * sr,
        -sp,
        cp * sr,
        cp * cr,
    )
}

/// Inverse of [`euler_to_rotation`] away from the pitch singularity.
pub fn rotation_to_euler(r: &Mat3) -> EulerAngles {
    let pitch = (-r[(2, 0)]).atan2((r[(0, 0)].powi(2) + r[(1, 0)].powi(2)).sqrt());
    let roll = r[(2, 1)].atan2(r[(2, 2)]);
    let yaw = r[(1, 0)].atan2(r[(0, 0)]);
    EulerAngles { roll, pitch, yaw }
}

/// Body angular velocity produced by ZYX Euler angle rates.
pub fn euler_rates_to_body_rate(e: &EulerAngles, rates: &EulerAngles) -> Vec3 {
    let (sr, cr) = e.roll.sin_cos();
    let (sp, cp) = e.pitch.sin_cos();
    Vec3::new(
        rates.roll - rates.yaw * sp,
        rates.pitch * cr + rates.yaw * sr * cp,
        -rates.pitch * sr + rates.yaw * cr * cp,
    )
}

/// Matrix exponential of `skew(phi)` (Rodrigues' formula).
pub fn exp_so3(phi: &Vec3) -> Mat3 {
    let theta2 = phi.norm_squared();
    let k = skew(phi);
    // Taylor coefficients below the threshold keep full precision near zero.
    let (a, b) = if theta2 < 1e-8 {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Mat3::identity() + k * a + k * k * b
}

/// Rotation vector `phi` with `exp_so3(phi) == r`.
pub fn log_so3(r: &Mat3) -> Vec3 {
    Rotation3::from_matrix_unchecked(*r).scaled_axis()
}

/// Propagates `R_dot = R * skew(w)` over `dt` with `w` held constant.
pub fn integrate_attitude(r: &Mat3, w: &Vec3, dt: f64) -> Mat3 {
    r * exp_so3(&(w * dt))
}

/// Closest rotation matrix in the Frobenius sense (polar projection).
pub fn orthonormalize(r: &Mat3) -> Mat3 {
    let svd = r.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut d = Mat3::identity();
    if (u * v_t).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    u * d * v_t
}

/// Geodesic interpolation between two attitudes, `tau` in `[0, 1]`.
pub fn interpolate_attitude(from: &Mat3, to: &Mat3, tau: f64) -> Mat3 {
    from * exp_so3(&(log_so3(&(from.transpose() * to)) * tau))
}

/// Attitude integrator that re-projects onto the rotation group every
/// [`REORTHONORMALIZE_EVERY`] steps.
#[derive(Clone, Debug)]
pub struct AttitudeIntegrator {
    rotation: Mat3,
    steps: usize,
}

impl AttitudeIntegrator {
    pub fn new(initial: Mat3) -> Self {
        Self {
            rotation: initial,
            steps: 0,
        }
    }

    pub fn step(&mut self, w: &Vec3, dt: f64) -> &Mat3 {
        self.rotation = integrate_attitude(&self.rotation, w, dt);
        self.steps += 1;
        if self.steps.is_multiple_of(REORTHONORMALIZE_EVERY) {
            self.rotation = orthonormalize(&self.rotation);
        }
        &self.rotation
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }
}

/// Largest absolute entry of `RᵀR − I`.
pub fn orthonormality_error(r: &Mat3) -> f64 {
    (r.transpose() * r - Mat3::identity()).abs().max()
}
