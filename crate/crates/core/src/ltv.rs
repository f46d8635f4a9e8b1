//! Augmented linear time-varying model.
//!
//! With `x1 = p`, `x2 = R v`, `x3 = R g` and `u = R a` the kinematics become
//! the time-invariant chain `x1' = x2`, `x2' = x3 + u`, `x3' = 0`. Appending
//! the ranges `r_i = ‖s_i − x1‖` and the scalars
//!
//! ```text
//! s8  = x1·x2
//! s9  = x1·x3 + ‖x2‖²
//! s10 = x2·x3
//! s11 = ‖x3‖²
//! ```
//!
//! gives a state of dimension `13 + n_L` whose dynamics are linear in the
//! state, with coefficients depending only on `u` and the measured ranges.
//! The outputs are the ranges themselves plus one pair-difference output per
//! unordered landmark pair (see [`build_output`]).
//!
//! Body-frame versions (the filter's coordinates) use
//! `chi = diag(I, Rᵀ, Rᵀ, 1, …, 1) x`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::geo3d::{skew, Mat3, Vec3};
use crate::truthsim::LandmarkSet;
use crate::{Error, Result};

/// Minimum admissible range; the model is undefined at a transponder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeGuard {
    pub min_range: f64,
}

impl Default for RangeGuard {
    fn default() -> Self {
        Self { min_range: 1.0 }
    }
}

impl RangeGuard {
    pub fn new(min_range: f64) -> Result<Self> {
        if !(min_range.is_finite() && min_range > 0.0) {
            return Err(Error::Validation(format!("range_guard must be > 0, got {min_range}")));
        }
        Ok(Self { min_range })
    }

    pub fn check(&self, ranges: &[f64]) -> Result<()> {
        for (landmark, &range) in ranges.iter().enumerate() {
            // Written so that NaN fails the check too.
            if !(range >= self.min_range) {
                return Err(Error::RangeTooSmall {
                    landmark,
                    range,
                    min: self.min_range,
                });
            }
        }
        Ok(())
    }
}

/// Index map of the augmented state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateLayout {
    pub n_landmarks: usize,
}

impl StateLayout {
    pub const POSITION: usize = 0;
    pub const VELOCITY: usize = 3;
    pub const GRAVITY: usize = 6;

    pub fn new(n_landmarks: usize) -> Self {
        Self { n_landmarks }
    }

    pub fn dim(&self) -> usize {
        13 + self.n_landmarks
    }

    pub fn range(&self, i: usize) -> usize {
        9 + i
    }

    pub fn s8(&self) -> usize {
        9 + self.n_landmarks
    }

    pub fn s9(&self) -> usize {
        self.s8() + 1
    }

    pub fn s10(&self) -> usize {
        self.s8() + 2
    }

    pub fn s11(&self) -> usize {
        self.s8() + 3
    }

    pub fn pair_count(&self) -> usize {
        pair_count(self.n_landmarks)
    }

    pub fn output_dim(&self) -> usize {
        self.n_landmarks + self.pair_count()
    }
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Landmark pairs `(i, j)`, `i < j`, in lexicographic order. Every module
/// orders pair outputs this way.
pub fn landmark_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Pair-difference matrix: row `(i, j)` has `+1` in column `i`, `−1` in `j`.
pub fn pair_difference_matrix(n: usize) -> DMatrix<f64> {
    let pairs = landmark_pairs(n);
    let mut c2 = DMatrix::zeros(pairs.len(), n);
    for (row, (i, j)) in pairs.into_iter().enumerate() {
        c2[(row, i)] = 1.0;
        c2[(row, j)] = -1.0;
    }
    c2
}

/// Augmented state in transformed coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedState {
    pub x1: Vec3,
    pub x2: Vec3,
    pub x3: Vec3,
    pub ranges: Vec<f64>,
    pub s8: f64,
    pub s9: f64,
    pub s10: f64,
    pub s11: f64,
}

impl LiftedState {
    pub fn layout(&self) -> StateLayout {
        StateLayout::new(self.ranges.len())
    }

    pub fn to_vector(&self) -> DVector<f64> {
        let layout = self.layout();
        let mut x = DVector::zeros(layout.dim());
        x.fixed_rows_mut::<3>(StateLayout::POSITION).copy_from(&self.x1);
        x.fixed_rows_mut::<3>(StateLayout::VELOCITY).copy_from(&self.x2);
        x.fixed_rows_mut::<3>(StateLayout::GRAVITY).copy_from(&self.x3);
        for (i, r) in self.ranges.iter().enumerate() {
            x[layout.range(i)] = *r;
        }
        x[layout.s8()] = self.s8;
        x[layout.s9()] = self.s9;
        x[layout.s10()] = self.s10;
        x[layout.s11()] = self.s11;
        x
    }
}

pub fn lift_state(x1: &Vec3, x2: &Vec3, x3: &Vec3, landmarks: &LandmarkSet, guard: RangeGuard) -> Result<LiftedState> {
    let ranges = landmarks.ranges_from(x1);
    guard.check(&ranges)?;
    Ok(LiftedState {
        x1: *x1,
        x2: *x2,
        x3: *x3,
        ranges,
        s8: x1.dot(x2),
        s9: x1.dot(x3) + x2.norm_squared(),
        s10: x2.dot(x3),
        s11: x3.norm_squared(),
    })
}

/// Body-frame augmented state `chi` for position `p`, body velocity `v`,
/// body gravity `g` and attitude `r`. The scalars are frame invariant.
pub fn lift_body_state(
    p: &Vec3,
    v: &Vec3,
    g: &Vec3,
    r: &Mat3,
    landmarks: &LandmarkSet,
    guard: RangeGuard,
) -> Result<DVector<f64>> {
    let mut lifted = lift_state(p, &(r * v), &(r * g), landmarks, guard)?;
    lifted.x2 = *v;
    lifted.x3 = *g;
    Ok(lifted.to_vector())
}

/// `T_c = diag(I, Rᵀ, Rᵀ, 1, …, 1)`, mapping transformed to body coordinates.
pub fn body_transformation(r: &Mat3, n_landmarks: usize) -> DMatrix<f64> {
    let n = StateLayout::new(n_landmarks).dim();
    let mut t = DMatrix::identity(n, n);
    t.fixed_view_mut::<3, 3>(3, 3).copy_from(&r.transpose());
    t.fixed_view_mut::<3, 3>(6, 6).copy_from(&r.transpose());
    t
}

fn check_landmarks(ranges: &[f64], landmarks: &LandmarkSet) -> Result<()> {
    if ranges.len() != landmarks.len() {
        return Err(Error::DimensionMismatch {
            expected: landmarks.len(),
            actual: ranges.len(),
        });
    }
    Ok(())
}

/// Input matrix `B = [0 I 0 0 … 0]ᵀ`, shared by both coordinate systems.
pub fn input_matrix(n_landmarks: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(StateLayout::new(n_landmarks).dim(), 3);
    b.fixed_view_mut::<3, 3>(StateLayout::VELOCITY, 0).fill_with_identity();
    b
}

/// System matrix of the augmented model in transformed coordinates.
pub fn build_transformed_a(
    u: &Vec3,
    ranges: &[f64],
    landmarks: &LandmarkSet,
    guard: RangeGuard,
) -> Result<DMatrix<f64>> {
    check_landmarks(ranges, landmarks)?;
    guard.check(ranges)?;
    let layout = StateLayout::new(landmarks.len());
    let mut a = DMatrix::zeros(layout.dim(), layout.dim());
    a.fixed_view_mut::<3, 3>(0, 3).fill_with_identity();
    a.fixed_view_mut::<3, 3>(3, 6).fill_with_identity();
    for (i, (s, r)) in landmarks.iter().zip(ranges).enumerate() {
        let row = layout.range(i);
        a.fixed_view_mut::<1, 3>(row, StateLayout::VELOCITY)
            .copy_from(&(-s.transpose() / *r));
        a[(row, layout.s8())] = 1.0 / r;
    }
    a.fixed_view_mut::<1, 3>(layout.s8(), StateLayout::POSITION)
        .copy_from(&u.transpose());
    a[(layout.s8(), layout.s9())] = 1.0;
    a.fixed_view_mut::<1, 3>(layout.s9(), StateLayout::VELOCITY)
        .copy_from(&(2.0 * u.transpose()));
    a[(layout.s9(), layout.s10())] = 3.0;
    a.fixed_view_mut::<1, 3>(layout.s10(), StateLayout::GRAVITY)
        .copy_from(&u.transpose());
    a[(layout.s10(), layout.s11())] = 1.0;
    Ok(a)
}

/// System matrix of the augmented model in body coordinates, from the
/// accelerometer, gyro and attitude readings.
pub fn build_body_a(
    accel: &Vec3,
    gyro: &Vec3,
    attitude: &Mat3,
    ranges: &[f64],
    landmarks: &LandmarkSet,
    guard: RangeGuard,
) -> Result<DMatrix<f64>> {
    check_landmarks(ranges, landmarks)?;
    guard.check(ranges)?;
    let layout = StateLayout::new(landmarks.len());
    let mut a = DMatrix::zeros(layout.dim(), layout.dim());
    let minus_skew = -skew(gyro);
    a.fixed_view_mut::<3, 3>(0, 3).copy_from(attitude);
    a.fixed_view_mut::<3, 3>(3, 3).copy_from(&minus_skew);
    a.fixed_view_mut::<3, 3>(3, 6).fill_with_identity();
    a.fixed_view_mut::<3, 3>(6, 6).copy_from(&minus_skew);
    for (i, (s, r)) in landmarks.iter().zip(ranges).enumerate() {
        let row = layout.range(i);
        a.fixed_view_mut::<1, 3>(row, StateLayout::VELOCITY)
            .copy_from(&(-(s.transpose() * attitude) / *r));
        a[(row, layout.s8())] = 1.0 / r;
    }
    let u = attitude * accel;
    a.fixed_view_mut::<1, 3>(layout.s8(), StateLayout::POSITION)
        .copy_from(&u.transpose());
    a[(layout.s8(), layout.s9())] = 1.0;
    a.fixed_view_mut::<1, 3>(layout.s9(), StateLayout::VELOCITY)
        .copy_from(&(2.0 * accel.transpose()));
    a[(layout.s9(), layout.s10())] = 3.0;
    a.fixed_view_mut::<1, 3>(layout.s10(), StateLayout::GRAVITY)
        .copy_from(&accel.transpose());
    a[(layout.s10(), layout.s11())] = 1.0;
    Ok(a)
}

/// `𝒜 chi + B a` evaluated without forming `𝒜`, using the range entries of
/// `chi` as the range denominators. Callers validate those entries.
pub fn body_derivative(
    chi: &DVector<f64>,
    accel: &Vec3,
    gyro: &Vec3,
    attitude: &Mat3,
    landmarks: &LandmarkSet,
) -> DVector<f64> {
    let layout = StateLayout::new(landmarks.len());
    let p = chi.fixed_rows::<3>(StateLayout::POSITION).into_owned();
    let v = chi.fixed_rows::<3>(StateLayout::VELOCITY).into_owned();
    let g = chi.fixed_rows::<3>(StateLayout::GRAVITY).into_owned();
    let (s8, s9, s10, s11) = (chi[layout.s8()], chi[layout.s9()], chi[layout.s10()], chi[layout.s11()]);
    let v_inertial = attitude * v;
    let u = attitude * accel;

    let mut d = DVector::zeros(layout.dim());
    d.fixed_rows_mut::<3>(StateLayout::POSITION).copy_from(&v_inertial);
    d.fixed_rows_mut::<3>(StateLayout::VELOCITY)
        .copy_from(&(accel - gyro.cross(&v) + g));
    d.fixed_rows_mut::<3>(StateLayout::GRAVITY)
        .copy_from(&(-gyro.cross(&g)));
    for (i, s) in landmarks.iter().enumerate() {
        let r = chi[layout.range(i)];
        d[layout.range(i)] = (s8 - s.dot(&v_inertial)) / r;
    }
    d[layout.s8()] = u.dot(&p) + s9;
    d[layout.s9()] = 2.0 * accel.dot(&v) + 3.0 * s10;
    d[layout.s10()] = accel.dot(&g) + s11;
    d[layout.s11()] = 0.0;
    d
}

/// Output matrix `C` and known output vector `y` from measured ranges.
///
/// The first `n_L` rows select the range states. The row of pair `(i, j)` is
///
/// ```text
/// 2 (s_i − s_j)ᵀ x1 / (r_i + r_j) + x_{3+i} − x_{3+j} = (‖s_i‖² − ‖s_j‖²) / (r_i + r_j)
/// ```
///
/// with the measured ranges in the denominators.
pub fn build_output(
    ranges_meas: &[f64],
    landmarks: &LandmarkSet,
    guard: RangeGuard,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    check_landmarks(ranges_meas, landmarks)?;
    guard.check(ranges_meas)?;
    let layout = StateLayout::new(landmarks.len());
    let n_l = layout.n_landmarks;
    let mut c = DMatrix::zeros(layout.output_dim(), layout.dim());
    let mut y = DVector::zeros(layout.output_dim());
    for i in 0..n_l {
        c[(i, layout.range(i))] = 1.0;
        y[i] = ranges_meas[i];
    }
    let s = landmarks.positions();
    for (k, (i, j)) in landmark_pairs(n_l).into_iter().enumerate() {
        let row = n_l + k;
        let denom = ranges_meas[i] + ranges_meas[j];
        c.fixed_view_mut::<1, 3>(row, StateLayout::POSITION)
            .copy_from(&(2.0 * (s[i] - s[j]).transpose() / denom));
        c[(row, layout.range(i))] = 1.0;
        c[(row, layout.range(j))] = -1.0;
        y[row] = (s[i].norm_squared() - s[j].norm_squared()) / denom;
    }
    Ok((c, y))
}

/// All matrices of the transformed model at one instant.
#[derive(Clone, Debug)]
pub struct LtvMatrices {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub y_known: DVector<f64>,
}

impl LtvMatrices {
    pub fn transformed(u: &Vec3, ranges: &[f64], landmarks: &LandmarkSet, guard: RangeGuard) -> Result<Self> {
        let a = build_transformed_a(u, ranges, landmarks, guard)?;
        let (c, y_known) = build_output(ranges, landmarks, guard)?;
        Ok(Self {
            a,
            b: input_matrix(landmarks.len()),
            c,
            y_known,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo3d::{euler_to_rotation, EulerAngles};
    use crate::truthsim::{HelixTrajectory, Trajectory, TruthState};
    use approx::assert_relative_eq;

    fn guard() -> RangeGuard {
        RangeGuard::default()
    }

    fn transformed_lift(s: &TruthState, landmarks: &LandmarkSet) -> DVector<f64> {
        lift_state(&s.p, &s.inertial_velocity(), &s.inertial_gravity(), landmarks, guard())
            .unwrap()
            .to_vector()
    }

    #[test]
    fn lift_at_origin() {
        let z = Vec3::zeros();
        let lifted = lift_state(&z, &z, &z, &LandmarkSet::paper(), guard()).unwrap();
        assert_relative_eq!(lifted.ranges[0], 1000.0);
        assert_relative_eq!(lifted.ranges[1], 1414.2136, epsilon = 1e-4);
        assert_relative_eq!(lifted.ranges[2], 1414.2136, epsilon = 1e-4);
        assert_relative_eq!(lifted.ranges[3], 500.0);
        assert_eq!((lifted.s8, lifted.s9, lifted.s10, lifted.s11), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn lift_scalar_definitions() {
        let x1 = Vec3::new(10.0, -3.0, 2.0);
        let x3 = Vec3::new(0.0, 0.0, 10.0);
        let lifted = lift_state(&x1, &Vec3::zeros(), &x3, &LandmarkSet::paper(), guard()).unwrap();
        assert_eq!(lifted.s8, 0.0);
        assert_eq!(lifted.s10, 0.0);
        assert_eq!(lifted.s11, 100.0);
    }

    #[test]
    fn lift_rejects_position_at_landmark() {
        let s1 = Vec3::new(0.0, 0.0, 1000.0);
        let z = Vec3::zeros();
        assert!(matches!(
            lift_state(&(s1 + Vec3::new(0.5, 0.0, 0.0)), &z, &z, &LandmarkSet::paper(), guard()),
            Err(Error::RangeTooSmall { landmark: 0, .. })
        ));
    }

    #[test]
    fn transformed_a_dimensions_and_zero_input_structure() {
        let landmarks = LandmarkSet::paper();
        let ranges = landmarks.ranges_from(&Vec3::new(100.0, 200.0, 0.0));
        let a = build_transformed_a(&Vec3::zeros(), &ranges, &landmarks, guard()).unwrap();
        assert_eq!(a.shape(), (17, 17));
        let layout = StateLayout::new(4);
        let row = |i: usize| a.row(i).into_owned();
        let unit = |j: usize| {
            let mut e = DVector::zeros(17).transpose();
            e[j] = 1.0;
            e
        };
        assert_eq!(row(layout.s8()), unit(layout.s9()));
        assert_eq!(row(layout.s9()), unit(layout.s10()) * 3.0);
        assert_eq!(row(layout.s10()), unit(layout.s11()));
        assert_eq!(row(layout.s11()), DVector::zeros(17).transpose());
    }

    #[test]
    fn pair_difference_for_three_landmarks() {
        let c2 = pair_difference_matrix(3);
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, -1.0]);
        assert_eq!(c2, expected);
        assert_eq!(landmark_pairs(4), vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn output_has_ten_rows_for_four_landmarks() {
        let landmarks = LandmarkSet::paper();
        let ranges = landmarks.ranges_from(&Vec3::new(100.0, 50.0, 0.0));
        let (c, y) = build_output(&ranges, &landmarks, guard()).unwrap();
        assert_eq!(c.shape(), (10, 17));
        assert_eq!(y.len(), 10);
        assert_eq!(c.view((4, 9), (6, 4)), pair_difference_matrix(4));
    }

    #[test]
    fn pair_output_at_reference_point() {
        let landmarks = LandmarkSet::paper();
        let p = Vec3::new(500.0, 500.0, 0.0);
        let ranges = landmarks.ranges_from(&p);
        assert_relative_eq!(ranges[0] + ranges[1], 2.0 * 1224.7449, epsilon = 1e-3);
        let (c, y) = build_output(&ranges, &landmarks, guard()).unwrap();
        assert_relative_eq!(y[4], -408.2483, epsilon = 1e-4);
        // Left-hand side evaluated directly: 2 (s1 − s2)·p / (r1 + r2) + r1 − r2.
        let s = landmarks.positions();
        let lhs = 2.0 * (s[0] - s[1]).dot(&p) / (ranges[0] + ranges[1]) + ranges[0] - ranges[1];
        assert_relative_eq!(lhs, y[4], epsilon = 1e-9);
        let lifted = lift_state(&p, &Vec3::zeros(), &Vec3::zeros(), &landmarks, guard()).unwrap();
        let residual = &c * lifted.to_vector() - &y;
        assert!(residual.amax() < 1e-9);
    }

    #[test]
    fn output_identity_along_trajectory() {
        let traj = HelixTrajectory::default();
        let landmarks = LandmarkSet::paper();
        for k in 0..200 {
            let s = traj.state(k as f64 * 2.9);
            let chi = transformed_lift(&s, &landmarks);
            let (c, y) = build_output(&landmarks.ranges_from(&s.p), &landmarks, guard()).unwrap();
            assert!((&c * chi - y).amax() < 1e-9);
        }
    }

    #[test]
    fn transformed_a_matches_finite_differences() {
        let traj = HelixTrajectory::default();
        let landmarks = LandmarkSet::paper();
        let h = 1e-4;
        let b = input_matrix(4);
        for k in 0..40 {
            let t = 1.0 + 7.7 * k as f64;
            let s = traj.state(t);
            let x = transformed_lift(&s, &landmarks);
            let fd = (transformed_lift(&traj.state(t + h), &landmarks)
                - transformed_lift(&traj.state(t - h), &landmarks))
                / (2.0 * h);
            let u = s.inertial_input();
            let a = build_transformed_a(&u, &landmarks.ranges_from(&s.p), &landmarks, guard()).unwrap();
            let model = &a * &x + &b * u;
            assert!((model - fd).amax() < 1e-4, "t = {t}");
        }
    }

    #[test]
    fn body_a_collapses_at_identity_attitude() {
        let landmarks = LandmarkSet::paper();
        let ranges = landmarks.ranges_from(&Vec3::new(300.0, 200.0, 10.0));
        let accel = Vec3::new(0.1, -0.2, -9.7);
        let body = build_body_a(&accel, &Vec3::zeros(), &Mat3::identity(), &ranges, &landmarks, guard()).unwrap();
        let transformed = build_transformed_a(&accel, &ranges, &landmarks, guard()).unwrap();
        assert_eq!(body, transformed);
    }

    #[test]
    fn body_a_matches_lyapunov_transformation() {
        let landmarks = LandmarkSet::paper();
        let n = 17;
        let cases = [
            (
                EulerAngles::new(0.1, -0.2, 1.3),
                Vec3::new(0.03, -0.01, 0.06),
                Vec3::new(0.2, 0.1, -9.6),
            ),
            (
                EulerAngles::new(-0.4, 0.3, -2.0),
                Vec3::new(-0.2, 0.1, 0.0),
                Vec3::new(-0.5, 0.3, -9.9),
            ),
            (
                EulerAngles::new(0.0, 0.0, 0.5),
                Vec3::new(0.0, 0.0, 0.3),
                Vec3::new(0.0, 0.0, -9.8),
            ),
        ];
        for (e, w, accel) in cases {
            let r = euler_to_rotation(&e);
            let ranges = landmarks.ranges_from(&Vec3::new(510.0, 480.0, 30.0));
            let u = r * accel;
            let a = build_transformed_a(&u, &ranges, &landmarks, guard()).unwrap();
            let t_c = body_transformation(&r, 4);
            let t_c_inv = t_c.clone().try_inverse().unwrap();
            // d/dt Rᵀ = −S(w) Rᵀ.
            let rt_dot = -skew(&w) * r.transpose();
            let mut t_c_dot = DMatrix::zeros(n, n);
            t_c_dot.fixed_view_mut::<3, 3>(3, 3).copy_from(&rt_dot);
            t_c_dot.fixed_view_mut::<3, 3>(6, 6).copy_from(&rt_dot);
            let oracle = &t_c * a * &t_c_inv + t_c_dot * &t_c_inv;
            let body = build_body_a(&accel, &w, &r, &ranges, &landmarks, guard()).unwrap();
            assert!((oracle - body).amax() < 1e-9);
        }
    }

    #[test]
    fn body_a_matches_finite_differences() {
        let traj = HelixTrajectory::default();
        let landmarks = LandmarkSet::paper();
        let lift = |s: &TruthState| lift_body_state(&s.p, &s.v, &s.g, &s.r, &landmarks, guard()).unwrap();
        let h = 1e-4;
        let b = input_matrix(4);
        for k in 0..40 {
            let t = 2.0 + 9.1 * k as f64;
            let s = traj.state(t);
            let chi = lift(&s);
            let fd = (lift(&traj.state(t + h)) - lift(&traj.state(t - h))) / (2.0 * h);
            let a = build_body_a(&s.a, &s.w, &s.r, &landmarks.ranges_from(&s.p), &landmarks, guard()).unwrap();
            assert!((&a * &chi + &b * s.a - &fd).amax() < 1e-4, "t = {t}");
            let structured = body_derivative(&chi, &s.a, &s.w, &s.r, &landmarks);
            assert!((structured - (&a * &chi + &b * s.a)).amax() < 1e-9);
        }
    }

    #[test]
    fn mismatched_range_count_is_rejected() {
        let landmarks = LandmarkSet::paper();
        assert!(matches!(
            build_output(&[1000.0, 1000.0], &landmarks, guard()),
            Err(Error::DimensionMismatch { expected: 4, actual: 2 })
        ));
    }
}
