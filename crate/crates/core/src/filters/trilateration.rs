use nalgebra::{DMatrix, DVector};

use crate::geo3d::Vec3;
use crate::truthsim::LandmarkSet;
use crate::{Error, Result};

/// Least-squares position from ranges by differencing the squared-range
/// equations against the first landmark:
///
/// ```text
/// 2 (s_i − s_1)ᵀ p = ‖s_i‖² − ‖s_1‖² − r_i² + r_1²,   i = 2 … n_L
/// ```
pub fn trilaterate(ranges: &[f64], landmarks: &LandmarkSet) -> Result<Vec3> {
    let s = landmarks.positions();
    if ranges.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            actual: ranges.len(),
        });
    }
    if s.len() < 4 {
        return Err(Error::DegenerateGeometry(format!(
            "{} landmarks cannot fix a position in three dimensions",
            s.len()
        )));
    }
    let rows = s.len() - 1;
    let a = DMatrix::from_fn(rows, 3, |i, c| 2.0 * (s[i + 1][c] - s[0][c]));
    let b = DVector::from_fn(rows, |i, _| {
        s[i + 1].norm_squared() - s[0].norm_squared() - ranges[i + 1].powi(2) + ranges[0].powi(2)
    });
    let svd = a.svd(true, true);
    let (hi, lo) = (svd.singular_values.max(), svd.singular_values.min());
    if !(lo > 1e-10 * hi) {
        return Err(Error::DegenerateGeometry(format!(
            "normal matrix is singular (singular values {lo:e} / {hi:e})"
        )));
    }
    let p = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::DegenerateGeometry(e.to_string()))?;
    Ok(Vec3::new(p[0], p[1], p[2]))
}
