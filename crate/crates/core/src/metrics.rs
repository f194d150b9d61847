//! Pose reconstruction error metrics.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::transform::{check_so3, vee_skew, Pose};

/// Input tolerance for rotation arguments of [`rotation_geodesic`].
pub const METRIC_SO3_TOLERANCE: f64 = 1e-6;

/// Per-axis absolute position error (m) and geodesic rotation error (rad).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PoseError {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub drot: f64,
}

impl PoseError {
    pub fn as_array(&self) -> [f64; 4] {
        [self.dx, self.dy, self.dz, self.drot]
    }

    pub fn position_norm(&self) -> f64 {
        Vector3::new(self.dx, self.dy, self.dz).norm()
    }
}

/// Component-wise `|P - P'|`.
pub fn position_error(p: &Vector3<f64>, p_prime: &Vector3<f64>) -> Vector3<f64> {
    (p - p_prime).abs()
}

/// Geodesic distance on SO(3): the rotation angle of `R' Rᵀ`, in `[0, π]`.
///
/// Equal to `||log(R' Rᵀ)||` under the norm `sqrt(trace(AᵀA) / 2)`. Both
/// inputs must be rotations within [`METRIC_SO3_TOLERANCE`].
pub fn rotation_geodesic(r: &Matrix3<f64>, r_prime: &Matrix3<f64>) -> Result<f64> {
    check_so3(r, METRIC_SO3_TOLERANCE)?;
    check_so3(r_prime, METRIC_SO3_TOLERANCE)?;
    Ok(geodesic_angle(r, r_prime))
}

/// [`rotation_geodesic`] without the input check.
///
/// The angle comes from the trace (cosine) and the skew part (sine) of the
/// relative rotation through `atan2`, which keeps full precision at both ends
/// of `[0, π]`. A bare `acos` of the clamped trace loses about half the digits
/// near zero.
pub fn geodesic_angle(r: &Matrix3<f64>, r_prime: &Matrix3<f64>) -> f64 {
    rotation_angle(&(r_prime * r.transpose()))
}

/// Rotation angle of a single rotation matrix.
pub fn rotation_angle(m: &Matrix3<f64>) -> f64 {
    let cos = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let sin = vee_skew(m).norm();
    sin.atan2(cos)
}

/// Logarithm of a rotation as an axis-angle vector `φ·a` with `φ ∈ [0, π]`.
pub fn rotation_log(m: &Matrix3<f64>) -> Vector3<f64> {
    let v = vee_skew(m);
    let sin = v.norm();
    let cos = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let angle = sin.atan2(cos);
    if cos > -0.99 {
        // φ / sin φ, with its series near zero.
        let scale = if sin < 1e-8 {
            1.0 + angle * angle / 6.0
        } else {
            angle / sin
        };
        return v * scale;
    }
    // Near π the skew part vanishes; recover the axis from the symmetric part:
    // (R + Rᵀ)/2 - cosφ I = (1 - cosφ) a aᵀ.
    let sym = (m + m.transpose()) * 0.5 - Matrix3::identity() * cos;
    let outer = sym / (1.0 - cos);
    let k = (0..3)
        .max_by(|&i, &j| outer[(i, i)].total_cmp(&outer[(j, j)]))
        .unwrap_or(0);
    let mut axis: Vector3<f64> = outer.column(k).into_owned() / outer[(k, k)].max(0.0).sqrt();
    axis.normalize_mut();
    if axis.dot(&v) < 0.0 {
        axis = -axis;
    }
    axis * angle
}

/// Full error record between a target and a reconstructed pose.
pub fn pose_error(target: &Pose, reconstructed: &Pose) -> PoseError {
    let d = position_error(&target.translation, &reconstructed.translation);
    PoseError {
        dx: d.x,
        dy: d.y,
        dz: d.z,
        drot: geodesic_angle(&target.rotation, &reconstructed.rotation),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{hat, rot_x, rot_z};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn exp_so3(w: &Vector3<f64>) -> Matrix3<f64> {
        nalgebra::Rotation3::new(*w).into_inner()
    }

    #[test]
    fn position_examples() {
        let p = Vector3::new(0.1, 0.2, 0.3);
        assert_eq!(position_error(&p, &p), Vector3::zeros());
        let e = position_error(&p, &Vector3::new(0.1, 0.2, 0.28));
        assert_relative_eq!(e, Vector3::new(0.0, 0.0, 0.02), epsilon = 1e-15);
        let q = Vector3::new(-0.5, 0.7, 0.0);
        assert_eq!(position_error(&p, &q), position_error(&q, &p));
    }

    #[test]
    fn geodesic_examples() {
        let i = Matrix3::identity();
        let r = rot_x(0.8) * rot_z(-0.3);
        assert_eq!(rotation_geodesic(&r, &r).unwrap(), 0.0);
        assert_relative_eq!(rotation_geodesic(&i, &rot_z(FRAC_PI_2)).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        let axis = Vector3::new(1.0, -2.0, 0.5).normalize();
        let half = exp_so3(&(axis * PI));
        assert_relative_eq!(rotation_geodesic(&i, &half).unwrap(), PI, epsilon = 1e-12);
    }

    #[test]
    fn geodesic_rejects_non_rotation() {
        let i = Matrix3::identity();
        assert!(rotation_geodesic(&i, &(i * 1.1)).is_err());
        assert!(rotation_geodesic(&Matrix3::from_diagonal_element(-1.0), &i).is_err());
    }

    #[test]
    fn geodesic_keeps_precision_for_tiny_angles() {
        for &a in &[1e-14, 1e-11, 1e-8, 1e-5] {
            let r = rot_z(a);
            assert_relative_eq!(geodesic_angle(&Matrix3::identity(), &r), a, max_relative = 1e-6);
        }
    }

    #[test]
    fn log_inverts_exp() {
        let cases = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1e-10, -3e-10, 2e-10),
            Vector3::new(0.3, -0.2, 0.9),
            Vector3::new(0.0, 2.5, -1.0),
            Vector3::new(1.0, 1.0, 1.0).normalize() * (PI - 1e-7),
            Vector3::new(-0.2, 0.9, 0.1).normalize() * (PI - 0.05),
        ];
        for w in cases {
            let back = rotation_log(&exp_so3(&w));
            assert_relative_eq!(back, w, epsilon = 1e-9);
        }
    }

    #[test]
    fn log_norm_matches_half_trace_norm() {
        let w = Vector3::new(0.4, -1.3, 0.6);
        let log = hat(&rotation_log(&exp_so3(&w)));
        let norm = (0.5 * (log.transpose() * log).trace()).sqrt();
        assert_relative_eq!(norm, w.norm(), epsilon = 1e-12);
    }
}
