//! Rigid transforms stored as a rotation block plus a translation.

use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};

/// Default tolerance for SO(3) membership of stored rotations.
pub const SO3_TOLERANCE: f64 = 1e-9;

/// Homogeneous transform `[R p; 0 1]`.
///
/// Composition is exact matrix arithmetic on the rotation block; nothing is
/// re-orthonormalized, so chained products keep whatever rounding the inputs
/// carry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

/// End-effector pose. Same representation as [`Transform`]; the columns of
/// `rotation` are the `R1`, `R2`, `R3` direction vectors and
/// `translation` is the position `P`.
pub type Pose = Transform;

impl Transform {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Matrix3::identity(), Vector3::zeros())
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self::new(Matrix3::identity(), translation)
    }

    /// Builds from a 4x4 homogeneous matrix. The bottom row is not checked.
    pub fn from_matrix(m: &Matrix4<f64>) -> Self {
        Self::new(
            m.fixed_view::<3, 3>(0, 0).into_owned(),
            m.fixed_view::<3, 1>(0, 3).into_owned(),
        )
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Rigid inverse `[Rᵀ, -Rᵀp]`. Assumes the rotation block is orthonormal.
    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self::new(rt, -(rt * self.translation))
    }

    pub fn position(&self) -> Vector3<f64> {
        self.translation
    }

    /// Column `i` (0-based) of the rotation block.
    pub fn axis(&self, i: usize) -> Vector3<f64> {
        self.rotation.column(i).into_owned()
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Checks that the rotation block is in SO(3) within `tol`.
    pub fn check_rotation(&self, tol: f64) -> Result<()> {
        check_so3(&self.rotation, tol)
    }

    /// Largest element-wise difference from `other` over all twelve entries.
    pub fn max_abs_diff(&self, other: &Transform) -> f64 {
        let r = (self.rotation - other.rotation).amax();
        let t = (self.translation - other.translation).amax();
        r.max(t)
    }
}

impl Mul for Transform {
    type Output = Transform;

    fn mul(self, rhs: Transform) -> Transform {
        Transform::new(
            self.rotation * rhs.rotation,
            self.rotation * rhs.translation + self.translation,
        )
    }
}

impl Mul<&Transform> for &Transform {
    type Output = Transform;

    fn mul(self, rhs: &Transform) -> Transform {
        *self * *rhs
    }
}

/// `||RᵀR - I||∞` (max absolute entry).
pub fn orthogonality_error(r: &Matrix3<f64>) -> f64 {
    (r.transpose() * r - Matrix3::identity()).amax()
}

pub fn check_so3(r: &Matrix3<f64>, tol: f64) -> Result<()> {
    let orthogonality = orthogonality_error(r);
    let det = r.determinant();
    if !(orthogonality <= tol && (det - 1.0).abs() <= tol) {
        return Err(Error::NotRotation { orthogonality, det });
    }
    Ok(())
}

pub fn rot_x(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Skew-symmetric (hat) matrix of `v`.
pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`] applied to the skew part of `m`: `vee((m - mᵀ)/2)`.
pub fn vee_skew(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}
