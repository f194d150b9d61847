//! Workspace sampling for the Monte-Carlo study.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{JointId, JointVector, RobotModel};
use crate::transform::{rot_x, rot_y, rot_z, Pose, Transform};

/// Lower hemispherical shell around the shoulder that bounds the workspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub center: [f64; 3],
    pub r_inner: f64,
    pub r_outer: f64,
}

impl ShellSpec {
    /// Center `(0, 0, l1)`, `r_inner = d3_min + l2`, `r_outer = d3_max + l2 + l3`.
    pub fn from_model(model: &RobotModel) -> Self {
        Self {
            center: [0.0, 0.0, model.l1],
            r_inner: model.d3.lo + model.l2,
            r_outer: model.d3.hi + model.l2 + model.l3,
        }
    }

    pub fn center(&self) -> Vector3<f64> {
        Vector3::from(self.center)
    }

    /// `r_inner <= |p - c| <= r_outer` and `p_z <= c_z`.
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        let d = p - self.center();
        let r = d.norm();
        r >= self.r_inner && r <= self.r_outer && d.z <= 0.0
    }

    /// Mean distance from the center for a volume-uniform point in the shell:
    /// `(3/4)(ro⁴ - ri⁴)/(ro³ - ri³)`.
    pub fn mean_radius(&self) -> f64 {
        let (ri, ro) = (self.r_inner, self.r_outer);
        0.75 * (ro.powi(4) - ri.powi(4)) / (ro.powi(3) - ri.powi(3))
    }

    /// Fraction of the bounding box occupied by the shell.
    pub fn box_fill_ratio(&self) -> f64 {
        let (ri, ro) = (self.r_inner, self.r_outer);
        let shell = (2.0 / 3.0) * PI * (ro.powi(3) - ri.powi(3));
        shell / (4.0 * ro.powi(3))
    }
}

/// `R = Rz(yaw) · Ry(pitch) · Rx(roll)` (intrinsic Z-Y-X).
pub fn euler_ypr_to_matrix(yaw: f64, pitch: f64, roll: f64) -> Matrix3<f64> {
    rot_z(yaw) * rot_y(pitch) * rot_x(roll)
}

/// Inverse of [`euler_ypr_to_matrix`] with pitch in `[-π/2, π/2]`.
pub fn matrix_to_euler_ypr(r: &Matrix3<f64>) -> [f64; 3] {
    let pitch = (-r[(2, 0)]).clamp(-1.0, 1.0).asin();
    if r[(2, 0)].abs() < 1.0 - 1e-12 {
        [r[(1, 0)].atan2(r[(0, 0)]), pitch, r[(2, 1)].atan2(r[(2, 2)])]
    } else {
        // Gimbal lock: fold everything into yaw.
        [(-r[(0, 1)]).atan2(r[(1, 1)]), pitch, 0.0]
    }
}

/// Independent generator for sample `index` of a run seeded with `seed`.
///
/// Each sample owns its own ChaCha stream, so results do not depend on how
/// samples are spread across threads.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A sampled target together with the Euler angles that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledPose {
    pub pose: Pose,
    pub ypr: [f64; 3],
}

/// Position uniform in the shell (box sampling plus rejection), orientation
/// from yaw, roll ~ U[0, 2π] and pitch ~ U[0, π].
pub fn sample_pose<R: Rng + ?Sized>(rng: &mut R, shell: &ShellSpec) -> SampledPose {
    let c = shell.center();
    let ro = shell.r_outer;
    let position = loop {
        let p = Vector3::new(
            rng.random_range(-ro..=ro),
            rng.random_range(-ro..=ro),
            rng.random_range(-ro..=0.0),
        ) + c;
        if shell.contains(&p) {
            break p;
        }
    };
    let yaw = rng.random_range(0.0..=2.0 * PI);
    let pitch = rng.random_range(0.0..=PI);
    let roll = rng.random_range(0.0..=2.0 * PI);
    SampledPose {
        pose: Transform::new(euler_ypr_to_matrix(yaw, pitch, roll), position),
        ypr: [yaw, pitch, roll],
    }
}

/// Joint vector uniform over the model ranges, kept `margin` away from every
/// bound.
pub fn sample_joints<R: Rng + ?Sized>(rng: &mut R, model: &RobotModel, margin: f64) -> JointVector {
    JointVector::from_array(JointId::ALL.map(|id| {
        let r = model.range(id);
        rng.random_range(r.lo + margin..=r.hi - margin)
    }))
}
