//! Forward kinematics.
//!
//! [`forward_kinematics`] multiplies the six D-H transforms and is the
//! canonical map. [`fk_closed_form`] evaluates the twelve expanded element
//! equations directly and is kept as an independent cross-check.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::{DhRow, JointVector, RobotModel};
use crate::transform::{Pose, Transform};

/// Standard D-H link transform for `row` with `joint_value` substituted into
/// its variable slot:
///
/// ```text
/// [ cθ  -sθ cα   sθ sα   a cθ ]
/// [ sθ   cθ cα  -cθ sα   a sθ ]
/// [ 0    sα      cα      d    ]
/// ```
pub fn dh_transform(row: &DhRow, joint_value: f64) -> Transform {
    let (d, theta) = row.resolve(joint_value);
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = row.alpha.sin_cos();
    Transform::new(
        Matrix3::new(
            ct,
            -st * ca,
            st * sa,
            st,
            ct * ca,
            -ct * sa,
            0.0,
            sa,
            ca,
        ),
        Vector3::new(row.a * ct, row.a * st, d),
    )
}

/// Per-row joint values; the gripper row has none and gets 0.
fn row_values(q: &JointVector) -> [f64; 6] {
    [q.theta1, q.theta2, q.d3, q.theta4, q.theta5, 0.0]
}

/// All six link transforms `T^{i}_{i-1}` for `q`.
pub fn link_transforms(model: &RobotModel, q: &JointVector) -> [Transform; 6] {
    let rows = model.rows();
    let vals = row_values(q);
    std::array::from_fn(|i| dh_transform(&rows[i], vals[i]))
}

/// End-effector pose `T^6_0 = T^1_0 T^2_1 T^3_2 T^4_3 T^5_4 T^6_5`.
///
/// Defined for every real joint vector; ranges are not checked.
pub fn forward_kinematics(model: &RobotModel, q: &JointVector) -> Pose {
    link_transforms(model, q)
        .into_iter()
        .fold(Transform::identity(), |acc, t| acc * t)
}

/// Prefix product `T^i_0` for `i` in `1..=6`.
pub fn frame_pose(model: &RobotModel, q: &JointVector, i: usize) -> Result<Transform> {
    if !(1..=6).contains(&i) {
        return Err(Error::FrameIndex(i));
    }
    Ok(link_transforms(model, q)
        .into_iter()
        .take(i)
        .fold(Transform::identity(), |acc, t| acc * t))
}

/// Trig shorthands for the expanded element equations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Trig {
    pub c1: f64,
    pub s1: f64,
    pub c2: f64,
    pub s2: f64,
    pub c4: f64,
    pub s4: f64,
    pub c5: f64,
    pub s5: f64,
}

impl Trig {
    pub fn new(theta1: f64, theta2: f64, theta4: f64, theta5: f64) -> Self {
        let (s1, c1) = theta1.sin_cos();
        let (s2, c2) = theta2.sin_cos();
        let (s4, c4) = theta4.sin_cos();
        let (s5, c5) = theta5.sin_cos();
        Self {
            c1,
            s1,
            c2,
            s2,
            c4,
            s4,
            c5,
            s5,
        }
    }

    pub fn of(q: &JointVector) -> Self {
        Self::new(q.theta1, q.theta2, q.theta4, q.theta5)
    }
}

/// Forward kinematics from the twelve expanded element equations.
///
/// Uses `R2x = s1 c4 - c1 c2 s4` and
/// `Py = l2 s1 s2 + l3 c5 (c1 s4 - s1 c2 c4) + l3 s1 s2 s5 + d3 s1 s2`.
/// The widely reproduced forms `R2x = -c4 s1 - c1 c2 s4` and
/// `Py = ... + l3 (c5 c1 s4 + c5 s1 c2 c4) ...` carry sign errors; see
/// [`fk_closed_form_sign_variant`].
pub fn fk_closed_form(model: &RobotModel, q: &JointVector) -> Pose {
    closed_form(model, q, false)
}

/// The element equations with the sign-flipped `R2x` and `Py` terms.
///
/// Not a rigid transform in general: column 2 has squared norm
/// `1 + 4 s1 c1 c2 c4 s4`. Useful only to show that discrepancy.
pub fn fk_closed_form_sign_variant(model: &RobotModel, q: &JointVector) -> Pose {
    closed_form(model, q, true)
}

fn closed_form(model: &RobotModel, q: &JointVector, sign_variant: bool) -> Pose {
    let Trig {
        c1,
        s1,
        c2,
        s2,
        c4,
        s4,
        c5,
        s5,
    } = Trig::of(q);
    let (l1, l2, l3, d3) = (model.l1, model.l2, model.l3, q.d3);

    let r1x = c1 * s2 * s5 - c5 * (s1 * s4 + c1 * c2 * c4);
    let r1y = c5 * (c1 * s4 - c2 * c4 * s1) + s1 * s2 * s5;
    let r1z = -c2 * s5 - c4 * c5 * s2;

    let r2x = if sign_variant {
        -c4 * s1 - c1 * c2 * s4
    } else {
        s1 * c4 - c1 * c2 * s4
    };
    let r2y = -c1 * c4 - c2 * s1 * s4;
    let r2z = -s2 * s4;

    let r3x = -c1 * s2 * c5 - s5 * (s1 * s4 + c1 * c2 * c4);
    let r3y = s5 * (c1 * s4 - c2 * c4 * s1) - s1 * s2 * c5;
    let r3z = c2 * c5 - s2 * c4 * s5;

    let px = l2 * c1 * s2 - l3 * (c5 * s1 * s4 + c5 * c1 * c2 * c4) + l3 * c1 * s2 * s5 + d3 * c1 * s2;
    let py_wrist = if sign_variant {
        c5 * c1 * s4 + c5 * s1 * c2 * c4
    } else {
        c5 * c1 * s4 - c5 * s1 * c2 * c4
    };
    let py = l2 * s1 * s2 + l3 * py_wrist + l3 * s1 * s2 * s5 + d3 * s1 * s2;
    let pz = l1 - l2 * c2 - l3 * c2 * s5 - l3 * c4 * c5 * s2 - d3 * c2;

    Transform::new(
        Matrix3::new(r1x, r2x, r3x, r1y, r2y, r3y, r1z, r2z, r3z),
        Vector3::new(px, py, pz),
    )
}
