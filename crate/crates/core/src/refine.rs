//! Damped least-squares refinement of a joint vector toward a target pose.
//!
//! Used as a fallback near the ends of the joint ranges, where the closed-form
//! solution loses precision, and to find the closest reachable pose when the
//! target is not exactly reachable.

use nalgebra::{Matrix5, Matrix6x5, SVector, Vector5, Vector6};
use serde::{Deserialize, Serialize};

use crate::fk::forward_kinematics;
use crate::metrics::rotation_log;
use crate::model::{JointVector, RobotModel, RANGE_TOLERANCE};
use crate::transform::Pose;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineParams {
    /// Total number of trial steps (accepted or rejected).
    pub max_iters: usize,
    /// Initial damping λ added to the normal equations.
    pub damping: f64,
    /// Stop when an accepted step is shorter than this.
    pub step_tolerance: f64,
    /// Stop once position (m) and orientation (rad) residual norms are both
    /// below these.
    pub position_tolerance: f64,
    pub rotation_tolerance: f64,
    /// Central-difference increment.
    pub fd_step: f64,
}

impl Default for RefineParams {
    fn default() -> Self {
        Self {
            max_iters: 100,
            damping: 1e-3,
            step_tolerance: 1e-15,
            position_tolerance: 1e-11,
            rotation_tolerance: 1e-11,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    ResidualTolerance,
    StepTolerance,
    MaxIterations,
    /// Damping grew so large that no step can make progress.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineOutcome {
    pub joints: JointVector,
    /// Trial steps taken, accepted or not.
    pub iterations: usize,
    pub accepted_steps: usize,
    /// `||residual||` after the start and after every accepted step.
    pub residual_history: Vec<f64>,
    pub position_residual: f64,
    pub rotation_residual: f64,
    pub termination: Termination,
}

impl RefineOutcome {
    pub fn converged(&self) -> bool {
        self.termination == Termination::ResidualTolerance
    }
}

/// `[P_target - P(q); log(R_target R(q)ᵀ)]`, meters then radians.
pub fn pose_residual(model: &RobotModel, q: &JointVector, target: &Pose) -> Vector6<f64> {
    let reached = forward_kinematics(model, q);
    residual_between(target, &reached)
}

fn residual_between(target: &Pose, reached: &Pose) -> Vector6<f64> {
    let dp = target.translation - reached.translation;
    let dr = rotation_log(&(target.rotation * reached.rotation.transpose()));
    Vector6::new(dp.x, dp.y, dp.z, dr.x, dr.y, dr.z)
}

/// Central-difference Jacobian of forward kinematics: rows 0..3 are position
/// derivatives, rows 3..6 the base-frame angular velocity per unit joint
/// motion. Columns follow `(θ1, θ2, d3, θ4, θ5)`.
pub fn numeric_jacobian(model: &RobotModel, q: &JointVector, fd_step: f64) -> Matrix6x5<f64> {
    let base = q.to_array();
    let mut jac = Matrix6x5::zeros();
    for j in 0..5 {
        let mut plus = base;
        let mut minus = base;
        plus[j] += fd_step;
        minus[j] -= fd_step;
        let fp = forward_kinematics(model, &JointVector::from_array(plus));
        let fm = forward_kinematics(model, &JointVector::from_array(minus));
        let dp = (fp.translation - fm.translation) / (2.0 * fd_step);
        let dw = rotation_log(&(fp.rotation * fm.rotation.transpose())) / (2.0 * fd_step);
        jac.fixed_view_mut::<3, 1>(0, j).copy_from(&dp);
        jac.fixed_view_mut::<3, 1>(3, j).copy_from(&dw);
    }
    jac
}

/// Ratio of largest to smallest singular value of the Jacobian at `q`.
/// Grows without bound toward kinematic singularities.
pub fn jacobian_condition(model: &RobotModel, q: &JointVector, fd_step: f64) -> f64 {
    let sv = numeric_jacobian(model, q, fd_step).singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Levenberg-Marquardt iteration from `q0`.
///
/// Each trial solves `(JᵀJ + λI) δ = Jᵀ r`. A trial that lowers `||r||` is
/// accepted and λ is divided by 10; otherwise it is discarded and λ is
/// multiplied by 10. Joints are clamped into the model ranges after every
/// step, so the returned residual is never larger than at the start.
pub fn refine(
    model: &RobotModel,
    target: &Pose,
    q0: &JointVector,
    params: &RefineParams,
) -> RefineOutcome {
    let mut q = model.clamp(q0, RANGE_TOLERANCE);
    let mut r = pose_residual(model, &q, target);
    // Clamping may have moved a q0 lying outside the ranges; keep whichever
    // start is better so the residual never exceeds the one at q0.
    let r0 = pose_residual(model, q0, target);
    if r0.norm() < r.norm() {
        q = *q0;
        r = r0;
    }
    let mut lambda = params.damping;
    let mut history = vec![r.norm()];
    let mut iterations = 0;
    let mut accepted = 0;

    let done = |r: &Vector6<f64>| {
        r.fixed_rows::<3>(0).norm() <= params.position_tolerance
            && r.fixed_rows::<3>(3).norm() <= params.rotation_tolerance
    };

    let termination = loop {
        if done(&r) {
            break Termination::ResidualTolerance;
        }
        if iterations >= params.max_iters {
            break Termination::MaxIterations;
        }
        if lambda > 1e12 {
            break Termination::Stalled;
        }
        iterations += 1;

        let jac = numeric_jacobian(model, &q, params.fd_step);
        let jt = jac.transpose();
        let normal: Matrix5<f64> = jt * jac + Matrix5::identity() * lambda;
        let rhs: Vector5<f64> = jt * r;
        let Some(step) = normal.cholesky().map(|c| c.solve(&rhs)) else {
            lambda *= 10.0;
            continue;
        };

        let trial = model.clamp(&add(&q, &step), RANGE_TOLERANCE);
        let r_trial = pose_residual(model, &trial, target);
        if r_trial.norm() < r.norm() {
            let moved = max_abs(&sub(&trial, &q));
            q = trial;
            r = r_trial;
            accepted += 1;
            history.push(r.norm());
            lambda = (lambda / 10.0).max(1e-12);
            if moved < params.step_tolerance {
                break Termination::StepTolerance;
            }
        } else {
            lambda *= 10.0;
        }
    };

    RefineOutcome {
        joints: q,
        iterations,
        accepted_steps: accepted,
        residual_history: history,
        position_residual: r.fixed_rows::<3>(0).norm(),
        rotation_residual: r.fixed_rows::<3>(3).norm(),
        termination,
    }
}

fn add(q: &JointVector, d: &SVector<f64, 5>) -> JointVector {
    let a = q.to_array();
    JointVector::from_array(std::array::from_fn(|i| a[i] + d[i]))
}

fn sub(a: &JointVector, b: &JointVector) -> [f64; 5] {
    let (a, b) = (a.to_array(), b.to_array());
    std::array::from_fn(|i| a[i] - b[i])
}

fn max_abs(v: &[f64; 5]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
