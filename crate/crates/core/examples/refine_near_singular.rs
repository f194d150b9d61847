//! Damped least-squares refinement from a perturbed start, and how the
//! Jacobian conditioning degrades as theta2 approaches zero.
//!
//! cargo run --example refine_near_singular

use rrprr_kinematics::refine::jacobian_condition;
use rrprr_kinematics::{forward_kinematics, refine, JointVector, RefineParams, RobotModel};

fn main() {
    let model = RobotModel::default();
    let params = RefineParams::default();

    for theta2_deg in [45.0, 5.0, 0.5, 0.05] {
        let q = JointVector::from_degrees(30.0, theta2_deg, 0.4, 60.0, 80.0);
        let target = forward_kinematics(&model, &q);
        let mut start = q;
        start.theta1 += 0.02;
        start.theta4 -= 0.02;
        start.theta5 += 0.01;
        let out = refine(&model, &target, &start, &params);
        println!(
            "theta2 = {theta2_deg:>5} deg: cond {:9.2e}, {:?} after {} trials, residual {:.1e} m / {:.1e} rad",
            jacobian_condition(&model, &q, params.fd_step),
            out.termination,
            out.iterations,
            out.position_residual,
            out.rotation_residual,
        );
    }
}
