//! Closed-form inverse kinematics on both branches, plus a few rejected
//! targets and the reasons reported for them.
//!
//! cargo run --example inverse_kinematics

use rrprr_kinematics::ik::{solve, IkOptions};
use rrprr_kinematics::{forward_kinematics, JointVector, RobotModel, Transform};
use nalgebra::{Matrix3, Vector3};

fn main() {
    let model = RobotModel::default();
    let opts = IkOptions::default();

    let cases = [
        ("wrist out of plane", JointVector::from_degrees(-60.0, 35.0, 0.37, 110.0, 40.0)),
        ("coplanar (theta4 = 0)", JointVector::from_degrees(20.0, 70.0, 0.42, 0.0, 130.0)),
        ("theta2 on its bound", JointVector::from_degrees(0.0, 90.0, 0.40, 0.0, 90.0)),
    ];
    for (label, q) in cases {
        let target = forward_kinematics(&model, &q);
        match solve(&model, &target, &opts) {
            Ok(sol) => println!(
                "{label}: {} solution, max joint error {:.1e}, fk residual {:.1e} m / {:.1e} rad",
                sol.branch,
                sol.joints.max_abs_diff(&q),
                sol.fk_residual.position,
                sol.fk_residual.rotation
            ),
            Err(f) => println!("{label}: rejected: {f}; computed joints {:?}", f.candidate),
        }
    }

    let too_far = Transform::new(Matrix3::identity(), Vector3::new(0.9, 0.0, -0.3));
    match solve(&model, &too_far, &opts) {
        Ok(_) => println!("unexpected solution"),
        Err(f) => println!("target beyond reach: {f}"),
    }
}
