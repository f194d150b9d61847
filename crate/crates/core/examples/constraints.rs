//! The two orientation identities every forward-kinematics pose satisfies,
//! and how they respond to an arbitrary rotation.
//!
//! cargo run --example constraints

use rrprr_kinematics::eval::euler_ypr_to_matrix;
use rrprr_kinematics::ik::check_constraints;
use rrprr_kinematics::{forward_kinematics, JointVector, RobotModel};

fn main() {
    let model = RobotModel::default();
    let q = JointVector::from_degrees(50.0, 25.0, 0.35, -140.0, 100.0);
    let pose = forward_kinematics(&model, &q);
    let c = check_constraints(&pose, &q);
    println!("FK pose:        wrist {:+.2e}  base {:+.2e}", c.wrist, c.base);

    let mut rotated = pose;
    rotated.rotation = euler_ypr_to_matrix(0.3, 1.2, -0.7);
    let c = check_constraints(&rotated, &q);
    println!("other rotation: wrist {:+.2e}  base {:+.2e}", c.wrist, c.base);

    // R2z is always -sin(theta2) sin(theta4) on the arm.
    let r2z = pose.rotation[(2, 1)];
    println!(
        "R2z = {r2z:.12}, -s2 s4 = {:.12}",
        -q.theta2.sin() * q.theta4.sin()
    );
}
