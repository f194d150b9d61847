//! Pose of the tool for a joint vector, and the intermediate frames.
//!
//! cargo run --example forward_kinematics

use rrprr_kinematics::fk::{fk_closed_form, frame_pose};
use rrprr_kinematics::{forward_kinematics, JointVector, RobotModel};

fn main() {
    let model = RobotModel::default();
    let q = JointVector::from_degrees(30.0, 45.0, 0.40, -20.0, 75.0);

    let pose = forward_kinematics(&model, &q);
    println!("joints: {q:?}");
    println!("tool position (m): {:.6?}", pose.translation.as_slice());
    println!("tool rotation:{:.6}", pose.rotation);

    for i in 1..=6 {
        let f = frame_pose(&model, &q, i).expect("frames 1..=6 exist");
        println!("frame {i} origin: {:.4?}", f.translation.as_slice());
    }

    let expanded = fk_closed_form(&model, &q);
    println!(
        "closed-form vs chained product, max element difference: {:.1e}",
        pose.max_abs_diff(&expanded)
    );
}
