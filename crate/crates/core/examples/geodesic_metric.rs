//! Rotation distance on SO(3) next to a quaternion computation of the same
//! angle.
//!
//! cargo run --example geodesic_metric

use nalgebra::{UnitQuaternion, Vector3};
use rrprr_kinematics::metrics::{pose_error, rotation_geodesic};
use rrprr_kinematics::transform::{rot_x, rot_z};
use rrprr_kinematics::Transform;

fn main() {
    let a = rot_z(0.4) * rot_x(-1.1);
    for angle in [1e-12, 1e-6, 0.5, 3.0] {
        let axis = Vector3::new(0.2, -0.5, 0.84).normalize();
        let b = *nalgebra::Rotation3::new(axis * angle).matrix() * a;
        let d = rotation_geodesic(&a, &b).expect("both are rotations");
        let qa = UnitQuaternion::from_matrix(&a);
        let qb = UnitQuaternion::from_matrix(&b);
        println!(
            "applied {angle:.1e} rad -> geodesic {d:.6e}, quaternion {:.6e}",
            qa.angle_to(&qb)
        );
    }

    let target = Transform::new(a, Vector3::new(0.3, 0.1, -0.4));
    let reached = Transform::new(rot_z(0.01) * a, Vector3::new(0.302, 0.099, -0.405));
    println!("{:?}", pose_error(&target, &reached));
}
