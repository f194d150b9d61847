//! Reading a pose table, solving every row and writing the result table.
//!
//! cargo run --example batch_solve

use rrprr_kinematics::eval::batch::{read_poses, solve_batch, write_solutions};
use rrprr_kinematics::{IkOptions, RobotModel};

const POSES: &str = "\
# tool poses, Euler angles in radians
px,py,pz,yaw,pitch,roll
0.58,0.0,-0.08,0.0,0.0,3.141592653589793
0.3479817670212812,0.062008829538647156,-0.5308858958305926,-0.2973551433959873,0.9592288511177017,1.5624516949934972
0.30,0.25,-0.45,0.4,1.9,-0.6
0.9,0.0,-0.3,0.0,0.0,0.0
";

fn main() -> rrprr_kinematics::Result<()> {
    let model = RobotModel::default();
    let poses = read_poses(POSES.as_bytes())?;
    let results = solve_batch(&model, &poses, &IkOptions::default());
    write_solutions(std::io::stdout().lock(), &results)?;

    match read_poses("px,py,pz,yaw,pitch,roll\n0.1,0.2,x,0,0,0\n".as_bytes()) {
        Ok(_) => unreachable!(),
        Err(e) => eprintln!("malformed input: {e}"),
    }
    Ok(())
}
