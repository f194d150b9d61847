use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn rrprr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrprr"))
        .args(args)
        .output()
        .expect("spawn rrprr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fk_then_solve_flags_boundary_pose() {
    let dir = tempfile::tempdir().unwrap();
    let poses = dir.path().join("poses.csv");
    let o = rrprr(&["fk", "0", "90", "0.4", "0", "90", "--out", poses.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");

    let o = rrprr(&["solve", poses.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "Theta2OutOfRange");
    let joints: Vec<f64> = row[3..8].iter().map(|v| v.parse().unwrap()).collect();
    let expected = [0.0, 90f64.to_radians(), 0.4, 0.0, 90f64.to_radians()];
    for (a, b) in joints.iter().zip(expected) {
        assert!((a - b).abs() < 1e-7, "{joints:?}");
    }
}

#[test]
fn solve_and_refine_reachable_poses() {
    let dir = tempfile::tempdir().unwrap();
    let joints = dir.path().join("joints.csv");
    fs::write(
        &joints,
        "theta1,theta2,d3,theta4,theta5\n0.3,0.7,0.4,-1.1,1.2\n-2.0,0.2,0.35,2.5,0.4\n",
    )
    .unwrap();
    let poses = dir.path().join("poses.csv");
    let o = rrprr(&["fk", "--input", joints.to_str().unwrap(), "--out", poses.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");

    let o = rrprr(&["solve", poses.to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(1) == Some("ok")), "{text}");

    let o = rrprr(&["refine", poses.to_str().unwrap(), "--max-iters", "20", "--damping", "1e-4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("line,seed,termination"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")), "{text}");
}

#[test]
fn empty_pose_file_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.csv");
    fs::write(&p, "").unwrap();
    let o = rrprr(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_row_exits_2_naming_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    fs::write(&p, "px,py,pz,yaw,pitch,roll\n0.1,0.2,0.3,0,0,0\n0.1,0.2,oops,0,0,0\n").unwrap();
    let o = rrprr(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("pz"), "{err}");
}

#[test]
fn missing_file_exits_3() {
    let o = rrprr(&["solve", "/definitely/not/here.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(rrprr(&["eval", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(rrprr(&["eval", "--samples", "ten"]).status.code(), Some(2));
    assert_eq!(rrprr(&["fk", "1", "2"]).status.code(), Some(2));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("arm.toml");
    fs::write(&p, "l3 = \"long\"\n").unwrap();
    let o = rrprr(&["--config", p.to_str().unwrap(), "fk", "0", "45", "0.4", "0", "90"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let csv = dir.path().join("samples.csv");
    let o = rrprr(&[
        "eval", "--samples", "500", "--seed", "3", "--constraint-tol", "0.1", "--d3-slack", "0.01",
        "--out", report.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["total_samples"], 500);
    assert_eq!(v["settings"]["ik"]["constraint_tol"], 0.1);
    assert_eq!(v["settings"]["ik"]["d3_slack"], 0.01);
    let rows = fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 501);
    assert!(rows.starts_with("px,py,pz,yaw,pitch,roll,status,theta1,theta2,d3,theta4,theta5,dx,dy,dz,drot\n"));
    let accepted = rows.lines().filter(|l| l.split(',').nth(6) == Some("ok")).count();
    assert_eq!(v["accepted"], accepted as u64);
}

#[test]
fn reachable_eval_is_exact() {
    let o = rrprr(&["eval", "--samples", "2000", "--seed", "8", "--reachable", "--constraint-tol", "1e-8", "--d3-slack", "1e-9", "--r2z-tol", "1e-9"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["accepted"], 2000);
    for k in ["dx", "dy", "dz", "drot"] {
        assert!(v["errors"][k]["mean"].as_f64().unwrap() < 1e-9);
    }
}
