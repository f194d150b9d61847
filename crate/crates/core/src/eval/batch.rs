//! CSV pose and joint files, and batch solve/refine over them.
//!
//! Pose files have a header row naming either
//! `px,py,pz,r11,r12,r13,r21,r22,r23,r31,r32,r33` (row-major rotation) or
//! `px,py,pz,yaw,pitch,roll` (radians, same convention as the sampler).
//! Joint files name `theta1,theta2,d3,theta4,theta5` (radians and meters).
//! Column order is free, lines starting with `#` are skipped, and extra
//! columns are ignored.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::ik::{self, IkFailure, IkOptions, IkSolution};
use crate::model::{JointVector, RobotModel};
use crate::refine::{jacobian_condition, refine, RefineOutcome, RefineParams};
use crate::transform::{Pose, Transform};

use super::fmt_f64;
use super::sampling::euler_ypr_to_matrix;

const POSITION: [&str; 3] = ["px", "py", "pz"];
const MATRIX: [&str; 9] = ["r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"];
const EULER: [&str; 3] = ["yaw", "pitch", "roll"];
const JOINTS: [&str; 5] = ["theta1", "theta2", "d3", "theta4", "theta5"];

/// A parsed row and the 1-based line it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row<T> {
    pub line: usize,
    pub value: T,
}

struct Table {
    headers: Vec<String>,
    rows: Vec<(usize, csv::StringRecord)>,
}

impl Table {
    fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let headers = rdr
            .headers()?
            .iter()
            .map(|h| h.to_ascii_lowercase())
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            rows.push((line, rec));
        }
        Ok(Self { headers, rows })
    }

    fn has(&self, names: &[&str]) -> bool {
        names.iter().all(|n| self.headers.iter().any(|h| h == n))
    }

    fn columns(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.headers.iter().position(|h| h == n).ok_or_else(|| Error::Parse {
                    line: 1,
                    field: (*n).to_owned(),
                    message: "missing column in header".to_owned(),
                })
            })
            .collect()
    }
}

fn field(rec: &csv::StringRecord, line: usize, col: usize, name: &str) -> Result<f64> {
    let err = |message: String| Error::Parse {
        line,
        field: name.to_owned(),
        message,
    };
    let raw = rec.get(col).ok_or_else(|| err("missing value".to_owned()))?;
    let v: f64 = raw
        .parse()
        .map_err(|_| err(format!("`{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(err(format!("`{raw}` is not finite")));
    }
    Ok(v)
}

fn fields<const N: usize>(
    rec: &csv::StringRecord,
    line: usize,
    cols: &[usize],
    names: &[&str; N],
) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    for (k, name) in names.iter().enumerate() {
        out[k] = field(rec, line, cols[k], name)?;
    }
    Ok(out)
}

/// Parses a pose table. An empty input yields no rows.
pub fn read_poses<R: Read>(reader: R) -> Result<Vec<Row<Pose>>> {
    let table = Table::read(reader)?;
    if table.headers.is_empty() && table.rows.is_empty() {
        return Ok(Vec::new());
    }
    let pos = table.columns(&POSITION)?;
    let matrix = table.has(&MATRIX);
    let orient = if matrix {
        table.columns(&MATRIX)?
    } else if table.has(&EULER) {
        table.columns(&EULER)?
    } else {
        return Err(Error::Parse {
            line: 1,
            field: "header".to_owned(),
            message: "expected r11..r33 or yaw,pitch,roll columns".to_owned(),
        });
    };
    table
        .rows
        .iter()
        .map(|(line, rec)| {
            let p = fields(rec, *line, &pos, &POSITION)?;
            let rotation = if matrix {
                let m = fields(rec, *line, &orient, &MATRIX)?;
                Matrix3::from_row_slice(&m)
            } else {
                let [y, p, r] = fields(rec, *line, &orient, &EULER)?;
                euler_ypr_to_matrix(y, p, r)
            };
            Ok(Row {
                line: *line,
                value: Transform::new(rotation, Vector3::from(p)),
            })
        })
        .collect()
}

/// Parses a joint table. An empty input yields no rows.
pub fn read_joints<R: Read>(reader: R) -> Result<Vec<Row<JointVector>>> {
    let table = Table::read(reader)?;
    if table.headers.is_empty() && table.rows.is_empty() {
        return Ok(Vec::new());
    }
    let cols = table.columns(&JOINTS)?;
    table
        .rows
        .iter()
        .map(|(line, rec)| {
            Ok(Row {
                line: *line,
                value: JointVector::from_array(fields(rec, *line, &cols, &JOINTS)?),
            })
        })
        .collect()
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Writes poses with the matrix header.
pub fn write_poses<W: Write>(out: W, rows: &[Row<Pose>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        return Ok(());
    }
    let mut header = vec!["line"];
    header.extend(POSITION);
    header.extend(MATRIX);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.line.to_string()];
        let t = r.value.translation;
        rec.extend([t.x, t.y, t.z].iter().map(|&v| fmt_f64(v)));
        let m = r.value.rotation;
        for i in 0..3 {
            for j in 0..3 {
                rec.push(fmt_f64(m[(i, j)]));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

pub type SolveResult = std::result::Result<IkSolution, IkFailure>;

pub fn solve_batch(model: &RobotModel, poses: &[Row<Pose>], opts: &IkOptions) -> Vec<Row<SolveResult>> {
    poses
        .iter()
        .map(|r| Row {
            line: r.line,
            value: ik::solve(model, &r.value, opts),
        })
        .collect()
}

pub const SOLVE_HEADER: [&str; 13] = [
    "line", "status", "branch", "theta1", "theta2", "d3", "theta4", "theta5", "wrist_residual",
    "base_residual", "d3_spread", "position_residual", "rotation_residual",
];

/// One row per solve. Failed rows carry the rejected candidate joints when
/// the solver got that far.
pub fn write_solutions<W: Write>(out: W, rows: &[Row<SolveResult>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        return Ok(());
    }
    w.write_record(SOLVE_HEADER)?;
    let blank = || String::new();
    for r in rows {
        let mut rec = vec![r.line.to_string()];
        match &r.value {
            Ok(s) => {
                rec.push("ok".to_owned());
                rec.push(s.branch.to_string());
                rec.extend(s.joints.to_array().iter().map(|&v| fmt_f64(v)));
                rec.extend(
                    [
                        s.constraint_residuals.wrist,
                        s.constraint_residuals.base,
                        s.d3.spread(),
                        s.fk_residual.position,
                        s.fk_residual.rotation,
                    ]
                    .iter()
                    .map(|&v| fmt_f64(v)),
                );
            }
            Err(f) => {
                rec.push(f.reason.as_str().to_owned());
                rec.push(f.branch.map_or_else(blank, |b| b.to_string()));
                match f.candidate {
                    Some(q) => rec.extend(q.to_array().iter().map(|&v| fmt_f64(v))),
                    None => rec.extend(std::iter::repeat_n(blank(), 5)),
                }
                let diag = |k| f.diagnostic(k).map_or_else(blank, fmt_f64);
                rec.push(diag("wrist"));
                rec.push(diag("base"));
                rec.extend(std::iter::repeat_n(blank(), 3));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

/// Where a refinement started.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seed {
    /// Accepted analytical solution.
    Analytic,
    /// Joints the analytical solver computed but rejected.
    Candidate,
    /// Middle of every joint range.
    MidRange,
}

impl Seed {
    pub fn as_str(self) -> &'static str {
        match self {
            Seed::Analytic => "analytic",
            Seed::Candidate => "candidate",
            Seed::MidRange => "mid_range",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineRecord {
    pub seed: Seed,
    pub outcome: RefineOutcome,
    /// Jacobian condition number at the refined joints.
    pub condition: f64,
}

/// Analytical solve, then damped least squares from the best available
/// starting point.
pub fn refine_batch(
    model: &RobotModel,
    poses: &[Row<Pose>],
    opts: &IkOptions,
    params: &RefineParams,
) -> Vec<Row<RefineRecord>> {
    poses
        .iter()
        .map(|r| {
            let (seed, q0) = match ik::solve(model, &r.value, opts) {
                Ok(s) => (Seed::Analytic, s.joints),
                Err(IkFailure {
                    candidate: Some(q), ..
                }) if q.is_finite() => (Seed::Candidate, q),
                Err(_) => (Seed::MidRange, model.mid_joints()),
            };
            let outcome = refine(model, &r.value, &q0, params);
            let condition = jacobian_condition(model, &outcome.joints, params.fd_step);
            Row {
                line: r.line,
                value: RefineRecord {
                    seed,
                    outcome,
                    condition,
                },
            }
        })
        .collect()
}

pub const REFINE_HEADER: [&str; 13] = [
    "line", "seed", "termination", "iterations", "theta1", "theta2", "d3", "theta4", "theta5",
    "position_residual", "rotation_residual", "condition", "converged",
];

pub fn write_refinements<W: Write>(out: W, rows: &[Row<RefineRecord>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        return Ok(());
    }
    w.write_record(REFINE_HEADER)?;
    for r in rows {
        let o = &r.value.outcome;
        let mut rec = vec![
            r.line.to_string(),
            r.value.seed.as_str().to_owned(),
            format!("{:?}", o.termination),
            o.iterations.to_string(),
        ];
        rec.extend(o.joints.to_array().iter().map(|&v| fmt_f64(v)));
        rec.extend(
            [o.position_residual, o.rotation_residual, r.value.condition]
                .iter()
                .map(|&v| fmt_f64(v)),
        );
        rec.push(o.converged().to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::forward_kinematics;

    #[test]
    fn empty_input_gives_empty_output() {
        assert!(read_poses("".as_bytes()).unwrap().is_empty());
        assert!(read_joints("".as_bytes()).unwrap().is_empty());
        let mut out = Vec::new();
        write_solutions(&mut out, &[]).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn parse_errors_name_line_and_field() {
        let text = "px,py,pz,yaw,pitch,roll\n0.1,0.2,0.3,0,0,0\n0.1,abc,0.3,0,0,0\n";
        match read_poses(text.as_bytes()) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(field, "py");
            }
            other => panic!("{other:?}"),
        }
        let short = "theta1,theta2,d3,theta4,theta5\n0,1,0.4,0\n";
        match read_joints(short.as_bytes()) {
            Err(Error::Parse { line, field, .. }) => assert_eq!((line, field.as_str()), (2, "theta5")),
            other => panic!("{other:?}"),
        }
        assert!(read_poses("a,b\n1,2\n".as_bytes()).unwrap_err().is_parse());
    }

    #[test]
    fn matrix_and_euler_headers_agree() {
        let e = "# comment\npitch, px,py,pz,yaw,roll\n0.5,0.1,0.2,-0.3,0.2,-1.0\n";
        let from_euler = read_poses(e.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_poses(&mut out, &from_euler).unwrap();
        let from_matrix = read_poses(out.as_slice()).unwrap();
        assert!(from_euler[0].value.max_abs_diff(&from_matrix[0].value) < 1e-15);
        assert_eq!(from_euler[0].line, 3);
    }

    #[test]
    fn batch_solve_round_trip() {
        let model = RobotModel::default();
        let q = JointVector::from_degrees(20.0, 50.0, 0.4, -30.0, 70.0);
        let rows = vec![Row { line: 2, value: forward_kinematics(&model, &q) }];
        let out = solve_batch(&model, &rows, &IkOptions::default());
        assert!(out[0].value.as_ref().unwrap().joints.max_abs_diff(&q) < 1e-9);
        let mut buf = Vec::new();
        write_solutions(&mut buf, &out).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("2,ok,case1,"));
    }
}
