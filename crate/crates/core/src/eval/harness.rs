//! Seeded, parallel Monte-Carlo evaluation of the analytical solver.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fk::forward_kinematics;
use crate::ik::{self, Branch, FailureReason, IkOptions};
use crate::metrics::{pose_error, PoseError};
use crate::model::{JointVector, RobotModel};
use crate::transform::Pose;

use super::report::{EvalReport, RunSettings, Tally, Timing};
use super::sampling::{matrix_to_euler_ypr, sample_joints, sample_pose, sample_rng, ShellSpec};
use super::fmt_f64;

/// Samples evaluated in parallel before their results are folded in order.
const CHUNK: u64 = 8192;

/// Where targets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoseSource {
    /// Uniform position in the workspace shell and random Euler orientation.
    #[default]
    Free,
    /// Forward kinematics of joints drawn uniformly from the model ranges.
    Reachable,
}

impl PoseSource {
    pub fn as_str(self) -> &'static str {
        match self {
            PoseSource::Free => "free",
            PoseSource::Reachable => "reachable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub samples: u64,
    pub seed: u64,
    pub ik: IkOptions,
    /// Worker threads; 0 lets rayon decide. Results do not depend on it.
    pub workers: usize,
    pub source: PoseSource,
}

impl EvalConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            ik: Self::default_ik_options(),
            workers: 0,
            source: PoseSource::Free,
        }
    }

    /// Solver thresholds for sampled targets: constraint tolerance 0.05,
    /// `d3` slack 2 cm, and the coplanar branch for `|R2z| < 0.05`.
    pub fn default_ik_options() -> IkOptions {
        IkOptions {
            r2z_tol: 0.05,
            constraint_tol: 0.05,
            d3_slack: 0.02,
            ..IkOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleOutcome {
    Accepted {
        joints: JointVector,
        branch: Branch,
        error: PoseError,
    },
    Rejected {
        reason: FailureReason,
        candidate: Option<JointVector>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRecord {
    pub index: u64,
    pub target: Pose,
    pub ypr: [f64; 3],
    pub outcome: SampleOutcome,
}

/// Draws target `index` and runs the solver on it. Depends only on the seed,
/// the index and the settings.
pub fn evaluate_sample(
    model: &RobotModel,
    shell: &ShellSpec,
    config: &EvalConfig,
    index: u64,
) -> SampleRecord {
    let mut rng = sample_rng(config.seed, index);
    let (target, ypr) = match config.source {
        PoseSource::Free => {
            let s = sample_pose(&mut rng, shell);
            (s.pose, s.ypr)
        }
        PoseSource::Reachable => {
            let q = sample_joints(&mut rng, model, 1e-3);
            let pose = forward_kinematics(model, &q);
            (pose, matrix_to_euler_ypr(&pose.rotation))
        }
    };
    let outcome = match ik::solve(model, &target, &config.ik) {
        Ok(sol) => SampleOutcome::Accepted {
            joints: sol.joints,
            branch: sol.branch,
            error: pose_error(&target, &forward_kinematics(model, &sol.joints)),
        },
        Err(f) => SampleOutcome::Rejected {
            reason: f.reason,
            candidate: f.candidate,
        },
    };
    SampleRecord {
        index,
        target,
        ypr,
        outcome,
    }
}

pub const CSV_HEADER: [&str; 16] = [
    "px", "py", "pz", "yaw", "pitch", "roll", "status", "theta1", "theta2", "d3", "theta4",
    "theta5", "dx", "dy", "dz", "drot",
];

fn csv_row(r: &SampleRecord) -> Vec<String> {
    let p = r.target.translation;
    let mut row: Vec<String> = [p.x, p.y, p.z, r.ypr[0], r.ypr[1], r.ypr[2]]
        .iter()
        .map(|&v| fmt_f64(v))
        .collect();
    let (status, joints, error) = match &r.outcome {
        SampleOutcome::Accepted { joints, error, .. } => ("ok", Some(*joints), Some(*error)),
        SampleOutcome::Rejected { reason, candidate } => (reason.as_str(), *candidate, None),
    };
    row.push(status.to_owned());
    match joints {
        Some(q) => row.extend(q.to_array().iter().map(|&v| fmt_f64(v))),
        None => row.extend(std::iter::repeat_n(String::new(), 5)),
    }
    match error {
        Some(e) => row.extend(e.as_array().iter().map(|&v| fmt_f64(v))),
        None => row.extend(std::iter::repeat_n(String::new(), 4)),
    }
    row
}

/// Runs `config.samples` trials and returns the aggregate report. When `csv`
/// is given, one row per sample is written in index order.
pub fn run_evaluation(
    model: &RobotModel,
    config: &EvalConfig,
    csv: Option<&mut dyn Write>,
) -> Result<EvalReport> {
    model.validate()?;
    let shell = ShellSpec::from_model(model);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidModel(format!("thread pool: {e}")))?;
    let workers = pool.current_num_threads();

    let mut writer = csv.map(csv::Writer::from_writer);
    if let Some(w) = writer.as_mut() {
        w.write_record(CSV_HEADER)?;
    }

    let start = Instant::now();
    let mut tally = Tally::default();
    let mut lo = 0;
    while lo < config.samples {
        let hi = (lo + CHUNK).min(config.samples);
        let records: Vec<SampleRecord> = pool.install(|| {
            (lo..hi)
                .into_par_iter()
                .map(|i| evaluate_sample(model, &shell, config, i))
                .collect()
        });
        for r in &records {
            match r.outcome {
                SampleOutcome::Accepted { branch, error, .. } => tally.accept(branch, error),
                SampleOutcome::Rejected { reason, .. } => tally.reject(reason),
            }
            if let Some(w) = writer.as_mut() {
                w.write_record(csv_row(r))?;
            }
        }
        lo = hi;
    }
    if let Some(mut w) = writer {
        w.flush().map_err(|e| Error::io("<csv>", e))?;
    }
    let seconds = start.elapsed().as_secs_f64();

    let mut report = tally.into_report(RunSettings {
        samples: config.samples,
        seed: config.seed,
        source: config.source.as_str().to_owned(),
        euler_convention: "R = Rz(yaw) Ry(pitch) Rx(roll); yaw, roll ~ U[0, 2pi], pitch ~ U[0, pi]"
            .to_owned(),
        shell,
        ik: config.ik,
    });
    report.timing = Some(Timing {
        workers,
        seconds,
        samples_per_second: if seconds > 0.0 {
            config.samples as f64 / seconds
        } else {
            0.0
        },
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip(mut r: EvalReport) -> EvalReport {
        r.timing = None;
        r
    }

    #[test]
    fn reachable_targets_are_all_accepted() {
        let mut cfg = EvalConfig::new(2000, 5);
        cfg.source = PoseSource::Reachable;
        cfg.ik = IkOptions::default();
        let r = run_evaluation(&RobotModel::default(), &cfg, None).unwrap();
        assert_eq!(r.accepted, 2000, "{:?}", r.failures);
        let e = r.errors.unwrap();
        assert!(e.max_position_mean() < 1e-9);
        assert!(e.drot.mean < 1e-9);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let model = RobotModel::default();
        let mut cfg = EvalConfig::new(CHUNK + 500, 11);
        let mut out = Vec::new();
        cfg.workers = 1;
        let a = run_evaluation(&model, &cfg, Some(&mut out)).unwrap();
        let mut out2 = Vec::new();
        cfg.workers = 3;
        let b = run_evaluation(&model, &cfg, Some(&mut out2)).unwrap();
        assert_eq!(strip(a), strip(b));
        assert_eq!(out, out2);
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let mut out = Vec::new();
        run_evaluation(&RobotModel::default(), &EvalConfig::new(50, 1), Some(&mut out)).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 51);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 16));
    }

    #[test]
    fn zero_samples_gives_null_errors() {
        let r = run_evaluation(&RobotModel::default(), &EvalConfig::new(0, 1), None).unwrap();
        assert_eq!(r.total_samples, 0);
        assert!(r.errors.is_none());
    }
}
