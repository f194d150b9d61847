//! Command-line front end: `eval`, `fk`, `solve`, `refine`.
//!
//! Exit status 0 on success, 2 on malformed input or arguments, 3 on I/O
//! failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rrprr_kinematics::eval::batch::{self, Row};
use rrprr_kinematics::eval::{run_evaluation, EvalConfig, PoseSource};
use rrprr_kinematics::{
    forward_kinematics, Error, IkOptions, JointVector, RefineParams, Result, RobotModel,
};

#[derive(Parser)]
#[command(name = "rrprr", version, about = "Kinematics tools for a 5-DoF RRPRR arm")]
struct Cli {
    /// Robot geometry and joint ranges (TOML). Defaults to the built-in arm.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo evaluation of the analytical solver.
    Eval(EvalArgs),
    /// Forward kinematics of one joint vector or a joint file.
    Fk(FkArgs),
    /// Analytical inverse kinematics for every pose in a file.
    Solve(SolveArgs),
    /// Analytical solve followed by damped least-squares refinement.
    Refine(RefineArgs),
}

#[derive(Args)]
struct Tolerances {
    /// `|R2z|` below which the coplanar branch is used.
    #[arg(long)]
    r2z_tol: Option<f64>,
    /// Bound on both constraint residuals.
    #[arg(long)]
    constraint_tol: Option<f64>,
    /// Slack around the d3 range (m).
    #[arg(long)]
    d3_slack: Option<f64>,
}

impl Tolerances {
    fn apply(&self, mut opts: IkOptions) -> IkOptions {
        if let Some(v) = self.r2z_tol {
            opts.r2z_tol = v;
        }
        if let Some(v) = self.constraint_tol {
            opts.constraint_tol = v;
        }
        if let Some(v) = self.d3_slack {
            opts.d3_slack = v;
        }
        opts
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tol: Tolerances,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Report file (JSON). Printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-sample CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Sample targets as FK of random in-range joints instead of free poses.
    #[arg(long)]
    reachable: bool,
}

#[derive(Args)]
struct FkArgs {
    /// theta1 theta2 d3 theta4 theta5 (angles in degrees, d3 in meters).
    #[arg(num_args = 5, allow_negative_numbers = true, conflicts_with = "input")]
    joints: Vec<f64>,
    /// Joint CSV (radians, meters) with header theta1,theta2,d3,theta4,theta5.
    #[arg(long, required_unless_present = "joints")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Pose CSV with px,py,pz and either r11..r33 or yaw,pitch,roll.
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tol: Tolerances,
}

#[derive(Args)]
struct RefineArgs {
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tol: Tolerances,
    #[arg(long, default_value_t = RefineParams::default().max_iters)]
    max_iters: usize,
    #[arg(long, default_value_t = RefineParams::default().damping)]
    damping: f64,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Io {
            path: p.to_owned(),
            source: e,
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    let model = match &cli.config {
        Some(p) => RobotModel::from_file(p)?,
        None => RobotModel::default(),
    };
    match cli.command {
        Command::Eval(a) => {
            let mut cfg = EvalConfig::new(a.samples, a.seed);
            cfg.ik = a.tol.apply(cfg.ik);
            cfg.workers = a.workers;
            if a.reachable {
                cfg.source = PoseSource::Reachable;
            }
            let mut csv = a.csv.as_deref().map(|p| output(Some(p))).transpose()?;
            let report = run_evaluation(&model, &cfg, csv.as_mut().map(|w| w as &mut dyn Write))?;
            let mut out = output(a.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out).map_err(|e| Error::Io { path: "<report>".into(), source: e })
        }
        Command::Fk(a) => {
            let rows = match &a.input {
                Some(p) => batch::read_joints(batch::open(p)?)?,
                None => {
                    let j = &a.joints;
                    vec![Row {
                        line: 1,
                        value: JointVector::from_degrees(j[0], j[1], j[2], j[3], j[4]),
                    }]
                }
            };
            let poses: Vec<_> = rows
                .iter()
                .map(|r| Row { line: r.line, value: forward_kinematics(&model, &r.value) })
                .collect();
            batch::write_poses(output(a.out.as_deref())?, &poses)
        }
        Command::Solve(a) => {
            let poses = batch::read_poses(batch::open(&a.input)?)?;
            let rows = batch::solve_batch(&model, &poses, &a.tol.apply(IkOptions::default()));
            batch::write_solutions(output(a.out.as_deref())?, &rows)
        }
        Command::Refine(a) => {
            let poses = batch::read_poses(batch::open(&a.input)?)?;
            let params = RefineParams {
                max_iters: a.max_iters,
                damping: a.damping,
                ..RefineParams::default()
            };
            let rows = batch::refine_batch(&model, &poses, &a.tol.apply(IkOptions::default()), &params);
            batch::write_refinements(output(a.out.as_deref())?, &rows)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_parse() { 2 } else { 3 })
        }
    }
}
