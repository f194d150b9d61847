//! Seeded workspace evaluation: free poses at the harness tolerances, and
//! reachable poses (FK of in-range joints) at the exact round-trip ones.
//!
//! cargo run --release --example monte_carlo_eval -- [samples] [seed]

use rrprr_kinematics::eval::{run_evaluation, EvalConfig, PoseSource};
use rrprr_kinematics::{IkOptions, RobotModel};

fn main() -> rrprr_kinematics::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let model = RobotModel::default();

    for source in [PoseSource::Free, PoseSource::Reachable] {
        let mut cfg = EvalConfig::new(samples, seed);
        cfg.source = source;
        if source == PoseSource::Reachable {
            cfg.ik = IkOptions::default();
        }
        let report = run_evaluation(&model, &cfg, None)?;
        println!("{} poses: accepted {} of {}", source.as_str(), report.accepted, report.total_samples);
        for (reason, n) in report.failures.iter().filter(|(_, n)| **n > 0) {
            println!("  {reason:<20} {n}");
        }
        if let Some(e) = report.errors {
            println!(
                "  mean |dX| {:.3e}  |dY| {:.3e}  |dZ| {:.3e} m  dR {:.3e} rad",
                e.dx.mean, e.dy.mean, e.dz.mean, e.drot.mean
            );
        }
    }
    Ok(())
}
