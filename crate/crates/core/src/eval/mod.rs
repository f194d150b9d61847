//! Monte-Carlo evaluation and batch processing.

pub mod batch;
pub mod harness;
pub mod report;
pub mod sampling;

pub use harness::{evaluate_sample, run_evaluation, EvalConfig, PoseSource, SampleOutcome, SampleRecord};
pub use report::{mean_std, summarize, ErrorStats, EvalReport, MetricStats};
pub use sampling::{euler_ypr_to_matrix, sample_pose, sample_rng, ShellSpec};

/// Scientific notation with 17 significant digits, enough to round-trip any
/// `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
