//! Aggregate statistics and the JSON run report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ik::{Branch, FailureReason, IkOptions};
use crate::metrics::PoseError;

use super::sampling::ShellSpec;

/// Mean and sample standard deviation (`n - 1` denominator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    pub std: f64,
}

/// Two-pass mean and sample standard deviation. `None` for an empty slice;
/// a single value has zero spread.
pub fn mean_std(values: &[f64]) -> Option<MetricStats> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Some(MetricStats { mean, std })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub dx: MetricStats,
    pub dy: MetricStats,
    pub dz: MetricStats,
    pub drot: MetricStats,
}

impl ErrorStats {
    /// Largest of the three position means (m).
    pub fn max_position_mean(&self) -> f64 {
        self.dx.mean.max(self.dy.mean).max(self.dz.mean)
    }
}

/// Statistics over accepted samples, `None` when there are none.
pub fn summarize(errors: &[PoseError]) -> Option<ErrorStats> {
    let column = |f: fn(&PoseError) -> f64| errors.iter().map(f).collect::<Vec<_>>();
    Some(ErrorStats {
        dx: mean_std(&column(|e| e.dx))?,
        dy: mean_std(&column(|e| e.dy))?,
        dz: mean_std(&column(|e| e.dz))?,
        drot: mean_std(&column(|e| e.drot))?,
    })
}

/// Settings echoed into the report so a run can be reproduced from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub samples: u64,
    pub seed: u64,
    pub source: String,
    pub euler_convention: String,
    pub shell: ShellSpec,
    pub ik: IkOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub workers: usize,
    pub seconds: f64,
    pub samples_per_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub settings: RunSettings,
    pub total_samples: u64,
    pub accepted: u64,
    pub acceptance_fraction: f64,
    /// Accepted samples per branch.
    pub branches: BTreeMap<String, u64>,
    /// Rejected samples per failure reason; every reason is listed.
    pub failures: BTreeMap<String, u64>,
    /// `null` when no sample was accepted.
    pub errors: Option<ErrorStats>,
    /// Wall-clock data; the only part that varies between identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// Running counts collected while samples stream past.
#[derive(Debug, Clone, Default)]
pub struct Tally {
    pub total: u64,
    pub branches: BTreeMap<Branch, u64>,
    pub failures: BTreeMap<FailureReason, u64>,
    pub errors: Vec<PoseError>,
}

impl Tally {
    pub fn accept(&mut self, branch: Branch, error: PoseError) {
        self.total += 1;
        *self.branches.entry(branch).or_default() += 1;
        self.errors.push(error);
    }

    pub fn reject(&mut self, reason: FailureReason) {
        self.total += 1;
        *self.failures.entry(reason).or_default() += 1;
    }

    pub fn into_report(self, settings: RunSettings) -> EvalReport {
        let accepted = self.errors.len() as u64;
        let mut failures: BTreeMap<String, u64> =
            FailureReason::ALL.iter().map(|r| (r.as_str().to_owned(), 0)).collect();
        for (r, n) in &self.failures {
            failures.insert(r.as_str().to_owned(), *n);
        }
        let mut branches: BTreeMap<String, u64> =
            [Branch::Case1, Branch::Case2].iter().map(|b| (b.to_string(), 0)).collect();
        for (b, n) in &self.branches {
            branches.insert(b.to_string(), *n);
        }
        EvalReport {
            settings,
            total_samples: self.total,
            accepted,
            acceptance_fraction: if self.total == 0 {
                0.0
            } else {
                accepted as f64 / self.total as f64
            },
            branches,
            failures,
            errors: summarize(&self.errors),
            timing: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mean_std_examples() {
        let s = mean_std(&[0.01, 0.03]).unwrap();
        assert_relative_eq!(s.mean, 0.02, epsilon = 1e-15);
        assert_relative_eq!(s.std, 0.02_f64.sqrt() / 10.0, epsilon = 1e-15);
        assert!(mean_std(&[]).is_none());
        assert_eq!(mean_std(&[5.0]).unwrap(), MetricStats { mean: 5.0, std: 0.0 });
    }

    #[test]
    fn two_pass_is_stable_with_offset() {
        let v: Vec<f64> = (0..1000).map(|i| 1e8 + (i % 2) as f64).collect();
        let s = mean_std(&v).unwrap();
        assert_relative_eq!(s.std, (0.25 * 1000.0 / 999.0_f64).sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn empty_tally_has_null_errors() {
        let settings = RunSettings {
            samples: 0,
            seed: 0,
            source: "free".into(),
            euler_convention: "zyx".into(),
            shell: ShellSpec { center: [0.0; 3], r_inner: 0.1, r_outer: 0.2 },
            ik: IkOptions::default(),
        };
        let mut t = Tally::default();
        t.reject(FailureReason::NoD3InRange);
        let r = t.into_report(settings);
        assert_eq!(r.accepted, 0);
        assert_eq!(r.failures["NoD3InRange"], 1);
        assert_eq!(r.failures.len(), FailureReason::ALL.len());
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["errors"].is_null());
        assert!(json.get("timing").is_none());
    }
}
