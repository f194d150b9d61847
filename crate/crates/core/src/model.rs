//! Robot geometry: D-H rows, joint ranges and the joint vector.
//!
//! The default model is the wearable RRPRR arm:
//!
//! | joint | α    | a     | d            | θ           |
//! |-------|------|-------|--------------|-------------|
//! | 1     | +90° | 0     | l1 = -0.08   | θ1          |
//! | 2     | +90° | 0     | 0            | θ2          |
//! | 3     | 0°   | 0     | d3           | 180°        |
//! | 4     | +90° | 0     | l2 = 0.045   | θ4          |
//! | 5     | +90° | 0     | 0            | θ5          |
//! | 6     | 0°   | l3 = 0.135 | 0       | 0°          |
//!
//! `l1` is negative: the shoulder sits below the base frame. It is used with
//! its sign in every formula.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary tolerance used when checking joint ranges.
pub const RANGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointKind {
    /// `theta` is the joint variable.
    Revolute,
    /// `d` is the joint variable.
    Prismatic,
    /// No joint variable.
    Fixed,
}

/// One row of a Denavit-Hartenberg table.
///
/// For revolute rows the stored `theta` is ignored and replaced by the joint
/// value; for prismatic rows the same holds for `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhRow {
    pub alpha: f64,
    pub a: f64,
    pub d: f64,
    pub theta: f64,
    pub kind: JointKind,
}

impl DhRow {
    pub const fn revolute(alpha: f64, a: f64, d: f64) -> Self {
        Self {
            alpha,
            a,
            d,
            theta: 0.0,
            kind: JointKind::Revolute,
        }
    }

    pub const fn prismatic(alpha: f64, a: f64, theta: f64) -> Self {
        Self {
            alpha,
            a,
            d: 0.0,
            theta,
            kind: JointKind::Prismatic,
        }
    }

    pub const fn fixed(alpha: f64, a: f64, d: f64, theta: f64) -> Self {
        Self {
            alpha,
            a,
            d,
            theta,
            kind: JointKind::Fixed,
        }
    }

    /// `(d, theta)` after substituting `joint_value` into the variable slot.
    pub fn resolve(&self, joint_value: f64) -> (f64, f64) {
        match self.kind {
            JointKind::Revolute => (self.d, joint_value),
            JointKind::Prismatic => (joint_value, self.theta),
            JointKind::Fixed => (self.d, self.theta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bounds {
    /// `(lo, hi)`: checked as `[lo + tol, hi - tol]`.
    Open,
    /// `[lo, hi]`: checked as `[lo - tol, hi + tol]`.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointRange {
    pub lo: f64,
    pub hi: f64,
    pub bounds: Bounds,
}

impl JointRange {
    pub const fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            bounds: Bounds::Open,
        }
    }

    pub const fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            bounds: Bounds::Closed,
        }
    }

    /// Effective closed interval at boundary tolerance `tol`.
    pub fn effective(&self, tol: f64) -> (f64, f64) {
        match self.bounds {
            Bounds::Open => (self.lo + tol, self.hi - tol),
            Bounds::Closed => (self.lo - tol, self.hi + tol),
        }
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        let (lo, hi) = self.effective(tol);
        v >= lo && v <= hi
    }

    /// Clamps into the range; open ends are pulled inside by `tol`.
    pub fn clamp(&self, v: f64, tol: f64) -> f64 {
        let (lo, hi) = match self.bounds {
            Bounds::Open => (self.lo + tol, self.hi - tol),
            Bounds::Closed => (self.lo, self.hi),
        };
        v.clamp(lo, hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JointId {
    Theta1,
    Theta2,
    D3,
    Theta4,
    Theta5,
}

impl JointId {
    pub const ALL: [JointId; 5] = [
        JointId::Theta1,
        JointId::Theta2,
        JointId::D3,
        JointId::Theta4,
        JointId::Theta5,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_angle(self) -> bool {
        self != JointId::D3
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            JointId::Theta1 => "theta1",
            JointId::Theta2 => "theta2",
            JointId::D3 => "d3",
            JointId::Theta4 => "theta4",
            JointId::Theta5 => "theta5",
        };
        f.write_str(s)
    }
}

/// Joint values in chain order. Angles in radians, `d3` in meters.
///
/// Any real values are allowed here; use [`RobotModel::check_ranges`] to test
/// membership in the model's joint ranges.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointVector {
    pub theta1: f64,
    pub theta2: f64,
    pub d3: f64,
    pub theta4: f64,
    pub theta5: f64,
}

impl JointVector {
    pub const fn new(theta1: f64, theta2: f64, d3: f64, theta4: f64, theta5: f64) -> Self {
        Self {
            theta1,
            theta2,
            d3,
            theta4,
            theta5,
        }
    }

    /// Angles given in degrees, `d3` in meters.
    pub fn from_degrees(theta1: f64, theta2: f64, d3: f64, theta4: f64, theta5: f64) -> Self {
        Self::new(
            theta1.to_radians(),
            theta2.to_radians(),
            d3,
            theta4.to_radians(),
            theta5.to_radians(),
        )
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.theta1, self.theta2, self.d3, self.theta4, self.theta5]
    }

    pub fn from_array(v: [f64; 5]) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4])
    }

    pub fn get(&self, id: JointId) -> f64 {
        self.to_array()[id.index()]
    }

    pub fn set(&mut self, id: JointId, value: f64) {
        let mut a = self.to_array();
        a[id.index()] = value;
        *self = Self::from_array(a);
    }

    pub fn max_abs_diff(&self, other: &JointVector) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Geometric constants and joint ranges of the RRPRR arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    /// Base-to-shoulder offset `d1` (signed).
    pub l1: f64,
    /// Prismatic-to-wrist offset `d4`.
    pub l2: f64,
    /// Wrist-to-gripper length `a6`.
    pub l3: f64,
    pub theta1: JointRange,
    pub theta2: JointRange,
    pub d3: JointRange,
    pub theta4: JointRange,
    pub theta5: JointRange,
}

impl Default for RobotModel {
    fn default() -> Self {
        Self {
            l1: -0.08,
            l2: 0.045,
            l3: 0.135,
            theta1: JointRange::open(-PI, PI),
            theta2: JointRange::open(0.0, FRAC_PI_2),
            d3: JointRange::closed(0.33, 0.45),
            theta4: JointRange::open(-PI, PI),
            theta5: JointRange::open(0.0, PI),
        }
    }
}

impl RobotModel {
    /// Validates the invariants `l2 > 0`, `l3 > 0`, `0 < d3_min < d3_max`
    /// and `lo < hi` for every range.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        if !self.l1.is_finite() {
            return bad(format!("l1 must be finite, got {}", self.l1));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.l2) || !positive(self.l3) {
            return bad(format!("l2 and l3 must be positive, got {} and {}", self.l2, self.l3));
        }
        if !(self.d3.lo > 0.0 && self.d3.lo < self.d3.hi) {
            return bad(format!(
                "need 0 < d3_min < d3_max, got [{}, {}]",
                self.d3.lo, self.d3.hi
            ));
        }
        for id in JointId::ALL {
            let r = self.range(id);
            if r.lo.is_nan() || r.hi.is_nan() || r.lo >= r.hi {
                return bad(format!("{id} range is empty: [{}, {}]", r.lo, r.hi));
            }
        }
        Ok(())
    }

    pub fn range(&self, id: JointId) -> &JointRange {
        match id {
            JointId::Theta1 => &self.theta1,
            JointId::Theta2 => &self.theta2,
            JointId::D3 => &self.d3,
            JointId::Theta4 => &self.theta4,
            JointId::Theta5 => &self.theta5,
        }
    }

    /// The six D-H rows in chain order; row 6 is the fixed gripper offset.
    pub fn rows(&self) -> [DhRow; 6] {
        [
            DhRow::revolute(FRAC_PI_2, 0.0, self.l1),
            DhRow::revolute(FRAC_PI_2, 0.0, 0.0),
            DhRow::prismatic(0.0, 0.0, PI),
            DhRow::revolute(FRAC_PI_2, 0.0, self.l2),
            DhRow::revolute(FRAC_PI_2, 0.0, 0.0),
            DhRow::fixed(0.0, self.l3, 0.0, 0.0),
        ]
    }

    /// First joint outside its range at boundary tolerance `tol`, if any.
    pub fn check_ranges(&self, q: &JointVector, tol: f64) -> std::result::Result<(), JointId> {
        for id in JointId::ALL {
            if !self.range(id).contains(q.get(id), tol) {
                return Err(id);
            }
        }
        Ok(())
    }

    pub fn in_range(&self, q: &JointVector) -> bool {
        self.check_ranges(q, RANGE_TOLERANCE).is_ok()
    }

    /// Clamps each joint into its range. Revolute joints whose range spans a
    /// full turn are wrapped into `(-π, π]` first.
    pub fn clamp(&self, q: &JointVector, tol: f64) -> JointVector {
        let mut out = *q;
        for id in JointId::ALL {
            let r = self.range(id);
            let mut v = q.get(id);
            if id.is_angle() && r.width() >= 2.0 * PI - 1e-12 {
                v = wrap_angle(v);
            }
            out.set(id, r.clamp(v, tol));
        }
        out
    }

    /// Midpoint of every range.
    pub fn mid_joints(&self) -> JointVector {
        JointVector::from_array(JointId::ALL.map(|id| self.range(id).mid()))
    }

    /// Loads a key/value (TOML) model file. Missing keys fall back to the
    /// defaults; angle bounds are given in degrees.
    ///
    /// ```toml
    /// l1 = -0.08
    /// l2 = 0.045
    /// l3 = 0.135
    /// d3_min = 0.33
    /// d3_max = 0.45
    /// theta2_min_deg = 0.0
    /// theta2_max_deg = 90.0
    /// ```
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ModelConfig = toml::from_str(s)?;
        let model = cfg.into_model();
        model.validate()?;
        Ok(model)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Serializes back into the key/value format read by [`Self::from_toml_str`].
    pub fn to_toml_string(&self) -> String {
        let deg = |v: f64| v.to_degrees();
        format!(
            "l1 = {:?}\nl2 = {:?}\nl3 = {:?}\nd3_min = {:?}\nd3_max = {:?}\n\
             theta1_min_deg = {:?}\ntheta1_max_deg = {:?}\n\
             theta2_min_deg = {:?}\ntheta2_max_deg = {:?}\n\
             theta4_min_deg = {:?}\ntheta4_max_deg = {:?}\n\
             theta5_min_deg = {:?}\ntheta5_max_deg = {:?}\n",
            self.l1,
            self.l2,
            self.l3,
            self.d3.lo,
            self.d3.hi,
            deg(self.theta1.lo),
            deg(self.theta1.hi),
            deg(self.theta2.lo),
            deg(self.theta2.hi),
            deg(self.theta4.lo),
            deg(self.theta4.hi),
            deg(self.theta5.lo),
            deg(self.theta5.hi),
        )
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelConfig {
    l1: Option<f64>,
    l2: Option<f64>,
    l3: Option<f64>,
    d3_min: Option<f64>,
    d3_max: Option<f64>,
    theta1_min_deg: Option<f64>,
    theta1_max_deg: Option<f64>,
    theta2_min_deg: Option<f64>,
    theta2_max_deg: Option<f64>,
    theta4_min_deg: Option<f64>,
    theta4_max_deg: Option<f64>,
    theta5_min_deg: Option<f64>,
    theta5_max_deg: Option<f64>,
}

impl ModelConfig {
    fn into_model(self) -> RobotModel {
        let d = RobotModel::default();
        let angle = |v: Option<f64>, default: f64| v.map(f64::to_radians).unwrap_or(default);
        let open = |lo: Option<f64>, hi: Option<f64>, r: JointRange| {
            JointRange::open(angle(lo, r.lo), angle(hi, r.hi))
        };
        RobotModel {
            l1: self.l1.unwrap_or(d.l1),
            l2: self.l2.unwrap_or(d.l2),
            l3: self.l3.unwrap_or(d.l3),
            d3: JointRange::closed(
                self.d3_min.unwrap_or(d.d3.lo),
                self.d3_max.unwrap_or(d.d3.hi),
            ),
            theta1: open(self.theta1_min_deg, self.theta1_max_deg, d.theta1),
            theta2: open(self.theta2_min_deg, self.theta2_max_deg, d.theta2),
            theta4: open(self.theta4_min_deg, self.theta4_max_deg, d.theta4),
            theta5: open(self.theta5_min_deg, self.theta5_max_deg, d.theta5),
        }
    }
}

/// Wraps into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}
