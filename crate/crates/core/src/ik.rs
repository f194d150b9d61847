//! Closed-form inverse kinematics for the RRPRR arm.
//!
//! Pipeline:
//!
//! 1. Wrist point `P' = P - l3·R1` (origin of frame 5).
//! 2. `θ1 = atan2(P'y, P'x)`.
//! 3. Branch on `R2z = -s2 s4`:
//!    * `|R2z| >= r2z_tol` ([`Branch::Case1`]): a 2x2 linear system in
//!      `(cos θ4, cot θ2)` from column 2, then a 2x2 system in
//!      `(sin θ5, cos θ5)` from `R1z`, `R3z`.
//!    * otherwise ([`Branch::Case2`]): all links are coplanar, `θ4 = 0`,
//!      `θ2` comes from the base/shoulder/wrist triangle and `θ5` from the
//!      sum angle `θ2 + θ5`.
//! 4. Three candidate `d3` values from the position equations.
//! 5. The two row-3/column-2 identities of the partial products are checked,
//!    then every joint is range-checked.
//!
//! `θ2` is assumed to have positive sine (the default range is `(0°, 90°)`),
//! which fixes the sign ambiguity of the `cot θ2` solution.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::fk::{forward_kinematics, Trig};
use crate::metrics::geodesic_angle;
use crate::model::{wrap_angle, JointId, JointVector, RobotModel, RANGE_TOLERANCE};
use crate::transform::{check_so3, Pose, Transform};

/// Solver thresholds. Defaults suit exact round trips; the Monte-Carlo
/// harness loosens them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IkOptions {
    /// `|R2z|` below this routes to the coplanar branch.
    pub r2z_tol: f64,
    /// Minimum horizontal distance of the wrist point from the base axis (m).
    pub theta1_tol: f64,
    /// Acceptance bound on both constraint residuals.
    pub constraint_tol: f64,
    /// Extra room around `[d3_min, d3_max]` when accepting a `d3` candidate (m).
    /// Accepted values are clamped back into the range.
    pub d3_slack: f64,
    /// `d3` candidates whose denominator is smaller than this are ignored.
    pub denominator_tol: f64,
    /// Boundary tolerance for joint ranges.
    pub range_tol: f64,
    /// Lower bound on `2·t1·t3` in the coplanar triangle.
    pub triangle_tol: f64,
    /// SO(3) tolerance for the target rotation.
    pub target_so3_tol: f64,
}

impl Default for IkOptions {
    fn default() -> Self {
        Self {
            r2z_tol: 1e-9,
            theta1_tol: 1e-9,
            constraint_tol: 1e-8,
            d3_slack: 1e-9,
            denominator_tol: 1e-6,
            range_tol: RANGE_TOLERANCE,
            triangle_tol: 1e-12,
            target_so3_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// `R2z != 0`: wrist rotated out of the arm plane.
    Case1,
    /// `R2z = 0`: all links coplanar, `θ4 = 0`.
    Case2,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Case1 => "case1",
            Branch::Case2 => "case2",
        })
    }
}

/// Classifies the first step of [`solve`] that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureReason {
    /// Target rotation is not in SO(3).
    InvalidTarget,
    /// Wrist point lies on the base axis.
    Theta1Undefined,
    Theta1OutOfRange,
    Theta2OutOfRange,
    Theta4OutOfRange,
    Theta5OutOfRange,
    NoD3InRange,
    ConstraintViolated,
    TriangleDegenerate,
}

impl FailureReason {
    pub const ALL: [FailureReason; 9] = [
        FailureReason::InvalidTarget,
        FailureReason::Theta1Undefined,
        FailureReason::Theta1OutOfRange,
        FailureReason::Theta2OutOfRange,
        FailureReason::Theta4OutOfRange,
        FailureReason::Theta5OutOfRange,
        FailureReason::NoD3InRange,
        FailureReason::ConstraintViolated,
        FailureReason::TriangleDegenerate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::InvalidTarget => "InvalidTarget",
            FailureReason::Theta1Undefined => "Theta1Undefined",
            FailureReason::Theta1OutOfRange => "Theta1OutOfRange",
            FailureReason::Theta2OutOfRange => "Theta2OutOfRange",
            FailureReason::Theta4OutOfRange => "Theta4OutOfRange",
            FailureReason::Theta5OutOfRange => "Theta5OutOfRange",
            FailureReason::NoD3InRange => "NoD3InRange",
            FailureReason::ConstraintViolated => "ConstraintViolated",
            FailureReason::TriangleDegenerate => "TriangleDegenerate",
        }
    }

    fn out_of_range(id: JointId) -> Self {
        match id {
            JointId::Theta1 => FailureReason::Theta1OutOfRange,
            JointId::Theta2 => FailureReason::Theta2OutOfRange,
            JointId::D3 => FailureReason::NoD3InRange,
            JointId::Theta4 => FailureReason::Theta4OutOfRange,
            JointId::Theta5 => FailureReason::Theta5OutOfRange,
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A failed solve, with whatever was computed before the failing step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IkFailure {
    pub reason: FailureReason,
    pub branch: Option<Branch>,
    /// Unchecked joint vector when the failing step came after `θ1`. For
    /// range failures the offending joint is left as computed, and `d3` is
    /// the estimate with the largest denominator.
    pub candidate: Option<JointVector>,
    pub diagnostics: Vec<(&'static str, f64)>,
}

impl IkFailure {
    pub fn new(reason: FailureReason) -> Self {
        Self {
            reason,
            branch: None,
            candidate: None,
            diagnostics: Vec::new(),
        }
    }

    fn with(mut self, key: &'static str, value: f64) -> Self {
        self.diagnostics.push((key, value));
        self
    }

    fn in_branch(mut self, branch: Branch) -> Self {
        self.branch = Some(branch);
        self
    }

    pub fn diagnostic(&self, key: &str) -> Option<f64> {
        self.diagnostics
            .iter()
            .find(|(k, _)| *k == key)
            .map(|&(_, v)| v)
    }
}

impl fmt::Display for IkFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.reason)?;
        for (k, v) in &self.diagnostics {
            write!(f, " {k}={v:e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for IkFailure {}

/// `(θ2, θ4, θ5)` from one of the two branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WristAngles {
    pub theta2: f64,
    pub theta4: f64,
    pub theta5: f64,
}

/// One of the three `d3` estimates (x, y and z position equations).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D3Candidate {
    pub denominator: f64,
    /// `None` when `|denominator|` is below the configured threshold.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D3Selection {
    /// Selected value, clamped into `[d3_min, d3_max]`.
    pub value: f64,
    /// Selected value before clamping.
    pub raw: f64,
    /// Index into `candidates` of the one used.
    pub chosen: usize,
    pub candidates: [D3Candidate; 3],
}

impl D3Selection {
    /// Largest deviation of any usable candidate from the selected raw value.
    /// Zero (up to rounding) for exactly reachable poses.
    pub fn spread(&self) -> f64 {
        self.candidates
            .iter()
            .filter_map(|c| c.value)
            .map(|v| (v - self.raw).abs())
            .fold(0.0, f64::max)
    }
}

/// Residuals of the two row-3/column-2 identities.
///
/// * wrist: `R1z c5 s4 - R2z c4 + R3z s4 s5`
/// * base: `R2x c1 s2 - R2z c2 + R2y s1 s2`
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintResiduals {
    pub wrist: f64,
    pub base: f64,
}

impl ConstraintResiduals {
    pub fn max_abs(&self) -> f64 {
        self.wrist.abs().max(self.base.abs())
    }
}

/// Position (m, Euclidean) and rotation (rad, geodesic) distance between the
/// target and the forward kinematics of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FkResidual {
    pub position: f64,
    pub rotation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IkSolution {
    pub joints: JointVector,
    pub branch: Branch,
    pub constraint_residuals: ConstraintResiduals,
    pub d3: D3Selection,
    pub fk_residual: FkResidual,
}

/// `T^5_0 = T^6_0 [T^6_5]^{-1}`. The last link is a pure offset of `l3` along
/// the gripper x-axis, so the translation is `P - l3·R1`.
pub fn wrist_transform(target: &Pose, model: &RobotModel) -> Transform {
    let last = Transform::from_translation(Vector3::new(model.l3, 0.0, 0.0));
    *target * last.inverse()
}

/// `θ1 = atan2(P'y, P'x)` in `(-π, π]`.
pub fn solve_theta1(wrist: &Vector3<f64>, tol: f64) -> Result<f64, IkFailure> {
    let radial = wrist.x.hypot(wrist.y);
    if radial < tol {
        return Err(IkFailure::new(FailureReason::Theta1Undefined).with("radial", radial));
    }
    Ok(wrist.y.atan2(wrist.x))
}

fn range_check(
    model: &RobotModel,
    id: JointId,
    value: f64,
    tol: f64,
    branch: Branch,
) -> Result<(), IkFailure> {
    if model.range(id).contains(value, tol) {
        Ok(())
    } else {
        Err(IkFailure::new(FailureReason::out_of_range(id))
            .in_branch(branch)
            .with(id_key(id), value))
    }
}

fn id_key(id: JointId) -> &'static str {
    match id {
        JointId::Theta1 => "theta1",
        JointId::Theta2 => "theta2",
        JointId::D3 => "d3",
        JointId::Theta4 => "theta4",
        JointId::Theta5 => "theta5",
    }
}

/// Determinant of the Case-1 system `[[s1, c1 R2z], [-c1, s1 R2z]]`.
/// Symbolically equal to `R2z`.
pub fn case1_determinant(theta1: f64, r2z: f64) -> f64 {
    let (s1, c1) = theta1.sin_cos();
    s1 * (s1 * r2z) - (c1 * r2z) * (-c1)
}

/// Determinant of the `θ5` system `[[-c2, -c4 s2], [-c4 s2, c2]]`,
/// i.e. `-(c2² + c4² s2²)`.
pub fn theta5_determinant(theta2: f64, theta4: f64) -> f64 {
    let (s2, c2) = theta2.sin_cos();
    let c4 = theta4.cos();
    -c2 * c2 - (c4 * s2) * (c4 * s2)
}

/// Case 1 (`R2z != 0`).
///
/// Solves `[[s1, c1 R2z], [-c1, s1 R2z]]·[cos θ4, cot θ2]ᵀ = [R2x, R2y]ᵀ`,
/// takes `θ2 = atan2(1, cot θ2)` and `θ4 = atan2(-R2z / s2, cos θ4)`, then
/// `[[-c2, -c4 s2], [-c4 s2, c2]]·[s5, c5]ᵀ = [R1z, R3z]ᵀ` for `θ5`.
pub fn solve_case1(
    target: &Pose,
    theta1: f64,
    model: &RobotModel,
    opts: &IkOptions,
) -> Result<WristAngles, IkFailure> {
    let a = case1_angles(target, theta1);
    let r2z = target.rotation[(2, 1)];
    let cot2 = a.theta2.cos() / a.theta2.sin();
    range_check(model, JointId::Theta2, a.theta2, opts.range_tol, Branch::Case1)
        .map_err(|e| e.with("cot_theta2", if r2z == 0.0 { f64::NAN } else { cot2 }))?;
    range_check(model, JointId::Theta4, a.theta4, opts.range_tol, Branch::Case1)?;
    range_check(model, JointId::Theta5, a.theta5, opts.range_tol, Branch::Case1)?;
    Ok(a)
}

fn case1_angles(target: &Pose, theta1: f64) -> WristAngles {
    let r = &target.rotation;
    let (r2x, r2y, r2z) = (r[(0, 1)], r[(1, 1)], r[(2, 1)]);
    let (r1z, r3z) = (r[(2, 0)], r[(2, 2)]);
    let (s1, c1) = theta1.sin_cos();

    // Cramer's rule; the determinant is R2z.
    let cos4 = s1 * r2x - c1 * r2y;
    let cot2_times_r2z = c1 * r2x + s1 * r2y;
    // atan2(1, cot θ2) with both arguments scaled by |R2z|.
    let theta2 = r2z.abs().atan2(cot2_times_r2z * r2z.signum());

    let (s2, c2) = theta2.sin_cos();
    let theta4 = (-r2z / s2).atan2(cos4);

    let c4 = theta4.cos();
    let det = -c2 * c2 - (c4 * s2) * (c4 * s2);
    let sin5 = (c2 * r1z + c4 * s2 * r3z) / det;
    let cos5 = (c4 * s2 * r1z - c2 * r3z) / det;
    WristAngles {
        theta2,
        theta4,
        theta5: sin5.atan2(cos5),
    }
}

/// Case 2 (`R2z = 0`, hence `θ4 = 0`).
///
/// `θ2` comes from the triangle base `O0`, shoulder `O2 = (0, 0, l1)` and
/// wrist `O5` by the cosine rule; `θ2 + θ5` from `tan(θ2 + θ5) = R3x/R1x =
/// R3y/R1y`, using the column whose `|c1|` or `|s1|` is larger.
pub fn solve_case2(
    target: &Pose,
    theta1: f64,
    model: &RobotModel,
    opts: &IkOptions,
) -> Result<WristAngles, IkFailure> {
    let (a, alternative) = case2_angles(target, theta1, model, opts)?;
    range_check(model, JointId::Theta2, a.theta2, opts.range_tol, Branch::Case2)?;
    let theta5 = [a.theta5, alternative]
        .into_iter()
        .find(|&t| model.theta5.contains(t, opts.range_tol))
        .ok_or_else(|| {
            IkFailure::new(FailureReason::Theta5OutOfRange)
                .in_branch(Branch::Case2)
                .with("theta5", a.theta5)
                .with("theta5_alt", alternative)
        })?;
    Ok(WristAngles { theta5, ..a })
}

/// Unchecked Case-2 angles and the `θ5 + π` alternative.
fn case2_angles(
    target: &Pose,
    theta1: f64,
    model: &RobotModel,
    opts: &IkOptions,
) -> Result<(WristAngles, f64), IkFailure> {
    let wrist = wrist_transform(target, model).translation;
    let shoulder = Vector3::new(0.0, 0.0, model.l1);
    let t1 = model.l1.abs();
    let t2 = wrist.norm();
    let t3 = (shoulder - wrist).norm();
    let denom = 2.0 * t1 * t3;
    if denom < opts.triangle_tol {
        return Err(IkFailure::new(FailureReason::TriangleDegenerate)
            .in_branch(Branch::Case2)
            .with("two_t1_t3", denom));
    }
    let cos_at_shoulder = ((t1 * t1 + t3 * t3 - t2 * t2) / denom).clamp(-1.0, 1.0);
    // The shoulder angle is π - θ2 when the shoulder hangs below the base
    // (l1 < 0) and θ2 itself otherwise.
    let theta2 = if model.l1 < 0.0 {
        PI - cos_at_shoulder.acos()
    } else {
        cos_at_shoulder.acos()
    };

    let r = &target.rotation;
    let (s1, c1) = theta1.sin_cos();
    let (row, sign) = if c1.abs() >= s1.abs() {
        (0, c1.signum())
    } else {
        (1, s1.signum())
    };
    // R1k = -ck cos(θ2+θ5), R3k = -ck sin(θ2+θ5) with ck = c1 or s1.
    let sum = (-r[(row, 2)] * sign).atan2(-r[(row, 0)] * sign);
    let primary = wrap_angle(sum - theta2);
    Ok((
        WristAngles {
            theta2,
            theta4: 0.0,
            theta5: primary,
        },
        wrap_angle(primary + PI),
    ))
}

/// All five joints without range checks, for reporting a rejected solve.
/// `d3` is the estimate with the largest denominator.
fn unchecked_candidate(
    model: &RobotModel,
    target: &Pose,
    theta1: f64,
    branch: Branch,
    opts: &IkOptions,
) -> Option<JointVector> {
    let a = match branch {
        Branch::Case1 => case1_angles(target, theta1),
        Branch::Case2 => case2_angles(target, theta1, model, opts).ok()?.0,
    };
    let d3 = d3_candidates(model, target, theta1, &a, opts.denominator_tol)
        .into_iter()
        .filter(|c| c.value.is_some())
        .max_by(|x, y| x.denominator.abs().total_cmp(&y.denominator.abs()))?
        .value?;
    let q = JointVector::new(theta1, a.theta2, d3, a.theta4, a.theta5);
    q.is_finite().then_some(q)
}

/// The three `d3` estimates from the x, y and z position equations:
///
/// ```text
/// d3¹ = (Px - l2 c1 s2 + l3 c5 (s1 s4 + c1 c2 c4) - l3 c1 s2 s5) / (c1 s2)
/// d3² = (Py - l2 s1 s2 - l3 c5 (c1 s4 - s1 c2 c4) - l3 s1 s2 s5) / (s1 s2)
/// d3³ = (Pz - l1 + l2 c2 + l3 c2 s5 + l3 c4 c5 s2) / (-c2)
/// ```
pub fn d3_candidates(
    model: &RobotModel,
    target: &Pose,
    theta1: f64,
    angles: &WristAngles,
    denominator_tol: f64,
) -> [D3Candidate; 3] {
    let Trig {
        c1,
        s1,
        c2,
        s2,
        c4,
        s4,
        c5,
        s5,
    } = Trig::new(theta1, angles.theta2, angles.theta4, angles.theta5);
    let (l1, l2, l3) = (model.l1, model.l2, model.l3);
    let p = &target.translation;
    let num = [
        p.x - l2 * c1 * s2 + l3 * c5 * (s1 * s4 + c1 * c2 * c4) - l3 * c1 * s2 * s5,
        p.y - l2 * s1 * s2 - l3 * c5 * (c1 * s4 - s1 * c2 * c4) - l3 * s1 * s2 * s5,
        p.z - l1 + l2 * c2 + l3 * c2 * s5 + l3 * c4 * c5 * s2,
    ];
    let den = [c1 * s2, s1 * s2, -c2];
    std::array::from_fn(|i| D3Candidate {
        denominator: den[i],
        value: (den[i].abs() >= denominator_tol).then(|| num[i] / den[i]),
    })
}

/// Picks the usable candidate with the largest denominator that lies in
/// `[d3_min - slack, d3_max + slack]`, falling back to smaller denominators.
pub fn solve_d3(
    model: &RobotModel,
    target: &Pose,
    theta1: f64,
    angles: &WristAngles,
    opts: &IkOptions,
) -> Result<D3Selection, IkFailure> {
    let candidates = d3_candidates(model, target, theta1, angles, opts.denominator_tol);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        candidates[b]
            .denominator
            .abs()
            .total_cmp(&candidates[a].denominator.abs())
    });
    let range = &model.d3;
    for i in order {
        if let Some(v) = candidates[i].value {
            if v >= range.lo - opts.d3_slack && v <= range.hi + opts.d3_slack {
                return Ok(D3Selection {
                    value: v.clamp(range.lo, range.hi),
                    raw: v,
                    chosen: i,
                    candidates,
                });
            }
        }
    }
    let mut failure = IkFailure::new(FailureReason::NoD3InRange);
    for (key, c) in ["d3_x", "d3_y", "d3_z"].into_iter().zip(candidates) {
        failure = failure.with(key, c.value.unwrap_or(f64::NAN));
    }
    Err(failure)
}

/// Evaluates both constraint identities for the target rotation at the
/// candidate angles. Zero for every pose produced by forward kinematics.
pub fn check_constraints(target: &Pose, q: &JointVector) -> ConstraintResiduals {
    let r = &target.rotation;
    let t = Trig::of(q);
    let (r1z, r2z, r3z) = (r[(2, 0)], r[(2, 1)], r[(2, 2)]);
    let (r2x, r2y) = (r[(0, 1)], r[(1, 1)]);
    ConstraintResiduals {
        wrist: r1z * t.c5 * t.s4 - r2z * t.c4 + r3z * t.s4 * t.s5,
        base: r2x * t.c1 * t.s2 - r2z * t.c2 + r2y * t.s1 * t.s2,
    }
}

/// Full analytical solve. Returns the first failing step otherwise.
pub fn solve(
    model: &RobotModel,
    target: &Pose,
    opts: &IkOptions,
) -> Result<IkSolution, IkFailure> {
    if let Err(e) = check_so3(&target.rotation, opts.target_so3_tol) {
        let mut f = IkFailure::new(FailureReason::InvalidTarget);
        if let crate::error::Error::NotRotation { orthogonality, det } = e {
            f = f.with("orthogonality", orthogonality).with("det", det);
        }
        return Err(f);
    }

    let wrist = wrist_transform(target, model).translation;
    let theta1 = solve_theta1(&wrist, opts.theta1_tol)?;

    let r2z = target.rotation[(2, 1)];
    let branch = if r2z.abs() >= opts.r2z_tol {
        Branch::Case1
    } else {
        Branch::Case2
    };
    let with_theta1 = |e: IkFailure| e.with("theta1", theta1);
    let angles = match branch {
        Branch::Case1 => solve_case1(target, theta1, model, opts),
        Branch::Case2 => solve_case2(target, theta1, model, opts),
    }
    .map_err(|mut e| {
        if e.reason != FailureReason::TriangleDegenerate {
            e.candidate = unchecked_candidate(model, target, theta1, branch, opts);
        }
        with_theta1(e)
    })?;

    let d3 = solve_d3(model, target, theta1, &angles, opts).map_err(|mut e| {
        e.candidate = unchecked_candidate(model, target, theta1, branch, opts);
        with_theta1(e.in_branch(branch))
    })?;

    let joints = JointVector::new(theta1, angles.theta2, d3.value, angles.theta4, angles.theta5);
    let residuals = check_constraints(target, &joints);
    if residuals.max_abs() > opts.constraint_tol {
        let mut f = IkFailure::new(FailureReason::ConstraintViolated)
            .in_branch(branch)
            .with("wrist", residuals.wrist)
            .with("base", residuals.base);
        f.candidate = Some(joints);
        return Err(f);
    }
    if let Err(id) = model.check_ranges(&joints, opts.range_tol) {
        let mut f = IkFailure::new(FailureReason::out_of_range(id))
            .in_branch(branch)
            .with(id_key(id), joints.get(id));
        f.candidate = Some(joints);
        return Err(f);
    }

    let reached = forward_kinematics(model, &joints);
    Ok(IkSolution {
        joints,
        branch,
        constraint_residuals: residuals,
        d3,
        fk_residual: FkResidual {
            position: (reached.translation - target.translation).norm(),
            rotation: geodesic_angle(&target.rotation, &reached.rotation),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::frame_pose;
    use crate::transform::rot_x;
    use approx::assert_relative_eq;
    use nalgebra::Matrix3;

    fn model() -> RobotModel {
        RobotModel::default()
    }

    fn fk_deg(t1: f64, t2: f64, d3: f64, t4: f64, t5: f64) -> (JointVector, Pose) {
        let q = JointVector::from_degrees(t1, t2, d3, t4, t5);
        (q, forward_kinematics(&model(), &q))
    }

    #[test]
    fn wrist_point_examples() {
        let (q, target) = fk_deg(0.0, 90.0, 0.4, 0.0, 90.0);
        let w = wrist_transform(&target, &model());
        assert_relative_eq!(w.translation, Vector3::new(0.445, 0.0, -0.08), epsilon = 1e-12);
        let f5 = frame_pose(&model(), &q, 5).unwrap();
        assert!((w.translation - f5.translation).norm() < 1e-12);

        let p = Vector3::new(0.1, 0.2, -0.3);
        let w = wrist_transform(&Transform::from_translation(p), &model());
        assert_relative_eq!(w.translation, p - Vector3::new(0.135, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn theta1_examples() {
        assert_eq!(solve_theta1(&Vector3::new(0.445, 0.0, -0.08), 1e-9).unwrap(), 0.0);
        assert_relative_eq!(
            solve_theta1(&Vector3::new(0.0, 0.3, 0.1), 1e-9).unwrap(),
            PI / 2.0
        );
        assert_relative_eq!(
            solve_theta1(&Vector3::new(-0.2, -0.2, 0.0), 1e-9).unwrap(),
            -0.75 * PI
        );
        let err = solve_theta1(&Vector3::new(1e-12, 0.0, -0.5), 1e-9).unwrap_err();
        assert_eq!(err.reason, FailureReason::Theta1Undefined);
    }

    #[test]
    fn case1_examples() {
        let opts = IkOptions::default();
        for (t1, t2, t4, t5) in [(30.0, 60.0, 45.0, 90.0), (0.0, 45.0, -90.0, 120.0)] {
            let (_, target) = fk_deg(t1, t2, 0.4, t4, t5);
            let a = solve_case1(&target, f64::to_radians(t1), &model(), &opts).unwrap();
            assert_relative_eq!(a.theta2, t2.to_radians(), epsilon = 1e-9);
            assert_relative_eq!(a.theta4, t4.to_radians(), epsilon = 1e-9);
            assert_relative_eq!(a.theta5, t5.to_radians(), epsilon = 1e-9);
        }
    }

    #[test]
    fn case1_rejects_negative_cot_theta2() {
        // θ2 = 120° has cot θ2 < 0; the default range stops at 90°.
        let q = JointVector::from_degrees(10.0, 120.0, 0.4, 40.0, 60.0);
        let target = forward_kinematics(&model(), &q);
        let e = solve_case1(&target, q.theta1, &model(), &IkOptions::default()).unwrap_err();
        assert_eq!(e.reason, FailureReason::Theta2OutOfRange);
        assert!(e.diagnostic("cot_theta2").unwrap() < 0.0);
    }

    #[test]
    fn case1_rejects_theta5_outside_range() {
        let q = JointVector::from_degrees(10.0, 50.0, 0.4, 40.0, -60.0);
        let target = forward_kinematics(&model(), &q);
        let e = solve_case1(&target, q.theta1, &model(), &IkOptions::default()).unwrap_err();
        assert_eq!(e.reason, FailureReason::Theta5OutOfRange);
    }

    #[test]
    fn case2_examples() {
        let opts = IkOptions::default();
        for (t1, t2, d3, t5) in [(0.0, 60.0, 0.4, 90.0), (45.0, 30.0, 0.35, 45.0)] {
            let (_, target) = fk_deg(t1, t2, d3, 0.0, t5);
            assert!(target.rotation[(2, 1)].abs() < 1e-15);
            let a = solve_case2(&target, f64::to_radians(t1), &model(), &opts).unwrap();
            assert_relative_eq!(a.theta2, t2.to_radians(), epsilon = 1e-9);
            assert_eq!(a.theta4, 0.0);
            assert_relative_eq!(a.theta5, t5.to_radians(), epsilon = 1e-9);
        }
    }

    #[test]
    fn case2_handles_every_base_quadrant() {
        let opts = IkOptions::default();
        for t1 in [-170.0, -100.0, -45.0, 80.0, 135.0, 179.0] {
            let (q, target) = fk_deg(t1, 40.0, 0.42, 0.0, 150.0);
            let a = solve_case2(&target, q.theta1, &model(), &opts).unwrap();
            assert_relative_eq!(a.theta5, q.theta5, epsilon = 1e-9);
            assert_relative_eq!(a.theta2, q.theta2, epsilon = 1e-9);
        }
    }

    #[test]
    fn case2_clamps_the_cosine_rule() {
        // Fully stretched upward-pointing configuration: θ2 → 0 puts the
        // shoulder angle at π and the cosine argument at -1.
        let m = RobotModel {
            theta2: crate::model::JointRange::open(-0.1, PI / 2.0),
            ..model()
        };
        let q = JointVector::new(0.3, 0.0, 0.4, 0.0, 1.0);
        let target = forward_kinematics(&m, &q);
        let a = solve_case2(&target, 0.3, &m, &IkOptions::default()).unwrap();
        assert!(a.theta2.abs() < 1e-6, "{}", a.theta2);
    }

    #[test]
    fn case2_degenerate_triangle() {
        let m = RobotModel {
            l1: 0.0,
            ..model()
        };
        let (_, target) = fk_deg(0.0, 60.0, 0.4, 0.0, 90.0);
        let e = solve_case2(&target, 0.0, &m, &IkOptions::default()).unwrap_err();
        assert_eq!(e.reason, FailureReason::TriangleDegenerate);
    }

    #[test]
    fn case2_with_shoulder_above_base() {
        let m = RobotModel {
            l1: 0.08,
            ..model()
        };
        let q = JointVector::from_degrees(-30.0, 70.0, 0.37, 0.0, 20.0);
        let target = forward_kinematics(&m, &q);
        let sol = solve(&m, &target, &IkOptions::default()).unwrap();
        assert_eq!(sol.branch, Branch::Case2);
        assert!(sol.joints.max_abs_diff(&q) < 1e-9);
    }

    #[test]
    fn d3_candidates_agree_on_reachable_pose() {
        let (q, target) = fk_deg(30.0, 60.0, 0.4, 45.0, 90.0);
        let angles = WristAngles {
            theta2: q.theta2,
            theta4: q.theta4,
            theta5: q.theta5,
        };
        let c = d3_candidates(&model(), &target, q.theta1, &angles, 1e-6);
        for cand in c {
            assert_relative_eq!(cand.value.unwrap(), 0.4, epsilon = 1e-9);
        }
    }

    #[test]
    fn d3_skips_zero_denominator() {
        let (q, target) = fk_deg(90.0, 60.0, 0.4, 45.0, 90.0);
        let angles = WristAngles {
            theta2: q.theta2,
            theta4: q.theta4,
            theta5: q.theta5,
        };
        let sel = solve_d3(&model(), &target, q.theta1, &angles, &IkOptions::default()).unwrap();
        assert!(sel.candidates[0].value.is_none());
        assert_ne!(sel.chosen, 0);
        assert_relative_eq!(sel.value, 0.4, epsilon = 1e-9);
    }

    #[test]
    fn d3_out_of_range() {
        // Extension of 0.50 m is past d3_max.
        let (q, target) = fk_deg(20.0, 60.0, 0.5, 45.0, 90.0);
        let angles = WristAngles {
            theta2: q.theta2,
            theta4: q.theta4,
            theta5: q.theta5,
        };
        let e = solve_d3(&model(), &target, q.theta1, &angles, &IkOptions::default()).unwrap_err();
        assert_eq!(e.reason, FailureReason::NoD3InRange);
        assert_relative_eq!(e.diagnostic("d3_z").unwrap(), 0.5, epsilon = 1e-9);
        let e = solve(&model(), &target, &IkOptions::default()).unwrap_err();
        assert_eq!(e.reason, FailureReason::NoD3InRange);
    }

    #[test]
    fn d3_slack_clamps() {
        let (q, target) = fk_deg(20.0, 60.0, 0.455, 45.0, 90.0);
        let opts = IkOptions {
            d3_slack: 0.01,
            constraint_tol: 1.0,
            ..IkOptions::default()
        };
        let angles = WristAngles {
            theta2: q.theta2,
            theta4: q.theta4,
            theta5: q.theta5,
        };
        let sel = solve_d3(&model(), &target, q.theta1, &angles, &opts).unwrap();
        assert_eq!(sel.value, 0.45);
        assert_relative_eq!(sel.raw, 0.455, epsilon = 1e-9);
    }

    #[test]
    fn constraints_vanish_on_fk_poses() {
        let (q, target) = fk_deg(-70.0, 33.0, 0.41, 120.0, 17.0);
        let r = check_constraints(&target, &q);
        assert!(r.max_abs() < 1e-15, "{r:?}");
    }

    #[test]
    fn wrist_constraint_detects_theta4_perturbation() {
        let (mut q, target) = fk_deg(10.0, 50.0, 0.4, 60.0, 70.0);
        q.theta4 += 0.1;
        assert!(check_constraints(&target, &q).wrist.abs() > 1e-3);
    }

    #[test]
    fn solve_case1_round_trip() {
        let (q, target) = fk_deg(30.0, 60.0, 0.4, 45.0, 90.0);
        let sol = solve(&model(), &target, &IkOptions::default()).unwrap();
        assert_eq!(sol.branch, Branch::Case1);
        assert!(sol.joints.max_abs_diff(&q) < 1e-9);
        assert!(sol.fk_residual.position < 1e-10);
        assert!(sol.fk_residual.rotation < 1e-10);
        assert!(sol.d3.spread() < 1e-9);
    }

    #[test]
    fn solve_case2_round_trip() {
        let (q, target) = fk_deg(0.0, 60.0, 0.4, 0.0, 90.0);
        let sol = solve(&model(), &target, &IkOptions::default()).unwrap();
        assert_eq!(sol.branch, Branch::Case2);
        assert!(sol.joints.max_abs_diff(&q) < 1e-9);
    }

    #[test]
    fn solve_flags_boundary_theta2() {
        let (q, target) = fk_deg(0.0, 90.0, 0.4, 0.0, 90.0);
        let e = solve(&model(), &target, &IkOptions::default()).unwrap_err();
        assert_eq!(e.reason, FailureReason::Theta2OutOfRange);
        assert_eq!(e.branch, Some(Branch::Case2));
        let c = e.candidate.expect("boundary failure carries the computed joints");
        assert!(c.max_abs_diff(&q) < 1e-7, "{c:?}");
    }

    #[test]
    fn solve_beyond_outer_shell() {
        let target = Transform::new(Matrix3::identity(), Vector3::new(0.7, 0.1, -0.3));
        let e = solve(&model(), &target, &IkOptions::default()).unwrap_err();
        assert!(
            matches!(
                e.reason,
                FailureReason::NoD3InRange
                    | FailureReason::ConstraintViolated
                    | FailureReason::Theta2OutOfRange
                    | FailureReason::Theta5OutOfRange
            ),
            "{e}"
        );
    }

    #[test]
    fn solve_rejects_non_rotation_target() {
        let target = Transform::new(rot_x(0.3) * 1.01, Vector3::new(0.3, 0.0, -0.3));
        let e = solve(&model(), &target, &IkOptions::default()).unwrap_err();
        assert_eq!(e.reason, FailureReason::InvalidTarget);
    }

    #[test]
    fn determinants() {
        for &(t1, r2z) in &[(0.3, 0.7), (-2.0, -0.01), (3.0, 1e-5)] {
            assert_relative_eq!(case1_determinant(t1, r2z), r2z, epsilon = 1e-12);
        }
        assert!(theta5_determinant(1e-3, PI / 2.0).abs() > 1e-12);
        assert!(theta5_determinant(PI / 2.0 - 1e-3, PI / 2.0).abs() > 1e-12);
    }
}
