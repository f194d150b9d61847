//! Kinematics of a five-joint RRPRR arm (revolute, revolute, prismatic,
//! revolute, revolute).
//!
//! * [`fk`]: Denavit-Hartenberg forward kinematics and the expanded
//!   closed-form pose.
//! * [`ik`]: the two-branch analytical inverse with constraint checks and
//!   explicit failure reasons.
//! * [`metrics`]: per-axis position error and the geodesic rotation distance.
//! * [`refine`]: damped least-squares polishing of a joint estimate.
//! * [`eval`]: seeded Monte-Carlo evaluation, batch solving and report I/O.
//!
//! ```
//! use rrprr_kinematics::{forward_kinematics, ik, JointVector, RobotModel};
//!
//! let model = RobotModel::default();
//! let q = JointVector::from_degrees(30.0, 45.0, 0.4, 20.0, 60.0);
//! let pose = forward_kinematics(&model, &q);
//! let sol = ik::solve(&model, &pose, &ik::IkOptions::default()).unwrap();
//! assert!(sol.joints.max_abs_diff(&q) < 1e-9);
//! ```

pub mod error;
pub mod eval;
pub mod fk;
pub mod ik;
pub mod metrics;
pub mod model;
pub mod refine;
pub mod transform;

pub use error::{Error, Result};
pub use fk::forward_kinematics;
pub use ik::{solve, Branch, FailureReason, IkFailure, IkOptions, IkSolution};
pub use metrics::{pose_error, rotation_geodesic, PoseError};
pub use model::{JointId, JointVector, RobotModel};
pub use refine::{refine, RefineOutcome, RefineParams};
pub use transform::{Pose, Transform};
