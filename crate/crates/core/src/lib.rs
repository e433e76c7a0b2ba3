//! Fair k-center and k-supplier with outliers.
//!
//! The solver works on four related problems over a finite metric:
//!
//! * **fair k-center with outliers**: pick at most `k` centers from the
//!   points, at most `k_i` from group `i`, drop the `z` worst-served
//!   clients, minimize the largest remaining distance;
//! * **fair-range**: the same with lower bounds per group and exactly `k`
//!   centers;
//! * **unit-group supplier**: centers come from dedicated facilities, at
//!   most one per group;
//! * **colorful supplier**: facilities are partitioned into `k` classes and
//!   a solution picks exactly one facility of each class.
//!
//! Fair instances reduce to unit-group supplier form by duplicating each
//! group once per allowed center ([`reductions`]); color coding turns the
//! unit groups into `k` classes ([`reductions::color_code`]); a branching
//! search solves each colorful instance within three times its optimal
//! radius ([`solver::branch_solve`]). The pipeline in [`solver`] wires the
//! stages together, maps centers back, and filters by feasibility.
//! Exhaustive reference implementations live in [`oracle`], greedy
//! baselines in [`baselines`], seeded instance generation in [`generator`],
//! and the JSON wire format in [`json`].

pub mod baselines;
pub mod error;
pub mod generator;
pub mod instances;
pub mod json;
pub mod metric;
pub mod oracle;
pub mod reductions;
pub mod solver;

pub use error::Error;
pub use instances::{Instance, Solution};
pub use metric::{Metric, PointId};
