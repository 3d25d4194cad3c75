// SPDX-License-Identifier: Apache-2.0

//! Junction ("node model") flows as executions of a hybrid automaton.
//!
//! Given per-class demands, split ratios, supplies, input priorities and lane
//! restriction intervals, [`solve`] runs the automaton event by event and
//! returns the throughflows together with the breakpoints of the execution.
//! [`oracle::integrate`] runs the same dynamics with small fixed steps and
//! [`verify::certify`] checks any flow matrix against the model constraints.
//!
//! ```
//! use nodeflow::{solve, NodeSpec};
//!
//! let spec = NodeSpec::merge(&[10.0, 20.0], &[1.0, 1.0], 15.0).unwrap();
//! let solution = solve(&spec).unwrap();
//! assert!((solution.flows[(0, 0, 0)] - 7.5).abs() < 1e-9);
//! ```

pub mod automaton;
pub mod error;
pub mod fixtures;
pub mod fuzz;
pub mod model;
pub mod oracle;
pub mod report;
pub mod scenario;
pub mod solver;
pub mod verify;

pub use automaton::{FieldKind, HybridState, ModeSet, RateMatrix};
pub use error::{NodeError, ScenarioError};
pub use model::{
    interval_union_measure, Dims, FlowMatrix, Interval, MovementArray, NodeSpec, OrientedDemand,
    ValidationReport, EPS,
};
pub use oracle::{flow_distance, integrate, OracleConfig};
pub use solver::{solve, solve_with, Event, EventKind, Solution, Trajectory};
pub use verify::{certify, VerificationReport};
