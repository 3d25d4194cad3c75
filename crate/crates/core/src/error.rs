// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error)]
pub enum NodeError {
    #[error("invalid node specification:\n{0}")]
    Invalid(ValidationReport),

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("{field} requires {expected}, found {found}")]
    Topology {
        field: &'static str,
        expected: &'static str,
        found: usize,
    },

    #[error("cannot advance by negative step {0}")]
    NegativeStep(f64),

    #[error("output {0} is already filled")]
    AlreadyFilled(usize),

    #[error("state drifted {amount:e} past {what}")]
    Drift { what: String, amount: f64 },

    #[error("execution did not terminate within {0} events")]
    EventBudget(usize),

    #[error("dense integration still active at horizon t = {0}")]
    Horizon(f64),

    #[error("invalid oracle configuration: {0}")]
    OracleConfig(String),
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error(transparent)]
    Node(#[from] NodeError),

    #[error("unsupported document version {0}")]
    Version(u32),

    #[error("{0}")]
    Field(String),
}
