// SPDX-License-Identifier: Apache-2.0

//! TOML scenario documents.
//!
//! ```toml
//! version = 1
//! label = "two-input merge"
//! inputs = 2
//! outputs = 1
//! classes = 1
//! priorities = [1.0, 1.0]          # [input]
//! demands = [[10.0], [20.0]]       # [input][class]
//! splits = [[[1.0]], [[1.0]]]      # [input][output][class]
//! supplies = [15.0]                # [output]
//!
//! # Optional. Unlisted entries stay [0, 1] (full FIFO); diagonal entries
//! # are always [0, 1].
//! [[restriction]]
//! input = 0
//! congested = 0
//! affected = 1
//! interval = [0.0, 0.2]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::model::{Dims, Interval, NodeSpec};

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub inputs: usize,
    pub outputs: usize,
    pub classes: usize,
    pub priorities: Vec<f64>,
    pub demands: Vec<Vec<f64>>,
    pub splits: Vec<Vec<Vec<f64>>>,
    pub supplies: Vec<f64>,
    #[serde(default, rename = "restriction", skip_serializing_if = "Vec::is_empty")]
    pub restrictions: Vec<RestrictionEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionEntry {
    pub input: usize,
    pub congested: usize,
    pub affected: usize,
    pub interval: [f64; 2],
}

impl ScenarioDocument {
    /// Describes `spec`, listing only restriction entries that differ from `[0, 1]`.
    pub fn from_spec(spec: &NodeSpec, label: Option<&str>) -> Self {
        let dims = spec.dims();
        let mut restrictions = Vec::new();
        for i in 0..dims.inputs {
            for jp in 0..dims.outputs {
                for j in 0..dims.outputs {
                    let iv = spec.restriction(i, jp, j);
                    if !iv.is_full() {
                        restrictions.push(RestrictionEntry {
                            input: i,
                            congested: jp,
                            affected: j,
                            interval: [iv.lo, iv.hi],
                        });
                    }
                }
            }
        }
        ScenarioDocument {
            version: SCENARIO_VERSION,
            label: label.map(str::to_owned),
            inputs: dims.inputs,
            outputs: dims.outputs,
            classes: dims.classes,
            priorities: spec.priorities().to_vec(),
            demands: (0..dims.inputs)
                .map(|i| (0..dims.classes).map(|c| spec.demand(i, c)).collect())
                .collect(),
            splits: spec.splits().to_nested(),
            supplies: spec.supplies().to_vec(),
            restrictions,
        }
    }

    /// Builds the spec (without validating it). Diagonal restrictions are
    /// forced to `[0, 1]`.
    pub fn to_spec(&self) -> Result<NodeSpec, ScenarioError> {
        if self.version != SCENARIO_VERSION {
            return Err(ScenarioError::Version(self.version));
        }
        let dims = Dims::new(self.inputs, self.outputs, self.classes);
        let mut spec = NodeSpec::new(
            dims,
            self.demands.clone(),
            self.splits.clone(),
            self.supplies.clone(),
            self.priorities.clone(),
        )?;
        for (k, r) in self.restrictions.iter().enumerate() {
            if r.input >= dims.inputs || r.congested >= dims.outputs || r.affected >= dims.outputs {
                return Err(ScenarioError::Field(format!(
                    "restriction[{k}]: index ({}, {}, {}) out of range for {dims} junction",
                    r.input, r.congested, r.affected
                )));
            }
            if r.congested == r.affected {
                continue;
            }
            let iv = Interval {
                lo: r.interval[0],
                hi: r.interval[1],
            };
            spec = spec.with_restriction(r.input, r.congested, r.affected, iv);
        }
        Ok(spec)
    }
}

/// Parses a document into a validated spec.
pub fn parse_scenario(text: &str) -> Result<NodeSpec, ScenarioError> {
    let doc = parse_document(text)?;
    Ok(doc.to_spec()?.validated()?)
}

pub fn parse_document(text: &str) -> Result<ScenarioDocument, ScenarioError> {
    toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))
}

pub fn write_scenario(spec: &NodeSpec, label: Option<&str>) -> String {
    toml::to_string(&ScenarioDocument::from_spec(spec, label))
        .expect("scenario documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MERGE: &str = r#"
version = 1
inputs = 2
outputs = 1
classes = 1
priorities = [1, 1]
demands = [[10], [20]]
splits = [[[1]], [[1]]]
supplies = [15]
"#;

    #[test]
    fn minimal_merge_document() {
        let spec = parse_scenario(MERGE).unwrap();
        assert_eq!(spec, NodeSpec::merge(&[10.0, 20.0], &[1.0, 1.0], 15.0).unwrap());
    }

    #[test]
    fn restrictions_default_to_full_fifo() {
        let doc = r#"
version = 1
inputs = 1
outputs = 2
classes = 1
priorities = [10.0]
demands = [[10.0]]
splits = [[[0.6], [0.4]]]
supplies = [3.0, 100.0]
"#;
        let spec = parse_scenario(doc).unwrap();
        assert!(spec.is_full_fifo(0));
    }

    #[test]
    fn restriction_entries_and_forced_diagonal() {
        let doc = r#"
version = 1
inputs = 1
outputs = 2
classes = 1
priorities = [10.0]
demands = [[10.0]]
splits = [[[0.6], [0.4]]]
supplies = [3.0, 100.0]

[[restriction]]
input = 0
congested = 0
affected = 1
interval = [0.0, 0.2]

[[restriction]]
input = 0
congested = 1
affected = 1
interval = [0.0, 0.5]
"#;
        let spec = parse_scenario(doc).unwrap();
        assert_eq!(spec.restriction(0, 0, 1), Interval { lo: 0.0, hi: 0.2 });
        assert_eq!(spec.restriction(0, 1, 1), Interval::FULL);
        assert_eq!(spec.restriction(0, 1, 0), Interval::FULL);
    }

    #[test]
    fn split_row_violation_surfaces() {
        let doc = MERGE.replace("splits = [[[1]], [[1]]]", "splits = [[[0.9]], [[1]]]");
        let err = parse_scenario(&doc).unwrap_err();
        assert!(matches!(err, ScenarioError::Node(crate::NodeError::Invalid(_))));
        assert!(err.to_string().contains("split row (i=0, c=0)"));
    }

    #[test]
    fn syntax_error_names_the_line() {
        let doc = MERGE.replace("supplies = [15]", "supplies = [15");
        let err = parse_scenario(&doc).unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax(_)));
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn unknown_fields_and_versions_rejected() {
        assert!(parse_scenario(&format!("{MERGE}\nspeed = 3\n")).is_err());
        let doc = MERGE.replace("version = 1", "version = 9");
        assert!(matches!(parse_scenario(&doc), Err(ScenarioError::Version(9))));
    }

    #[test]
    fn shape_errors() {
        let doc = MERGE.replace("supplies = [15]", "supplies = [15, 3]");
        assert!(matches!(parse_scenario(&doc), Err(ScenarioError::Node(_))));
        let doc = format!(
            "{MERGE}\n[[restriction]]\ninput = 4\ncongested = 0\naffected = 0\ninterval = [0.0, 1.0]\n"
        );
        assert!(matches!(parse_scenario(&doc), Err(ScenarioError::Field(_))));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let spec = NodeSpec::diverge(10.0, &[0.6, 0.4], 10.0, &[3.0, 100.0])
            .unwrap()
            .with_restriction(0, 0, 1, Interval { lo: 0.0, hi: 0.2 });
        let text = write_scenario(&spec, Some("relaxed"));
        assert_eq!(parse_scenario(&text).unwrap(), spec);
        assert_eq!(parse_document(&text).unwrap().label.as_deref(), Some("relaxed"));
    }
}
