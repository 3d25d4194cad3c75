// SPDX-License-Identifier: Apache-2.0

//! Flow documents and trajectory rows.
//!
//! A flow document lists every `f_ij^c` as a `[[flow]]` entry, followed by
//! movement, input and output aggregates and, optionally, the breakpoints of
//! the execution. Reading a document back only uses the `[[flow]]` entries;
//! unlisted entries are zero.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::model::{Dims, FlowMatrix};
use crate::solver::Trajectory;

pub const FLOWS_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Toml,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "toml" => Ok(Format::Toml),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected toml or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowsDocument {
    pub version: u32,
    pub inputs: usize,
    pub outputs: usize,
    pub classes: usize,
    #[serde(default)]
    pub input_totals: Vec<f64>,
    #[serde(default)]
    pub output_totals: Vec<f64>,
    #[serde(default, rename = "flow")]
    pub flows: Vec<FlowEntry>,
    #[serde(default, rename = "movement", skip_serializing_if = "Vec::is_empty")]
    pub movements: Vec<MovementEntry>,
    #[serde(default, rename = "breakpoint", skip_serializing_if = "Vec::is_empty")]
    pub breakpoints: Vec<BreakpointEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowEntry {
    pub input: usize,
    pub output: usize,
    pub class: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovementEntry {
    pub input: usize,
    pub output: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreakpointEntry {
    pub t: f64,
    /// Bit `j` set iff output `j` is filled.
    pub mode: u64,
    pub events: Vec<String>,
}

impl FlowsDocument {
    pub fn new(flows: &FlowMatrix, trajectory: Option<&Trajectory>) -> Self {
        let dims = flows.dims();
        let entries = flows
            .iter_indexed()
            .map(|((i, j, c), value)| FlowEntry {
                input: i,
                output: j,
                class: c,
                value,
            })
            .collect();
        let movements = (0..dims.inputs)
            .flat_map(|i| (0..dims.outputs).map(move |j| (i, j)))
            .map(|(i, j)| MovementEntry {
                input: i,
                output: j,
                value: flows.movement(i, j),
            })
            .collect();
        let breakpoints = trajectory
            .map(|t| {
                t.breakpoints
                    .iter()
                    .map(|bp| BreakpointEntry {
                        t: bp.t,
                        mode: bp.mode.bits(),
                        events: bp.events.iter().map(|e| e.kind.to_string()).collect(),
                    })
                    .collect()
            })
            .unwrap_or_default();
        FlowsDocument {
            version: FLOWS_VERSION,
            inputs: dims.inputs,
            outputs: dims.outputs,
            classes: dims.classes,
            input_totals: (0..dims.inputs).map(|i| flows.input_total(i)).collect(),
            output_totals: (0..dims.outputs).map(|j| flows.output_total(j)).collect(),
            flows: entries,
            movements,
            breakpoints,
        }
    }

    pub fn to_flows(&self) -> Result<FlowMatrix, ScenarioError> {
        if self.version != FLOWS_VERSION {
            return Err(ScenarioError::Version(self.version));
        }
        let dims = Dims::new(self.inputs, self.outputs, self.classes);
        let mut f = FlowMatrix::zeros(dims);
        for (k, e) in self.flows.iter().enumerate() {
            if e.input >= dims.inputs || e.output >= dims.outputs || e.class >= dims.classes {
                return Err(ScenarioError::Field(format!(
                    "flow[{k}]: index ({}, {}, {}) out of range for {dims} junction",
                    e.input, e.output, e.class
                )));
            }
            f[(e.input, e.output, e.class)] = e.value;
        }
        Ok(f)
    }
}

/// Renders flows, and breakpoints when a trajectory is given.
pub fn write_results(flows: &FlowMatrix, trajectory: Option<&Trajectory>, format: Format) -> String {
    let doc = FlowsDocument::new(flows, trajectory);
    match format {
        Format::Toml => toml::to_string(&doc).expect("flow documents always serialize"),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&doc).expect("flow documents always serialize");
            s.push('\n');
            s
        }
    }
}

/// Reads a flow document in either format (JSON when it starts with `{`).
pub fn parse_flows(text: &str) -> Result<FlowMatrix, ScenarioError> {
    let doc: FlowsDocument = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?
    } else {
        toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?
    };
    doc.to_flows()
}

/// One CSV row per breakpoint: `t`, mode bitmask, then every `x_ij^c` in
/// input-major order.
pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let mut out = String::from("t,mode");
    if let Some(first) = trajectory.breakpoints.first() {
        let d = first.x.dims();
        for i in 0..d.inputs {
            for j in 0..d.outputs {
                for c in 0..d.classes {
                    write!(out, ",x_{i}_{j}_{c}").unwrap();
                }
            }
        }
    }
    out.push('\n');
    for bp in &trajectory.breakpoints {
        write!(out, "{},{}", bp.t, bp.mode.bits()).unwrap();
        for v in bp.x.as_slice() {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeSpec;
    use crate::solver::solve;

    #[test]
    fn merge_results_document() {
        let spec = NodeSpec::merge(&[10.0, 20.0], &[1.0, 1.0], 15.0).unwrap();
        let sol = solve(&spec).unwrap();
        let text = write_results(&sol.flows, Some(&sol.trajectory), Format::Toml);
        let doc: FlowsDocument = toml::from_str(&text).unwrap();
        assert_eq!(doc.output_totals, vec![15.0]);
        let ts: Vec<f64> = doc.breakpoints.iter().map(|b| b.t).collect();
        assert_eq!(ts, vec![0.0, 7.5]);
        assert_eq!(doc.breakpoints[1].mode, 1);
        assert_eq!(doc.breakpoints[1].events, vec!["fill(0)", "terminate"]);
        assert_eq!(parse_flows(&text).unwrap(), sol.flows);
    }

    #[test]
    fn flows_only_without_trajectory() {
        let spec = NodeSpec::merge(&[10.0, 20.0], &[1.0, 1.0], 15.0).unwrap();
        let sol = solve(&spec).unwrap();
        let text = write_results(&sol.flows, None, Format::Toml);
        assert!(!text.contains("[[breakpoint]]"));
        let json = write_results(&sol.flows, None, Format::Json);
        assert_eq!(parse_flows(&json).unwrap(), sol.flows);
    }

    #[test]
    fn sparse_flow_documents() {
        let text = "version = 1\ninputs = 1\noutputs = 2\nclasses = 1\n\n[[flow]]\ninput = 0\noutput = 1\nclass = 0\nvalue = 3.8\n";
        let f = parse_flows(text).unwrap();
        assert_eq!(f[(0, 0, 0)], 0.0);
        assert_eq!(f[(0, 1, 0)], 3.8);
        let bad = text.replace("output = 1", "output = 7");
        assert!(parse_flows(&bad).is_err());
    }

    #[test]
    fn csv_rows() {
        let spec = NodeSpec::diverge(10.0, &[0.6, 0.4], 10.0, &[3.0, 100.0])
            .unwrap()
            .with_restriction(0, 0, 1, crate::model::Interval { lo: 0.0, hi: 0.2 });
        let sol = solve(&spec).unwrap();
        let csv = trajectory_csv(&sol.trajectory);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,mode,x_0_0_0,x_0_1_0");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0.5,1,3,2"));
        assert!(lines[3].starts_with("1,1,3,3.6"));
    }

    #[test]
    fn format_names() {
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("yaml".parse::<Format>().is_err());
    }
}
