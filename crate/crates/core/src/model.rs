// SPDX-License-Identifier: Apache-2.0

//! Static description of a junction and the elementary quantities derived from it.
//!
//! All indices are zero-based: inputs `i < M`, outputs `j < N`, classes `c < C`.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::NodeError;

/// Absolute tolerance for comparisons of vehicle quantities and times.
pub const EPS: f64 = 1e-9;

/// Sizes of a junction: `inputs` (M), `outputs` (N) and vehicle `classes` (C).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub inputs: usize,
    pub outputs: usize,
    pub classes: usize,
}

impl Dims {
    pub fn new(inputs: usize, outputs: usize, classes: usize) -> Self {
        Dims {
            inputs,
            outputs,
            classes,
        }
    }

    /// Number of `(i, j, c)` entries.
    pub fn movement_len(&self) -> usize {
        self.inputs * self.outputs * self.classes
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.inputs, self.outputs, self.classes)
    }
}

/// Dense array indexed by `(input, output, class)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MovementArray {
    dims: Dims,
    data: Vec<f64>,
}

impl MovementArray {
    pub fn zeros(dims: Dims) -> Self {
        MovementArray {
            dims,
            data: vec![0.0; dims.movement_len()],
        }
    }

    /// Builds an array from `[i][j][c]` nested vectors.
    pub fn from_nested(dims: Dims, nested: &[Vec<Vec<f64>>]) -> Result<Self, NodeError> {
        if nested.len() != dims.inputs {
            return Err(NodeError::Shape(format!(
                "expected {} inputs, found {}",
                dims.inputs,
                nested.len()
            )));
        }
        let mut out = Self::zeros(dims);
        for (i, row) in nested.iter().enumerate() {
            if row.len() != dims.outputs {
                return Err(NodeError::Shape(format!(
                    "input {i}: expected {} outputs, found {}",
                    dims.outputs,
                    row.len()
                )));
            }
            for (j, classes) in row.iter().enumerate() {
                if classes.len() != dims.classes {
                    return Err(NodeError::Shape(format!(
                        "movement ({i}, {j}): expected {} classes, found {}",
                        dims.classes,
                        classes.len()
                    )));
                }
                for (c, &v) in classes.iter().enumerate() {
                    out[(i, j, c)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.dims.inputs)
            .map(|i| {
                (0..self.dims.outputs)
                    .map(|j| (0..self.dims.classes).map(|c| self[(i, j, c)]).collect())
                    .collect()
            })
            .collect()
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `Σ_c a[i][j][c]`
    pub fn movement_total(&self, i: usize, j: usize) -> f64 {
        let start = self.offset(i, j, 0);
        self.data[start..start + self.dims.classes].iter().sum()
    }

    /// `Σ_i Σ_c a[i][j][c]`
    pub fn output_total(&self, j: usize) -> f64 {
        (0..self.dims.inputs).map(|i| self.movement_total(i, j)).sum()
    }

    /// `Σ_j a[i][j][c]`
    pub fn input_class_total(&self, i: usize, c: usize) -> f64 {
        (0..self.dims.outputs).map(|j| self[(i, j, c)]).sum()
    }

    /// `Σ_j Σ_c a[i][j][c]`
    pub fn input_total(&self, i: usize) -> f64 {
        (0..self.dims.outputs).map(|j| self.movement_total(i, j)).sum()
    }

    pub fn iter_indexed(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        let Dims {
            outputs, classes, ..
        } = self.dims;
        self.data.iter().enumerate().map(move |(k, &v)| {
            let c = k % classes;
            let j = (k / classes) % outputs;
            let i = k / (classes * outputs);
            ((i, j, c), v)
        })
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, c: usize) -> usize {
        debug_assert!(i < self.dims.inputs && j < self.dims.outputs && c < self.dims.classes);
        (i * self.dims.outputs + j) * self.dims.classes + c
    }
}

impl Index<(usize, usize, usize)> for MovementArray {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j, c): (usize, usize, usize)) -> &f64 {
        &self.data[self.offset(i, j, c)]
    }
}

impl IndexMut<(usize, usize, usize)> for MovementArray {
    #[inline]
    fn index_mut(&mut self, (i, j, c): (usize, usize, usize)) -> &mut f64 {
        let k = self.offset(i, j, c);
        &mut self.data[k]
    }
}

/// Closed sub-interval `[lo, hi]` of `[0, 1]`.
///
/// Restriction intervals describe which share of an input's lanes toward one
/// output are blocked when another output is congested.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const FULL: Interval = Interval { lo: 0.0, hi: 1.0 };
    pub const EMPTY: Interval = Interval { lo: 0.0, hi: 0.0 };

    /// Checked constructor.
    pub fn new(lo: f64, hi: f64) -> Result<Self, NodeError> {
        let iv = Interval { lo, hi };
        if iv.is_valid() {
            Ok(iv)
        } else {
            Err(NodeError::Shape(format!("invalid interval [{lo}, {hi}]")))
        }
    }

    pub fn is_valid(&self) -> bool {
        0.0 <= self.lo && self.lo <= self.hi && self.hi <= 1.0
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_full(&self) -> bool {
        self.lo == 0.0 && self.hi == 1.0
    }
}

/// Total length of the union of closed intervals on the real line.
///
/// Sorts in place. Empty and degenerate intervals contribute nothing.
pub(crate) fn union_length(spans: &mut [(f64, f64)]) -> f64 {
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for &(lo, hi) in spans.iter() {
        if hi <= lo {
            continue;
        }
        match current {
            Some((clo, chi)) if lo <= chi => current = Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += chi - clo;
                current = Some((lo, hi));
            }
            None => current = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = current {
        total += chi - clo;
    }
    total
}

/// Lebesgue measure of a union of restriction intervals.
pub fn interval_union_measure<'a, I>(intervals: I) -> f64
where
    I: IntoIterator<Item = &'a Interval>,
{
    let mut spans: Vec<(f64, f64)> = intervals.into_iter().map(|iv| (iv.lo, iv.hi)).collect();
    union_length(&mut spans).min(1.0)
}

/// Static snapshot of a junction.
///
/// Demands are per `(input, class)`, split ratios per `(input, output, class)`,
/// supplies per output, priorities per input and restriction intervals per
/// `(input, congested output, affected output)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSpec {
    dims: Dims,
    demand: Vec<f64>,
    split: MovementArray,
    supply: Vec<f64>,
    priority: Vec<f64>,
    restriction: Vec<Interval>,
}

impl NodeSpec {
    /// Builds a spec with full-FIFO restrictions. Only shapes are checked here;
    /// call [`NodeSpec::validate`] for the value rules.
    pub fn new(
        dims: Dims,
        demand: Vec<Vec<f64>>,
        split: Vec<Vec<Vec<f64>>>,
        supply: Vec<f64>,
        priority: Vec<f64>,
    ) -> Result<Self, NodeError> {
        if demand.len() != dims.inputs {
            return Err(NodeError::Shape(format!(
                "demands: expected {} inputs, found {}",
                dims.inputs,
                demand.len()
            )));
        }
        let mut flat_demand = Vec::with_capacity(dims.inputs * dims.classes);
        for (i, row) in demand.iter().enumerate() {
            if row.len() != dims.classes {
                return Err(NodeError::Shape(format!(
                    "demands[{i}]: expected {} classes, found {}",
                    dims.classes,
                    row.len()
                )));
            }
            flat_demand.extend_from_slice(row);
        }
        let split = MovementArray::from_nested(dims, &split)
            .map_err(|e| NodeError::Shape(format!("splits: {e}")))?;
        if supply.len() != dims.outputs {
            return Err(NodeError::Shape(format!(
                "supplies: expected {} outputs, found {}",
                dims.outputs,
                supply.len()
            )));
        }
        if priority.len() != dims.inputs {
            return Err(NodeError::Shape(format!(
                "priorities: expected {} inputs, found {}",
                dims.inputs,
                priority.len()
            )));
        }
        Ok(NodeSpec {
            dims,
            demand: flat_demand,
            split,
            supply,
            priority,
            restriction: vec![Interval::FULL; dims.inputs * dims.outputs * dims.outputs],
        })
    }

    /// Single-class merge junction (M inputs into one output).
    pub fn merge(demand: &[f64], priority: &[f64], supply: f64) -> Result<Self, NodeError> {
        let m = demand.len();
        NodeSpec::new(
            Dims::new(m, 1, 1),
            demand.iter().map(|&s| vec![s]).collect(),
            vec![vec![vec![1.0]]; m],
            vec![supply],
            priority.to_vec(),
        )
    }

    /// Single-class diverge junction (one input into N outputs), full FIFO.
    pub fn diverge(
        demand: f64,
        split: &[f64],
        priority: f64,
        supply: &[f64],
    ) -> Result<Self, NodeError> {
        NodeSpec::new(
            Dims::new(1, split.len(), 1),
            vec![vec![demand]],
            vec![split.iter().map(|&b| vec![b]).collect()],
            supply.to_vec(),
            vec![priority],
        )
    }

    /// Replaces `η[input][congested][affected]`.
    pub fn with_restriction(
        mut self,
        input: usize,
        congested: usize,
        affected: usize,
        interval: Interval,
    ) -> Self {
        let k = self.restriction_offset(input, congested, affected);
        self.restriction[k] = interval;
        self
    }

    /// Replaces the whole `[congested][affected]` matrix of one input.
    pub fn with_restriction_matrix(mut self, input: usize, matrix: &[Vec<Interval>]) -> Self {
        for (jp, row) in matrix.iter().enumerate() {
            for (j, &iv) in row.iter().enumerate() {
                let k = self.restriction_offset(input, jp, j);
                self.restriction[k] = iv;
            }
        }
        self
    }

    /// Same junction with every priority multiplied by `k`.
    pub fn scale_priorities(&self, k: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.priority {
            *p *= k;
        }
        out
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn demand(&self, i: usize, c: usize) -> f64 {
        self.demand[i * self.dims.classes + c]
    }

    pub fn split(&self, i: usize, j: usize, c: usize) -> f64 {
        self.split[(i, j, c)]
    }

    pub fn splits(&self) -> &MovementArray {
        &self.split
    }

    pub fn supply(&self, j: usize) -> f64 {
        self.supply[j]
    }

    pub fn supplies(&self) -> &[f64] {
        &self.supply
    }

    pub fn priority(&self, i: usize) -> f64 {
        self.priority[i]
    }

    pub fn priorities(&self) -> &[f64] {
        &self.priority
    }

    /// `η^i_{j'j}`: share of input `input`'s lanes toward `affected` blocked
    /// while `congested` is full.
    pub fn restriction(&self, input: usize, congested: usize, affected: usize) -> Interval {
        self.restriction[self.restriction_offset(input, congested, affected)]
    }

    /// True when every restriction interval of `input` is `[0, 1]`.
    pub fn is_full_fifo(&self, input: usize) -> bool {
        let n = self.dims.outputs;
        (0..n).all(|jp| (0..n).all(|j| self.restriction(input, jp, j).is_full()))
    }

    /// Time an input needs to discharge its whole demand at its priority rate.
    pub fn time_limit(&self, i: usize) -> f64 {
        let total: f64 = (0..self.dims.classes).map(|c| self.demand(i, c)).sum();
        if total <= 0.0 {
            0.0
        } else {
            total / self.priority[i]
        }
    }

    fn restriction_offset(&self, i: usize, jp: usize, j: usize) -> usize {
        (i * self.dims.outputs + jp) * self.dims.outputs + j
    }

    /// Checks every value rule. Violations are reported, not raised.
    pub fn validate(&self) -> ValidationReport {
        let Dims {
            inputs: m,
            outputs: n,
            classes: cc,
        } = self.dims;
        let mut report = ValidationReport::default();
        if m == 0 || n == 0 || cc == 0 {
            report.push(Rule::Dimensions, format!("all dimensions must be positive, got {}", self.dims));
            return report;
        }
        if n > crate::automaton::MAX_OUTPUTS {
            report.push(
                Rule::Dimensions,
                format!("at most {} outputs are supported, got {n}", crate::automaton::MAX_OUTPUTS),
            );
        }
        for i in 0..m {
            for c in 0..cc {
                let s = self.demand(i, c);
                if !s.is_finite() || s < 0.0 {
                    report.push(Rule::Demand, format!("demand (i={i}, c={c}) = {s} must be finite and >= 0"));
                }
            }
            let p = self.priority[i];
            if !p.is_finite() || p <= 0.0 {
                report.push(Rule::Priority, format!("priority (i={i}) = {p} must be finite and > 0"));
            }
        }
        for (j, &r) in self.supply.iter().enumerate() {
            if !r.is_finite() || r < 0.0 {
                report.push(Rule::Supply, format!("supply (j={j}) = {r} must be finite and >= 0"));
            }
        }
        for ((i, j, c), b) in self.split.iter_indexed() {
            if !(0.0..=1.0).contains(&b) {
                report.push(Rule::SplitRange, format!("split (i={i}, j={j}, c={c}) = {b} must lie in [0, 1]"));
            }
        }
        for i in 0..m {
            for c in 0..cc {
                if self.demand(i, c) > 0.0 {
                    let sum = self.split.input_class_total(i, c);
                    if (sum - 1.0).abs() > EPS {
                        report.push(
                            Rule::SplitRowSum,
                            format!("split row (i={i}, c={c}) sums to {sum}, expected 1"),
                        );
                    }
                }
            }
        }
        for i in 0..m {
            for jp in 0..n {
                for j in 0..n {
                    let iv = self.restriction(i, jp, j);
                    if !iv.is_valid() {
                        report.push(
                            Rule::Interval,
                            format!("restriction (i={i}, j'={jp}, j={j}) = [{}, {}] is not a sub-interval of [0, 1]", iv.lo, iv.hi),
                        );
                    } else if jp == j && !iv.is_full() {
                        report.push(
                            Rule::DiagonalRestriction,
                            format!("diagonal restriction must be [0,1] (i={i}, j={j}), got [{}, {}]", iv.lo, iv.hi),
                        );
                    }
                }
            }
        }
        report
    }

    /// Validates and returns `self`, or the violations as an error.
    pub fn validated(self) -> Result<Self, NodeError> {
        let report = self.validate();
        if report.is_ok() {
            Ok(self)
        } else {
            Err(NodeError::Invalid(report))
        }
    }
}

/// Which rule a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Dimensions,
    Demand,
    Supply,
    Priority,
    SplitRange,
    SplitRowSum,
    Interval,
    DiagonalRestriction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub rule: Rule,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, rule: Rule, message: String) {
        self.violations.push(Violation { rule, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", v.message)?;
        }
        Ok(())
    }
}

/// Demand per movement and class, `S_ij^c = S_i^c β_ij^c`, with its totals.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedDemand {
    value: MovementArray,
    total: Vec<f64>,
    input_total: Vec<f64>,
}

impl OrientedDemand {
    pub fn new(spec: &NodeSpec) -> Self {
        let dims = spec.dims();
        let mut value = MovementArray::zeros(dims);
        for i in 0..dims.inputs {
            for j in 0..dims.outputs {
                for c in 0..dims.classes {
                    value[(i, j, c)] = spec.demand(i, c) * spec.split(i, j, c);
                }
            }
        }
        let total = (0..dims.inputs)
            .flat_map(|i| (0..dims.outputs).map(move |j| (i, j)))
            .map(|(i, j)| value.movement_total(i, j))
            .collect();
        let input_total = (0..dims.inputs)
            .map(|i| (0..dims.classes).map(|c| spec.demand(i, c)).sum())
            .collect();
        OrientedDemand {
            value,
            total,
            input_total,
        }
    }

    /// `S_ij^c`
    pub fn value(&self, i: usize, j: usize, c: usize) -> f64 {
        self.value[(i, j, c)]
    }

    pub fn values(&self) -> &MovementArray {
        &self.value
    }

    /// `Σ_c S_ij^c`
    pub fn total(&self, i: usize, j: usize) -> f64 {
        self.total[i * self.value.dims().outputs + j]
    }

    /// `Σ_c S_i^c`
    pub fn input_total(&self, i: usize) -> f64 {
        self.input_total[i]
    }

    /// Oriented priority `p_ij`: the input's priority apportioned to output `j`
    /// by its share of the input's demand. Zero for inputs without demand.
    pub fn priority(&self, spec: &NodeSpec, i: usize, j: usize) -> f64 {
        let s_i = self.input_total[i];
        if s_i <= 0.0 {
            0.0
        } else {
            self.total(i, j) / s_i * spec.priority(i)
        }
    }
}

/// Final throughflows `f_ij^c`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMatrix(pub MovementArray);

impl FlowMatrix {
    pub fn zeros(dims: Dims) -> Self {
        FlowMatrix(MovementArray::zeros(dims))
    }

    /// `Σ_c f_ij^c`
    pub fn movement(&self, i: usize, j: usize) -> f64 {
        self.0.movement_total(i, j)
    }
}

impl std::ops::Deref for FlowMatrix {
    type Target = MovementArray;

    fn deref(&self) -> &MovementArray {
        &self.0
    }
}

impl std::ops::DerefMut for FlowMatrix {
    fn deref_mut(&mut self) -> &mut MovementArray {
        &mut self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn merge_a() -> NodeSpec {
        NodeSpec::merge(&[10.0, 20.0], &[1.0, 1.0], 15.0).unwrap()
    }

    #[test]
    fn well_formed_merge_validates() {
        assert!(merge_a().validate().is_ok());
    }

    #[test]
    fn split_row_sum_violation() {
        let spec = NodeSpec::diverge(10.0, &[0.5, 0.4], 1.0, &[5.0, 5.0]).unwrap();
        let report = spec.validate();
        assert!(report.has(Rule::SplitRowSum));
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].message.contains("(i=0, c=0)"));
    }

    #[test]
    fn split_row_sum_ignored_without_demand() {
        let spec = NodeSpec::diverge(0.0, &[0.0, 0.0], 1.0, &[5.0, 5.0]).unwrap();
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn diagonal_restriction_violation() {
        let spec = NodeSpec::diverge(10.0, &[0.5, 0.5], 1.0, &[5.0, 5.0])
            .unwrap()
            .with_restriction(0, 1, 1, Interval { lo: 0.0, hi: 0.5 });
        let report = spec.validate();
        assert!(report.has(Rule::DiagonalRestriction));
        assert!(report.to_string().contains("diagonal restriction must be [0,1]"));
    }

    #[test]
    fn value_rule_violations() {
        let spec = NodeSpec::new(
            Dims::new(1, 2, 1),
            vec![vec![-1.0]],
            vec![vec![vec![1.5], vec![-0.5]]],
            vec![f64::NAN, 1.0],
            vec![0.0],
        )
        .unwrap()
        .with_restriction(0, 0, 1, Interval { lo: 0.7, hi: 0.2 });
        let report = spec.validate();
        for rule in [Rule::Demand, Rule::Supply, Rule::Priority, Rule::SplitRange, Rule::Interval] {
            assert!(report.has(rule), "missing {rule:?}: {report}");
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let err = NodeSpec::new(
            Dims::new(2, 1, 1),
            vec![vec![1.0]],
            vec![vec![vec![1.0]]; 2],
            vec![1.0],
            vec![1.0, 1.0],
        );
        assert!(matches!(err, Err(NodeError::Shape(_))));
    }

    #[test]
    fn oriented_demand_products() {
        let spec = NodeSpec::diverge(10.0, &[0.6, 0.4], 10.0, &[3.0, 100.0]).unwrap();
        let od = OrientedDemand::new(&spec);
        assert!((od.value(0, 0, 0) - 6.0).abs() < EPS);
        assert!((od.value(0, 1, 0) - 4.0).abs() < EPS);
        assert!((od.input_total(0) - 10.0).abs() < EPS);
    }

    #[test]
    fn oriented_demand_identity_routing_and_zero() {
        let spec = NodeSpec::new(
            Dims::new(2, 3, 1),
            vec![vec![7.0], vec![0.0]],
            vec![
                vec![vec![0.0], vec![1.0], vec![0.0]],
                vec![vec![0.2], vec![0.3], vec![0.5]],
            ],
            vec![1.0; 3],
            vec![1.0; 2],
        )
        .unwrap();
        let od = OrientedDemand::new(&spec);
        assert_eq!(od.value(0, 1, 0), 7.0);
        assert_eq!(od.value(0, 0, 0), 0.0);
        assert_eq!(od.value(0, 2, 0), 0.0);
        for j in 0..3 {
            assert_eq!(od.value(1, j, 0), 0.0);
        }
    }

    #[test]
    fn oriented_priority_cases() {
        let spec = NodeSpec::diverge(10.0, &[0.6, 0.4], 10.0, &[3.0, 100.0]).unwrap();
        let od = OrientedDemand::new(&spec);
        assert!((od.priority(&spec, 0, 0) - 6.0).abs() < EPS);
        assert!((od.priority(&spec, 0, 1) - 4.0).abs() < EPS);

        let spec = NodeSpec::diverge(10.0, &[0.0, 1.0], 3.0, &[3.0, 100.0]).unwrap();
        let od = OrientedDemand::new(&spec);
        assert_eq!(od.priority(&spec, 0, 0), 0.0);
        assert_eq!(od.priority(&spec, 0, 1), 3.0);

        let spec = NodeSpec::diverge(0.0, &[0.5, 0.5], 3.0, &[3.0, 100.0]).unwrap();
        let od = OrientedDemand::new(&spec);
        assert_eq!(od.priority(&spec, 0, 0), 0.0);
    }

    #[test]
    fn union_measure_examples() {
        assert_eq!(interval_union_measure(&[]), 0.0);
        assert_eq!(interval_union_measure(&[Interval::FULL]), 1.0);
        let m = interval_union_measure(&[
            Interval { lo: 0.0, hi: 0.3 },
            Interval { lo: 0.2, hi: 0.6 },
        ]);
        assert!((m - 0.6).abs() < 1e-15);
        let m = interval_union_measure(&[
            Interval { lo: 0.0, hi: 0.2 },
            Interval { lo: 0.6, hi: 1.0 },
        ]);
        assert!((m - 0.6).abs() < 1e-15);
    }

    #[test]
    fn time_limit_is_demand_over_priority() {
        let spec = merge_a();
        assert_eq!(spec.time_limit(0), 10.0);
        assert_eq!(spec.time_limit(1), 20.0);
    }

    #[test]
    fn movement_array_indexing_roundtrip() {
        let dims = Dims::new(2, 3, 2);
        let mut a = MovementArray::zeros(dims);
        for ((i, j, c), _) in a.clone().iter_indexed() {
            a[(i, j, c)] = (100 * i + 10 * j + c) as f64;
        }
        for ((i, j, c), v) in a.iter_indexed() {
            assert_eq!(v, (100 * i + 10 * j + c) as f64);
        }
        assert_eq!(MovementArray::from_nested(dims, &a.to_nested()).unwrap(), a);
        assert_eq!(a.movement_total(1, 2), 120.0 + 121.0);
    }
}
