// SPDX-License-Identifier: Apache-2.0

//! Certification of flow matrices against the node-model constraints.
//!
//! Works on any [`FlowMatrix`], whether produced by [`crate::solve`] or
//! supplied from elsewhere. Each check reports its worst residual so failures
//! can be ranked.

use std::fmt;

use crate::error::NodeError;
use crate::model::{union_length, FlowMatrix, NodeSpec, OrientedDemand, EPS};

/// Relative tolerance for ratio comparisons.
pub const RATIO_TOL: f64 = 1e-6;

/// Axis-aligned rectangle `[xlo, xhi] × [ylo, yhi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub xlo: f64,
    pub xhi: f64,
    pub ylo: f64,
    pub yhi: f64,
}

impl Rect {
    pub fn new(xlo: f64, xhi: f64, ylo: f64, yhi: f64) -> Self {
        Rect { xlo, xhi, ylo, yhi }
    }

    pub fn area(&self) -> f64 {
        (self.xhi - self.xlo).max(0.0) * (self.yhi - self.ylo).max(0.0)
    }
}

/// Exact area of a union of rectangles.
///
/// Sweeps the distinct x coordinates; within each slab the covered height is
/// the union length of the y-spans of the rectangles spanning the slab.
pub fn rect_union_area(rects: &[Rect]) -> f64 {
    let mut xs: Vec<f64> = rects
        .iter()
        .filter(|r| r.area() > 0.0)
        .flat_map(|r| [r.xlo, r.xhi])
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut spans = Vec::with_capacity(rects.len());
    let mut area = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        spans.clear();
        spans.extend(
            rects
                .iter()
                .filter(|r| r.xlo <= x0 && r.xhi >= x1)
                .map(|r| (r.ylo, r.yhi)),
        );
        area += (x1 - x0) * union_length(&mut spans);
    }
    area
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst violation amount (0 when satisfied).
    pub residual: f64,
    /// Where the worst residual occurs, if anywhere.
    pub detail: String,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            passed: true,
            residual: 0.0,
            detail: String::new(),
        }
    }

    /// Records a residual against `tol`; keeps the largest.
    fn record(&mut self, residual: f64, tol: f64, detail: impl FnOnce() -> String) {
        let bad = residual > tol || residual.is_nan();
        if bad {
            self.passed = false;
        }
        if residual > self.residual || residual.is_nan() || (bad && self.detail.is_empty()) {
            self.residual = residual;
            self.detail = detail();
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        VerificationReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    fn merge(mut self, other: VerificationReport) -> Self {
        self.checks.extend(other.checks);
        self.passed = self.checks.iter().all(|c| c.passed);
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(
                f,
                "{:<5} {:<20} residual={:.3e}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.residual
            )?;
            if !c.detail.is_empty() {
                write!(f, "  {}", c.detail)?;
            }
            writeln!(f)?;
        }
        write!(f, "{}", if self.passed { "PASS" } else { "FAIL" })
    }
}

fn check_dims(spec: &NodeSpec, f: &FlowMatrix) -> Result<(), NodeError> {
    if spec.dims() != f.dims() {
        return Err(NodeError::Shape(format!(
            "flows are {} but the junction is {}",
            f.dims(),
            spec.dims()
        )));
    }
    Ok(())
}

/// Non-negativity, demand and supply feasibility, and equal impediment of
/// vehicle classes within each movement.
pub fn check_feasibility(spec: &NodeSpec, f: &FlowMatrix) -> Result<VerificationReport, NodeError> {
    check_dims(spec, f)?;
    let dims = spec.dims();
    let od = OrientedDemand::new(spec);

    let mut nonneg = Check::new("nonnegative");
    for ((i, j, c), v) in f.iter_indexed() {
        let residual = if v.is_finite() { (-v).max(0.0) } else { f64::NAN };
        nonneg.record(residual, 0.0, || format!("f({i},{j},{c}) = {v}"));
    }

    let mut demand = Check::new("demand");
    for i in 0..dims.inputs {
        for c in 0..dims.classes {
            let sent = f.input_class_total(i, c);
            let s = spec.demand(i, c);
            demand.record(sent - s, EPS, || format!("input {i} class {c}: {sent} > {s}"));
        }
    }

    let mut supply = Check::new("supply");
    for j in 0..dims.outputs {
        let got = f.output_total(j);
        let r = spec.supply(j);
        supply.record(got - r, EPS, || format!("output {j}: {got} > {r}"));
    }

    let mut classes = Check::new("class-proportion");
    for i in 0..dims.inputs {
        for j in 0..dims.outputs {
            let s_tot = od.total(i, j);
            let f_tot = f.movement(i, j);
            let scale = s_tot.max(1.0) * f_tot.max(1.0);
            for c in 0..dims.classes {
                let lhs = f[(i, j, c)] * s_tot;
                let rhs = od.value(i, j, c) * f_tot;
                let residual = (lhs - rhs).abs() / scale;
                classes.record(residual, EPS, || format!("movement ({i},{j}) class {c}"));
            }
        }
    }

    Ok(VerificationReport::from_checks(vec![nonneg, demand, supply, classes]))
}

/// Single-output supply portioning: inputs left with demand share the supply
/// in proportion to their priorities and get at least their initial portion.
pub fn check_merge_priority(spec: &NodeSpec, f: &FlowMatrix) -> Result<VerificationReport, NodeError> {
    check_dims(spec, f)?;
    let dims = spec.dims();
    if dims.outputs != 1 {
        return Err(NodeError::Topology {
            field: "merge priority check",
            expected: "exactly one output",
            found: dims.outputs,
        });
    }
    let od = OrientedDemand::new(spec);
    let total_priority: f64 = spec.priorities().iter().sum();
    let congested: Vec<usize> = (0..dims.inputs)
        .filter(|&i| f.movement(i, 0) < od.input_total(i) - EPS)
        .collect();

    let mut ratio = Check::new("merge-ratio");
    let per_priority: Vec<(usize, f64)> = congested
        .iter()
        .map(|&i| (i, f.movement(i, 0) / spec.priority(i)))
        .collect();
    for (k, &(a, ra)) in per_priority.iter().enumerate() {
        for &(b, rb) in &per_priority[k + 1..] {
            let scale = ra.abs().max(rb.abs());
            let residual = if scale > 0.0 { (ra - rb).abs() / scale } else { 0.0 };
            ratio.record(residual, RATIO_TOL, || {
                format!("inputs {a},{b}: f/p = {ra} vs {rb}")
            });
        }
    }

    let mut lower = Check::new("merge-lower-bound");
    for &i in &congested {
        let share = spec.priority(i) / total_priority * spec.supply(0);
        let got = f.movement(i, 0);
        lower.record(share - got, EPS, || format!("input {i}: {got} < {share}"));
    }

    Ok(VerificationReport::from_checks(vec![ratio, lower]))
}

/// Relaxed-FIFO bound for a single-input junction.
///
/// For each output `j`, every other filled output `j'` contributes the
/// rectangle `η_{j'j} × [φ_{j'} S_j, S_j]`, where `φ_{j'}` is the served share
/// of the demand toward `j'`. The flow toward `j` may not exceed `S_j` minus
/// the area of the union. With full-FIFO restrictions the served shares of all
/// demanded movements must also agree.
pub fn check_relaxed_fifo(spec: &NodeSpec, f: &FlowMatrix) -> Result<VerificationReport, NodeError> {
    check_single_input(spec, f)?;
    let od = OrientedDemand::new(spec);
    let n = spec.dims().outputs;
    let served: Vec<Option<f64>> = (0..n)
        .map(|j| {
            let s = od.total(0, j);
            (s > 0.0).then(|| f.movement(0, j) / s)
        })
        .collect();
    let onset: Vec<Option<f64>> = (0..n)
        .map(|j| served[j].filter(|_| f.output_total(j) >= spec.supply(j) - EPS))
        .collect();
    let bound = area_bound("relaxed-fifo", spec, &od, f, &onset);
    let mut checks = vec![bound];

    if spec.is_full_fifo(0) {
        let mut fifo = Check::new("fifo-fractions");
        let shares: Vec<(usize, f64)> = served
            .iter()
            .enumerate()
            .filter_map(|(j, s)| s.map(|s| (j, s)))
            .collect();
        for (k, &(a, fa)) in shares.iter().enumerate() {
            for &(b, fb) in &shares[k + 1..] {
                fifo.record((fa - fb).abs(), RATIO_TOL, || {
                    format!("outputs {a},{b}: served {fa} vs {fb}")
                });
            }
        }
        checks.push(fifo);
    }
    Ok(VerificationReport::from_checks(checks))
}

/// The same area bound with caller-supplied onsets: `onset[j']` is the
/// fraction of the demand horizon after which a congested `j'` starts to
/// block, or `None` if it never does. Passing `t_{j'} / T` from an execution
/// gives the bound in queue-position coordinates.
pub fn check_area_bound(
    spec: &NodeSpec,
    f: &FlowMatrix,
    onset: &[Option<f64>],
) -> Result<VerificationReport, NodeError> {
    check_single_input(spec, f)?;
    if onset.len() != spec.dims().outputs {
        return Err(NodeError::Shape(format!(
            "{} onsets for {} outputs",
            onset.len(),
            spec.dims().outputs
        )));
    }
    let od = OrientedDemand::new(spec);
    Ok(VerificationReport::from_checks(vec![area_bound(
        "area-bound",
        spec,
        &od,
        f,
        onset,
    )]))
}

fn check_single_input(spec: &NodeSpec, f: &FlowMatrix) -> Result<(), NodeError> {
    check_dims(spec, f)?;
    if spec.dims().inputs != 1 {
        return Err(NodeError::Topology {
            field: "relaxed FIFO check",
            expected: "exactly one input",
            found: spec.dims().inputs,
        });
    }
    Ok(())
}

fn area_bound(
    name: &'static str,
    spec: &NodeSpec,
    od: &OrientedDemand,
    f: &FlowMatrix,
    onset: &[Option<f64>],
) -> Check {
    let n = spec.dims().outputs;
    let mut bound = Check::new(name);
    for j in 0..n {
        let s_j = od.total(0, j);
        let rects: Vec<Rect> = (0..n)
            .filter(|&jp| jp != j && od.total(0, jp) > 0.0)
            .filter_map(|jp| onset[jp].map(|phi| (jp, phi.clamp(0.0, 1.0))))
            .map(|(jp, phi)| {
                let iv = spec.restriction(0, jp, j);
                Rect::new(phi * s_j, s_j, iv.lo, iv.hi)
            })
            .collect();
        let blocked = rect_union_area(&rects);
        let got = f.movement(0, j);
        let limit = s_j - blocked;
        bound.record(got - limit, EPS, || {
            format!("output {j}: {got} > {s_j} - {blocked} = {limit}")
        });
    }
    bound
}

/// Feasibility always; merge priority for single-output junctions; relaxed
/// FIFO for single-input junctions.
pub fn certify(spec: &NodeSpec, f: &FlowMatrix) -> Result<VerificationReport, NodeError> {
    let mut report = check_feasibility(spec, f)?;
    let dims = spec.dims();
    if dims.outputs == 1 {
        report = report.merge(check_merge_priority(spec, f)?);
    }
    if dims.inputs == 1 {
        report = report.merge(check_relaxed_fifo(spec, f)?);
    }
    Ok(report)
}
