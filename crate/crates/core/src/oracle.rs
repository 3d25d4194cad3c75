// SPDX-License-Identifier: Apache-2.0

//! Fixed-step forward integration of the general junction automaton.
//!
//! This is a brute-force reference for the event-triggered solver. It keeps
//! its own copy of the vector field (unless the `shared-field` feature is on)
//! and never computes event times globally: it steps `x += F(q, x) dt`, and
//! only when a step would carry an output past its supply or an input past its
//! time limit does it split that step at the crossing before carrying on.

use crate::error::NodeError;
use crate::model::{Dims, FlowMatrix, NodeSpec, EPS};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub dt: f64,
    /// Integration horizon; `None` means twice the largest input time limit.
    pub max_time: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            dt: 1e-4,
            max_time: None,
        }
    }
}

impl OracleConfig {
    pub fn with_dt(dt: f64) -> Self {
        OracleConfig { dt, max_time: None }
    }
}

/// Result of a dense run, with the per-output cumulative inflow sampled at
/// every step boundary.
#[derive(Clone, Debug)]
pub struct DenseRun {
    pub flows: FlowMatrix,
    pub steps: usize,
    pub times: Vec<f64>,
    /// `output_sums[j][k]` is `Σ_i Σ_c x_ij^c` at `times[k]`.
    pub output_sums: Vec<Vec<f64>>,
}

impl DenseRun {
    /// First time the inflow into output `j` reaches `level`, located by
    /// bisection over the sampled series and interpolated within the bracketing
    /// sample pair.
    pub fn crossing_time(&self, j: usize, level: f64) -> Option<f64> {
        let series = &self.output_sums[j];
        let k = series.partition_point(|&v| v < level);
        if k == series.len() {
            return None;
        }
        if k == 0 {
            return Some(self.times[0]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (v0, v1) = (series[k - 1], series[k]);
        if v1 <= v0 {
            return Some(t1);
        }
        Some(t0 + (t1 - t0) * (level - v0) / (v1 - v0))
    }
}

/// Integrates the junction until every rate vanishes and returns the flows.
pub fn integrate(spec: &NodeSpec, config: &OracleConfig) -> Result<FlowMatrix, NodeError> {
    Integrator::new(spec, config)?.run(false).map(|run| run.flows)
}

/// Like [`integrate`], also recording the per-output inflow series.
pub fn integrate_dense(spec: &NodeSpec, config: &OracleConfig) -> Result<DenseRun, NodeError> {
    Integrator::new(spec, config)?.run(true)
}

/// Largest absolute entry-wise difference between two flow matrices.
pub fn flow_distance(a: &FlowMatrix, b: &FlowMatrix) -> Result<f64, NodeError> {
    if a.dims() != b.dims() {
        return Err(NodeError::Shape(format!(
            "cannot compare {} flows with {} flows",
            a.dims(),
            b.dims()
        )));
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[cfg_attr(feature = "shared-field", allow(dead_code))]
struct Integrator<'a> {
    spec: &'a NodeSpec,
    dims: Dims,
    dt: f64,
    horizon: f64,
    /// Oriented demand per (i, j, c), flat.
    cap: Vec<f64>,
    /// Oriented demand per (i, j).
    cap_total: Vec<f64>,
    /// Oriented priority per (i, j).
    oriented_priority: Vec<f64>,
    limit: Vec<f64>,
    has_demand: Vec<bool>,
}

impl<'a> Integrator<'a> {
    fn new(spec: &'a NodeSpec, config: &OracleConfig) -> Result<Self, NodeError> {
        let report = spec.validate();
        if !report.is_ok() {
            return Err(NodeError::Invalid(report));
        }
        if !(config.dt > 0.0 && config.dt.is_finite()) {
            return Err(NodeError::OracleConfig(format!("dt must be positive, got {}", config.dt)));
        }
        let dims = spec.dims();
        let (m, n, cc) = (dims.inputs, dims.outputs, dims.classes);

        let mut cap = vec![0.0; m * n * cc];
        let mut cap_total = vec![0.0; m * n];
        let mut oriented_priority = vec![0.0; m * n];
        let mut limit = vec![0.0; m];
        let mut has_demand = vec![false; m];
        for i in 0..m {
            let sent: f64 = (0..cc).map(|c| spec.demand(i, c)).sum();
            has_demand[i] = sent > 0.0;
            limit[i] = if sent > 0.0 { sent / spec.priority(i) } else { 0.0 };
            for j in 0..n {
                let mut tot = 0.0;
                for c in 0..cc {
                    let s = spec.demand(i, c) * spec.split(i, j, c);
                    cap[(i * n + j) * cc + c] = s;
                    tot += s;
                }
                cap_total[i * n + j] = tot;
                if sent > 0.0 {
                    oriented_priority[i * n + j] = spec.priority(i) * tot / sent;
                }
            }
        }
        let longest = limit.iter().copied().fold(0.0, f64::max);
        let horizon = config.max_time.unwrap_or(2.0 * longest);
        if horizon < longest {
            return Err(NodeError::OracleConfig(format!(
                "horizon {horizon} is shorter than the longest time limit {longest}"
            )));
        }
        Ok(Integrator {
            spec,
            dims,
            dt: config.dt,
            horizon,
            cap,
            cap_total,
            oriented_priority,
            limit,
            has_demand,
        })
    }

    fn run(&self, record: bool) -> Result<DenseRun, NodeError> {
        let (m, n, cc) = (self.dims.inputs, self.dims.outputs, self.dims.classes);
        let mut x = vec![0.0; m * n * cc];
        let mut filled: Vec<bool> = (0..n).map(|j| self.spec.supply(j) <= EPS).collect();
        let mut rates = vec![0.0; m * n * cc];
        let mut spans = Vec::with_capacity(n);
        let mut t = 0.0;
        let mut steps = 0usize;

        let mut times = Vec::new();
        let mut output_sums = vec![Vec::new(); n];
        let sample = |t: f64, x: &[f64], times: &mut Vec<f64>, sums: &mut Vec<Vec<f64>>| {
            if record {
                times.push(t);
                for (j, series) in sums.iter_mut().enumerate() {
                    series.push(self.output_sum(x, j));
                }
            }
        };
        sample(t, &x, &mut times, &mut output_sums);

        'outer: loop {
            self.field(t, &x, &filled, &mut rates, &mut spans);
            if rates.iter().all(|&r| r == 0.0) {
                break;
            }
            if t > self.horizon {
                return Err(NodeError::Horizon(t));
            }
            steps += 1;
            let mut left = self.dt;
            while left > 0.0 {
                let mut h = left;
                for i in 0..m {
                    let moving = (0..n * cc).any(|k| rates[i * n * cc + k] > 0.0);
                    if moving && self.limit[i] - t < h {
                        h = (self.limit[i] - t).max(0.0);
                    }
                }
                for j in (0..n).filter(|&j| !filled[j]) {
                    let inflow: f64 = (0..m)
                        .flat_map(|i| (0..cc).map(move |c| (i * n + j) * cc + c))
                        .map(|k| rates[k])
                        .sum();
                    let gap = self.spec.supply(j) - self.output_sum(&x, j);
                    if inflow > 0.0 && gap < inflow * h {
                        h = (gap / inflow).max(0.0);
                    }
                }

                for (k, xk) in x.iter_mut().enumerate() {
                    if rates[k] > 0.0 {
                        *xk = (*xk + rates[k] * h).min(self.cap[k]);
                    }
                }
                t += h;
                left -= h;
                for j in 0..n {
                    let supply = self.spec.supply(j);
                    let sum = self.output_sum(&x, j);
                    if sum > supply {
                        let scale = supply / sum;
                        for i in 0..m {
                            for c in 0..cc {
                                x[(i * n + j) * cc + c] *= scale;
                            }
                        }
                    }
                    if !filled[j] && sum >= supply - EPS {
                        filled[j] = true;
                    }
                }
                sample(t, &x, &mut times, &mut output_sums);

                if left > 0.0 {
                    self.field(t, &x, &filled, &mut rates, &mut spans);
                    if rates.iter().all(|&r| r == 0.0) {
                        break 'outer;
                    }
                }
            }
        }

        let mut flows = FlowMatrix::zeros(self.dims);
        flows.as_mut_slice().copy_from_slice(&x);
        Ok(DenseRun {
            flows,
            steps,
            times,
            output_sums,
        })
    }

    fn output_sum(&self, x: &[f64], j: usize) -> f64 {
        let (m, n, cc) = (self.dims.inputs, self.dims.outputs, self.dims.classes);
        (0..m)
            .map(|i| x[(i * n + j) * cc..(i * n + j) * cc + cc].iter().sum::<f64>())
            .sum()
    }

    #[cfg(not(feature = "shared-field"))]
    fn field(&self, t: f64, x: &[f64], filled: &[bool], rates: &mut [f64], spans: &mut Vec<(f64, f64)>) {
        let (m, n, cc) = (self.dims.inputs, self.dims.outputs, self.dims.classes);
        rates.fill(0.0);
        for i in 0..m {
            if !self.has_demand[i] || t >= self.limit[i] - EPS {
                continue;
            }
            for j in 0..n {
                let total = self.cap_total[i * n + j];
                if total <= 0.0 {
                    continue;
                }
                spans.clear();
                for jp in (0..n).filter(|&jp| filled[jp]) {
                    let taken: f64 = x[(i * n + jp) * cc..(i * n + jp) * cc + cc].iter().sum();
                    if taken < self.cap_total[i * n + jp] - EPS {
                        let iv = self.spec.restriction(i, jp, j);
                        spans.push((iv.lo, iv.hi));
                    }
                }
                let open = 1.0 - covered_length(spans);
                if open <= 0.0 {
                    continue;
                }
                for c in 0..cc {
                    let k = (i * n + j) * cc + c;
                    if x[k] < self.cap[k] - EPS {
                        rates[k] = self.oriented_priority[i * n + j] * self.cap[k] / total * open;
                    }
                }
            }
        }
    }

    #[cfg(feature = "shared-field")]
    fn field(&self, t: f64, x: &[f64], filled: &[bool], rates: &mut [f64], _spans: &mut Vec<(f64, f64)>) {
        use crate::automaton::{general_field, HybridState, ModeSet};
        use crate::model::{MovementArray, OrientedDemand};

        let mut state = HybridState {
            t,
            mode: ModeSet::empty(),
            x: MovementArray::zeros(self.dims),
            expired: vec![false; self.dims.inputs],
        };
        state.x.as_mut_slice().copy_from_slice(x);
        for (j, _) in filled.iter().enumerate().filter(|(_, &f)| f) {
            state.mode.insert(j);
        }
        let od = OrientedDemand::new(self.spec);
        rates.copy_from_slice(general_field(self.spec, &od, &state).as_slice());
    }
}

/// Length of the union of `[lo, hi]` spans, clipped to 1.
#[cfg_attr(feature = "shared-field", allow(dead_code))]
fn covered_length(spans: &mut [(f64, f64)]) -> f64 {
    if spans.is_empty() {
        return 0.0;
    }
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut covered = 0.0;
    let mut reach = f64::NEG_INFINITY;
    for &(lo, hi) in spans.iter() {
        let start = lo.max(reach);
        if hi > start {
            covered += hi - start;
            reach = hi;
        }
    }
    covered.min(1.0)
}
