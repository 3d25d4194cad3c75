// SPDX-License-Identifier: Apache-2.0

//! Mode structure and vector fields of the junction automata.
//!
//! The continuous state `x[i][j][c]` counts vehicles of class `c` that have
//! taken movement `(i, j)`. The discrete mode is the set of filled outputs.
//! Three fields are provided: the general M-to-N field and its merge (N = 1)
//! and diverge (M = 1) specialisations.

use std::fmt;

use crate::error::NodeError;
use crate::model::{interval_union_measure, Dims, MovementArray, NodeSpec, OrientedDemand, EPS};

/// Largest output count a [`ModeSet`] can hold.
pub const MAX_OUTPUTS: usize = 64;

/// Set of filled outputs, stored as a bitmask (bit `j` set iff output `j` is filled).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModeSet(u64);

impl ModeSet {
    pub fn empty() -> Self {
        ModeSet(0)
    }

    pub fn from_bits(bits: u64) -> Self {
        ModeSet(bits)
    }

    pub fn bits(&self) -> u64 {
        self.0
    }

    pub fn contains(&self, j: usize) -> bool {
        j < MAX_OUTPUTS && self.0 & (1 << j) != 0
    }

    pub fn insert(&mut self, j: usize) -> bool {
        assert!(j < MAX_OUTPUTS, "output index {j} out of range");
        let fresh = !self.contains(j);
        self.0 |= 1 << j;
        fresh
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(&self, other: &ModeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_OUTPUTS).filter(move |&j| bits & (1 << j) != 0)
    }
}

impl fmt::Display for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, j) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

/// Continuous flows, filled outputs and clock of one execution.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    pub t: f64,
    pub mode: ModeSet,
    pub x: MovementArray,
    /// Inputs whose time limit has been processed.
    pub expired: Vec<bool>,
}

impl HybridState {
    /// `x = 0` at `t = 0`; outputs without supply start filled.
    pub fn initial(spec: &NodeSpec) -> Self {
        let dims = spec.dims();
        let mut mode = ModeSet::empty();
        for j in 0..dims.outputs {
            if spec.supply(j) <= EPS {
                mode.insert(j);
            }
        }
        HybridState {
            t: 0.0,
            mode,
            x: MovementArray::zeros(dims),
            expired: vec![false; dims.inputs],
        }
    }

    /// True when input `i` may still discharge: it has demand, its time limit
    /// has not been reached and has not been processed.
    pub fn input_running(&self, spec: &NodeSpec, od: &OrientedDemand, i: usize) -> bool {
        od.input_total(i) > 0.0 && !self.expired[i] && self.t < spec.time_limit(i) - EPS
    }

    /// Movement `(i, j)` still has vehicles waiting, at aggregate level.
    pub fn has_residual(&self, od: &OrientedDemand, i: usize, j: usize) -> bool {
        self.x.movement_total(i, j) < od.total(i, j) - EPS
    }
}

/// Rates `dx/dt` for every `(i, j, c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateMatrix(pub MovementArray);

impl RateMatrix {
    pub fn zeros(dims: Dims) -> Self {
        RateMatrix(MovementArray::zeros(dims))
    }

    pub fn is_zero(&self) -> bool {
        self.0.as_slice().iter().all(|&r| r == 0.0)
    }

    /// Total inflow rate into output `j`.
    pub fn inflow(&self, j: usize) -> f64 {
        self.0.output_total(j)
    }
}

impl std::ops::Deref for RateMatrix {
    type Target = MovementArray;

    fn deref(&self) -> &MovementArray {
        &self.0
    }
}

/// Which vector field drives an execution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    General,
    /// Requires a single output.
    Merge,
    /// Requires a single input.
    Diverge,
}

impl FieldKind {
    pub fn rates(
        self,
        spec: &NodeSpec,
        od: &OrientedDemand,
        state: &HybridState,
    ) -> Result<RateMatrix, NodeError> {
        match self {
            FieldKind::General => Ok(general_field(spec, od, state)),
            FieldKind::Merge => merge_field(spec, od, state),
            FieldKind::Diverge => diverge_field(spec, od, state),
        }
    }
}

/// Measure of the union of `η^i_{j'j}` over filled outputs `j'` that input `i`
/// still has vehicles waiting for. A filled `j` with residual demand blocks
/// its own movement completely.
pub fn active_restriction_measure(
    spec: &NodeSpec,
    od: &OrientedDemand,
    state: &HybridState,
    i: usize,
    j: usize,
) -> f64 {
    if state.mode.is_empty() {
        return 0.0;
    }
    let active: Vec<_> = state
        .mode
        .iter()
        .filter(|&jp| state.has_residual(od, i, jp))
        .map(|jp| spec.restriction(i, jp, j))
        .collect();
    interval_union_measure(&active)
}

/// M-to-N field: each running movement with demand left advances at its
/// oriented priority, split across classes by demand share and scaled by the
/// share of its lanes not blocked by queues for filled outputs.
pub fn general_field(spec: &NodeSpec, od: &OrientedDemand, state: &HybridState) -> RateMatrix {
    let dims = spec.dims();
    let mut rates = RateMatrix::zeros(dims);
    for i in 0..dims.inputs {
        if !state.input_running(spec, od, i) {
            continue;
        }
        for j in 0..dims.outputs {
            let total = od.total(i, j);
            if total <= 0.0 {
                continue;
            }
            let open = 1.0 - active_restriction_measure(spec, od, state, i, j);
            if open <= 0.0 {
                continue;
            }
            let p_ij = od.priority(spec, i, j);
            for c in 0..dims.classes {
                let s = od.value(i, j, c);
                if state.x[(i, j, c)] < s - EPS {
                    rates.0[(i, j, c)] = p_ij * (s / total) * open;
                }
            }
        }
    }
    rates
}

/// Merge field: every input sends at its priority until its own demand is
/// exhausted or the output fills.
pub fn merge_field(
    spec: &NodeSpec,
    od: &OrientedDemand,
    state: &HybridState,
) -> Result<RateMatrix, NodeError> {
    let dims = spec.dims();
    if dims.outputs != 1 {
        return Err(NodeError::Topology {
            field: "merge field",
            expected: "exactly one output",
            found: dims.outputs,
        });
    }
    let mut rates = RateMatrix::zeros(dims);
    if state.mode.contains(0) {
        return Ok(rates);
    }
    for i in 0..dims.inputs {
        let total = od.total(i, 0);
        if total <= 0.0 {
            continue;
        }
        for c in 0..dims.classes {
            let s = od.value(i, 0, c);
            if state.x[(i, 0, c)] < s - EPS {
                rates.0[(i, 0, c)] = spec.priority(i) * s / total;
            }
        }
    }
    Ok(rates)
}

/// Diverge field: the single input splits its priority across outputs and
/// loses the lanes covered by the restriction intervals of filled outputs.
///
/// Outputs the input sends nothing to never hold a queue, so they are left out
/// of the union even when filled.
pub fn diverge_field(
    spec: &NodeSpec,
    od: &OrientedDemand,
    state: &HybridState,
) -> Result<RateMatrix, NodeError> {
    let dims = spec.dims();
    if dims.inputs != 1 {
        return Err(NodeError::Topology {
            field: "diverge field",
            expected: "exactly one input",
            found: dims.inputs,
        });
    }
    let mut rates = RateMatrix::zeros(dims);
    if od.input_total(0) <= 0.0 || state.expired[0] || state.t >= spec.time_limit(0) - EPS {
        return Ok(rates);
    }
    for j in 0..dims.outputs {
        let total = od.total(0, j);
        if total <= 0.0 {
            continue;
        }
        let blocking: Vec<_> = state
            .mode
            .iter()
            .filter(|&jp| od.total(0, jp) > 0.0)
            .map(|jp| spec.restriction(0, jp, j))
            .collect();
        let open = 1.0 - interval_union_measure(&blocking);
        let p_j = od.priority(spec, 0, j);
        for c in 0..dims.classes {
            let s = od.value(0, j, c);
            if state.x[(0, j, c)] < s - EPS {
                rates.0[(0, j, c)] = p_j * (s / total) * open;
            }
        }
    }
    Ok(rates)
}
