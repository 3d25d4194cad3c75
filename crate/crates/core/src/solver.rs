// SPDX-License-Identifier: Apache-2.0

//! Closed-form, event-triggered execution of the junction automata.
//!
//! Between mode switches every rate is constant, so the state moves along a
//! straight line. Each step computes when the next output fills or the next
//! input reaches its time limit, jumps there, applies the reset and repeats
//! until every rate is zero.

use std::fmt;

use crate::automaton::{active_restriction_measure, FieldKind, HybridState, ModeSet, RateMatrix};
use crate::error::NodeError;
use crate::model::{FlowMatrix, MovementArray, NodeSpec, OrientedDemand, EPS};

/// Largest accumulated floating-point error that clamping may absorb.
pub const MAX_DRIFT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    OutputFill(usize),
    InputTimeLimit(usize),
    Terminate,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::OutputFill(j) => write!(f, "fill({j})"),
            EventKind::InputTimeLimit(i) => write!(f, "limit({i})"),
            EventKind::Terminate => write!(f, "terminate"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
}

/// State right after a batch of simultaneous events was applied.
#[derive(Clone, Debug, PartialEq)]
pub struct Breakpoint {
    pub t: f64,
    pub mode: ModeSet,
    pub x: MovementArray,
    /// Events applied at this breakpoint. Empty for the initial state unless
    /// the execution terminates immediately.
    pub events: Vec<Event>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub breakpoints: Vec<Breakpoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// `(output, time)` for every fill event, in execution order.
    pub fn fill_times(&self) -> Vec<(usize, f64)> {
        self.breakpoints
            .iter()
            .flat_map(|bp| bp.events.iter())
            .filter_map(|e| match e.kind {
                EventKind::OutputFill(j) => Some((j, e.time)),
                _ => None,
            })
            .collect()
    }

    /// Breakpoint in effect at time `t` (the last one at or before it).
    pub fn at(&self, t: f64) -> Option<&Breakpoint> {
        self.breakpoints.iter().take_while(|bp| bp.t <= t).last()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub flows: FlowMatrix,
    pub trajectory: Trajectory,
}

/// Time at which output `j` fills if the current mode persists, or `None` when
/// nothing flows into it.
///
/// The inflow is the sum over running inputs that still have vehicles for `j`
/// of their oriented priority times the unrestricted lane share.
pub fn fill_time(spec: &NodeSpec, od: &OrientedDemand, state: &HybridState, j: usize) -> Option<f64> {
    let inflow: f64 = (0..spec.dims().inputs)
        .filter(|&i| state.input_running(spec, od, i) && state.has_residual(od, i, j))
        .map(|i| od.priority(spec, i, j) * (1.0 - active_restriction_measure(spec, od, state, i, j)))
        .sum();
    if inflow <= EPS {
        return None;
    }
    let gap = (spec.supply(j) - state.x.output_total(j)).max(0.0);
    Some(state.t + gap / inflow)
}

/// Every pending event under `field`, earliest first; outputs before inputs at
/// equal times. Empty when all rates are zero.
pub fn pending_events(
    spec: &NodeSpec,
    od: &OrientedDemand,
    state: &HybridState,
    field: FieldKind,
) -> Result<Vec<Event>, NodeError> {
    let rates = field.rates(spec, od, state)?;
    Ok(pending_from_rates(spec, od, state, field, &rates))
}

fn pending_from_rates(
    spec: &NodeSpec,
    od: &OrientedDemand,
    state: &HybridState,
    field: FieldKind,
    rates: &RateMatrix,
) -> Vec<Event> {
    if rates.is_zero() {
        return Vec::new();
    }
    let dims = spec.dims();
    let mut events = Vec::new();
    for j in (0..dims.outputs).filter(|&j| !state.mode.contains(j)) {
        let time = match field {
            FieldKind::General => fill_time(spec, od, state, j),
            // The specialised fields are checked against the general one, so
            // they take the fill time from their own rates.
            FieldKind::Merge | FieldKind::Diverge => {
                let inflow = rates.inflow(j);
                (inflow > EPS).then(|| {
                    state.t + (spec.supply(j) - state.x.output_total(j)).max(0.0) / inflow
                })
            }
        };
        if let Some(time) = time {
            events.push(Event {
                time,
                kind: EventKind::OutputFill(j),
            });
        }
    }
    for i in 0..dims.inputs {
        // An input's rates change at its time limit or when one of its
        // components runs out of demand, whichever comes first.
        let mut stop: Option<f64> = None;
        for j in 0..dims.outputs {
            for c in 0..dims.classes {
                let r = rates[(i, j, c)];
                if r > 0.0 {
                    let exhaust = state.t + (od.value(i, j, c) - state.x[(i, j, c)]).max(0.0) / r;
                    stop = Some(stop.map_or(exhaust, |s: f64| s.min(exhaust)));
                }
            }
        }
        if let Some(exhaust) = stop {
            let limit = spec.time_limit(i).max(state.t);
            events.push(Event {
                time: limit.min(exhaust),
                kind: EventKind::InputTimeLimit(i),
            });
        }
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.kind.cmp(&b.kind)));
    events
}

/// Earliest pending event of the general automaton, or `Terminate` at the
/// current time when nothing moves.
pub fn next_event(spec: &NodeSpec, od: &OrientedDemand, state: &HybridState) -> Event {
    let rates = crate::automaton::general_field(spec, od, state);
    pending_from_rates(spec, od, state, FieldKind::General, &rates)
        .into_iter()
        .next()
        .unwrap_or(Event {
            time: state.t,
            kind: EventKind::Terminate,
        })
}

/// Moves the state along constant `rates` for `dt`, absorbing rounding drift
/// against demand and supply caps.
pub fn advance(
    spec: &NodeSpec,
    od: &OrientedDemand,
    state: &HybridState,
    rates: &RateMatrix,
    dt: f64,
) -> Result<HybridState, NodeError> {
    if dt < 0.0 || dt.is_nan() {
        return Err(NodeError::NegativeStep(dt));
    }
    let dims = spec.dims();
    let mut next = state.clone();
    next.t = state.t + dt;
    if dt == 0.0 {
        return Ok(next);
    }
    for ((i, j, c), r) in rates.iter_indexed() {
        if r == 0.0 {
            continue;
        }
        let cap = od.value(i, j, c);
        let x = &mut next.x[(i, j, c)];
        *x += r * dt;
        if *x > cap {
            let excess = *x - cap;
            if excess > MAX_DRIFT {
                return Err(NodeError::Drift {
                    what: format!("demand of ({i}, {j}, {c})"),
                    amount: excess,
                });
            }
            *x = cap;
        }
    }
    for j in 0..dims.outputs {
        let sum = next.x.output_total(j);
        let supply = spec.supply(j);
        if sum > supply {
            let excess = sum - supply;
            if excess > MAX_DRIFT {
                return Err(NodeError::Drift {
                    what: format!("supply of output {j}"),
                    amount: excess,
                });
            }
            let scale = supply / sum;
            for i in 0..dims.inputs {
                for c in 0..dims.classes {
                    next.x[(i, j, c)] *= scale;
                }
            }
        }
    }
    Ok(next)
}

/// Applies one discrete transition. Continuous state is left untouched.
pub fn apply_reset(state: &HybridState, event: &Event) -> Result<HybridState, NodeError> {
    let mut next = state.clone();
    match event.kind {
        EventKind::OutputFill(j) => {
            if !next.mode.insert(j) {
                return Err(NodeError::AlreadyFilled(j));
            }
        }
        EventKind::InputTimeLimit(i) => next.expired[i] = true,
        EventKind::Terminate => {}
    }
    Ok(next)
}

/// Runs the general automaton from its initial state to termination.
pub fn solve(spec: &NodeSpec) -> Result<Solution, NodeError> {
    solve_with(spec, FieldKind::General)
}

/// Runs the automaton driven by `field` from its initial state to termination.
///
/// Events within [`EPS`] of the earliest one are applied together at a single
/// breakpoint.
pub fn solve_with(spec: &NodeSpec, field: FieldKind) -> Result<Solution, NodeError> {
    let report = spec.validate();
    if !report.is_ok() {
        return Err(NodeError::Invalid(report));
    }
    let od = OrientedDemand::new(spec);
    let dims = spec.dims();
    let max_breakpoints = dims.inputs + dims.outputs + 1;

    let mut state = HybridState::initial(spec);
    let mut trajectory = Trajectory {
        breakpoints: vec![Breakpoint {
            t: 0.0,
            mode: state.mode,
            x: state.x.clone(),
            events: Vec::new(),
        }],
    };

    loop {
        let rates = field.rates(spec, &od, &state)?;
        let pending = pending_from_rates(spec, &od, &state, field, &rates);
        let Some(first) = pending.first().copied() else {
            let last = trajectory.breakpoints.last_mut().expect("initial breakpoint");
            last.events.push(Event {
                time: state.t,
                kind: EventKind::Terminate,
            });
            break;
        };
        if trajectory.len() >= max_breakpoints {
            return Err(NodeError::EventBudget(max_breakpoints - 1));
        }
        let batch: Vec<Event> = pending
            .into_iter()
            .take_while(|e| e.time <= first.time + EPS)
            .collect();

        state = advance(spec, &od, &state, &rates, (first.time - state.t).max(0.0))?;
        for event in &batch {
            state = apply_reset(&state, event)?;
        }
        trajectory.breakpoints.push(Breakpoint {
            t: state.t,
            mode: state.mode,
            x: state.x.clone(),
            events: batch,
        });
    }

    Ok(Solution {
        flows: FlowMatrix(state.x),
        trajectory,
    })
}
