// SPDX-License-Identifier: Apache-2.0

use nodeflow::automaton::{diverge_field, general_field};
use nodeflow::fuzz::{generate_random, FuzzConfig};
use nodeflow::verify::check_feasibility;
use nodeflow::{
    flow_distance, integrate, interval_union_measure, solve, EventKind, HybridState, Interval,
    NodeSpec, OracleConfig, OrientedDemand, EPS,
};
use proptest::prelude::*;

fn interval() -> impl Strategy<Value = Interval> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, b)| Interval {
        lo: a.min(b),
        hi: a.max(b),
    })
}

fn fuzzed() -> impl Strategy<Value = NodeSpec> {
    (any::<u64>(), 0usize..10_000).prop_map(|(seed, k)| generate_random(&FuzzConfig::with_seed(seed), k))
}

fn diverge_fuzzed() -> impl Strategy<Value = NodeSpec> {
    (any::<u64>(), 0usize..10_000).prop_map(|(seed, k)| {
        let cfg = FuzzConfig {
            max_inputs: 1,
            ..FuzzConfig::with_seed(seed)
        };
        generate_random(&cfg, k)
    })
}

fn max_supply(spec: &NodeSpec) -> f64 {
    spec.supplies().iter().copied().fold(1.0, f64::max)
}

/// Breakpoint states of the execution plus the midpoint of every segment.
fn reachable_states(spec: &NodeSpec) -> Vec<HybridState> {
    let sol = solve(spec).unwrap();
    let bps = &sol.trajectory.breakpoints;
    let mut expired = vec![false; spec.dims().inputs];
    let mut states = Vec::new();
    for (k, bp) in bps.iter().enumerate() {
        let before = HybridState {
            t: bp.t,
            mode: bp.mode,
            x: bp.x.clone(),
            expired: expired.clone(),
        };
        for e in &bp.events {
            if let EventKind::InputTimeLimit(i) = e.kind {
                expired[i] = true;
            }
        }
        let at = HybridState {
            expired: expired.clone(),
            ..before
        };
        if let Some(next) = bps.get(k + 1) {
            let mut mid = at.clone();
            mid.t = 0.5 * (bp.t + next.t);
            for (v, (a, b)) in mid
                .x
                .as_mut_slice()
                .iter_mut()
                .zip(bp.x.as_slice().iter().zip(next.x.as_slice()))
            {
                *v = 0.5 * (a + b);
            }
            states.push(mid);
        }
        states.push(at);
    }
    states
}

proptest! {
    #[test]
    fn union_measure_bounds(ivs in prop::collection::vec(interval(), 0..8), extra in interval()) {
        let m = interval_union_measure(&ivs);
        prop_assert!((0.0..=1.0).contains(&m));
        let sum: f64 = ivs.iter().map(Interval::length).sum();
        prop_assert!(m <= sum + 1e-12);
        for iv in &ivs {
            prop_assert!(m >= iv.length() - 1e-12);
        }
        let mut more = ivs.clone();
        more.push(extra);
        prop_assert!(interval_union_measure(&more) >= m - 1e-12);
    }

    #[test]
    fn union_measure_is_order_free(mut ivs in prop::collection::vec(interval(), 1..8)) {
        let m = interval_union_measure(&ivs);
        ivs.reverse();
        prop_assert!((interval_union_measure(&ivs) - m).abs() < 1e-12);
    }

    #[test]
    fn oriented_quantities_sum_back(spec in fuzzed()) {
        let od = OrientedDemand::new(&spec);
        let d = spec.dims();
        for i in 0..d.inputs {
            for c in 0..d.classes {
                let s: f64 = (0..d.outputs).map(|j| od.value(i, j, c)).sum();
                prop_assert!((s - spec.demand(i, c)).abs() <= 1e-12 * spec.demand(i, c).max(1.0));
            }
            let p: f64 = (0..d.outputs).map(|j| od.priority(&spec, i, j)).sum();
            if od.input_total(i) > 0.0 {
                prop_assert!((p - spec.priority(i)).abs() <= 1e-12 * spec.priority(i));
            } else {
                prop_assert_eq!(p, 0.0);
            }
        }
    }

    #[test]
    fn rates_respect_priority_and_class_mix(spec in fuzzed()) {
        let od = OrientedDemand::new(&spec);
        let d = spec.dims();
        for state in reachable_states(&spec) {
            let r = general_field(&spec, &od, &state);
            for i in 0..d.inputs {
                let out: f64 = (0..d.outputs).flat_map(|j| (0..d.classes).map(move |c| (j, c)))
                    .map(|(j, c)| r.0[(i, j, c)])
                    .sum();
                prop_assert!(out <= spec.priority(i) * (1.0 + 1e-12));
                for j in 0..d.outputs {
                    let total = od.total(i, j);
                    let sum = r.0.movement_total(i, j);
                    for c in 0..d.classes {
                        let s = od.value(i, j, c);
                        if s > 0.0 && state.x[(i, j, c)] < s - EPS {
                            let expect = sum * s / total;
                            prop_assert!((r.0[(i, j, c)] - expect).abs() <= 1e-9 * sum.max(1.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn general_field_matches_diverge_field(spec in diverge_fuzzed()) {
        let od = OrientedDemand::new(&spec);
        for state in reachable_states(&spec) {
            let g = general_field(&spec, &od, &state);
            let dv = diverge_field(&spec, &od, &state).unwrap();
            for (a, b) in g.0.as_slice().iter().zip(dv.0.as_slice()) {
                prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b} at t={}", state.t);
            }
        }
    }

    #[test]
    fn solutions_are_feasible(spec in fuzzed()) {
        let f = solve(&spec).unwrap().flows;
        let r = check_feasibility(&spec, &f).unwrap();
        prop_assert!(r.passed, "{}", r);
    }

    #[test]
    fn priority_scale_invariance(spec in fuzzed(), k in prop::sample::select(vec![0.1, 3.0, 10.0, 1000.0])) {
        let a = solve(&spec).unwrap().flows;
        let b = solve(&spec.scale_priorities(k)).unwrap().flows;
        prop_assert!(flow_distance(&a, &b).unwrap() <= 1e-9 * max_supply(&spec));
    }

    #[test]
    fn uncongested_junctions_pass_all_demand(spec in fuzzed(), slack in 1.0..3.0f64) {
        let od = OrientedDemand::new(&spec);
        let d = spec.dims();
        let supplies: Vec<f64> = (0..d.outputs)
            .map(|j| (0..d.inputs).map(|i| od.total(i, j)).sum::<f64>() * slack + 1.0)
            .collect();
        let open = NodeSpec::new(
            d,
            (0..d.inputs).map(|i| (0..d.classes).map(|c| spec.demand(i, c)).collect()).collect(),
            spec.splits().to_nested(),
            supplies,
            spec.priorities().to_vec(),
        ).unwrap();
        let f = solve(&open).unwrap().flows;
        for ((i, j, c), v) in f.iter_indexed() {
            prop_assert!((v - od.value(i, j, c)).abs() <= 1e-9 * od.value(i, j, c).max(1.0));
        }
    }

    #[test]
    fn breakpoints_stay_within_budget(spec in fuzzed()) {
        let d = spec.dims();
        let sol = solve(&spec).unwrap();
        prop_assert!(sol.trajectory.len() <= d.inputs + d.outputs + 1);
        let ts: Vec<f64> = sol.trajectory.breakpoints.iter().map(|b| b.t).collect();
        prop_assert!(ts.windows(2).all(|w| w[0] < w[1]));
        let modes: Vec<_> = sol.trajectory.breakpoints.iter().map(|b| b.mode).collect();
        prop_assert!(modes.windows(2).all(|w| w[0].is_subset(&w[1])));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Dense integration converges at first order in the step.
    #[test]
    fn oracle_first_order(spec in fuzzed(), dt in prop::sample::select(vec![1e-2, 1e-3])) {
        let exact = solve(&spec).unwrap().flows;
        let dense = integrate(&spec, &OracleConfig::with_dt(dt)).unwrap();
        let p_sum: f64 = spec.priorities().iter().sum();
        prop_assert!(flow_distance(&exact, &dense).unwrap() <= dt * p_sum);

        let slack = dt * p_sum;
        let d = spec.dims();
        prop_assert!(dense.as_slice().iter().all(|&v| v >= 0.0));
        for i in 0..d.inputs {
            for c in 0..d.classes {
                prop_assert!(dense.input_class_total(i, c) <= spec.demand(i, c) + slack);
            }
        }
        for j in 0..d.outputs {
            prop_assert!(dense.output_total(j) <= spec.supply(j) + slack);
        }
    }
}
