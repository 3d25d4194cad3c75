// SPDX-License-Identifier: Apache-2.0

//! Deterministic random junctions.
//!
//! Scenario `index` of seed `seed` is drawn from its own ChaCha stream, so any
//! single scenario can be regenerated without producing the ones before it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Dims, Interval, NodeSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    pub max_classes: usize,
    /// Per-class demands are drawn from `[0, max_demand)`.
    pub max_demand: f64,
    pub min_priority: f64,
    pub max_priority: f64,
    /// Probability that an input gets random restriction intervals instead of
    /// full FIFO.
    pub relaxed_probability: f64,
    /// Probability that a single demand, or a single split weight, is zero.
    pub zero_probability: f64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            count: 500,
            max_inputs: 4,
            max_outputs: 4,
            max_classes: 3,
            max_demand: 10.0,
            min_priority: 1.0,
            max_priority: 10.0,
            relaxed_probability: 0.5,
            zero_probability: 0.15,
        }
    }
}

impl FuzzConfig {
    pub fn with_seed(seed: u64) -> Self {
        FuzzConfig {
            seed,
            ..Default::default()
        }
    }

    /// The `count` scenarios of this configuration, in index order.
    pub fn scenarios(&self) -> impl Iterator<Item = NodeSpec> + '_ {
        (0..self.count).map(move |k| generate_random(self, k))
    }
}

/// Scenario number `index` of `config`.
///
/// Split weights are drawn per `(input, class)` and normalised to sum to one.
/// Each supply is uniform on `[0, 1.5 × demand directed at the output]`, so
/// congestion is common and outputs nobody sends to get zero supply.
pub fn generate_random(config: &FuzzConfig, index: usize) -> NodeSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);

    let m = rng.random_range(1..=config.max_inputs.max(1));
    let n = rng.random_range(1..=config.max_outputs.max(1));
    let cc = rng.random_range(1..=config.max_classes.max(1));
    let dims = Dims::new(m, n, cc);

    let demand: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..cc)
                .map(|_| {
                    if rng.random_bool(config.zero_probability) {
                        0.0
                    } else {
                        rng.random_range(0.0..config.max_demand)
                    }
                })
                .collect()
        })
        .collect();

    let split: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|_| {
            let per_class: Vec<Vec<f64>> = (0..cc)
                .map(|_| {
                    let mut w: Vec<f64> = (0..n)
                        .map(|_| {
                            if rng.random_bool(config.zero_probability) {
                                0.0
                            } else {
                                rng.random::<f64>()
                            }
                        })
                        .collect();
                    let sum: f64 = w.iter().sum();
                    if sum <= 0.0 {
                        w[rng.random_range(0..n)] = 1.0;
                    } else {
                        w.iter_mut().for_each(|v| *v /= sum);
                    }
                    w
                })
                .collect();
            (0..n).map(|j| per_class.iter().map(|w| w[j]).collect()).collect()
        })
        .collect();

    let priority: Vec<f64> = (0..m)
        .map(|_| rng.random_range(config.min_priority..=config.max_priority))
        .collect();

    let supply: Vec<f64> = (0..n)
        .map(|j| {
            let directed: f64 = (0..m)
                .flat_map(|i| (0..cc).map(move |c| (i, c)))
                .map(|(i, c)| demand[i][c] * split[i][j][c])
                .sum();
            rng.random::<f64>() * 1.5 * directed
        })
        .collect();

    let mut spec = NodeSpec::new(dims, demand, split, supply, priority)
        .expect("generated shapes are consistent");
    for i in 0..m {
        if !rng.random_bool(config.relaxed_probability) {
            continue;
        }
        for jp in 0..n {
            for j in (0..n).filter(|&j| j != jp) {
                let roll: f64 = rng.random();
                let iv = if roll < 0.2 {
                    Interval::EMPTY
                } else if roll < 0.4 {
                    Interval::FULL
                } else {
                    let a: f64 = rng.random();
                    let b: f64 = rng.random();
                    Interval {
                        lo: a.min(b),
                        hi: a.max(b),
                    }
                };
                spec = spec.with_restriction(i, jp, j, iv);
            }
        }
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_scenario() {
        let cfg = FuzzConfig::with_seed(1);
        assert_eq!(generate_random(&cfg, 0), generate_random(&cfg, 0));
        assert_ne!(generate_random(&cfg, 0), generate_random(&cfg, 1));
        let other = FuzzConfig::with_seed(2);
        assert_ne!(generate_random(&cfg, 0), generate_random(&other, 0));
    }

    #[test]
    fn generated_specs_validate() {
        let cfg = FuzzConfig::with_seed(3);
        for (k, spec) in cfg.scenarios().enumerate() {
            let report = spec.validate();
            assert!(report.is_ok(), "scenario {k}: {report}");
            let d = spec.dims();
            assert!(d.inputs <= 4 && d.outputs <= 4 && d.classes <= 3);
        }
    }

    #[test]
    fn some_outputs_start_without_supply() {
        let cfg = FuzzConfig::default();
        let starts_filled = cfg
            .scenarios()
            .filter(|s| s.supplies().iter().any(|&r| r <= crate::EPS))
            .count();
        assert!(starts_filled > 0);
    }

    #[test]
    fn both_restriction_styles_occur() {
        let cfg = FuzzConfig::with_seed(5);
        let relaxed = cfg
            .scenarios()
            .filter(|s| (0..s.dims().inputs).any(|i| !s.is_full_fifo(i)))
            .count();
        assert!(relaxed > 50 && relaxed < 450, "{relaxed}");
    }
}
