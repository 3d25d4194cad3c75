// SPDX-License-Identifier: Apache-2.0

//! Shared workloads for the solver benchmarks.

use nodeflow::fixtures::{fixture, FIXTURE_NAMES};
use nodeflow::fuzz::FuzzConfig;
use nodeflow::NodeSpec;

/// Every built-in fixture with its name.
pub fn fixture_workload() -> Vec<(&'static str, NodeSpec)> {
    FIXTURE_NAMES
        .iter()
        .map(|&name| (name, fixture(name).expect("listed fixture exists")))
        .collect()
}

/// A fixed batch of random junctions at the largest default dimensions.
pub fn random_workload(count: usize) -> Vec<NodeSpec> {
    let config = FuzzConfig {
        seed: 0x5eed,
        count,
        ..FuzzConfig::default()
    };
    config.scenarios().collect()
}
