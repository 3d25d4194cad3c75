// SPDX-License-Identifier: Apache-2.0

//! Named reference junctions.

use crate::model::{Dims, Interval, NodeSpec};

pub const FIXTURE_NAMES: &[&str] = &[
    "merge-symmetric",
    "merge-leftover",
    "diverge-fifo",
    "diverge-relaxed",
    "lane-diverge",
    "general-2x2",
];

/// Built-in junction by name.
pub fn fixture(name: &str) -> Option<NodeSpec> {
    let spec = match name {
        // Both inputs congested: the supply is split by priority.
        "merge-symmetric" => NodeSpec::merge(&[10.0, 20.0], &[1.0, 1.0], 15.0),
        // Input 0 runs dry early and input 1 takes the supply it leaves.
        "merge-leftover" => NodeSpec::merge(&[2.0, 20.0], &[1.0, 1.0], 12.0),
        "diverge-fifo" => NodeSpec::diverge(10.0, &[0.6, 0.4], 10.0, &[3.0, 100.0]),
        "diverge-relaxed" => NodeSpec::diverge(10.0, &[0.6, 0.4], 10.0, &[3.0, 100.0])
            .map(|s| s.with_restriction(0, 0, 1, Interval { lo: 0.0, hi: 0.2 })),
        // Five-lane mainline with a left exit (0), through lanes (1) and a
        // right exit (2). A queue for exit 0 blocks the leftmost lane, a queue
        // for exit 2 the two rightmost lanes; a through queue blocks everything.
        "lane-diverge" => NodeSpec::diverge(10.0, &[0.2, 0.6, 0.2], 10.0, &[1.0, 100.0, 1.5]).map(|s| {
            s.with_restriction_matrix(0, &lane_matrix())
        }),
        "general-2x2" => NodeSpec::new(
            Dims::new(2, 2, 2),
            vec![vec![4.0, 2.0], vec![3.0, 3.0]],
            vec![
                vec![vec![0.5, 0.25], vec![0.5, 0.75]],
                vec![vec![1.0, 0.5], vec![0.0, 0.5]],
            ],
            vec![4.0, 3.0],
            vec![2.0, 1.0],
        )
        .map(|s| {
            s.with_restriction(0, 0, 1, Interval { lo: 0.0, hi: 0.5 })
                .with_restriction(0, 1, 0, Interval { lo: 0.5, hi: 1.0 })
        }),
        _ => return None,
    };
    Some(spec.expect("fixture shapes are consistent"))
}

/// Restriction matrix of `lane-diverge`, indexed `[congested][affected]`.
pub fn lane_matrix() -> Vec<Vec<Interval>> {
    let full = Interval::FULL;
    let none = Interval::EMPTY;
    vec![
        vec![full, Interval { lo: 0.0, hi: 0.2 }, none],
        vec![full, full, full],
        vec![none, Interval { lo: 0.6, hi: 1.0 }, full],
    ]
}
