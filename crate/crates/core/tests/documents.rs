// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use nodeflow::fixtures::{fixture, FIXTURE_NAMES};
use nodeflow::fuzz::{generate_random, FuzzConfig};
use nodeflow::report::{parse_flows, write_results, Format};
use nodeflow::scenario::{parse_document, parse_scenario, write_scenario};
use nodeflow::verify::check_relaxed_fifo;
use nodeflow::solve;
use proptest::prelude::*;

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn shipped_scenarios_match_fixtures() {
    for name in FIXTURE_NAMES {
        let path = scenario_dir().join(format!("{name}.toml"));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(parse_scenario(&text).unwrap(), fixture(name).unwrap(), "{name}");
        assert_eq!(parse_document(&text).unwrap().label.as_deref(), Some(*name));
    }
}

#[test]
fn shipped_bad_flows_violate_the_area_bound() {
    let text = std::fs::read_to_string(scenario_dir().join("bad.flows.toml")).unwrap();
    let f = parse_flows(&text).unwrap();
    let spec = fixture("diverge-relaxed").unwrap();
    let r = check_relaxed_fifo(&spec, &f).unwrap();
    let bound = r.check("relaxed-fifo").unwrap();
    assert!(!bound.passed);
    assert!((bound.residual - 0.2).abs() < 1e-12);
}

proptest! {
    #[test]
    fn scenario_text_roundtrip(seed in any::<u64>(), k in 0usize..1000) {
        let spec = generate_random(&FuzzConfig::with_seed(seed), k);
        let text = write_scenario(&spec, Some("fuzz"));
        let back = parse_scenario(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(write_scenario(&back, Some("fuzz")), text);
    }

    #[test]
    fn flows_roundtrip_in_both_formats(seed in any::<u64>(), k in 0usize..1000) {
        let spec = generate_random(&FuzzConfig::with_seed(seed), k);
        let sol = solve(&spec).unwrap();
        for format in [Format::Toml, Format::Json] {
            let text = write_results(&sol.flows, Some(&sol.trajectory), format);
            prop_assert_eq!(&parse_flows(&text).unwrap(), &sol.flows);
        }
    }
}
