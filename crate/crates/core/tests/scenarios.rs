use std::path::Path;

use agora::sim::presets;
use agora::sim::scenario::{Clamp, FiniteFamily, FiniteSpec, ModelSpec, Scenario, SCHEMA_VERSION};
use agora::sim::partition::FinitePartition;
use agora::sim::TopologySpec;
use agora::Error;
use proptest::prelude::*;

fn scenario_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios"))
}

#[test]
fn shipped_files_match_presets() {
    for preset in presets::all() {
        let path = scenario_dir().join(format!("{}.toml", preset.name));
        let loaded = Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(loaded, preset, "{}", path.display());
        loaded.resolve().unwrap();
    }
}

#[test]
fn wrong_schema_version_is_rejected() {
    let text = presets::ring3_bernoulli().to_toml_string().unwrap().replace(
        &format!("schema_version = {SCHEMA_VERSION}"),
        "schema_version = 99",
    );
    assert!(matches!(Scenario::from_toml_str(&text), Err(Error::Config(_))));
}

#[test]
fn non_stochastic_row_is_named() {
    let mut s = presets::ring3_bernoulli();
    s.topology = TopologySpec::Explicit {
        rows: vec![vec![0.5, 0.25, 0.25], vec![0.3, 0.3, 0.3], vec![0.25, 0.25, 0.5]],
    };
    let err = s.resolve().unwrap_err();
    assert!(matches!(err, Error::InvalidGraph(_)));
    assert!(err.to_string().contains("row 1"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn rotating_star_needs_whole_blocks() {
    let mut s = presets::rotating_star(10, 5);
    s.topology = TopologySpec::TimeVaryingStar { edges: 10, active: 3, confidence: 0.5 };
    assert!(s.resolve().is_err());
}

#[test]
fn missing_label_is_flagged_by_validation() {
    let report = presets::ambiguous_grid().validate().unwrap();
    assert_eq!(report.warnings.len(), 1);
    assert!(report.warnings[0].contains("[9]"));
    assert!(presets::grid_placement(presets::Placement::Center).validate().unwrap().warnings.is_empty());
}

fn topology_strategy() -> impl Strategy<Value = TopologySpec> {
    prop_oneof![
        (1usize..12, 0.01f64..0.99).prop_map(|(edges, confidence)| TopologySpec::Star { edges, confidence }),
        (2usize..6).prop_map(|side| TopologySpec::Grid { side }),
        (2usize..10, 0.01f64..0.99).prop_map(|(agents, self_weight)| TopologySpec::Ring { agents, self_weight }),
        (1usize..5, 1usize..4, 0.01f64..0.99).prop_map(|(k, active, confidence)| TopologySpec::TimeVaryingStar {
            edges: k * active,
            active,
            confidence
        }),
    ]
}

proptest! {
    #[test]
    fn generated_scenarios_round_trip(
        topology in topology_strategy(),
        sharpness in 0.1f64..5.0,
        rounds in 0usize..10_000,
        batch_size in 1usize..64,
        seed in any::<u64>(),
    ) {
        let s = Scenario {
            schema_version: SCHEMA_VERSION,
            name: "generated".into(),
            rounds,
            batch_size,
            seed,
            topology,
            model: ModelSpec::Finite(FiniteSpec {
                family: FiniteFamily::Softmax { classes: 4, sharpness, confusions: vec![(0, 1), (3, 2)] },
                truth: 0,
                label_law: None,
                clamp: Clamp { floor: 1e-3, ceiling: 1.0 },
                input_weights: Some(vec![0.1, 0.2, 0.3, 0.4]),
                partition: FinitePartition::Iid,
                prior: None,
            }),
        };
        let text = s.to_toml_string().unwrap();
        prop_assert_eq!(Scenario::from_toml_str(&text).unwrap(), s);
    }
}
