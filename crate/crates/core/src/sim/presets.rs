//! Ready-made scenarios: the linear regression experiment and small
//! finite-parameter instances for the topology and placement studies.

use crate::sim::partition::{FeatureDesign, FeaturePartition, FinitePartition};
use crate::sim::scenario::{
    Clamp, FiniteFamily, FiniteSpec, ModelSpec, RegressionSpec, Scenario, SCHEMA_VERSION,
};
use crate::sim::topology::TopologySpec;

/// Classes in the softmax stand-in for the image classifiers.
pub const SOFTMAX_CLASSES: usize = 10;
pub const SOFTMAX_SHARPNESS: f64 = 2.0;

fn scenario(name: &str, rounds: usize, topology: TopologySpec, model: ModelSpec) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        rounds,
        batch_size: 1,
        seed: 1,
        topology,
        model,
    }
}

/// Four agents each observing one feature coordinate plus an intercept.
pub fn regression4() -> Scenario {
    scenario(
        "regression4",
        2000,
        TopologySpec::Explicit {
            rows: vec![
                vec![0.5, 0.5, 0.0, 0.0],
                vec![0.3, 0.1, 0.3, 0.3],
                vec![0.0, 0.5, 0.5, 0.0],
                vec![0.0, 0.5, 0.0, 0.5],
            ],
        },
        ModelSpec::Gaussian(RegressionSpec {
            theta_star: vec![-0.3, 0.5, 0.5, 0.1, 0.2],
            noise_std: 0.8,
            prior_variance: vec![0.5; 5],
            design: FeatureDesign {
                dim: 5,
                intercept: true,
                half_widths: vec![0.0, 1.0, 1.5, 1.25, 0.75],
                blocks: vec![vec![1], vec![2], vec![3], vec![4]],
            },
            partition: FeaturePartition::ByFeatureCoordinate,
            test_points: 1000,
        }),
    )
}

/// Three parameters over two inputs; each of the first two agents sees one
/// input and cannot rule out one wrong parameter on its own.
pub fn ring3_bernoulli() -> Scenario {
    scenario(
        "ring3-bernoulli",
        2000,
        TopologySpec::Ring {
            agents: 3,
            self_weight: 0.5,
        },
        ModelSpec::Finite(FiniteSpec {
            family: FiniteFamily::Binary {
                parameters: vec!["theta0".into(), "theta1".into(), "theta2".into()],
                success: vec![vec![0.3, 0.5], vec![0.5, 0.5], vec![0.5, 0.7]],
                input_class: None,
            },
            truth: 1,
            label_law: None,
            clamp: Clamp {
                floor: 0.25,
                ceiling: 0.75,
            },
            input_weights: None,
            partition: FinitePartition::Explicit {
                weights: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            },
            prior: None,
        }),
    )
}

/// Two fully connected agents flipping the same coin.
pub fn pair_bernoulli() -> Scenario {
    scenario(
        "pair-bernoulli",
        2000,
        TopologySpec::Explicit {
            rows: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        },
        ModelSpec::Finite(FiniteSpec {
            family: FiniteFamily::Binary {
                parameters: vec!["p0.3".into(), "p0.5".into(), "p0.7".into()],
                success: vec![vec![0.3], vec![0.5], vec![0.7]],
                input_class: None,
            },
            truth: 1,
            label_law: None,
            clamp: Clamp {
                floor: 0.25,
                ceiling: 0.75,
            },
            input_weights: None,
            partition: FinitePartition::Iid,
            prior: None,
        }),
    )
}

/// Softmax classifier whose wrong parameters confuse one class in `2..=9`
/// with the next; classes 0 and 1 are never confused.
fn split_classifier(partition: FinitePartition) -> ModelSpec {
    let confusions = (2..SOFTMAX_CLASSES).map(|a| (a, if a == 9 { 2 } else { a + 1 })).collect();
    ModelSpec::Finite(FiniteSpec {
        family: FiniteFamily::Softmax {
            classes: SOFTMAX_CLASSES,
            sharpness: SOFTMAX_SHARPNESS,
            confusions,
        },
        truth: 0,
        label_law: None,
        clamp: Clamp {
            floor: 0.01,
            ceiling: 1.0,
        },
        input_weights: None,
        partition,
        prior: None,
    })
}

/// `informative` holds classes `2..=9`; the others alternate between class 0
/// and class 1.
fn one_informative(n_agents: usize, informative: usize) -> FinitePartition {
    let mut k = 0;
    let classes = (0..n_agents)
        .map(|i| {
            if i == informative {
                (2..SOFTMAX_CLASSES).collect()
            } else {
                k += 1;
                vec![(k + 1) % 2]
            }
        })
        .collect();
    FinitePartition::ByLabel { classes }
}

/// Nine-agent star with edge confidence `a`; the hub holds the informative data.
pub fn nine_star(a: f64) -> Scenario {
    scenario(
        &format!("nine-star-a{a}"),
        500,
        TopologySpec::Star {
            edges: 8,
            confidence: a,
        },
        split_classifier(one_informative(9, 0)),
    )
}

/// Where the informative agent sits on the 3 × 3 grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    Center,
    Corner,
}

pub fn grid_placement(placement: Placement) -> Scenario {
    let (name, agent) = match placement {
        Placement::Center => ("grid-center", 4),
        Placement::Corner => ("grid-corner", 0),
    };
    scenario(name, 500, TopologySpec::Grid { side: 3 }, split_classifier(one_informative(9, agent)))
}

/// Grid where class 9 is assigned to no agent, so the parameter confusing
/// it cannot be ruled out.
pub fn ambiguous_grid() -> Scenario {
    let mut classes: Vec<Vec<usize>> = (0..9).map(|i| vec![i % 2]).collect();
    classes[4] = (2..9).collect();
    scenario(
        "grid-ambiguous",
        500,
        TopologySpec::Grid { side: 3 },
        split_classifier(FinitePartition::ByLabel { classes }),
    )
}

/// Rotating star with i.i.d. data.
pub fn rotating_star(edges: usize, active: usize) -> Scenario {
    scenario(
        &format!("rotating-star-{edges}-{active}"),
        200,
        TopologySpec::TimeVaryingStar {
            edges,
            active,
            confidence: 0.5,
        },
        split_classifier(FinitePartition::Iid),
    )
}

/// Every preset, for round-trip checks and for writing scenario files.
pub fn all() -> Vec<Scenario> {
    vec![
        regression4(),
        ring3_bernoulli(),
        pair_bernoulli(),
        nine_star(0.1),
        nine_star(0.2),
        nine_star(0.3),
        nine_star(0.5),
        nine_star(0.7),
        grid_placement(Placement::Center),
        grid_placement(Placement::Corner),
        ambiguous_grid(),
        rotating_star(25, 5),
    ]
}
