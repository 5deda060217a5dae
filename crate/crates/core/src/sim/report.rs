//! Rate analysis of a finite-engine scenario.

use crate::error::{Error, Result};
use crate::graph::SpectralSummary;
use crate::models::LabeledTabular;
use crate::rates::{
    global_learnable_set, local_optimal_set, rate_constant, sample_complexity, BoundInputs, BoundRow,
    DivergenceTable, InputLaw, MonteCarlo, RateConstants, RateReport,
};
use crate::sim::scenario::{FiniteSetup, Scenario, Setup};

pub const DEFAULT_DELTAS: [f64; 3] = [0.05, 0.1, 0.2];
/// Bound table `ε` values, as fractions of `K(Θ)`.
pub const DEFAULT_EPSILON_FRACTIONS: [f64; 3] = [0.25, 0.5, 0.75];

/// Every Theorem-1 quantity for `scenario`. A scenario that is not globally
/// learnable still yields a report, with no divergences, rate or bounds.
pub fn rate_report(scenario: &Scenario, deltas: &[f64], epsilon_fractions: &[f64]) -> Result<RateReport> {
    let (topology, setup) = scenario.resolve()?;
    let Setup::Finite(finite) = setup else {
        return Err(Error::Capability("rate analysis needs a finite-engine scenario".into()));
    };
    let w = topology
        .as_static()
        .ok_or_else(|| Error::Capability("rate analysis needs a static topology".into()))?;
    let spectral = SpectralSummary::compute(w)?;
    finite_report(&finite, &spectral, scenario.batch_size, deltas, epsilon_fractions)
}

pub fn finite_report(
    setup: &FiniteSetup,
    spectral: &SpectralSummary,
    batch_size: usize,
    deltas: &[f64],
    epsilon_fractions: &[f64],
) -> Result<RateReport> {
    let fit = LabeledTabular {
        likelihood: &setup.likelihood,
        truth: &setup.truth,
    };
    let agents = setup
        .agent_inputs
        .iter()
        .map(|w| Ok((fit, InputLaw::from_weights(w)?)))
        .collect::<Result<Vec<_>>>()?;
    let mc = MonteCarlo::default();
    let local_optimal_sets = agents
        .iter()
        .map(|(f, law)| local_optimal_set(f, law, mc))
        .collect::<Result<Vec<_>>>()?;
    let learnability = global_learnable_set(&local_optimal_sets)?;

    let (divergences, k_theta) = match learnability.theta_star() {
        Some(theta_star) => {
            let table = DivergenceTable::compute(&agents, theta_star, batch_size, mc)?;
            let k = rate_constant(&spectral.centrality, &table)?;
            (Some(table), Some(k))
        }
        None => (None, None),
    };

    let constants = RateConstants {
        c: setup.likelihood.log_ratio_bound(),
        alpha: setup.likelihood.floor(),
        l: setup.likelihood.ceiling(),
    };
    let mut rows = Vec::new();
    if let Some(k) = k_theta.filter(|k| k.value.is_finite() && k.value > 0.0) {
        for &delta in deltas {
            for &fraction in epsilon_fractions {
                let epsilon = fraction * k.value;
                let sc = sample_complexity(BoundInputs {
                    k_theta: k.value,
                    n_agents: setup.agent_inputs.len(),
                    theta_count: setup.params().len(),
                    delta,
                    epsilon,
                    c: constants.c,
                    spectral_gap: spectral.spectral_gap,
                })?;
                rows.push(BoundRow {
                    delta,
                    epsilon,
                    rounds: sc.rounds,
                    vacuous: sc.vacuous,
                });
            }
        }
    }

    Ok(RateReport {
        parameters: setup.params().labels().to_vec(),
        local_optimal_sets,
        learnability,
        divergences,
        k_theta,
        centrality: spectral.centrality.clone(),
        lambda_max: spectral.lambda_max,
        lambda_max_real: spectral.lambda_max_real,
        spectral_gap: spectral.spectral_gap,
        mixing_bound: spectral.mixing_bound,
        batch_size,
        constants,
        sample_complexity: rows,
    })
}
