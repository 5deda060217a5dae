use agora::models::{GridRegressionFit, ScalarRegressionGrid};
use agora::rates::{divergence_gap, empirical_decay_rate, InputLaw, MonteCarlo};
use agora::sim::presets;
use agora::sim::report::{rate_report, DEFAULT_DELTAS, DEFAULT_EPSILON_FRACTIONS};
use agora::sim::run::{run_resolved, Mode};
use rand::Rng;
use rayon::prelude::*;

#[test]
fn pair_decay_rate_matches_prediction() {
    let s = presets::pair_bernoulli();
    let report = rate_report(&s, &DEFAULT_DELTAS, &DEFAULT_EPSILON_FRACTIONS).unwrap();
    let k = report.k_theta.unwrap().value;
    let (topology, setup) = s.resolve().unwrap();
    let slopes: Vec<f64> = (1..=50u64)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let t = run_resolved(&topology, &setup, 2000, 1, seed, Mode::Cooperative).unwrap();
            [0, 2]
                .into_iter()
                .flat_map(|theta| (0..2).map(move |agent| (theta, agent)))
                .map(|(theta, agent)| empirical_decay_rate(&t.log_belief_series(agent, theta).unwrap(), 200).unwrap().slope)
                .collect::<Vec<_>>()
        })
        .collect();
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    assert!((mean - k).abs() / k < 0.15, "slope {mean} vs K {k}");
}

#[test]
fn monte_carlo_error_halves_with_four_times_the_samples() {
    let model = ScalarRegressionGrid::uniform(-1.0, 1.0, 5, 0.5).unwrap();
    let fit = GridRegressionFit {
        model: &model,
        theta_star: 0.5,
        true_noise_std: 0.5,
    };
    let law = InputLaw::sampled(|rng| rng.random_range(-1.0..1.0));
    let set = [3].into();
    let se = |samples| {
        divergence_gap(&fit, &law, &set, 3, 0, 1, MonteCarlo { samples, seed: 3 })
            .unwrap()
            .std_error
    };
    let ratio = se(10_000) / se(40_000);
    assert!((ratio - 2.0).abs() < 0.15, "ratio {ratio}");

    // E[(θ* − θ)² x²] / (2σ²) with x ~ U[−1, 1]
    let est = divergence_gap(&fit, &law, &set, 3, 0, 1, MonteCarlo::default()).unwrap();
    let exact = 1.5f64.powi(2) / 3.0 / (2.0 * 0.25);
    assert!((est.value - exact).abs() < 4.0 * est.std_error);
}

#[test]
fn ring_cooperative_convergence() {
    let s = presets::ring3_bernoulli();
    let report = rate_report(&s, &[0.2], &[0.5]).unwrap();
    let sc = report.sample_complexity[0].rounds as usize;
    let rounds = 3 * sc.min(5000);
    let (topology, setup) = s.resolve().unwrap();
    let passed: usize = (1..=500u64)
        .into_par_iter()
        .map(|seed| {
            let t = run_resolved(&topology, &setup, rounds, 1, seed, Mode::Cooperative).unwrap();
            t.theta_star_belief.unwrap().last().unwrap().iter().all(|&b| b > 0.99) as usize
        })
        .sum();
    assert!(passed >= 400, "{passed}/500");
}

#[test]
fn no_cooperation_fails_where_cooperation_succeeds() {
    // the first two ring agents each miss one wrong parameter on their own
    let s = presets::ring3_bernoulli();
    let (topology, setup) = s.resolve().unwrap();
    let alone = run_resolved(&topology, &setup, 2000, 1, 1, Mode::NoCooperation).unwrap();
    let last = alone.theta_star_belief.unwrap();
    let last = last.last().unwrap();
    assert!(last[0] < 0.9 && last[1] < 0.9);
    assert!(last[2] > 0.99);
}
