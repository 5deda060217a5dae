//! Convergence-rate analysis for the finite-parameter learning rule.
//!
//! Wrong parameters lose belief mass exponentially fast at rate
//! `K(Θ) = min_{θ* ∈ Θ*, θ ∉ Θ*} ∑_j v_j I_j(θ*, θ)`, where `v` is the
//! eigenvector centrality of the network and `I_j` is agent `j`'s expected
//! per-round log-likelihood advantage of `θ*` over `θ`. This module computes
//! those quantities, the sample-complexity bound built from them, and slope
//! estimates from simulated traces to compare against.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expected KL values closer than this are treated as ties.
pub const TIE_TOLERANCE: f64 = 1e-9;
/// Log-beliefs at or below this are treated as underflowed in traces.
pub const LOG_BELIEF_FLOOR: f64 = -700.0;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;

/// Expected negative log-likelihood of one model under the true labeler,
/// `E_{y ~ P(·|x)}[−log ℓ(y | θ, x)]`, for a single input.
///
/// Differences of this quantity between parameters are differences of
/// `KL(P(·|x) ‖ ℓ(·|θ,x))`, since the labeler's entropy cancels.
pub trait CrossEntropy {
    type Input;

    fn param_count(&self) -> usize;

    fn cross_entropy(&self, theta: usize, x: &Self::Input) -> f64;
}

/// An agent's input distribution `P_i`.
pub enum InputLaw<X> {
    /// Exact enumeration over weighted support points.
    Finite(Vec<(X, f64)>),
    /// Seeded sampling; expectations are Monte Carlo estimates.
    Sampled(Box<dyn Fn(&mut ChaCha8Rng) -> X + Send + Sync>),
}

impl<X> InputLaw<X> {
    pub fn sampled(f: impl Fn(&mut ChaCha8Rng) -> X + Send + Sync + 'static) -> Self {
        InputLaw::Sampled(Box::new(f))
    }
}

impl InputLaw<usize> {
    /// Finite law over input indices from a weight vector (zeros dropped).
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::Input("input weights must be nonnegative with positive sum".into()));
        }
        Ok(InputLaw::Finite(
            weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(x, &w)| (x, w / total))
                .collect(),
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        MonteCarlo {
            samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        }
    }
}

/// A point estimate with its standard error (zero for exact enumeration).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub exact: bool,
}

/// `E_x[f(x)]` for every parameter at once, using common inputs across
/// parameters so that identical conditionals give bit-identical estimates.
fn expected_per_param<F: CrossEntropy>(
    fit: &F,
    law: &InputLaw<F::Input>,
    mc: MonteCarlo,
    f: impl Fn(&F, &F::Input) -> Vec<f64>,
) -> Result<Vec<Estimate>> {
    let k = fit.param_count();
    match law {
        InputLaw::Finite(points) => {
            if points.is_empty() {
                return Err(Error::Input("empty input law".into()));
            }
            let mut acc = vec![0.0; k];
            for (x, p) in points {
                for (a, v) in acc.iter_mut().zip(f(fit, x)) {
                    *a += p * v;
                }
            }
            Ok(acc
                .into_iter()
                .map(|value| Estimate {
                    value,
                    std_error: 0.0,
                    exact: true,
                })
                .collect())
        }
        InputLaw::Sampled(draw) => {
            if mc.samples < 2 {
                return Err(Error::Input("Monte Carlo needs at least 2 samples".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            let mut sum = vec![0.0; k];
            let mut sum_sq = vec![0.0; k];
            for _ in 0..mc.samples {
                let x = draw(&mut rng);
                for ((s, s2), v) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(f(fit, &x)) {
                    *s += v;
                    *s2 += v * v;
                }
            }
            let n = mc.samples as f64;
            Ok(sum
                .into_iter()
                .zip(sum_sq)
                .map(|(s, s2)| {
                    let mean = s / n;
                    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
                    Estimate {
                        value: mean,
                        std_error: (var / n).sqrt(),
                        exact: false,
                    }
                })
                .collect())
        }
    }
}

/// `Θ̄_i`: the parameters minimizing the agent's expected KL to the true
/// labeler, ties within [`TIE_TOLERANCE`] kept.
pub fn local_optimal_set<F: CrossEntropy>(fit: &F, law: &InputLaw<F::Input>, mc: MonteCarlo) -> Result<BTreeSet<usize>> {
    let k = fit.param_count();
    if k == 0 {
        return Err(Error::Input("empty parameter set".into()));
    }
    let ce = expected_per_param(fit, law, mc, |fit, x| {
        (0..k).map(|t| fit.cross_entropy(t, x)).collect()
    })?;
    let best = ce.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    Ok(ce
        .iter()
        .enumerate()
        .filter(|(_, e)| e.value - best <= TIE_TOLERANCE)
        .map(|(t, _)| t)
        .collect())
}

/// Outcome of intersecting the local optimal sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Learnability {
    Learnable { theta_star: BTreeSet<usize> },
    NotGloballyLearnable,
}

impl Learnability {
    pub fn theta_star(&self) -> Option<&BTreeSet<usize>> {
        match self {
            Learnability::Learnable { theta_star } => Some(theta_star),
            Learnability::NotGloballyLearnable => None,
        }
    }
}

/// `Θ* = ∩_i Θ̄_i`.
pub fn global_learnable_set(locals: &[BTreeSet<usize>]) -> Result<Learnability> {
    let Some((first, rest)) = locals.split_first() else {
        return Err(Error::Input("no local optimal sets".into()));
    };
    let mut acc = first.clone();
    for s in rest {
        acc = acc.intersection(s).copied().collect();
    }
    Ok(if acc.is_empty() {
        Learnability::NotGloballyLearnable
    } else {
        Learnability::Learnable { theta_star: acc }
    })
}

/// `I_j(θ*, θ)`: expected KL gap between `θ` and `θ*` over one batch of
/// `batch_size` i.i.d. inputs from the agent's law.
pub fn divergence_gap<F: CrossEntropy>(
    fit: &F,
    law: &InputLaw<F::Input>,
    theta_star_set: &BTreeSet<usize>,
    theta_star: usize,
    theta: usize,
    batch_size: usize,
    mc: MonteCarlo,
) -> Result<Estimate> {
    if !theta_star_set.contains(&theta_star) {
        return Err(Error::Contract(format!("parameter {theta_star} is not in Θ*")));
    }
    if theta_star_set.contains(&theta) {
        return Err(Error::Contract(format!("parameter {theta} is in Θ*; it must be a wrong parameter")));
    }
    if batch_size == 0 {
        return Err(Error::Input("batch size must be positive".into()));
    }
    let est = expected_per_param(fit, law, mc, |fit, x| {
        vec![fit.cross_entropy(theta, x) - fit.cross_entropy(theta_star, x)]
    })?[0];
    let m = batch_size as f64;
    Ok(Estimate {
        value: est.value * m,
        std_error: est.std_error * m,
        exact: est.exact,
    })
}

/// Dense table of `I_j(θ*, θ)` for every agent, `θ* ∈ Θ*` and `θ ∉ Θ*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTable {
    pub n_params: usize,
    pub theta_star: BTreeSet<usize>,
    pub entries: Vec<DivergenceEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEntry {
    pub agent: usize,
    pub theta_star: usize,
    pub theta: usize,
    pub value: f64,
    pub std_error: f64,
}

impl DivergenceTable {
    pub fn compute<F: CrossEntropy>(
        agents: &[(F, InputLaw<F::Input>)],
        theta_star: &BTreeSet<usize>,
        batch_size: usize,
        mc: MonteCarlo,
    ) -> Result<Self> {
        let n_params = agents
            .first()
            .map(|(f, _)| f.param_count())
            .ok_or_else(|| Error::Input("no agents".into()))?;
        let mut entries = Vec::new();
        for (j, (fit, law)) in agents.iter().enumerate() {
            for &ts in theta_star {
                for t in (0..n_params).filter(|t| !theta_star.contains(t)) {
                    let est = divergence_gap(fit, law, theta_star, ts, t, batch_size, mc)?;
                    entries.push(DivergenceEntry {
                        agent: j,
                        theta_star: ts,
                        theta: t,
                        value: est.value,
                        std_error: est.std_error,
                    });
                }
            }
        }
        Ok(DivergenceTable {
            n_params,
            theta_star: theta_star.clone(),
            entries,
        })
    }

    pub fn get(&self, agent: usize, theta_star: usize, theta: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.agent == agent && e.theta_star == theta_star && e.theta == theta)
            .map(|e| e.value)
    }

    /// Wrong parameters that no agent can tell apart from some `θ*`: these
    /// make `K(Θ)` zero.
    pub fn unidentified(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &ts in &self.theta_star {
            for t in (0..self.n_params).filter(|t| !self.theta_star.contains(t)) {
                let informative = self
                    .entries
                    .iter()
                    .any(|e| e.theta_star == ts && e.theta == t && e.value > TIE_TOLERANCE);
                if !informative {
                    out.push((ts, t));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateConstant {
    /// `K(Θ)` in nats per round; `+∞` when every parameter is in `Θ*`.
    pub value: f64,
    /// Minimizing `(θ*, θ)`, ties broken by parameter order.
    pub argmin: Option<(usize, usize)>,
    pub degenerate: bool,
}

/// `K(Θ) = min_{θ*, θ} ∑_j v_j I_j(θ*, θ)`.
pub fn rate_constant(centrality: &[f64], table: &DivergenceTable) -> Result<RateConstant> {
    if table.theta_star.is_empty() {
        return Err(Error::Input("Θ* is empty".into()));
    }
    let wrong: Vec<usize> = (0..table.n_params)
        .filter(|t| !table.theta_star.contains(t))
        .collect();
    if wrong.is_empty() {
        return Ok(RateConstant {
            value: f64::INFINITY,
            argmin: None,
            degenerate: true,
        });
    }
    let mut best: Option<(f64, (usize, usize))> = None;
    for &ts in &table.theta_star {
        for &t in &wrong {
            let mut total = 0.0;
            for (j, &v) in centrality.iter().enumerate() {
                let i = table.get(j, ts, t).ok_or_else(|| {
                    Error::Dimension(format!("no divergence entry for agent {j}, pair ({ts}, {t})"))
                })?;
                total += v * i;
            }
            if best.is_none_or(|(b, _)| total < b) {
                best = Some((total, (ts, t)));
            }
        }
    }
    let (value, pair) = best.expect("at least one pair");
    Ok(RateConstant {
        value,
        argmin: Some(pair),
        degenerate: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexity {
    pub rounds: u64,
    /// `ε ≥ K(Θ)`: the guaranteed decay exponent `K − ε` is not positive.
    pub vacuous: bool,
}

/// Inputs to the sample-complexity bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub k_theta: f64,
    pub n_agents: usize,
    pub theta_count: usize,
    pub delta: f64,
    pub epsilon: f64,
    /// `C = |log(L / α)|`.
    pub c: f64,
    pub spectral_gap: f64,
}

/// Smallest `n` with `n ≥ 8 C log(N|Θ|/δ) / (ε² (1 − λ_max))`.
pub fn sample_complexity(inputs: BoundInputs) -> Result<SampleComplexity> {
    let BoundInputs {
        k_theta,
        n_agents,
        theta_count,
        delta,
        epsilon,
        c,
        spectral_gap,
    } = inputs;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Input(format!("delta {delta} must be in (0, 1)")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Input(format!("epsilon {epsilon} must be positive")));
    }
    if !(spectral_gap > 0.0) {
        return Err(Error::DegenerateGraph { gap: spectral_gap });
    }
    if n_agents == 0 || theta_count == 0 || !(c >= 0.0) {
        return Err(Error::Input("bound needs N ≥ 1, |Θ| ≥ 1 and C ≥ 0".into()));
    }
    let bound = 8.0 * c * ((n_agents * theta_count) as f64 / delta).ln() / (epsilon * epsilon * spectral_gap);
    if !bound.is_finite() || bound > u64::MAX as f64 {
        return Err(Error::Numeric(format!("sample complexity {bound} overflows")));
    }
    Ok(SampleComplexity {
        rounds: bound.ceil() as u64,
        vacuous: epsilon >= k_theta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Least-squares slope of `−log b(θ)` against the round index.
    pub slope: f64,
    pub std_error: f64,
    /// Rounds `[start, end)` used in the fit.
    pub start: usize,
    pub end: usize,
    /// The trace reached [`LOG_BELIEF_FLOOR`]; the fit stops before it.
    pub truncated: bool,
}

/// Fits the exponential decay rate of a wrong parameter's belief.
///
/// `log_beliefs[n]` is `log b^(n)(θ)` for rounds `n = 0, 1, ...`.
pub fn empirical_decay_rate(log_beliefs: &[f64], burn_in: usize) -> Result<DecayFit> {
    if log_beliefs.len() <= burn_in + 10 {
        return Err(Error::Input(format!(
            "trace of {} rounds is too short for burn-in {burn_in}",
            log_beliefs.len()
        )));
    }
    let floor_at = log_beliefs.iter().position(|&l| l <= LOG_BELIEF_FLOOR || !l.is_finite());
    let end = floor_at.unwrap_or(log_beliefs.len());
    let truncated = floor_at.is_some();
    let start = if end > burn_in { burn_in } else { 0 };
    if end - start < 3 {
        return Err(Error::Numeric(format!(
            "only {} rounds before the log-belief floor",
            end - start
        )));
    }
    let (slope, std_error) = least_squares_slope(start, &log_beliefs[start..end]);
    Ok(DecayFit {
        slope,
        std_error,
        start,
        end,
        truncated,
    })
}

/// Slope of `−y` against `x = offset, offset + 1, ...`, with its OLS
/// standard error.
fn least_squares_slope(offset: usize, log_beliefs: &[f64]) -> (f64, f64) {
    let n = log_beliefs.len() as f64;
    let xs = (0..log_beliefs.len()).map(|k| (offset + k) as f64);
    let x_mean = xs.clone().sum::<f64>() / n;
    let y_mean = -log_beliefs.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, &l) in xs.clone().zip(log_beliefs) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (-l - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ssr: f64 = xs
        .zip(log_beliefs)
        .map(|(x, &l)| (-l - intercept - slope * x).powi(2))
        .sum();
    let std_error = (ssr / (n - 2.0) / sxx).sqrt();
    (slope, std_error)
}

/// One row of the sample-complexity table in a [`RateReport`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub delta: f64,
    pub epsilon: f64,
    pub rounds: u64,
    pub vacuous: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateConstants {
    pub c: f64,
    pub alpha: f64,
    pub l: f64,
}

/// Everything needed to read off the convergence guarantee for one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub parameters: Vec<String>,
    pub local_optimal_sets: Vec<BTreeSet<usize>>,
    pub learnability: Learnability,
    pub divergences: Option<DivergenceTable>,
    pub k_theta: Option<RateConstant>,
    pub centrality: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_max_real: f64,
    pub spectral_gap: f64,
    pub mixing_bound: f64,
    pub batch_size: usize,
    pub constants: RateConstants,
    pub sample_complexity: Vec<BoundRow>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Bernoulli parameters, truth at index `truth`; input space is a single point.
    struct Coins {
        p: Vec<f64>,
        truth: f64,
    }

    impl CrossEntropy for Coins {
        type Input = ();
        fn param_count(&self) -> usize {
            self.p.len()
        }
        fn cross_entropy(&self, theta: usize, _: &()) -> f64 {
            let q = self.p[theta];
            -self.truth * q.ln() - (1.0 - self.truth) * (1.0 - q).ln()
        }
    }

    fn kl_bern(a: f64, b: f64) -> f64 {
        a * (a / b).ln() + (1.0 - a) * ((1.0 - a) / (1.0 - b)).ln()
    }

    fn point() -> InputLaw<()> {
        InputLaw::Finite(vec![((), 1.0)])
    }

    #[test]
    fn realizable_truth_is_locally_optimal() {
        let fit = Coins {
            p: vec![0.3, 0.5, 0.7],
            truth: 0.5,
        };
        let set = local_optimal_set(&fit, &point(), MonteCarlo::default()).unwrap();
        assert_eq!(set, BTreeSet::from([1]));
    }

    #[test]
    fn indistinguishable_parameters_tie() {
        let fit = Coins {
            p: vec![0.4, 0.4, 0.9],
            truth: 0.4,
        };
        let set = local_optimal_set(&fit, &point(), MonteCarlo::default()).unwrap();
        assert_eq!(set, BTreeSet::from([0, 1]));
    }

    #[test]
    fn intersection_rules() {
        let all = BTreeSet::from([0, 1, 2]);
        assert_eq!(
            global_learnable_set(&[all.clone(), all.clone()]).unwrap(),
            Learnability::Learnable { theta_star: all }
        );
        assert_eq!(
            global_learnable_set(&[BTreeSet::from([0]), BTreeSet::from([1])]).unwrap(),
            Learnability::NotGloballyLearnable
        );
        assert!(global_learnable_set(&[]).is_err());
    }

    #[test]
    fn bernoulli_divergence_gap() {
        let fit = Coins {
            p: vec![0.5, 0.7],
            truth: 0.5,
        };
        let ts = BTreeSet::from([0]);
        let gap = divergence_gap(&fit, &point(), &ts, 0, 1, 1, MonteCarlo::default()).unwrap();
        let oracle = 0.5 * (0.5f64 / 0.7).ln() + 0.5 * (0.5f64 / 0.3).ln();
        assert_abs_diff_eq!(gap.value, oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(gap.value, 0.0872, epsilon = 1e-4);
        assert!(gap.exact);
        let gap3 = divergence_gap(&fit, &point(), &ts, 0, 1, 3, MonteCarlo::default()).unwrap();
        assert_abs_diff_eq!(gap3.value, 3.0 * oracle, epsilon = 1e-14);
    }

    #[test]
    fn divergence_gap_contract() {
        let fit = Coins {
            p: vec![0.5, 0.7],
            truth: 0.5,
        };
        let ts = BTreeSet::from([0]);
        let err = divergence_gap(&fit, &point(), &ts, 1, 0, 1, MonteCarlo::default()).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        let err = divergence_gap(&fit, &point(), &ts, 0, 0, 1, MonteCarlo::default()).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn blind_agent_has_zero_gap() {
        let fit = Coins {
            p: vec![0.6, 0.6],
            truth: 0.6,
        };
        let ts = BTreeSet::from([0]);
        let gap = divergence_gap(&fit, &point(), &ts, 0, 1, 1, MonteCarlo::default()).unwrap();
        assert_eq!(gap.value, 0.0);
    }

    fn table(values: &[(usize, usize, f64)], n_params: usize, theta_star: usize) -> DivergenceTable {
        DivergenceTable {
            n_params,
            theta_star: BTreeSet::from([theta_star]),
            entries: values
                .iter()
                .map(|&(agent, theta, value)| DivergenceEntry {
                    agent,
                    theta_star,
                    theta,
                    value,
                    std_error: 0.0,
                })
                .collect(),
        }
    }

    #[test]
    fn single_agent_rate_is_min_gap() {
        let t = table(&[(0, 0, 0.4), (0, 2, 0.25)], 3, 1);
        let k = rate_constant(&[1.0], &t).unwrap();
        assert_abs_diff_eq!(k.value, 0.25, epsilon = 1e-15);
        assert_eq!(k.argmin, Some((1, 2)));
    }

    #[test]
    fn split_informative_agents() {
        // agent 0 alone separates θ0, agent 1 alone separates θ2
        let (a, b) = (0.3, 0.12);
        let t = table(&[(0, 0, a), (0, 2, 0.0), (1, 0, 0.0), (1, 2, b)], 3, 1);
        let k = rate_constant(&[0.5, 0.5], &t).unwrap();
        assert_abs_diff_eq!(k.value, 0.5 * f64::min(a, b), epsilon = 1e-15);
        assert!(t.unidentified().is_empty());
    }

    #[test]
    fn unidentified_pair_gives_zero_rate() {
        let t = table(&[(0, 0, 0.3), (0, 2, 0.0), (1, 0, 0.1), (1, 2, 0.0)], 3, 1);
        assert_eq!(t.unidentified(), vec![(1, 2)]);
        assert_eq!(rate_constant(&[0.5, 0.5], &t).unwrap().value, 0.0);
    }

    #[test]
    fn all_parameters_learnable_is_degenerate() {
        let t = DivergenceTable {
            n_params: 2,
            theta_star: BTreeSet::from([0, 1]),
            entries: vec![],
        };
        let k = rate_constant(&[1.0], &t).unwrap();
        assert!(k.degenerate && k.value.is_infinite() && k.argmin.is_none());
    }

    fn bound(c: f64, delta: f64, epsilon: f64, k: f64) -> BoundInputs {
        BoundInputs {
            k_theta: k,
            n_agents: 2,
            theta_count: 2,
            delta,
            epsilon,
            c,
            spectral_gap: 1.0,
        }
    }

    #[test]
    fn sample_complexity_spot_value() {
        // ceil(8 ln 40 / 0.01) = ceil(2951.1...) = 2952
        let sc = sample_complexity(bound(1.0, 0.1, 0.1, 0.5)).unwrap();
        assert_eq!(sc.rounds, 2952);
        assert!(!sc.vacuous);
    }

    #[test]
    fn sample_complexity_scaling() {
        let one = sample_complexity(bound(1.0, 0.1, 0.1, 0.5)).unwrap().rounds as f64;
        let two = sample_complexity(bound(2.0, 0.1, 0.1, 0.5)).unwrap().rounds as f64;
        assert!((two - 2.0 * one).abs() <= 1.0);
        let tighter = sample_complexity(bound(1.0, 0.01, 0.1, 0.5)).unwrap().rounds;
        assert!(tighter as f64 > one);
        assert!(sample_complexity(bound(1.0, 0.1, 0.6, 0.5)).unwrap().vacuous);
    }

    #[test]
    fn sample_complexity_errors() {
        let mut b = bound(1.0, 0.1, 0.1, 0.5);
        b.spectral_gap = 0.0;
        assert!(matches!(sample_complexity(b), Err(Error::DegenerateGraph { .. })));
        assert!(sample_complexity(bound(1.0, 1.0, 0.1, 0.5)).is_err());
        assert!(sample_complexity(bound(1.0, 0.1, 0.0, 0.5)).is_err());
    }

    #[test]
    fn decay_of_exact_exponential() {
        let trace: Vec<f64> = (0..300).map(|n| -0.2 * n as f64).collect();
        let fit = empirical_decay_rate(&trace, 50).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.2, epsilon = 1e-9);
        assert!(fit.std_error < 1e-9);
        assert!(!fit.truncated);
        assert_eq!((fit.start, fit.end), (50, 300));
    }

    #[test]
    fn decay_of_constant_trace() {
        let fit = empirical_decay_rate(&[-0.7; 100], 10).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn decay_stops_at_floor() {
        let trace: Vec<f64> = (0..400).map(|n| -2.0 * n as f64).collect();
        let fit = empirical_decay_rate(&trace, 100).unwrap();
        assert!(fit.truncated);
        assert_eq!(fit.end, 350);
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-9);

        // floor reached before the burn-in ends: fit the pre-floor rounds
        let fit = empirical_decay_rate(&trace, 380).unwrap();
        assert!(fit.truncated);
        assert_eq!((fit.start, fit.end), (0, 350));
    }

    #[test]
    fn decay_rejects_short_trace() {
        assert!(empirical_decay_rate(&[0.0; 20], 10).is_err());
    }

    #[test]
    fn monte_carlo_gap_matches_enumeration() {
        // inputs uniform on {0, 1}; the wrong parameter differs only at x = 1
        struct TwoInputs;
        impl CrossEntropy for TwoInputs {
            type Input = usize;
            fn param_count(&self) -> usize {
                2
            }
            fn cross_entropy(&self, theta: usize, x: &usize) -> f64 {
                if theta == 1 && *x == 1 {
                    0.5 + kl_bern(0.5, 0.8)
                } else {
                    0.5
                }
            }
        }
        let ts = BTreeSet::from([0]);
        let exact = divergence_gap(&TwoInputs, &InputLaw::from_weights(&[1.0, 1.0]).unwrap(), &ts, 0, 1, 1, MonteCarlo::default())
            .unwrap();
        let law = InputLaw::sampled(|rng: &mut ChaCha8Rng| usize::from(rand::Rng::random::<bool>(rng)));
        let mc = divergence_gap(&TwoInputs, &law, &ts, 0, 1, 1, MonteCarlo { samples: 20_000, seed: 5 }).unwrap();
        assert!(!mc.exact);
        assert!((mc.value - exact.value).abs() < 4.0 * mc.std_error);
    }
}
