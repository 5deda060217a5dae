//! Seeded synchronous rounds for both engines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::belief::{bayes_update, consensus, project_identity, Batch, FiniteBelief};
use crate::error::{Error, Result};
use crate::gaussian::{conjugate_update, gaussian_consensus, GaussianBelief, MseMoments, RegressionObservation};
use crate::models::sample_categorical;
use crate::sim::scenario::{EngineKind, FiniteSetup, RegressionSetup, Scenario, Setup};
use crate::sim::topology::Topology;

/// How agents combine information.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The learning rule over the scenario's network.
    Cooperative,
    /// Consensus skipped (`W = I`); each agent runs plain Bayes on its data.
    NoCooperation,
    /// One agent receives every agent's batch each round.
    Central,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Cooperative => "cooperative",
            Mode::NoCooperation => "no-cooperation",
            Mode::Central => "central",
        }
    }
}

/// Per-round, per-agent snapshots. Index `[round][agent]`, round 0 is the prior.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshots<B> {
    /// After the local update and projection.
    pub public: Vec<Vec<B>>,
    /// After consensus.
    pub private: Vec<Vec<B>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceBeliefs {
    Finite(Snapshots<FiniteBelief>),
    Gaussian(Snapshots<GaussianBelief>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub mode: Mode,
    pub seed: u64,
    pub n_agents: usize,
    pub rounds: usize,
    pub beliefs: TraceBeliefs,
    /// `[round][agent]` public belief on the true parameter (finite engine).
    pub theta_star_belief: Option<Vec<Vec<f64>>>,
    /// `[round][agent]` test MSE of the public posterior mean (Gaussian engine).
    pub mse: Option<Vec<Vec<f64>>>,
}

impl RunTrace {
    pub fn finite(&self) -> Option<&Snapshots<FiniteBelief>> {
        match &self.beliefs {
            TraceBeliefs::Finite(s) => Some(s),
            TraceBeliefs::Gaussian(_) => None,
        }
    }

    pub fn gaussian(&self) -> Option<&Snapshots<GaussianBelief>> {
        match &self.beliefs {
            TraceBeliefs::Gaussian(s) => Some(s),
            TraceBeliefs::Finite(_) => None,
        }
    }

    /// `log b_i^(n)(θ)` for one agent over all rounds.
    pub fn log_belief_series(&self, agent: usize, theta: usize) -> Option<Vec<f64>> {
        self.finite()
            .map(|s| s.public.iter().map(|round| round[agent].log_prob(theta)).collect())
    }
}

/// The pieces of one engine the round loop needs.
trait Engine {
    type Belief: Clone;
    type Batch;

    fn prior(&self) -> Self::Belief;
    fn draw(&self, agent: usize, batch_size: usize, rng: &mut ChaCha8Rng) -> Self::Batch;
    fn update(&self, belief: &Self::Belief, batches: Vec<Self::Batch>) -> Result<Self::Belief>;
    fn pool(&self, beliefs: &[&Self::Belief], weights: &[f64]) -> Result<Self::Belief>;
    fn metric(&self, belief: &Self::Belief) -> f64;
}

struct FiniteEngine<'a>(&'a FiniteSetup);

impl Engine for FiniteEngine<'_> {
    type Belief = FiniteBelief;
    type Batch = Batch<usize, usize>;

    fn prior(&self) -> FiniteBelief {
        self.0.prior.clone()
    }

    fn draw(&self, agent: usize, batch_size: usize, rng: &mut ChaCha8Rng) -> Self::Batch {
        let weights = &self.0.agent_inputs[agent];
        let mut inputs = Vec::with_capacity(batch_size);
        let mut labels = Vec::with_capacity(batch_size);
        for _ in 0..batch_size {
            let x = sample_categorical(weights, rng);
            labels.push(self.0.truth.sample(x, rng));
            inputs.push(x);
        }
        Batch::new(inputs, labels).expect("batch_size >= 1")
    }

    fn update(&self, belief: &FiniteBelief, batches: Vec<Self::Batch>) -> Result<FiniteBelief> {
        let batch = if batches.len() == 1 {
            batches.into_iter().next().expect("one batch")
        } else {
            Batch::concat(batches)?
        };
        Ok(project_identity(&bayes_update(belief, &self.0.likelihood, &batch)?))
    }

    fn pool(&self, beliefs: &[&FiniteBelief], weights: &[f64]) -> Result<FiniteBelief> {
        consensus(beliefs, weights)
    }

    fn metric(&self, belief: &FiniteBelief) -> f64 {
        belief.prob(self.0.truth_index)
    }
}

struct GaussianEngine<'a> {
    setup: &'a RegressionSetup,
    moments: MseMoments,
    noise: Normal<f64>,
}

impl<'a> GaussianEngine<'a> {
    fn new(setup: &'a RegressionSetup, seed: u64) -> Result<Self> {
        let noise = Normal::new(0.0, setup.noise_std).map_err(|e| Error::Config(e.to_string()))?;
        let mut rng = stream(seed, TEST_STREAM);
        let test_set = test_set(setup, &noise, &mut rng);
        Ok(GaussianEngine {
            setup,
            moments: MseMoments::new(&test_set)?,
            noise,
        })
    }

    fn observe(&self, features: Vec<f64>, rng: &mut ChaCha8Rng) -> RegressionObservation {
        let mean: f64 = features.iter().zip(&self.setup.theta_star).map(|(x, t)| x * t).sum();
        RegressionObservation {
            label: mean + self.noise.sample(rng),
            features,
            noise_std: self.setup.noise_std,
        }
    }
}

/// Held-out points from the global feature law, shared by every mode.
fn test_set(setup: &RegressionSetup, noise: &Normal<f64>, rng: &mut ChaCha8Rng) -> Vec<RegressionObservation> {
    (0..setup.test_points)
        .map(|_| {
            let features = setup.design.sample(crate::sim::partition::FeatureLaw::Mixture, rng);
            let mean: f64 = features.iter().zip(&setup.theta_star).map(|(x, t)| x * t).sum();
            RegressionObservation {
                label: mean + noise.sample(rng),
                features,
                noise_std: setup.noise_std,
            }
        })
        .collect()
}

/// Builds the test set a run with this seed evaluates against.
pub fn regression_test_set(setup: &RegressionSetup, seed: u64) -> Result<Vec<RegressionObservation>> {
    let noise = Normal::new(0.0, setup.noise_std).map_err(|e| Error::Config(e.to_string()))?;
    Ok(test_set(setup, &noise, &mut stream(seed, TEST_STREAM)))
}

impl Engine for GaussianEngine<'_> {
    type Belief = GaussianBelief;
    type Batch = Vec<RegressionObservation>;

    fn prior(&self) -> GaussianBelief {
        self.setup.prior.clone()
    }

    fn draw(&self, agent: usize, batch_size: usize, rng: &mut ChaCha8Rng) -> Self::Batch {
        (0..batch_size)
            .map(|_| {
                let features = self.setup.design.sample(self.setup.agent_laws[agent], rng);
                self.observe(features, rng)
            })
            .collect()
    }

    fn update(&self, belief: &GaussianBelief, batches: Vec<Self::Batch>) -> Result<GaussianBelief> {
        let batch: Vec<_> = batches.into_iter().flatten().collect();
        conjugate_update(belief, &batch)
    }

    fn pool(&self, beliefs: &[&GaussianBelief], weights: &[f64]) -> Result<GaussianBelief> {
        gaussian_consensus(beliefs, weights)
    }

    fn metric(&self, belief: &GaussianBelief) -> f64 {
        self.moments.mse(belief)
    }
}

const TEST_STREAM: u64 = 0;

/// Agent `i` draws from stream `i + 1` of the run seed, so every mode sees
/// the same samples for the same agent.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

struct Output<B> {
    snapshots: Snapshots<B>,
    metric: Vec<Vec<f64>>,
}

fn simulate<E: Engine>(
    engine: &E,
    topology: &Topology,
    rounds: usize,
    batch_size: usize,
    seed: u64,
    mode: Mode,
) -> Result<Output<E::Belief>> {
    let n = topology.n_agents();
    let mut rngs: Vec<ChaCha8Rng> = (0..n as u64).map(|i| stream(seed, i + 1)).collect();
    let tracked = if mode == Mode::Central { 1 } else { n };

    let mut private: Vec<E::Belief> = vec![engine.prior(); tracked];
    let mut public_hist = Vec::with_capacity(rounds + 1);
    let mut private_hist = Vec::with_capacity(rounds + 1);
    let mut metric = Vec::with_capacity(rounds + 1);
    public_hist.push(private.clone());
    private_hist.push(private.clone());
    metric.push(private.iter().map(|b| engine.metric(b)).collect::<Vec<_>>());

    for round in 1..=rounds {
        let active: Vec<bool> = (0..n).map(|i| topology.is_active(round, i)).collect();
        let public: Vec<E::Belief> = match mode {
            Mode::Central => {
                let batches = (0..n)
                    .filter(|&i| active[i])
                    .map(|i| engine.draw(i, batch_size, &mut rngs[i]))
                    .collect();
                vec![engine.update(&private[0], batches).map_err(|e| e.at(round, 0))?]
            }
            Mode::Cooperative | Mode::NoCooperation => (0..n)
                .map(|i| {
                    if active[i] {
                        let batch = engine.draw(i, batch_size, &mut rngs[i]);
                        engine.update(&private[i], vec![batch]).map_err(|e| e.at(round, i))
                    } else {
                        Ok(private[i].clone())
                    }
                })
                .collect::<Result<_>>()?,
        };

        let next: Vec<E::Belief> = match mode {
            Mode::Central | Mode::NoCooperation => public.clone(),
            Mode::Cooperative => {
                let w = topology.weights_at(round);
                (0..n)
                    .map(|i| {
                        if !active[i] {
                            return Ok(private[i].clone());
                        }
                        let (beliefs, weights): (Vec<&E::Belief>, Vec<f64>) =
                            w.neighbors(i).map(|(j, wij)| (&public[j], wij)).unzip();
                        engine.pool(&beliefs, &weights).map_err(|e| e.at(round, i))
                    })
                    .collect::<Result<_>>()?
            }
        };

        metric.push(public.iter().map(|b| engine.metric(b)).collect());
        public_hist.push(public);
        private = next;
        private_hist.push(private.clone());
    }

    Ok(Output {
        snapshots: Snapshots {
            public: public_hist,
            private: private_hist,
        },
        metric,
    })
}

/// Runs a scenario under `mode` with an explicit seed.
pub fn run_with(scenario: &Scenario, seed: u64, mode: Mode) -> Result<RunTrace> {
    let (topology, setup) = scenario.resolve()?;
    run_resolved(&topology, &setup, scenario.rounds, scenario.batch_size, seed, mode)
}

/// Runs an already-resolved scenario.
pub fn run_resolved(
    topology: &Topology,
    setup: &Setup,
    rounds: usize,
    batch_size: usize,
    seed: u64,
    mode: Mode,
) -> Result<RunTrace> {
    let n_agents = if mode == Mode::Central { 1 } else { topology.n_agents() };
    let trace = match setup {
        Setup::Finite(f) => {
            let out = simulate(&FiniteEngine(f), topology, rounds, batch_size, seed, mode)?;
            RunTrace {
                mode,
                seed,
                n_agents,
                rounds,
                beliefs: TraceBeliefs::Finite(out.snapshots),
                theta_star_belief: Some(out.metric),
                mse: None,
            }
        }
        Setup::Gaussian(g) => {
            let engine = GaussianEngine::new(g, seed)?;
            let out = simulate(&engine, topology, rounds, batch_size, seed, mode)?;
            RunTrace {
                mode,
                seed,
                n_agents,
                rounds,
                beliefs: TraceBeliefs::Gaussian(out.snapshots),
                theta_star_belief: None,
                mse: Some(out.metric),
            }
        }
    };
    Ok(trace)
}

/// The cooperative run with the scenario's own seed.
pub fn run(scenario: &Scenario) -> Result<RunTrace> {
    run_with(scenario, scenario.seed, Mode::Cooperative)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Baselines {
    pub central: RunTrace,
    pub no_cooperation: RunTrace,
}

/// Central-agent and no-cooperation runs on the same sample streams as the
/// cooperative run with `seed`.
pub fn reference_baselines(scenario: &Scenario, seed: u64) -> Result<Baselines> {
    let (topology, setup) = scenario.resolve()?;
    Ok(Baselines {
        central: run_resolved(&topology, &setup, scenario.rounds, scenario.batch_size, seed, Mode::Central)?,
        no_cooperation: run_resolved(&topology, &setup, scenario.rounds, scenario.batch_size, seed, Mode::NoCooperation)?,
    })
}

/// Fails if `requested` disagrees with the scenario's model.
pub fn check_engine(scenario: &Scenario, requested: Option<EngineKind>) -> Result<()> {
    match requested {
        Some(e) if e != scenario.engine() => Err(Error::Config(format!(
            "engine {e:?} requested but the scenario's model is for {:?}",
            scenario.engine()
        ))),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::bayes_update;
    use crate::sim::presets;
    use crate::sim::topology::TopologySpec;

    #[test]
    fn zero_rounds_hold_only_priors() {
        let mut s = presets::ring3_bernoulli();
        s.rounds = 0;
        let t = run(&s).unwrap();
        let snaps = t.finite().unwrap();
        assert_eq!(snaps.public.len(), 1);
        assert!(snaps.public[0].iter().all(|b| *b == FiniteBelief::uniform(3)));
        assert_eq!(t.theta_star_belief.unwrap(), vec![vec![1.0 / 3.0; 3]]);
    }

    #[test]
    fn single_agent_is_sequential_bayes() {
        let mut s = presets::pair_bernoulli();
        s.topology = TopologySpec::Explicit { rows: vec![vec![1.0]] };
        s.rounds = 50;
        s.batch_size = 3;
        let t = run_with(&s, 9, Mode::Cooperative).unwrap();
        let (_, Setup::Finite(setup)) = s.resolve().unwrap() else { unreachable!() };

        let mut rng = stream(9, 1);
        let mut belief = setup.prior.clone();
        let engine = FiniteEngine(&setup);
        for round in 1..=50 {
            let batch = engine.draw(0, 3, &mut rng);
            belief = bayes_update(&belief, &setup.likelihood, &batch).unwrap();
            assert_eq!(t.finite().unwrap().private[round][0], belief);
        }
    }

    #[test]
    fn inactive_agents_are_frozen() {
        let s = presets::rotating_star(10, 5);
        let t = run(&s).unwrap();
        let snaps = t.finite().unwrap();
        for round in 1..=s.rounds {
            // odd rounds activate agents 1..=5, even rounds 6..=10
            let (idle, busy) = if round % 2 == 1 { (7, 2) } else { (2, 7) };
            assert_eq!(snaps.private[round][idle], snaps.private[round - 1][idle]);
            assert_eq!(snaps.public[round][idle], snaps.private[round - 1][idle]);
            assert_ne!(snaps.private[round][busy], snaps.private[round - 1][busy]);
        }
    }

    #[test]
    fn same_seed_same_trace() {
        let s = presets::ring3_bernoulli();
        assert_eq!(run_with(&s, 4, Mode::Cooperative).unwrap(), run_with(&s, 4, Mode::Cooperative).unwrap());
        assert_ne!(run_with(&s, 4, Mode::Cooperative).unwrap(), run_with(&s, 5, Mode::Cooperative).unwrap());
    }

    #[test]
    fn baselines_share_sample_streams() {
        // with W = I, agent i's no-cooperation run is single-agent Bayes on
        // stream i + 1, and the central agent sees the union of those draws
        let mut s = presets::pair_bernoulli();
        s.rounds = 30;
        let b = reference_baselines(&s, 3).unwrap();
        let (_, Setup::Finite(setup)) = s.resolve().unwrap() else { unreachable!() };
        let engine = FiniteEngine(&setup);
        let mut rngs = [stream(3, 1), stream(3, 2)];
        let mut central = setup.prior.clone();
        for round in 1..=30 {
            let batches: Vec<_> = rngs.iter_mut().map(|r| engine.draw(0, 1, r)).collect();
            central = engine.update(&central, batches).unwrap();
            assert_eq!(b.central.finite().unwrap().private[round][0], central);
        }
        assert_eq!(b.central.n_agents, 1);
        assert_eq!(b.no_cooperation.n_agents, 2);
    }

    #[test]
    fn gaussian_no_cooperation_keeps_unseen_coordinates() {
        let mut s = presets::regression4();
        s.rounds = 100;
        let t = run_with(&s, 2, Mode::NoCooperation).unwrap();
        let last = &t.gaussian().unwrap().private[100];
        for (i, b) in last.iter().enumerate() {
            for c in 1..5 {
                if c != i + 1 {
                    assert_eq!(b.precision()[(c, c)], 2.0);
                    assert_eq!(b.mean()[c], 0.0);
                }
            }
        }
        assert_eq!(t.mse.as_ref().unwrap().len(), 101);
    }

    #[test]
    fn engine_override_must_match() {
        let s = presets::regression4();
        assert!(check_engine(&s, Some(EngineKind::Gaussian)).is_ok());
        assert!(matches!(check_engine(&s, Some(EngineKind::Finite)), Err(Error::Config(_))));
        assert!(check_engine(&s, None).is_ok());
    }
}
