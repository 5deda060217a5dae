//! Finite-parameter beliefs and the per-agent learning rule.
//!
//! Beliefs are held as normalized log-probabilities. One round at an agent is
//! a local Bayes update on a fresh batch, an identity projection (the allowed
//! family is the whole simplex), and log-linear pooling of the neighbours'
//! public beliefs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Numerically stable `log ∑ exp(x)`.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ParameterSet {
    labels: Vec<String>,
}

impl ParameterSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::Input(format!(
                "parameter set needs at least 2 members, got {}",
                labels.len()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Input(format!("duplicate parameter label {:?}", w[0])));
        }
        Ok(ParameterSet { labels })
    }

    /// Labels `theta0, theta1, ...`.
    pub fn indexed(n: usize) -> Result<Self> {
        ParameterSet::new((0..n).map(|k| format!("theta{k}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, k: usize) -> &str {
        &self.labels[k]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl TryFrom<Vec<String>> for ParameterSet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        ParameterSet::new(v)
    }
}

impl From<ParameterSet> for Vec<String> {
    fn from(p: ParameterSet) -> Self {
        p.labels
    }
}

/// A strictly positive probability vector over a finite parameter set, stored
/// as log-probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteBelief {
    log_probs: Vec<f64>,
}

impl FiniteBelief {
    pub fn uniform(n: usize) -> Self {
        FiniteBelief {
            log_probs: vec![-(n as f64).ln(); n],
        }
    }

    /// Normalizes an arbitrary finite log-weight vector.
    pub fn from_log_weights(mut log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::Input("belief over an empty parameter set".into()));
        }
        if let Some(k) = log_weights.iter().position(|x| !x.is_finite()) {
            return Err(Error::Input(format!(
                "log-weight {k} is {}; beliefs must be strictly positive",
                log_weights[k]
            )));
        }
        let z = logsumexp(&log_weights);
        log_weights.iter_mut().for_each(|x| *x -= z);
        Ok(FiniteBelief { log_probs: log_weights })
    }

    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
            return Err(Error::Input(format!("probability {p} is not strictly positive")));
        }
        FiniteBelief::from_log_weights(probs.iter().map(|p| p.ln()).collect())
    }

    /// Wraps already-normalized log-probabilities, checking the invariant.
    pub fn from_log_probs(log_probs: Vec<f64>) -> Result<Self> {
        let b = FiniteBelief { log_probs };
        b.check()?;
        Ok(b)
    }

    pub fn check(&self) -> Result<()> {
        if self.log_probs.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("belief has a non-finite log-probability".into()));
        }
        let z = logsumexp(&self.log_probs);
        if z.abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Numeric(format!("belief log-normalizer is {z:e}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.log_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_probs.is_empty()
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn log_prob(&self, k: usize) -> f64 {
        self.log_probs[k]
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.log_probs[k].exp()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|x| x.exp()).collect()
    }

    /// Index of the most probable parameter (lowest index on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (k, &x) in self.log_probs.iter().enumerate() {
            if x > self.log_probs[best] {
                best = k;
            }
        }
        best
    }

    /// `∑_θ b(θ)·values[θ]`.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.log_probs.iter().zip(values).map(|(l, v)| l.exp() * v).sum()
    }

    pub fn snapshot(&self, params: &ParameterSet) -> BeliefSnapshot {
        BeliefSnapshot {
            parameters: params.labels().to_vec(),
            log_probs: self.log_probs.clone(),
        }
    }
}

/// JSON form `{parameters: [...], log_probs: [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefSnapshot {
    pub parameters: Vec<String>,
    pub log_probs: Vec<f64>,
}

impl BeliefSnapshot {
    pub fn into_belief(self) -> Result<(ParameterSet, FiniteBelief)> {
        if self.parameters.len() != self.log_probs.len() {
            return Err(Error::Dimension(format!(
                "{} parameters but {} log-probabilities",
                self.parameters.len(),
                self.log_probs.len()
            )));
        }
        Ok((
            ParameterSet::new(self.parameters)?,
            FiniteBelief::from_log_probs(self.log_probs)?,
        ))
    }
}

/// A conditional label model `ℓ(y | θ, x)` indexed by parameter position.
pub trait LikelihoodModel {
    type Input;
    type Label;

    fn param_count(&self) -> usize;

    /// Unclamped likelihood (probability or density).
    fn likelihood(&self, theta: usize, x: &Self::Input, y: &Self::Label) -> f64;
}

impl<M: LikelihoodModel + ?Sized> LikelihoodModel for &M {
    type Input = M::Input;
    type Label = M::Label;

    fn param_count(&self) -> usize {
        (**self).param_count()
    }

    fn likelihood(&self, theta: usize, x: &Self::Input, y: &Self::Label) -> f64 {
        (**self).likelihood(theta, x, y)
    }
}

/// A likelihood whose evaluations are clamped into `[floor, ceiling]`, so no
/// parameter can ever receive zero likelihood.
#[derive(Clone, Debug)]
pub struct BoundedLikelihood<M> {
    model: M,
    floor: f64,
    ceiling: f64,
}

impl<M: LikelihoodModel> BoundedLikelihood<M> {
    pub fn new(model: M, floor: f64, ceiling: f64) -> Result<Self> {
        if !(floor > 0.0 && floor.is_finite() && ceiling.is_finite() && floor < ceiling) {
            return Err(Error::Input(format!(
                "likelihood bounds must satisfy 0 < floor < ceiling, got [{floor}, {ceiling}]"
            )));
        }
        Ok(BoundedLikelihood { model, floor, ceiling })
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn ceiling(&self) -> f64 {
        self.ceiling
    }

    /// `C = |log(L / α)|`.
    pub fn log_ratio_bound(&self) -> f64 {
        (self.ceiling / self.floor).ln().abs()
    }

    pub fn likelihood(&self, theta: usize, x: &M::Input, y: &M::Label) -> f64 {
        let raw = self.model.likelihood(theta, x, y);
        if raw.is_nan() {
            return self.floor;
        }
        raw.clamp(self.floor, self.ceiling)
    }

    pub fn log_likelihood(&self, theta: usize, x: &M::Input, y: &M::Label) -> f64 {
        self.likelihood(theta, x, y).ln()
    }

    /// `log ℓ(Y | θ, X) = ∑_m log ℓ(y_m | θ, x_m)` for every parameter.
    pub fn batch_log_likelihood(&self, batch: &Batch<M::Input, M::Label>) -> Vec<f64> {
        (0..self.model.param_count())
            .map(|theta| {
                batch
                    .iter()
                    .map(|(x, y)| self.log_likelihood(theta, x, y))
                    .sum()
            })
            .collect()
    }
}

/// `M ≥ 1` paired samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Batch<X, Y> {
    inputs: Vec<X>,
    labels: Vec<Y>,
}

impl<X, Y> Batch<X, Y> {
    pub fn new(inputs: Vec<X>, labels: Vec<Y>) -> Result<Self> {
        if inputs.len() != labels.len() {
            return Err(Error::Input(format!(
                "batch has {} inputs but {} labels",
                inputs.len(),
                labels.len()
            )));
        }
        if inputs.is_empty() {
            return Err(Error::Input("batch is empty".into()));
        }
        Ok(Batch { inputs, labels })
    }

    pub fn single(x: X, y: Y) -> Self {
        Batch {
            inputs: vec![x],
            labels: vec![y],
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[X] {
        &self.inputs
    }

    pub fn labels(&self) -> &[Y] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&X, &Y)> {
        self.inputs.iter().zip(&self.labels)
    }

    /// Concatenates several batches into one.
    pub fn concat(batches: impl IntoIterator<Item = Batch<X, Y>>) -> Result<Self> {
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        for b in batches {
            inputs.extend(b.inputs);
            labels.extend(b.labels);
        }
        Batch::new(inputs, labels)
    }
}

/// Local Bayes update: `log b(θ) = log q(θ) + ∑_m log ℓ(y_m | θ, x_m) − log Z`.
pub fn bayes_update<M: LikelihoodModel>(
    prior: &FiniteBelief,
    likelihood: &BoundedLikelihood<M>,
    batch: &Batch<M::Input, M::Label>,
) -> Result<FiniteBelief> {
    let n = likelihood.model().param_count();
    if prior.len() != n {
        return Err(Error::Dimension(format!(
            "prior has {} entries but the model has {n} parameters",
            prior.len()
        )));
    }
    let log_lik = likelihood.batch_log_likelihood(batch);
    let unnormalized = prior
        .log_probs()
        .iter()
        .zip(&log_lik)
        .map(|(p, l)| p + l)
        .collect();
    FiniteBelief::from_log_weights(unnormalized)
}

/// Projection onto the allowed family. For finite parameter sets the family
/// is the whole simplex, so this is the identity.
pub fn project_identity(b: &FiniteBelief) -> FiniteBelief {
    b.clone()
}

/// Log-linear pooling: `log q(θ) = ∑_j w_j log b_j(θ) − log Z`.
pub fn consensus(beliefs: &[&FiniteBelief], weights: &[f64]) -> Result<FiniteBelief> {
    check_weights(beliefs.len(), weights)?;
    let n = beliefs[0].len();
    if let Some(b) = beliefs.iter().find(|b| b.len() != n) {
        return Err(Error::Dimension(format!(
            "beliefs over {} and {n} parameters",
            b.len()
        )));
    }
    if beliefs.len() == 1 {
        return Ok(beliefs[0].clone());
    }
    let mut pooled = vec![0.0; n];
    for (b, &w) in beliefs.iter().zip(weights) {
        for (acc, &l) in pooled.iter_mut().zip(b.log_probs()) {
            *acc += w * l;
        }
    }
    FiniteBelief::from_log_weights(pooled)
}

pub(crate) fn check_weights(count: usize, weights: &[f64]) -> Result<()> {
    if count == 0 {
        return Err(Error::Input("consensus over no beliefs".into()));
    }
    if weights.len() != count {
        return Err(Error::Input(format!(
            "{count} beliefs but {} weights",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::Input(format!("consensus weight {w} is not positive")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::Input(format!("consensus weights sum to {sum}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundOutput {
    /// `b_i`: after the Bayes update and projection; shared with neighbours.
    pub public: FiniteBelief,
    /// `q_i`: after pooling; the prior for the next round.
    pub private: FiniteBelief,
}

/// One full round at a single agent. `neighbors` holds the other members of
/// `N(i)` with their public beliefs and weights; the agent's own public belief
/// always enters the pool with `self_weight`.
pub fn agent_round<M: LikelihoodModel>(
    state: &FiniteBelief,
    likelihood: &BoundedLikelihood<M>,
    batch: &Batch<M::Input, M::Label>,
    self_weight: f64,
    neighbors: &[(&FiniteBelief, f64)],
) -> Result<RoundOutput> {
    if !(self_weight > 0.0) {
        return Err(Error::Contract(format!(
            "an agent must weight its own belief positively, got {self_weight}"
        )));
    }
    let public = project_identity(&bayes_update(state, likelihood, batch)?);
    let mut pool: Vec<&FiniteBelief> = Vec::with_capacity(neighbors.len() + 1);
    let mut weights = Vec::with_capacity(neighbors.len() + 1);
    pool.push(&public);
    weights.push(self_weight);
    for (b, w) in neighbors {
        pool.push(b);
        weights.push(*w);
    }
    let private = consensus(&pool, &weights)?;
    Ok(RoundOutput { public, private })
}
