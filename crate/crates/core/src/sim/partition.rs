//! Splitting a global input distribution across agents.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum FinitePartition {
    /// Every agent draws from the global input law.
    Iid,
    /// Agent `i` only sees inputs whose class is in `classes[i]`.
    ByLabel { classes: Vec<Vec<usize>> },
    /// Unnormalized per-agent input weights.
    Explicit { weights: Vec<Vec<f64>> },
}

/// Per-agent input weights over a finite input space.
///
/// `global` is the network-wide law `P_X` and `input_class` tags each input.
pub fn partition_finite(
    global: &[f64],
    input_class: &[usize],
    partition: &FinitePartition,
    n_agents: usize,
) -> Result<Vec<Vec<f64>>> {
    if global.len() != input_class.len() {
        return Err(Error::Dimension(format!(
            "{} input weights for {} inputs",
            global.len(),
            input_class.len()
        )));
    }
    let per_agent: Vec<Vec<f64>> = match partition {
        FinitePartition::Iid => vec![global.to_vec(); n_agents],
        FinitePartition::ByLabel { classes } => {
            check_count(classes.len(), n_agents)?;
            classes
                .iter()
                .map(|owned| {
                    global
                        .iter()
                        .zip(input_class)
                        .map(|(&p, c)| if owned.contains(c) { p } else { 0.0 })
                        .collect()
                })
                .collect()
        }
        FinitePartition::Explicit { weights } => {
            check_count(weights.len(), n_agents)?;
            if let Some(w) = weights.iter().find(|w| w.len() != global.len()) {
                return Err(Error::Dimension(format!(
                    "explicit partition row has {} weights for {} inputs",
                    w.len(),
                    global.len()
                )));
            }
            weights.clone()
        }
    };
    per_agent
        .into_iter()
        .enumerate()
        .map(|(i, w)| {
            let total: f64 = w.iter().sum();
            if w.iter().any(|x| *x < 0.0 || !x.is_finite()) {
                return Err(Error::Input(format!("agent {i} has invalid input weights")));
            }
            if !(total > 0.0) {
                return Err(Error::Input(format!("agent {i} is assigned no data")));
            }
            Ok(w.into_iter().map(|x| x / total).collect())
        })
        .collect()
}

fn check_count(got: usize, n_agents: usize) -> Result<()> {
    if got != n_agents {
        return Err(Error::Config(format!(
            "partition describes {got} agents but the network has {n_agents}"
        )));
    }
    Ok(())
}

/// Classes carrying global mass that no agent observes. Any parameter that
/// differs from the truth only on such classes cannot be learned.
pub fn uncovered_classes(global: &[f64], input_class: &[usize], agents: &[Vec<f64>]) -> Vec<usize> {
    let mut missing: Vec<usize> = global
        .iter()
        .zip(input_class)
        .enumerate()
        .filter(|(x, (&p, _))| p > 0.0 && agents.iter().all(|w| w[*x] == 0.0))
        .map(|(_, (_, &c))| c)
        .collect();
    missing.sort_unstable();
    missing.dedup();
    missing
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeaturePartition {
    Iid,
    ByFeatureCoordinate,
}

/// Feature design for linear regression. Every point activates one block
/// of coordinates, each drawn from `Unif[−w, w]`; the optional intercept
/// (coordinate 0) is always 1. The global law picks a block uniformly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureDesign {
    pub dim: usize,
    pub intercept: bool,
    pub half_widths: Vec<f64>,
    pub blocks: Vec<Vec<usize>>,
}

/// Which blocks an agent draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureLaw {
    Block(usize),
    Mixture,
}

impl FeatureDesign {
    pub fn check(&self) -> Result<()> {
        if self.half_widths.len() != self.dim {
            return Err(Error::Dimension(format!(
                "{} half widths for dimension {}",
                self.half_widths.len(),
                self.dim
            )));
        }
        if self.blocks.is_empty() {
            return Err(Error::Input("feature design has no blocks".into()));
        }
        for block in &self.blocks {
            if block.is_empty() {
                return Err(Error::Input("empty feature block".into()));
            }
            for &c in block {
                if c >= self.dim || (self.intercept && c == 0) {
                    return Err(Error::Input(format!("block coordinate {c} is not a free feature")));
                }
                if !(self.half_widths[c] > 0.0 && self.half_widths[c].is_finite()) {
                    return Err(Error::Input(format!("coordinate {c} needs a positive half width")));
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, law: FeatureLaw, rng: &mut R) -> Vec<f64> {
        let block = match law {
            FeatureLaw::Block(b) => b,
            FeatureLaw::Mixture => rng.random_range(0..self.blocks.len()),
        };
        let mut phi = vec![0.0; self.dim];
        if self.intercept {
            phi[0] = 1.0;
        }
        for &c in &self.blocks[block] {
            let w = self.half_widths[c];
            phi[c] = rng.random_range(-w..=w);
        }
        phi
    }

    /// Coordinates an agent never sees varying (intercept excluded).
    pub fn unobserved(&self, law: FeatureLaw) -> Vec<usize> {
        match law {
            FeatureLaw::Mixture => Vec::new(),
            FeatureLaw::Block(b) => (0..self.dim)
                .filter(|c| !(self.intercept && *c == 0) && !self.blocks[b].contains(c))
                .collect(),
        }
    }
}

pub fn partition_features(design: &FeatureDesign, mode: FeaturePartition, n_agents: usize) -> Result<Vec<FeatureLaw>> {
    design.check()?;
    match mode {
        FeaturePartition::Iid => Ok(vec![FeatureLaw::Mixture; n_agents]),
        FeaturePartition::ByFeatureCoordinate => {
            check_count(design.blocks.len(), n_agents)?;
            Ok((0..n_agents).map(FeatureLaw::Block).collect())
        }
    }
}
