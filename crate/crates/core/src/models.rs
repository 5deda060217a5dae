//! Concrete likelihood families for the finite-parameter engine.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{BoundedLikelihood, LikelihoodModel, ParameterSet};
use crate::error::{Error, Result};
use crate::rates::CrossEntropy;

const ROW_TOLERANCE: f64 = 1e-9;

/// Finite inputs, finite labels: `table[θ][x][y] = ℓ(y | θ, x)`.
///
/// Every input carries a class tag used by label-based partitions; by default
/// input `x` has class `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabularModel {
    params: ParameterSet,
    n_inputs: usize,
    n_labels: usize,
    table: Vec<f64>,
    input_class: Vec<usize>,
}

impl TabularModel {
    pub fn new(params: ParameterSet, table: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if table.len() != params.len() {
            return Err(Error::Dimension(format!(
                "table has {} parameter slices for {} parameters",
                table.len(),
                params.len()
            )));
        }
        let n_inputs = table[0].len();
        if n_inputs == 0 {
            return Err(Error::Input("tabular model has no inputs".into()));
        }
        let n_labels = table[0][0].len();
        if n_labels < 2 {
            return Err(Error::Input("tabular model needs at least two labels".into()));
        }
        let mut flat = Vec::with_capacity(params.len() * n_inputs * n_labels);
        for (t, slice) in table.iter().enumerate() {
            if slice.len() != n_inputs {
                return Err(Error::Dimension(format!("parameter {t} has {} inputs", slice.len())));
            }
            for (x, row) in slice.iter().enumerate() {
                if row.len() != n_labels {
                    return Err(Error::Dimension(format!("row ({t}, {x}) has {} labels", row.len())));
                }
                if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(Error::Input(format!("row ({t}, {x}) has entries outside [0, 1]")));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_TOLERANCE {
                    return Err(Error::Input(format!("row ({t}, {x}) sums to {sum}")));
                }
                flat.extend_from_slice(row);
            }
        }
        Ok(TabularModel {
            params,
            n_inputs,
            n_labels,
            table: flat,
            input_class: (0..n_inputs).collect(),
        })
    }

    /// Binary labels with `success[θ][x] = P(y = 1 | θ, x)`.
    pub fn binary(params: ParameterSet, success: Vec<Vec<f64>>) -> Result<Self> {
        let table = success
            .into_iter()
            .map(|per_input| per_input.into_iter().map(|p| vec![1.0 - p, p]).collect())
            .collect();
        TabularModel::new(params, table)
    }

    /// Softmax classifiers over `classes` labels with one input per class.
    ///
    /// Parameter 0 (`truth`) puts logit `sharpness` on the input's own class.
    /// Each confusion `(a, b)` adds a parameter identical to `truth` except
    /// that inputs of class `a` are labelled as `b`.
    pub fn softmax_classifier(classes: usize, sharpness: f64, confusions: &[(usize, usize)]) -> Result<Self> {
        if classes < 2 {
            return Err(Error::Input("softmax classifier needs at least two classes".into()));
        }
        if !(sharpness.is_finite() && sharpness > 0.0) {
            return Err(Error::Input(format!("sharpness {sharpness} must be positive")));
        }
        let peaked = |peak: usize| -> Vec<f64> {
            let z = sharpness.exp() + (classes - 1) as f64;
            (0..classes)
                .map(|y| if y == peak { sharpness.exp() / z } else { 1.0 / z })
                .collect()
        };
        let mut labels = vec!["truth".to_string()];
        let mut table = vec![(0..classes).map(peaked).collect::<Vec<_>>()];
        for &(a, b) in confusions {
            if a >= classes || b >= classes || a == b {
                return Err(Error::Input(format!("invalid confusion ({a}, {b})")));
            }
            labels.push(format!("confuse-{a}-as-{b}"));
            table.push((0..classes).map(|x| peaked(if x == a { b } else { x })).collect());
        }
        TabularModel::new(ParameterSet::new(labels)?, table)
    }

    pub fn with_input_classes(mut self, input_class: Vec<usize>) -> Result<Self> {
        if input_class.len() != self.n_inputs {
            return Err(Error::Dimension(format!(
                "{} class tags for {} inputs",
                input_class.len(),
                self.n_inputs
            )));
        }
        self.input_class = input_class;
        Ok(self)
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn input_class(&self, x: usize) -> usize {
        self.input_class[x]
    }

    pub fn input_classes(&self) -> &[usize] {
        &self.input_class
    }

    pub fn row(&self, theta: usize, x: usize) -> &[f64] {
        let start = (theta * self.n_inputs + x) * self.n_labels;
        &self.table[start..start + self.n_labels]
    }

    pub fn min_entry(&self) -> f64 {
        self.table.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.table.iter().copied().fold(0.0, f64::max)
    }

    /// The labeler that generates data when `theta` is the true parameter.
    pub fn labeler(&self, theta: usize) -> TabularLabeler {
        let rows = (0..self.n_inputs).map(|x| self.row(theta, x).to_vec()).collect();
        TabularLabeler::new(rows).expect("model rows are distributions")
    }
}

impl LikelihoodModel for TabularModel {
    type Input = usize;
    type Label = usize;

    fn param_count(&self) -> usize {
        self.params.len()
    }

    fn likelihood(&self, theta: usize, x: &usize, y: &usize) -> f64 {
        self.row(theta, *x)[*y]
    }
}

/// The true conditional label law `P(y | x)` over finite inputs and labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabularLabeler {
    rows: Vec<Vec<f64>>,
}

impl TabularLabeler {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        for (x, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::Input(format!("labeler row {x} is not a distribution")));
            }
        }
        Ok(TabularLabeler { rows })
    }

    pub fn n_inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn sample<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> usize {
        sample_categorical(&self.rows[x], rng)
    }
}

/// Draws an index with probability proportional to `weights`.
pub fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        if u < w {
            return k;
        }
        u -= w;
    }
    // rounding left u just above the last bucket
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// A clamped tabular likelihood paired with the labeler that actually
/// generates data.
#[derive(Clone, Copy, Debug)]
pub struct LabeledTabular<'a> {
    pub likelihood: &'a BoundedLikelihood<TabularModel>,
    pub truth: &'a TabularLabeler,
}

impl CrossEntropy for LabeledTabular<'_> {
    type Input = usize;

    fn param_count(&self) -> usize {
        self.likelihood.model().param_count()
    }

    fn cross_entropy(&self, theta: usize, x: &usize) -> f64 {
        self.truth
            .row(*x)
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(y, &p)| -p * self.likelihood.log_likelihood(theta, x, &y))
            .sum()
    }
}

/// Scalar linear regression `y = θ·φ + η`, `η ~ N(0, σ²)`, with θ restricted
/// to a grid of candidate values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarRegressionGrid {
    grid: Vec<f64>,
    noise_std: f64,
}

impl ScalarRegressionGrid {
    pub fn new(grid: Vec<f64>, noise_std: f64) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::Input("regression grid needs at least two points".into()));
        }
        if !(noise_std > 0.0 && noise_std.is_finite()) {
            return Err(Error::Input(format!("noise_std {noise_std} must be positive")));
        }
        Ok(ScalarRegressionGrid { grid, noise_std })
    }

    /// `n` evenly spaced points on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, n: usize, noise_std: f64) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::Input(format!("bad grid [{lo}, {hi}] with {n} points")));
        }
        let step = (hi - lo) / (n - 1) as f64;
        ScalarRegressionGrid::new((0..n).map(|k| lo + step * k as f64).collect(), noise_std)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// Peak of the Gaussian density; a natural likelihood ceiling.
    pub fn density_peak(&self) -> f64 {
        1.0 / ((2.0 * std::f64::consts::PI).sqrt() * self.noise_std)
    }
}

impl LikelihoodModel for ScalarRegressionGrid {
    type Input = f64;
    type Label = f64;

    fn param_count(&self) -> usize {
        self.grid.len()
    }

    fn likelihood(&self, theta: usize, x: &f64, y: &f64) -> f64 {
        let r = (y - self.grid[theta] * x) / self.noise_std;
        self.density_peak() * (-0.5 * r * r).exp()
    }
}

/// Cross-entropy of a grid regression model against Gaussian labels
/// `y ~ N(θ*·φ, σ_true²)`. The clamp is not applied; it never binds for
/// labels within a few hundred standard deviations.
#[derive(Clone, Copy, Debug)]
pub struct GridRegressionFit<'a> {
    pub model: &'a ScalarRegressionGrid,
    pub theta_star: f64,
    pub true_noise_std: f64,
}

impl CrossEntropy for GridRegressionFit<'_> {
    type Input = f64;

    fn param_count(&self) -> usize {
        self.model.param_count()
    }

    fn cross_entropy(&self, theta: usize, x: &f64) -> f64 {
        let s2 = self.model.noise_std * self.model.noise_std;
        let bias = (self.theta_star - self.model.grid[theta]) * x;
        0.5 * (2.0 * std::f64::consts::PI * s2).ln()
            + (bias * bias + self.true_noise_std * self.true_noise_std) / (2.0 * s2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn softmax_rows_are_distributions() {
        let m = TabularModel::softmax_classifier(4, 2.0, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(m.param_count(), 3);
        assert_eq!(m.params().label(1), "confuse-0-as-1");
        let z = 2f64.exp() + 3.0;
        assert_abs_diff_eq!(m.row(0, 2)[2], 2f64.exp() / z, epsilon = 1e-15);
        // confusion only touches its own class
        assert_eq!(m.row(1, 2), m.row(0, 2));
        assert_abs_diff_eq!(m.row(1, 0)[1], 2f64.exp() / z, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_tables() {
        let p = ParameterSet::indexed(2).unwrap();
        assert!(TabularModel::binary(p.clone(), vec![vec![0.5]]).is_err());
        assert!(TabularModel::new(p.clone(), vec![vec![vec![0.5, 0.6]], vec![vec![0.5, 0.5]]]).is_err());
        assert!(TabularModel::softmax_classifier(3, 1.0, &[(1, 1)]).is_err());
    }

    #[test]
    fn categorical_sampling_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; 3];
        for _ in 0..60_000 {
            counts[sample_categorical(&[0.2, 0.0, 0.8], &mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        assert!((counts[0] as f64 / 60_000.0 - 0.2).abs() < 0.01);
    }

    #[test]
    fn tabular_cross_entropy_matches_hand_value() {
        let p = ParameterSet::indexed(2).unwrap();
        let m = TabularModel::binary(p, vec![vec![0.5], vec![0.7]]).unwrap();
        let lik = BoundedLikelihood::new(m, 0.01, 1.0).unwrap();
        let truth = lik.model().labeler(0);
        let fit = LabeledTabular { likelihood: &lik, truth: &truth };
        let expected = -0.5 * 0.7f64.ln() - 0.5 * 0.3f64.ln();
        assert_abs_diff_eq!(fit.cross_entropy(1, &0), expected, epsilon = 1e-14);
    }

    #[test]
    fn grid_density_is_gaussian() {
        let g = ScalarRegressionGrid::uniform(-1.0, 1.0, 3, 2.0).unwrap();
        assert_eq!(g.grid(), &[-1.0, 0.0, 1.0]);
        let d = g.likelihood(2, &1.0, &3.0);
        let expected = (-0.5f64).exp() / ((2.0 * std::f64::consts::PI).sqrt() * 2.0);
        assert_abs_diff_eq!(d, expected, epsilon = 1e-15);
    }
}
