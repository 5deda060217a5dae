//! Gaussian beliefs for Bayesian linear regression.
//!
//! Beliefs are stored in (mean, precision) form. The conjugate update adds
//! `φφᵀ/α²` to the precision, and log-linear pooling of Gaussians is a convex
//! combination of precisions with a precision-weighted mean, so neither step
//! needs a covariance inverse.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::belief::check_weights;
use crate::error::{Error, Result};

pub const MAX_DIMENSION: usize = 64;
const SYMMETRY_TOLERANCE: f64 = 1e-10;
const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianSnapshot", into = "GaussianSnapshot")]
pub struct GaussianBelief {
    mean: DVector<f64>,
    precision: DMatrix<f64>,
}

/// JSON form `{mean: [...], precision: [[...]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSnapshot {
    pub mean: Vec<f64>,
    pub precision: Vec<Vec<f64>>,
}

impl TryFrom<GaussianSnapshot> for GaussianBelief {
    type Error = Error;
    fn try_from(s: GaussianSnapshot) -> Result<Self> {
        let d = s.mean.len();
        if s.precision.len() != d || s.precision.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension(format!("precision is not {d}x{d}")));
        }
        let flat: Vec<f64> = s.precision.into_iter().flatten().collect();
        GaussianBelief::new(DVector::from_vec(s.mean), DMatrix::from_row_slice(d, d, &flat))
    }
}

impl From<GaussianBelief> for GaussianSnapshot {
    fn from(b: GaussianBelief) -> Self {
        b.snapshot()
    }
}

/// Cholesky factor of an SPD matrix, refusing badly conditioned inputs.
pub(crate) fn spd_factor(m: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numeric("matrix is not positive definite".into()))?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    // squared ratio of Cholesky pivots: a cheap lower estimate of cond(m)
    let cond = (hi / lo).powi(2);
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::Numeric(format!("condition number estimate {cond:e} exceeds {MAX_CONDITION:e}")));
    }
    Ok(chol)
}

impl GaussianBelief {
    pub fn new(mean: DVector<f64>, precision: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::Input("zero-dimensional Gaussian".into()));
        }
        if d > MAX_DIMENSION {
            return Err(Error::Capability(format!("dimension {d} exceeds {MAX_DIMENSION}")));
        }
        if precision.nrows() != d || precision.ncols() != d {
            return Err(Error::Dimension(format!(
                "mean has dimension {d} but precision is {}x{}",
                precision.nrows(),
                precision.ncols()
            )));
        }
        if mean.iter().chain(precision.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Input("Gaussian parameters must be finite".into()));
        }
        for i in 0..d {
            for j in 0..i {
                if (precision[(i, j)] - precision[(j, i)]).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::Input(format!("precision is not symmetric at ({i}, {j})")));
                }
            }
        }
        spd_factor(&precision)?;
        Ok(GaussianBelief { mean, precision })
    }

    /// `N(mean, diag(variances))`.
    pub fn diagonal(mean: Vec<f64>, variances: &[f64]) -> Result<Self> {
        if mean.len() != variances.len() {
            return Err(Error::Dimension("mean and variance lengths differ".into()));
        }
        if variances.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Input("variances must be positive".into()));
        }
        let precision = DMatrix::from_diagonal(&DVector::from_iterator(
            variances.len(),
            variances.iter().map(|v| 1.0 / v),
        ));
        GaussianBelief::new(DVector::from_vec(mean), precision)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// Inverse precision. Goes through LU rather than the Cholesky factor so
    /// that coordinates decoupled from the rest invert without a square-root
    /// rounding (a prior variance of 0.5 stays exactly 0.5).
    pub fn covariance(&self) -> Result<DMatrix<f64>> {
        spd_factor(&self.precision)?;
        let inv = self
            .precision
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Numeric("precision matrix is singular".into()))?;
        Ok((&inv + inv.transpose()) * 0.5)
    }

    pub fn snapshot(&self) -> GaussianSnapshot {
        GaussianSnapshot {
            mean: self.mean.iter().copied().collect(),
            precision: self
                .precision
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        }
    }

    /// Builds a belief from precision `P` and information vector `h = P μ`.
    fn from_information(precision: DMatrix<f64>, information: DVector<f64>) -> Result<Self> {
        let chol = spd_factor(&precision)?;
        let mean = chol.solve(&information);
        Ok(GaussianBelief { mean, precision })
    }
}

/// One labelled regression sample: features `φ(x)`, label `y`, noise std `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionObservation {
    pub features: Vec<f64>,
    pub label: f64,
    pub noise_std: f64,
}

impl RegressionObservation {
    pub fn new(features: Vec<f64>, label: f64, noise_std: f64) -> Result<Self> {
        let obs = RegressionObservation {
            features,
            label,
            noise_std,
        };
        obs.check()?;
        Ok(obs)
    }

    fn check(&self) -> Result<()> {
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return Err(Error::Input(format!("noise_std {} must be positive", self.noise_std)));
        }
        if !self.label.is_finite() || self.features.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("observation has non-finite features or label".into()));
        }
        Ok(())
    }
}

/// Exact Gaussian posterior under a Gaussian likelihood with known noise.
pub fn conjugate_update(prior: &GaussianBelief, batch: &[RegressionObservation]) -> Result<GaussianBelief> {
    let Some(first) = batch.first() else {
        return Err(Error::Input("empty regression batch".into()));
    };
    let d = prior.dim();
    let noise = first.noise_std;
    let mut precision = prior.precision.clone();
    let mut information = &prior.precision * &prior.mean;
    for obs in batch {
        obs.check()?;
        if obs.features.len() != d {
            return Err(Error::Dimension(format!(
                "observation has {} features, belief has dimension {d}",
                obs.features.len()
            )));
        }
        if obs.noise_std != noise {
            return Err(Error::Input("observations in one batch must share noise_std".into()));
        }
        let scale = 1.0 / (noise * noise);
        let phi = &obs.features;
        for i in 0..d {
            if phi[i] == 0.0 {
                continue;
            }
            information[i] += scale * obs.label * phi[i];
            for j in 0..d {
                precision[(i, j)] += scale * phi[i] * phi[j];
            }
        }
    }
    GaussianBelief::from_information(precision, information)
}

/// Log-linear pooling of Gaussians: `P = ∑ w_j P_j`, `P μ = ∑ w_j P_j μ_j`.
pub fn gaussian_consensus(beliefs: &[&GaussianBelief], weights: &[f64]) -> Result<GaussianBelief> {
    check_weights(beliefs.len(), weights)?;
    let d = beliefs[0].dim();
    if let Some(b) = beliefs.iter().find(|b| b.dim() != d) {
        return Err(Error::Dimension(format!("beliefs of dimension {} and {d}", b.dim())));
    }
    if beliefs.len() == 1 {
        return Ok(beliefs[0].clone());
    }
    let mut precision = DMatrix::zeros(d, d);
    let mut information = DVector::zeros(d);
    for (b, &w) in beliefs.iter().zip(weights) {
        precision += &b.precision * w;
        information += (&b.precision * &b.mean) * w;
    }
    GaussianBelief::from_information(precision, information)
}

/// `KL(p ‖ q)` in nats.
pub fn gaussian_kl(p: &GaussianBelief, q: &GaussianBelief) -> Result<f64> {
    let d = p.dim();
    if q.dim() != d {
        return Err(Error::Dimension(format!("KL between dimensions {d} and {}", q.dim())));
    }
    let chol_p = spd_factor(&p.precision)?;
    let chol_q = spd_factor(&q.precision)?;
    let cov_p = chol_p.inverse();
    let trace = (&q.precision * &cov_p).trace();
    let diff = &q.mean - &p.mean;
    let quad = diff.dot(&(&q.precision * &diff));
    let ln_det_p = 2.0 * chol_p.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    let ln_det_q = 2.0 * chol_q.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    // ln det Σ_q − ln det Σ_p = ln det P_p − ln det P_q
    let kl = 0.5 * (trace + quad - d as f64 + ln_det_p - ln_det_q);
    Ok(kl.max(0.0))
}

/// Mean squared error of the posterior-mean prediction `μᵀφ`.
pub fn predictive_mse(belief: &GaussianBelief, test_set: &[RegressionObservation]) -> Result<f64> {
    if test_set.is_empty() {
        return Err(Error::Input("empty test set".into()));
    }
    let mut total = 0.0;
    for obs in test_set {
        if obs.features.len() != belief.dim() {
            return Err(Error::Dimension("test feature dimension mismatch".into()));
        }
        let pred: f64 = belief.mean.iter().zip(&obs.features).map(|(m, x)| m * x).sum();
        total += (obs.label - pred).powi(2);
    }
    Ok(total / test_set.len() as f64)
}

/// Sufficient statistics of a test set, so the MSE of any mean is `O(d²)`.
#[derive(Clone, Debug)]
pub struct MseMoments {
    second: DMatrix<f64>,
    cross: DVector<f64>,
    label_sq: f64,
}

impl MseMoments {
    pub fn new(test_set: &[RegressionObservation]) -> Result<Self> {
        let Some(first) = test_set.first() else {
            return Err(Error::Input("empty test set".into()));
        };
        let d = first.features.len();
        let mut second = DMatrix::zeros(d, d);
        let mut cross = DVector::zeros(d);
        let mut label_sq = 0.0;
        for obs in test_set {
            let phi = DVector::from_column_slice(&obs.features);
            second += &phi * phi.transpose();
            cross += &phi * obs.label;
            label_sq += obs.label * obs.label;
        }
        let n = test_set.len() as f64;
        Ok(MseMoments {
            second: second / n,
            cross: cross / n,
            label_sq: label_sq / n,
        })
    }

    pub fn mse(&self, belief: &GaussianBelief) -> f64 {
        let m = &belief.mean;
        (self.label_sq - 2.0 * m.dot(&self.cross) + m.dot(&(&self.second * m))).max(0.0)
    }
}

/// Variational free energy `KL(q ‖ prior) − E_q[log ℓ(Y | θ, X)]` of a
/// Gaussian candidate `q` for a regression batch. Its minimizer over all
/// Gaussians is the conjugate posterior.
pub fn free_energy(
    q: &GaussianBelief,
    prior: &GaussianBelief,
    batch: &[RegressionObservation],
) -> Result<f64> {
    let mut energy = gaussian_kl(q, prior)?;
    let cov = q.covariance()?;
    for obs in batch {
        let phi = DVector::from_column_slice(&obs.features);
        let resid = obs.label - q.mean.dot(&phi);
        let spread = phi.dot(&(&cov * &phi));
        let s2 = obs.noise_std * obs.noise_std;
        energy += 0.5 * (2.0 * std::f64::consts::PI * s2).ln() + (resid * resid + spread) / (2.0 * s2);
    }
    Ok(energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn scalar(mean: f64, precision: f64) -> GaussianBelief {
        GaussianBelief::new(DVector::from_element(1, mean), DMatrix::from_element(1, 1, precision)).unwrap()
    }

    #[test]
    fn conjugate_update_scalar_example() {
        let prior = GaussianBelief::diagonal(vec![0.0], &[0.5]).unwrap();
        let obs = RegressionObservation::new(vec![1.0], 1.0, 1.0).unwrap();
        let post = conjugate_update(&prior, &[obs]).unwrap();
        assert_abs_diff_eq!(post.precision()[(0, 0)], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(post.mean()[0], 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_feature_leaves_belief_unchanged() {
        let prior = GaussianBelief::diagonal(vec![0.3, -0.2], &[0.5, 2.0]).unwrap();
        let obs = RegressionObservation::new(vec![0.0, 0.0], 5.0, 0.8).unwrap();
        let post = conjugate_update(&prior, &[obs]).unwrap();
        assert_eq!(post.precision(), prior.precision());
        assert_abs_diff_eq!(post.mean()[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(post.mean()[1], -0.2, epsilon = 1e-15);
    }

    #[test]
    fn conjugate_update_errors() {
        let prior = GaussianBelief::diagonal(vec![0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(conjugate_update(&prior, &[]).is_err());
        let bad = RegressionObservation {
            features: vec![f64::NAN, 0.0],
            label: 1.0,
            noise_std: 1.0,
        };
        assert!(matches!(conjugate_update(&prior, &[bad]), Err(Error::Input(_))));
        let a = RegressionObservation::new(vec![1.0, 0.0], 1.0, 1.0).unwrap();
        let b = RegressionObservation::new(vec![1.0, 0.0], 1.0, 2.0).unwrap();
        assert!(conjugate_update(&prior, &[a.clone(), b]).is_err());
        let short = RegressionObservation::new(vec![1.0], 1.0, 1.0).unwrap();
        assert!(conjugate_update(&prior, &[a, short]).is_err());
    }

    #[test]
    fn consensus_scalar_example() {
        let a = scalar(0.0, 2.0);
        let b = scalar(1.0, 4.0);
        let out = gaussian_consensus(&[&a, &b], &[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(out.precision()[(0, 0)], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.mean()[0], 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn consensus_degenerate_inputs() {
        let a = scalar(0.4, 2.0);
        assert_eq!(gaussian_consensus(&[&a], &[1.0]).unwrap(), a);
        let same = gaussian_consensus(&[&a, &a, &a], &[0.2, 0.3, 0.5]).unwrap();
        assert_abs_diff_eq!(same.mean()[0], 0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(same.precision()[(0, 0)], 2.0, epsilon = 1e-14);
        let b = GaussianBelief::diagonal(vec![0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(gaussian_consensus(&[&a, &b], &[0.5, 0.5]).is_err());
        assert!(gaussian_consensus(&[&a, &a], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn kl_examples() {
        let p = scalar(0.0, 1.0);
        let q = scalar(1.0, 1.0);
        assert_abs_diff_eq!(gaussian_kl(&p, &p).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gaussian_kl(&p, &q).unwrap(), 0.5, epsilon = 1e-14);
        // var 1 vs var 4: 0.5 (1/4 + 0 − 1 + ln 4)
        let r = scalar(0.0, 0.25);
        assert_abs_diff_eq!(gaussian_kl(&p, &r).unwrap(), 0.5 * (0.25 - 1.0 + 4f64.ln()), epsilon = 1e-14);
    }

    #[test]
    fn mse_examples() {
        let truth = GaussianBelief::diagonal(vec![0.5, -1.0], &[1.0, 1.0]).unwrap();
        let test: Vec<_> = [(1.0, 2.0), (-0.5, 0.3)]
            .iter()
            .map(|&(a, b)| RegressionObservation::new(vec![a, b], 0.5 * a - b, 1.0).unwrap())
            .collect();
        assert_abs_diff_eq!(predictive_mse(&truth, &test).unwrap(), 0.0, epsilon = 1e-15);

        let zero = GaussianBelief::diagonal(vec![0.0, 0.0], &[1.0, 1.0]).unwrap();
        let ones: Vec<_> = [(3.0, -2.0), (0.1, 7.0)]
            .iter()
            .map(|&(a, b)| RegressionObservation::new(vec![a, b], 1.0, 1.0).unwrap())
            .collect();
        assert_abs_diff_eq!(predictive_mse(&zero, &ones).unwrap(), 1.0, epsilon = 1e-15);
        assert!(predictive_mse(&zero, &[]).is_err());

        let moments = MseMoments::new(&test).unwrap();
        let other = GaussianBelief::diagonal(vec![0.1, 0.2], &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(moments.mse(&other), predictive_mse(&other, &test).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn rejects_asymmetric_or_indefinite_precision() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(GaussianBelief::new(DVector::zeros(2), m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(GaussianBelief::new(DVector::zeros(2), m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-14]);
        assert!(matches!(GaussianBelief::new(DVector::zeros(2), m), Err(Error::Numeric(_))));
    }

    #[test]
    fn snapshot_json_shape() {
        let b = GaussianBelief::diagonal(vec![1.0, 2.0], &[0.5, 0.25]).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, r#"{"mean":[1.0,2.0],"precision":[[2.0,0.0],[0.0,4.0]]}"#);
        let back: GaussianBelief = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn diagonal_inputs_with_axis_features_stay_diagonal() {
        let prior = GaussianBelief::diagonal(vec![0.0; 3], &[0.5; 3]).unwrap();
        let batch = vec![
            RegressionObservation::new(vec![0.0, 1.3, 0.0], 0.2, 0.8).unwrap(),
            RegressionObservation::new(vec![0.7, 0.0, 0.0], -0.1, 0.8).unwrap(),
        ];
        let post = conjugate_update(&prior, &batch).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(post.precision()[(i, j)], 0.0);
                }
            }
        }
    }

    fn obs_strategy(d: usize) -> impl Strategy<Value = RegressionObservation> {
        (prop::collection::vec(-2.0f64..2.0, d), -3.0f64..3.0)
            .prop_map(|(f, y)| RegressionObservation::new(f, y, 0.8).unwrap())
    }

    proptest! {
        #[test]
        fn update_composes_over_concatenation(
            b1 in prop::collection::vec(obs_strategy(3), 1..6),
            b2 in prop::collection::vec(obs_strategy(3), 1..6),
        ) {
            let prior = GaussianBelief::diagonal(vec![0.1, -0.2, 0.3], &[0.5, 1.0, 2.0]).unwrap();
            let joint: Vec<_> = b1.iter().chain(&b2).cloned().collect();
            let once = conjugate_update(&prior, &joint).unwrap();
            let twice = conjugate_update(&conjugate_update(&prior, &b1).unwrap(), &b2).unwrap();
            prop_assert!((once.mean() - twice.mean()).amax() <= 1e-10);
            prop_assert!((once.precision() - twice.precision()).amax() <= 1e-10);
        }
    }
}
