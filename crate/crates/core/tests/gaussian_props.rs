use agora::gaussian::{conjugate_update, free_energy, gaussian_kl, GaussianBelief, RegressionObservation};
use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_belief(d: usize, rng: &mut ChaCha8Rng) -> GaussianBelief {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let p = a.transpose() * &a + DMatrix::identity(d, d);
    GaussianBelief::new(DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0)), p).unwrap()
}

fn batch(d: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<RegressionObservation> {
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y = x.iter().sum::<f64>() * 0.3 + rng.random_range(-0.5..0.5);
            RegressionObservation::new(x, y, 0.7).unwrap()
        })
        .collect()
}

#[test]
fn posterior_minimizes_free_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let d = rng.random_range(1..=4);
        let prior = random_belief(d, &mut rng);
        let data = batch(d, 8, &mut rng);
        let post = conjugate_update(&prior, &data).unwrap();
        let best = free_energy(&post, &prior, &data).unwrap();
        for _ in 0..10 {
            let shift = DVector::from_fn(d, |_, _| rng.random_range(-0.1..0.1));
            let e = DMatrix::from_fn(d, d, |_, _| rng.random_range(-0.05..0.05));
            let p = post.precision() + (&e + e.transpose()) * 0.5;
            let Ok(q) = GaussianBelief::new(post.mean() + shift, p) else { continue };
            assert!(free_energy(&q, &prior, &data).unwrap() > best);
        }
    }
}

#[test]
fn kl_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [1, 2, 3] {
        let p = random_belief(d, &mut rng);
        let q = random_belief(d, &mut rng);
        let log_density = |b: &GaussianBelief, x: &DVector<f64>| {
            let r = x - b.mean();
            let chol = b.precision().clone().cholesky().unwrap();
            let logdet: f64 = chol.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
            0.5 * logdet - 0.5 * r.dot(&(b.precision() * &r)) - 0.5 * d as f64 * (2.0 * std::f64::consts::PI).ln()
        };
        let l = p.covariance().unwrap().cholesky().unwrap().l();
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
            let x = p.mean() + &l * z;
            let v = log_density(&p, &x) - log_density(&q, &x);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n as f64;
        let se = ((sum_sq / n as f64 - mean * mean) / n as f64).sqrt();
        let exact = gaussian_kl(&p, &q).unwrap();
        assert!((mean - exact).abs() < 4.0 * se, "d={d}: mc {mean} ± {se}, exact {exact}");
    }
}

#[test]
fn kl_of_self_is_zero_and_positive_otherwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let d = rng.random_range(1..=6);
        let p = random_belief(d, &mut rng);
        let q = random_belief(d, &mut rng);
        assert_relative_eq!(gaussian_kl(&p, &p).unwrap(), 0.0, epsilon = 1e-10);
        assert!(gaussian_kl(&p, &q).unwrap() > 0.0);
    }
}
