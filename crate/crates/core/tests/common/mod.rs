//! Shared random-instance generators for the property and acceptance suites.

#![allow(dead_code)]

use domarnet::{ProductionNetwork, ShockVector};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random validated network: each column draws a labor share of at least
/// `alpha0_floor` and splits the remainder across inputs by normalized
/// exponential weights (a Dirichlet draw over the column simplex).
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, alpha0_floor: f64) -> ProductionNetwork {
    let mut a = DMatrix::zeros(n, n);
    let mut alpha0 = DVector::zeros(n);
    for j in 0..n {
        let hi = (alpha0_floor + 0.35).min(0.9);
        let a0 = rng.random_range(alpha0_floor..hi);
        let weights: Vec<f64> = (0..n)
            .map(|_| -(rng.random::<f64>().max(1e-12)).ln())
            .collect();
        let total: f64 = weights.iter().sum();
        for i in 0..n {
            a[(i, j)] = (1.0 - a0) * weights[i] / total;
        }
        // absorb rounding so the column sums are exact to the last ulp
        alpha0[j] = 1.0 - a.column(j).sum();
    }
    let kappa = random_simplex(rng, n);
    ProductionNetwork::new(a, alpha0, kappa).expect("generated network is valid")
}

/// Random point on the n-simplex.
pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    let weights: Vec<f64> = (0..n)
        .map(|_| -(rng.random::<f64>().max(1e-12)).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    DVector::from_vec(weights.into_iter().map(|w| w / total).collect())
}

/// Shocks drawn uniformly from `[lo, hi]` per sector.
pub fn random_shocks(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> ShockVector {
    ShockVector::new((0..n).map(|_| rng.random_range(lo..hi)).collect::<Vec<_>>())
        .expect("positive draws")
}

/// Spectral radius of a dense matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|l| l.norm())
        .fold(0.0, f64::max)
}

/// Two-sector network without self-inputs: `a21 = 1 - alpha01`,
/// `a12 = 1 - alpha02`, expenditure split `(kappa1, 1 - kappa1)`.
pub fn two_sector(alpha01: f64, alpha02: f64, kappa1: f64) -> ProductionNetwork {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0 - alpha02, 1.0 - alpha01, 0.0]);
    ProductionNetwork::new(
        a,
        DVector::from_vec(vec![alpha01, alpha02]),
        DVector::from_vec(vec![kappa1, 1.0 - kappa1]),
    )
    .expect("two-sector shares are valid")
}

/// Random nonnegative matrix rescaled to an exact target spectral radius.
pub fn random_matrix_with_radius(rng: &mut ChaCha8Rng, n: usize, target_rho: f64) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(0.01..1.0));
        let rho = spectral_radius(&m);
        if rho > 1e-8 {
            return m * (target_rho / rho);
        }
    }
}

/// Uniform transcendent shocks scaled so that the transformed network
/// `A<zeta>` hits the requested spectral radius exactly.
pub fn zeta_for_target_radius(net: &ProductionNetwork, target_rho: f64) -> DVector<f64> {
    let rho_a = spectral_radius(net.share_matrix());
    DVector::from_element(net.n(), target_rho / rho_a)
}
