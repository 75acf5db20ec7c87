//! Singularity and viability diagnostics.
//!
//! A nonnegative network `W` is viable exactly when the spectral radius of
//! `W` is below one; equivalently `det(I - W) > 0` with all leading principal
//! minors positive (Hawkins-Simon), `[I - W]^{-1}` nonnegative, and
//! `W^T -> 0`. [`viability_check`] computes all five indicators so that
//! disagreement is visible instead of assumed away. [`eigen_bounds`] applies
//! the cheaper sufficient conditions obtained by sandwiching the transformed
//! network between `zeta_min A` and `zeta_max A`.
//!
//! The two-sector transcendent network has the closed-form determinant
//! `D = 1 - a21*a12*(z1*z2)^(sigma-1)`; [`singularity_frontier`] solves
//! `D = 0` for the critical product `z1*z2` and [`grid_scan`] rasterizes `D`
//! over a shock grid.

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{Elasticity, ProductionNetwork, ShockVector};

/// Half-width of the indeterminate band around spectral radius 1.
pub const VIABILITY_BAND: f64 = 1e-6;

/// Norm below which the power probe declares `W^T -> 0`.
pub const NEUMANN_TOL: f64 = 1e-12;

/// The power probe squares the matrix up to this many times (final power
/// 2^30). The budget certifies decay throughout the viable band: spectral
/// radius at most `1 - VIABILITY_BAND` drives the norm far below tolerance.
pub const NEUMANN_MAX_SQUARINGS: u32 = 30;

/// Norm above which the power probe stops early: the powers are clearly
/// growing, and further squaring would only overflow.
const NEUMANN_DIVERGED: f64 = 1e50;

/// Minimum relative eigenvalue gap below which the network counts as
/// defective and the eigenvalue bounds refuse to apply.
pub const DEFECT_TOL: f64 = 1e-8;

/// Band half-width for marking grid cells as lying on the `D = 0` locus.
pub const CONTOUR_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Viable,
    NonViable,
    /// Spectral radius within [`VIABILITY_BAND`] of one and determinant not
    /// conclusively nonpositive.
    Indeterminate,
}

/// All five viability indicators for a nonnegative network `W`.
///
/// When `verdict` is `Viable` the indicators agree: positive determinant,
/// positive leading principal minors, spectral radius below one, nonnegative
/// Leontief inverse, and decaying powers.
#[derive(Debug, Clone)]
pub struct ViabilityReport {
    /// det(I - W)
    pub determinant: f64,
    /// Leading principal minors of I - W, sizes 1..=n.
    pub principal_minors: Vec<f64>,
    pub spectral_radius: f64,
    /// Eigenvalues of W.
    pub eigenvalues: Vec<Complex<f64>>,
    /// Whether the probe saw `||W^T||_inf` fall below [`NEUMANN_TOL`].
    pub neumann_converged: bool,
    /// Terminal norm observed by the power probe.
    pub neumann_norm: f64,
    /// Whether `[I - W]^{-1}` exists with no negative entries.
    pub inverse_positive: bool,
    pub verdict: Verdict,
}

fn matrix_inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Repeatedly squares `W` and reports whether the norm decayed below
/// tolerance within the budget, together with the last norm seen.
fn neumann_probe(w: &DMatrix<f64>) -> (bool, f64) {
    let mut b = w.clone();
    let mut norm = matrix_inf_norm(&b);
    for _ in 0..NEUMANN_MAX_SQUARINGS {
        if norm < NEUMANN_TOL {
            return (true, norm);
        }
        if !norm.is_finite() || norm > NEUMANN_DIVERGED {
            return (false, norm);
        }
        b = &b * &b;
        norm = matrix_inf_norm(&b);
    }
    (norm < NEUMANN_TOL, norm)
}

/// Computes determinant, Hawkins-Simon minors, spectral radius, Leontief
/// inverse positivity, and the power-decay probe for a nonnegative matrix.
pub fn viability_check(w: &DMatrix<f64>) -> Result<ViabilityReport> {
    let (rows, cols) = w.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    for j in 0..cols {
        for i in 0..rows {
            let value = w[(i, j)];
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeEntry {
                    row: i,
                    col: j,
                    value,
                });
            }
        }
    }
    let n = rows;

    let eigenvalues: Vec<Complex<f64>> = w.complex_eigenvalues().iter().copied().collect();
    let spectral_radius = eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);

    let i_minus_w = DMatrix::identity(n, n) - w;
    let principal_minors: Vec<f64> = (1..=n)
        .map(|k| i_minus_w.view((0, 0), (k, k)).clone_owned().lu().determinant())
        .collect();
    let determinant = *principal_minors.last().expect("n >= 1");

    let inverse_positive = match i_minus_w.clone().try_inverse() {
        Some(inv) => {
            let scale = 1.0 + inv.amax();
            inv.iter().all(|&v| v >= -1e-12 * scale)
        }
        None => false,
    };

    let (neumann_converged, neumann_norm) = neumann_probe(w);

    let det_eps = 1e-12 * (1.0 + matrix_inf_norm(w));
    let verdict = if spectral_radius > 1.0 + VIABILITY_BAND {
        Verdict::NonViable
    } else if spectral_radius < 1.0 - VIABILITY_BAND {
        Verdict::Viable
    } else if determinant <= det_eps {
        // On the band a vanishing determinant is conclusive: I - W is not
        // invertible, no positive solution exists.
        Verdict::NonViable
    } else {
        Verdict::Indeterminate
    };

    Ok(ViabilityReport {
        determinant,
        principal_minors,
        spectral_radius,
        eigenvalues,
        neumann_converged,
        neumann_norm,
        inverse_positive,
        verdict,
    })
}

/// Viability of the reference network `A` itself.
///
/// A validated network has strictly positive labor shares, so its column sums
/// fall strictly below one and viability is provable; a `NonViable` verdict
/// here indicates an internal inconsistency rather than a property of the
/// input.
pub fn reference_viability(net: &ProductionNetwork) -> ViabilityReport {
    let report =
        viability_check(net.share_matrix()).expect("validated share matrix is nonnegative");
    debug_assert_ne!(
        report.verdict,
        Verdict::NonViable,
        "validated network reported nonviable: internal inconsistency"
    );
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundClassification {
    /// `zeta_max * |lambda_i| < 1` for every eigenvalue: the transformed
    /// network is viable.
    GuaranteedViable,
    /// `zeta_min * |lambda_i| > 1` for every eigenvalue: viability is
    /// violated.
    GuaranteedNonViable,
    /// Neither sufficient condition applies; fall back to
    /// [`viability_check`] on the transformed network.
    Indeterminate,
}

/// Outcome of the eigenvalue sandwich test on the transformed network.
#[derive(Debug, Clone)]
pub struct EigenBoundVerdict {
    pub zeta_max: f64,
    pub zeta_min: f64,
    /// `zeta_max * max_i |lambda_i|`
    pub bound_low: f64,
    /// `zeta_min * min_i |lambda_i|`
    pub bound_high: f64,
    pub classification: BoundClassification,
}

/// Applies the sufficient viability/violation bounds built from the reference
/// network's eigenvalues and the extreme transcendent shocks.
///
/// Requires a nondefective reference network (distinct eigenvalues); repeated
/// eigenvalues yield [`Error::DefectiveNetwork`] rather than a guessed
/// generalization.
pub fn eigen_bounds(
    net: &ProductionNetwork,
    z: &ShockVector,
    sigma: &Elasticity,
) -> Result<EigenBoundVerdict> {
    if sigma.is_neutral() {
        return Err(Error::NeutralRegime);
    }
    if z.len() != net.n() {
        return Err(Error::ShockLength {
            expected: net.n(),
            got: z.len(),
        });
    }
    let zeta = z.transcendent(sigma)?;
    let eigenvalues = net.share_matrix().complex_eigenvalues();
    let n = net.n();
    let rho = eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
    if n > 1 {
        let mut min_gap = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                min_gap = min_gap.min((eigenvalues[i] - eigenvalues[j]).norm());
            }
        }
        if rho == 0.0 || min_gap <= DEFECT_TOL * rho {
            return Err(Error::DefectiveNetwork { min_gap });
        }
    }

    let zeta_max = zeta.max();
    let zeta_min = zeta.min();
    let max_mod = rho;
    let min_mod = eigenvalues
        .iter()
        .map(|l| l.norm())
        .fold(f64::INFINITY, f64::min);
    let bound_low = zeta_max * max_mod;
    let bound_high = zeta_min * min_mod;
    let classification = if bound_low < 1.0 {
        BoundClassification::GuaranteedViable
    } else if bound_high > 1.0 {
        BoundClassification::GuaranteedNonViable
    } else {
        BoundClassification::Indeterminate
    };
    Ok(EigenBoundVerdict {
        zeta_max,
        zeta_min,
        bound_low,
        bound_high,
        classification,
    })
}

/// Two-sector nonsingularity determinant
/// `D = 1 - alpha_prod * (z1*z2)^(sigma-1)` with `alpha_prod = a21*a12`.
pub fn two_sector_determinant(alpha_prod: f64, sigma: &Elasticity, z1: f64, z2: f64) -> f64 {
    debug_assert!(alpha_prod > 0.0 && alpha_prod < 1.0);
    debug_assert!(z1 > 0.0 && z2 > 0.0);
    1.0 - alpha_prod * (z1 * z2).powf(sigma.sigma() - 1.0)
}

/// The critical product `z1*z2 = alpha_prod^(1/(1-sigma))` on the `D = 0`
/// locus. Below one for inelastic networks (a joint productivity decrease
/// reaches it), above one for elastic networks.
pub fn singularity_frontier(alpha_prod: f64, sigma: &Elasticity) -> Result<f64> {
    if sigma.is_neutral() {
        return Err(Error::NeutralRegime);
    }
    debug_assert!(alpha_prod > 0.0 && alpha_prod < 1.0);
    Ok(alpha_prod.powf(1.0 / sigma.exponent()))
}

/// Rasterized determinant values over a shock grid.
///
/// Storage is z2-major: `d[iz2 * resolution + iz1]` is the cell at
/// `(z1[iz1], z2[iz2])`. Sign is -1, 0, or +1, with cells within
/// [`CONTOUR_EPS`] of zero marked 0 (the `D = 0` locus).
#[derive(Debug, Clone)]
pub struct GridScan {
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub d: Vec<f64>,
    pub sign: Vec<i8>,
    pub frontier_product: f64,
}

impl GridScan {
    pub fn resolution(&self) -> usize {
        self.z1.len()
    }

    pub fn at(&self, iz1: usize, iz2: usize) -> (f64, i8) {
        let idx = iz2 * self.z1.len() + iz1;
        (self.d[idx], self.sign[idx])
    }
}

fn linspace(range: (f64, f64), resolution: usize) -> Vec<f64> {
    let (lo, hi) = range;
    let step = (hi - lo) / (resolution as f64 - 1.0);
    (0..resolution).map(|i| lo + step * i as f64).collect()
}

/// Evaluates the two-sector determinant over a regular grid of shocks.
/// Rows (fixed z2) are evaluated in parallel; output ordering is
/// deterministic.
pub fn grid_scan(
    alpha_prod: f64,
    sigma: &Elasticity,
    z1_range: (f64, f64),
    z2_range: (f64, f64),
    resolution: usize,
) -> Result<GridScan> {
    if sigma.is_neutral() {
        return Err(Error::NeutralRegime);
    }
    assert!(resolution >= 2, "grid resolution must be at least 2");
    assert!(
        z1_range.0 > 0.0 && z1_range.1 > z1_range.0,
        "z1 range must be positive and increasing"
    );
    assert!(
        z2_range.0 > 0.0 && z2_range.1 > z2_range.0,
        "z2 range must be positive and increasing"
    );
    let frontier_product = singularity_frontier(alpha_prod, sigma)?;
    let z1 = linspace(z1_range, resolution);
    let z2 = linspace(z2_range, resolution);

    let mut d = vec![0.0f64; resolution * resolution];
    d.par_chunks_mut(resolution)
        .zip(z2.par_iter())
        .for_each(|(row, &z2v)| {
            for (iz1, slot) in row.iter_mut().enumerate() {
                *slot = two_sector_determinant(alpha_prod, sigma, z1[iz1], z2v);
            }
        });
    let sign = d
        .iter()
        .map(|&v| {
            if v.abs() <= CONTOUR_EPS {
                0
            } else if v < 0.0 {
                -1
            } else {
                1
            }
        })
        .collect();

    Ok(GridScan {
        z1,
        z2,
        d,
        sign,
        frontier_product,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    fn symmetric_a() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0])
    }

    fn symmetric_net() -> ProductionNetwork {
        ProductionNetwork::new(
            symmetric_a(),
            DVector::from_vec(vec![0.5, 0.5]),
            DVector::from_vec(vec![0.5, 0.5]),
        )
        .unwrap()
    }

    #[test]
    fn viable_symmetric_reference() {
        let report = viability_check(&symmetric_a()).unwrap();
        assert_relative_eq!(report.spectral_radius, 0.5, epsilon = 1e-12);
        assert_relative_eq!(report.determinant, 0.75, epsilon = 1e-12);
        assert!(report.inverse_positive);
        assert!(report.neumann_converged);
        assert_eq!(report.verdict, Verdict::Viable);
        assert!(report.principal_minors.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn frontier_matrix_is_nonviable() {
        // <(2,2)>A = [[0,1],[1,0]]: eigenvalues +-1, det(I - W) = 0 exactly.
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let report = viability_check(&w).unwrap();
        assert_relative_eq!(report.spectral_radius, 1.0, epsilon = 1e-10);
        assert!(report.determinant.abs() < 1e-12);
        assert_eq!(report.verdict, Verdict::NonViable);
    }

    #[test]
    fn zero_matrix_is_viable_with_identity_inverse() {
        let w = DMatrix::zeros(3, 3);
        let report = viability_check(&w).unwrap();
        assert_eq!(report.spectral_radius, 0.0);
        assert!(report.inverse_positive);
        assert!(report.neumann_converged);
        assert_eq!(report.verdict, Verdict::Viable);
    }

    #[test]
    fn rejects_negative_and_nonsquare() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, -0.1, 0.5, 0.0]);
        assert!(matches!(
            viability_check(&w),
            Err(Error::NegativeEntry { .. })
        ));
        let w = DMatrix::from_row_slice(1, 2, &[0.0, 0.1]);
        assert!(matches!(viability_check(&w), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn reference_viability_hand_inverse() {
        // [I-A]^{-1} = [[4/3, 2/3], [2/3, 4/3]] > 0.
        let report = reference_viability(&symmetric_net());
        assert_eq!(report.verdict, Verdict::Viable);
        let scalar = ProductionNetwork::new(
            DMatrix::from_row_slice(1, 1, &[0.5]),
            DVector::from_vec(vec![0.5]),
            DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        let report = reference_viability(&scalar);
        assert_eq!(report.verdict, Verdict::Viable);
        assert_relative_eq!(report.determinant, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn eigen_bound_classifications() {
        let net = symmetric_net();
        // |lambda| = 0.5 both; zeta = z (sigma = 2).
        let sigma = Elasticity::new(2.0).unwrap();

        let z = ShockVector::new(vec![1.9, 1.9]).unwrap();
        let v = eigen_bounds(&net, &z, &sigma).unwrap();
        assert_relative_eq!(v.bound_low, 0.95, epsilon = 1e-12);
        assert_eq!(v.classification, BoundClassification::GuaranteedViable);

        let z = ShockVector::new(vec![2.1, 2.1]).unwrap();
        let v = eigen_bounds(&net, &z, &sigma).unwrap();
        assert_relative_eq!(v.bound_high, 1.05, epsilon = 1e-12);
        assert_eq!(v.classification, BoundClassification::GuaranteedNonViable);

        let z = ShockVector::new(vec![0.5, 3.0]).unwrap();
        let v = eigen_bounds(&net, &z, &sigma).unwrap();
        assert_eq!(v.classification, BoundClassification::Indeterminate);
    }

    #[test]
    fn defective_network_refused() {
        // Uniform shares give a rank-one A with a repeated zero eigenvalue.
        let n = 3;
        let a = DMatrix::from_element(n, n, 0.3);
        let net = ProductionNetwork::new(
            a,
            DVector::from_element(n, 0.1),
            DVector::from_element(n, 1.0 / 3.0),
        )
        .unwrap();
        let sigma = Elasticity::new(2.0).unwrap();
        let z = ShockVector::reference(n);
        assert!(matches!(
            eigen_bounds(&net, &z, &sigma),
            Err(Error::DefectiveNetwork { .. })
        ));
    }

    #[test]
    fn two_sector_determinant_paper_panels() {
        let inelastic = Elasticity::new(0.9).unwrap();
        assert_relative_eq!(
            two_sector_determinant(0.8, &inelastic, 1.0, 1.0),
            0.2,
            epsilon = 1e-12
        );
        let elastic = Elasticity::new(2.0).unwrap();
        assert_relative_eq!(
            two_sector_determinant(0.25, &elastic, 2.0, 2.0),
            0.0,
            epsilon = 1e-12
        );
        let mid = Elasticity::new(1.5).unwrap();
        assert_relative_eq!(
            two_sector_determinant(0.6, &mid, 1.0, 1.0),
            0.4,
            epsilon = 1e-12
        );
    }

    #[test]
    fn frontier_values() {
        let inelastic = Elasticity::new(0.9).unwrap();
        assert_relative_eq!(
            singularity_frontier(0.8, &inelastic).unwrap(),
            0.8f64.powi(10),
            max_relative = 1e-12
        );
        let elastic = Elasticity::new(1.5).unwrap();
        assert_relative_eq!(
            singularity_frontier(0.6, &elastic).unwrap(),
            0.6f64.powi(-2),
            max_relative = 1e-12
        );
        let sigma2 = Elasticity::new(2.0).unwrap();
        assert_relative_eq!(
            singularity_frontier(0.25, &sigma2).unwrap(),
            4.0,
            max_relative = 1e-12
        );
        let neutral = Elasticity::new(1.0).unwrap();
        assert!(matches!(
            singularity_frontier(0.5, &neutral),
            Err(Error::NeutralRegime)
        ));
    }

    #[test]
    fn grid_signs_split_along_frontier() {
        // Inelastic panel: D > 0 exactly where z1*z2 exceeds the critical
        // product; elastic panel mirrors it.
        let inelastic = Elasticity::new(0.9).unwrap();
        let grid = grid_scan(0.8, &inelastic, (0.01, 3.0), (0.01, 3.0), 50).unwrap();
        let critical = grid.frontier_product;
        for (iz2, &z2) in grid.z2.iter().enumerate() {
            for (iz1, &z1) in grid.z1.iter().enumerate() {
                let (d, sign) = grid.at(iz1, iz2);
                if sign == 0 {
                    assert!(d.abs() <= CONTOUR_EPS);
                    continue;
                }
                assert_eq!(sign > 0, z1 * z2 > critical, "cell ({z1}, {z2})");
            }
        }

        let elastic = Elasticity::new(1.5).unwrap();
        let grid = grid_scan(0.6, &elastic, (0.01, 3.0), (0.01, 3.0), 50).unwrap();
        let critical = grid.frontier_product;
        for (iz2, &z2) in grid.z2.iter().enumerate() {
            for (iz1, &z1) in grid.z1.iter().enumerate() {
                let (d, sign) = grid.at(iz1, iz2);
                if sign == 0 {
                    assert!(d.abs() <= CONTOUR_EPS);
                    continue;
                }
                assert_eq!(sign > 0, z1 * z2 < critical, "cell ({z1}, {z2})");
            }
        }
    }

    #[test]
    fn grid_reference_cell_positive() {
        for (alpha_prod, sigma) in [(0.8, 0.9), (0.6, 1.5)] {
            let sigma = Elasticity::new(sigma).unwrap();
            let grid = grid_scan(alpha_prod, &sigma, (0.5, 1.5), (0.5, 1.5), 3).unwrap();
            // midpoint of both axes is exactly (1, 1)
            let (d, sign) = grid.at(1, 1);
            assert!(d > 0.0);
            assert_eq!(sign, 1);
        }
    }
}
