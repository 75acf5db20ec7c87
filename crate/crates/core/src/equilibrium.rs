//! General-equilibrium price solvers.
//!
//! Zero profit under CES technology with universal elasticity `sigma != 1`
//! makes the price system linear in transcendent variables: with
//! `pi_j = p_j^(1-sigma)` and `zeta_j = z_j^(sigma-1)`,
//!
//! ```text
//! pi_j = zeta_j * (alpha0_j + sum_i a[i][j] * pi_i)
//! ```
//!
//! i.e. `pi = alpha0<zeta> + pi * A<zeta>` in row-vector form. The direct
//! solver factorizes `(I - A<zeta>)^T` by LU with partial pivoting, which
//! yields the determinant needed for singularity detection for free. At
//! `sigma = 1` the system is linear in logs instead and is always solvable
//! for a validated network. A fixed-point iteration of the same affine map
//! serves as an independent oracle and as a divergence probe: in transcendent
//! variables the map contracts exactly when the spectral radius of `A<zeta>`
//! is below one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::network::{Elasticity, ProductionNetwork, ShockVector};

/// Residual above which a solution is demoted to [`SolutionStatus::NumericallyIll`].
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Window of trailing step norms used to classify an exhausted iteration.
const STALL_WINDOW: usize = 16;

/// Estimated contraction ratio at or above this value means the iteration is
/// not contracting: the instance is treated as singular rather than as a
/// too-small budget.
const STALL_RHO: f64 = 1.0 - 1e-6;

/// Solver selection and numeric knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub method: Method,
    pub fp_max_iter: usize,
    pub fp_tol: f64,
    pub fp_divergence_threshold: f64,
    /// Determinant magnitude below which the network counts as singular.
    /// `None` uses the relative guard `1e-12 * (1 + ||A<zeta>||_inf)`.
    pub det_singular_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// LU solve of the transcendent linear system (production path).
    Direct,
    /// Affine fixed-point iteration (oracle and divergence probe).
    FixedPoint,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::Direct,
            fp_max_iter: 100_000,
            fp_tol: 1e-12,
            fp_divergence_threshold: 1e12,
            det_singular_tol: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionStatus {
    Finite,
    /// Determinant at or below tolerance, nonpositive transcendent price, or
    /// detected divergence. No prices are fabricated.
    Singular,
    /// Prices computed but the zero-profit residual exceeds [`RESIDUAL_TOL`].
    NumericallyIll,
}

/// Numeric evidence attached to a solve.
#[derive(Debug, Clone, Copy, Default)]
pub struct Diagnostics {
    /// det(I - A<zeta>), or det(I - A) on the Cobb-Douglas path.
    pub determinant: Option<f64>,
    /// Infinity norm of the zero-profit residual.
    pub residual: Option<f64>,
    /// Iteration count (fixed-point path only).
    pub iterations: Option<usize>,
}

/// Equilibrium prices relative to the labor numeraire.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    pub status: SolutionStatus,
    /// Transcendent prices `pi = p^(1-sigma)`; absent in the neutral regime
    /// and on singular outcomes.
    pub pi: Option<DVector<f64>>,
    pub log_p: Option<DVector<f64>>,
    pub p: Option<DVector<f64>>,
    pub diagnostics: Diagnostics,
}

impl EquilibriumSolution {
    /// True when prices were produced (finite or numerically-ill status).
    pub fn has_prices(&self) -> bool {
        self.p.is_some()
    }

    fn singular(diagnostics: Diagnostics) -> Self {
        Self {
            status: SolutionStatus::Singular,
            pi: None,
            log_p: None,
            p: None,
            diagnostics,
        }
    }
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_shock_len(net: &ProductionNetwork, len: usize) -> Result<()> {
    if len != net.n() {
        return Err(Error::ShockLength {
            expected: net.n(),
            got: len,
        });
    }
    Ok(())
}

/// Assembles the finite-side solution from transcendent prices.
fn finish_transcendent(
    pi: DVector<f64>,
    sigma: &Elasticity,
    diagnostics: Diagnostics,
) -> EquilibriumSolution {
    let exponent = sigma.exponent();
    let log_p = pi.map(|v| v.ln() / exponent + 0.0); // + 0.0 normalizes -0.0
    let p = log_p.map(f64::exp);
    let status = match diagnostics.residual {
        Some(r) if r < RESIDUAL_TOL => SolutionStatus::Finite,
        _ => SolutionStatus::NumericallyIll,
    };
    EquilibriumSolution {
        status,
        pi: Some(pi),
        log_p: Some(log_p),
        p: Some(p),
        diagnostics,
    }
}

/// Zero-profit residual of transcendent prices: `pi - b - W^T pi` in
/// column form, where `b = alpha0 .* zeta` and `W = A<zeta>`.
fn transcendent_residual(pi: &DVector<f64>, b: &DVector<f64>, wt: &DMatrix<f64>) -> f64 {
    let r = pi - b - wt * pi;
    r.amax()
}

/// Solves the transcendent linear system `pi = alpha0<zeta> + pi A<zeta>`
/// directly for given shocks `z`.
pub fn solve_transcendent(
    net: &ProductionNetwork,
    z: &ShockVector,
    sigma: &Elasticity,
    opts: &SolveOptions,
) -> Result<EquilibriumSolution> {
    check_shock_len(net, z.len())?;
    let zeta = z.transcendent(sigma)?;
    solve_transcendent_zeta(net, &zeta, sigma, opts)
}

/// Same as [`solve_transcendent`] but with the shocks already in transcendent
/// form. Used by the synergy checks, which operate on transcendent
/// multipliers directly.
pub fn solve_transcendent_zeta(
    net: &ProductionNetwork,
    zeta: &DVector<f64>,
    sigma: &Elasticity,
    opts: &SolveOptions,
) -> Result<EquilibriumSolution> {
    if sigma.is_neutral() {
        return Err(Error::NeutralRegime);
    }
    check_shock_len(net, zeta.len())?;
    let n = net.n();
    let w = net.transformed(zeta);
    let det_tol = opts
        .det_singular_tol
        .unwrap_or_else(|| 1e-12 * (1.0 + inf_norm(&w)));

    let wt = w.transpose();
    let m = DMatrix::identity(n, n) - &wt;
    let b = DVector::from_fn(n, |j, _| net.labor_shares()[j] * zeta[j]);

    let lu = m.lu();
    let determinant = lu.determinant();
    let mut diagnostics = Diagnostics {
        determinant: Some(determinant),
        ..Diagnostics::default()
    };
    if !determinant.is_finite() || determinant <= det_tol {
        return Ok(EquilibriumSolution::singular(diagnostics));
    }
    let pi = match lu.solve(&b) {
        Some(pi) => pi,
        None => return Ok(EquilibriumSolution::singular(diagnostics)),
    };
    // Hawkins-Simon: a positive determinant alone does not rule out negative
    // solutions, so positivity is checked explicitly.
    if pi.iter().any(|&v| !v.is_finite() || v <= 0.0) {
        return Ok(EquilibriumSolution::singular(diagnostics));
    }
    diagnostics.residual = Some(transcendent_residual(&pi, &b, &wt));
    Ok(finish_transcendent(pi, sigma, diagnostics))
}

/// Solves the Cobb-Douglas log-linear system `log p (I - A) = -log z`.
///
/// Always finite for a validated network: `I - A` is provably nonsingular
/// there, so an LU failure is a defect rather than a domain error.
pub fn solve_cobb_douglas(net: &ProductionNetwork, z: &ShockVector) -> Result<EquilibriumSolution> {
    check_shock_len(net, z.len())?;
    let n = net.n();
    let at = net.share_matrix().transpose();
    let m = DMatrix::identity(n, n) - &at;
    let log_z = z.values().map(f64::ln);
    let rhs = -&log_z;
    let lu = m.lu();
    let determinant = lu.determinant();
    let log_p = lu
        .solve(&rhs)
        .expect("I - A is nonsingular for a validated network")
        .map(|v| v + 0.0); // + 0.0 normalizes -0.0
    let residual = {
        let r = &log_p - &at * &log_p - &rhs;
        r.amax()
    };
    let p = log_p.map(f64::exp);
    Ok(EquilibriumSolution {
        status: SolutionStatus::Finite,
        pi: None,
        log_p: Some(log_p),
        p: Some(p),
        diagnostics: Diagnostics {
            determinant: Some(determinant),
            residual: Some(residual),
            iterations: None,
        },
    })
}

/// Iterates `pi <- alpha0<zeta> + pi A<zeta>` from zero.
///
/// The iterates are the partial sums of the Neumann series, monotone
/// nondecreasing, so divergence manifests as unbounded growth. Exhausting the
/// budget while the steps still shrink is reported as
/// [`Error::NonConvergence`], never coerced into either outcome.
pub fn solve_fixed_point(
    net: &ProductionNetwork,
    z: &ShockVector,
    sigma: &Elasticity,
    opts: &SolveOptions,
) -> Result<EquilibriumSolution> {
    check_shock_len(net, z.len())?;
    let zeta = z.transcendent(sigma)?;
    solve_fixed_point_zeta(net, &zeta, sigma, opts)
}

/// Fixed-point iteration with shocks already in transcendent form.
pub fn solve_fixed_point_zeta(
    net: &ProductionNetwork,
    zeta: &DVector<f64>,
    sigma: &Elasticity,
    opts: &SolveOptions,
) -> Result<EquilibriumSolution> {
    if sigma.is_neutral() {
        return Err(Error::NeutralRegime);
    }
    check_shock_len(net, zeta.len())?;
    assert!(opts.fp_tol > 0.0, "fp_tol must be positive");
    assert!(opts.fp_max_iter >= 1, "fp_max_iter must be at least 1");
    assert!(
        opts.fp_divergence_threshold > 0.0,
        "fp_divergence_threshold must be positive"
    );

    let n = net.n();
    let w = net.transformed(zeta);
    let wt = w.transpose();
    let b = DVector::from_fn(n, |j, _| net.labor_shares()[j] * zeta[j]);

    let determinant_of = || {
        let m = DMatrix::identity(n, n) - &wt;
        m.lu().determinant()
    };

    let mut pi = DVector::zeros(n);
    let mut steps: Vec<f64> = Vec::with_capacity(STALL_WINDOW);
    for k in 1..=opts.fp_max_iter {
        let next = &b + &wt * &pi;
        let step = (&next - &pi).amax();
        pi = next;

        if pi.iter().any(|v| !v.is_finite()) || pi.amax() > opts.fp_divergence_threshold {
            return Ok(EquilibriumSolution::singular(Diagnostics {
                determinant: Some(determinant_of()),
                residual: None,
                iterations: Some(k),
            }));
        }
        if step < opts.fp_tol {
            if pi.iter().any(|&v| v <= 0.0) {
                return Ok(EquilibriumSolution::singular(Diagnostics {
                    determinant: Some(determinant_of()),
                    residual: None,
                    iterations: Some(k),
                }));
            }
            let diagnostics = Diagnostics {
                determinant: Some(determinant_of()),
                residual: Some(transcendent_residual(&pi, &b, &wt)),
                iterations: Some(k),
            };
            return Ok(finish_transcendent(pi, sigma, diagnostics));
        }
        if steps.len() == STALL_WINDOW {
            steps.remove(0);
        }
        steps.push(step);
    }

    // Budget exhausted: estimate the contraction ratio from the trailing
    // window. A ratio at or above one means the map is not contracting.
    let last_step = *steps.last().unwrap_or(&f64::INFINITY);
    let rho_hat = match (steps.first(), steps.last()) {
        (Some(&first), Some(&last)) if first > 0.0 && steps.len() > 1 => {
            (last / first).powf(1.0 / (steps.len() as f64 - 1.0))
        }
        _ => f64::INFINITY,
    };
    if rho_hat >= STALL_RHO {
        Ok(EquilibriumSolution::singular(Diagnostics {
            determinant: Some(determinant_of()),
            residual: None,
            iterations: Some(opts.fp_max_iter),
        }))
    } else {
        Err(Error::NonConvergence {
            iterations: opts.fp_max_iter,
            last_step,
        })
    }
}

/// Regime dispatcher: neutral elasticities route to the Cobb-Douglas solver,
/// everything else to the method selected in `opts`.
pub fn solve(
    net: &ProductionNetwork,
    z: &ShockVector,
    sigma: &Elasticity,
    opts: &SolveOptions,
) -> Result<EquilibriumSolution> {
    if sigma.is_neutral() {
        solve_cobb_douglas(net, z)
    } else {
        match opts.method {
            Method::Direct => solve_transcendent(net, z, sigma, opts),
            Method::FixedPoint => solve_fixed_point(net, z, sigma, opts),
        }
    }
}
