//! Domar aggregation and shock-synergy analysis.
//!
//! Aggregate output growth is the expenditure-weighted sum of log price
//! declines, `log V = -(log p) . kappa`. Under a neutral elasticity this is
//! linear in the sectoral shocks with weights `[I - A]^{-1} kappa` (the Domar
//! weights); under a nonneutral elasticity the equilibrium network transforms
//! with the shocks and the aggregation is nonlinear, which opens a gap
//! between the joint effect of two shocks and the sum of their individual
//! effects. For an inelastic network the gap is negative, for an elastic one
//! positive.
//!
//! The module also carries the exact elimination of all but two sectors
//! (the `hat` coefficients), which reduces an n-sector synergy question to
//! the two-sector closed forms.

use nalgebra::{DMatrix, DVector};

use crate::equilibrium::{
    solve, solve_transcendent_zeta, EquilibriumSolution, SolutionStatus, SolveOptions,
};
use crate::error::{Error, Result};
use crate::network::{Elasticity, ProductionNetwork, ShockVector};

/// Largest `|log multiplier|` for which the multisector synergy sign is
/// reported as guaranteed; the remaining-sector argument is first-order in
/// the log shocks.
pub const INFINITESIMAL_CAP: f64 = 0.05;

/// Aggregate output growth for one shock configuration.
#[derive(Debug, Clone)]
pub struct DomarResult {
    /// Log real GDP relative to the reference state.
    pub log_v: f64,
    /// Equilibrium log prices behind the aggregate.
    pub log_p: DVector<f64>,
    /// Domar weights `[I - A]^{-1} kappa`; populated on the neutral path and
    /// at the reference shock, where they are the exact linearization.
    pub weights: Option<DVector<f64>>,
}

/// Domar weights `[I - A]^{-1} kappa`.
pub fn hulten_weights(net: &ProductionNetwork) -> DVector<f64> {
    let n = net.n();
    let m = DMatrix::identity(n, n) - net.share_matrix();
    m.lu()
        .solve(net.expenditure_shares())
        .expect("I - A is nonsingular for a validated network")
}

fn log_v_of(solution: &EquilibriumSolution, net: &ProductionNetwork) -> f64 {
    let log_p = solution
        .log_p
        .as_ref()
        .expect("caller checked for finite status");
    -log_p.dot(net.expenditure_shares())
}

/// Aggregate output growth `log V` under shocks `z`.
///
/// Neutral path: linear aggregation with Domar weights. Nonneutral path:
/// transcendent price solve followed by `log V = -(log p) . kappa`, which is
/// the nonlinear aggregation formula evaluated without forming an explicit
/// inverse. Singular networks propagate as [`Error::SingularNetwork`]: the
/// aggregate is undefined there.
pub fn domar_aggregate(
    net: &ProductionNetwork,
    z: &ShockVector,
    sigma: &Elasticity,
    opts: &SolveOptions,
) -> Result<DomarResult> {
    let solution = solve(net, z, sigma, opts)?;
    if solution.status == SolutionStatus::Singular {
        return Err(Error::SingularNetwork {
            determinant: solution.diagnostics.determinant.unwrap_or(f64::NAN),
        });
    }
    let log_v = log_v_of(&solution, net);
    let weights = if sigma.is_neutral() || z.is_reference() {
        Some(hulten_weights(net))
    } else {
        None
    };
    Ok(DomarResult {
        log_v,
        log_p: solution.log_p.expect("nonsingular solution has prices"),
        weights,
    })
}

/// Equilibrium cost shares: the transformed production network `S` plus the
/// labor share row `s0`.
#[derive(Debug, Clone)]
pub struct CostShares {
    /// `s[(i, j)] = a[i][j] * zeta_j * pi_i / pi_j`
    pub s: DMatrix<f64>,
    /// `s0[j] = alpha0_j * zeta_j / pi_j`
    pub labor: DVector<f64>,
}

/// Cost shares at an equilibrium solution. Under a neutral elasticity the
/// network is invariant (`S = A` for every shock); otherwise shares follow
/// the transcendent prices and every column still sums to one.
pub fn cost_shares(
    net: &ProductionNetwork,
    z: &ShockVector,
    sigma: &Elasticity,
    solution: &EquilibriumSolution,
) -> Result<CostShares> {
    if solution.status == SolutionStatus::Singular {
        return Err(Error::SingularSolution);
    }
    if sigma.is_neutral() {
        return Ok(CostShares {
            s: net.share_matrix().clone(),
            labor: net.labor_shares().clone(),
        });
    }
    let pi = solution.pi.as_ref().ok_or(Error::SingularSolution)?;
    let zeta = z.transcendent(sigma)?;
    let n = net.n();
    let a = net.share_matrix();
    let s = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * zeta[j] * pi[i] / pi[j]);
    let labor = DVector::from_fn(n, |j, _| net.labor_shares()[j] * zeta[j] / pi[j]);
    Ok(CostShares { s, labor })
}

/// Physical labor input coefficients `m0_j = alpha0_j z_j^(sigma-1) p_j^sigma`
/// (labor is the numeraire, `p0 = 1`). They equal `alpha0` at the reference
/// state, blow up toward a negative singularity, and vanish toward a positive
/// one.
pub fn labor_coefficients(
    net: &ProductionNetwork,
    z: &ShockVector,
    sigma: &Elasticity,
    solution: &EquilibriumSolution,
) -> Result<DVector<f64>> {
    let p = solution.p.as_ref().ok_or(Error::SingularSolution)?;
    let e = sigma.sigma() - 1.0;
    let s = sigma.sigma();
    Ok(DVector::from_fn(net.n(), |j, _| {
        net.labor_shares()[j] * z.values()[j].powf(e) * p[j].powf(s)
    }))
}

/// Cobb-Douglas household demand `c_i = kappa_i B / p_i`; expenditure adds up
/// to income exactly.
pub fn household_demand(
    net: &ProductionNetwork,
    prices: &DVector<f64>,
    income: f64,
) -> Result<DVector<f64>> {
    assert!(income > 0.0, "household income must be positive");
    if prices.len() != net.n() {
        return Err(Error::DimensionMismatch(format!(
            "price vector has length {}, expected {}",
            prices.len(),
            net.n()
        )));
    }
    for (index, &value) in prices.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::NonpositivePrice { index, value });
        }
    }
    Ok(DVector::from_fn(net.n(), |i, _| {
        net.expenditure_shares()[i] * income / prices[i]
    }))
}

/// Sign of the synergy gap predicted by the elasticity regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictedSign {
    /// Inelastic network with same-direction disjoint shocks.
    Negative,
    /// Neutral elasticity: aggregation is linear, the gap vanishes.
    Zero,
    /// Elastic network with same-direction disjoint shocks.
    Positive,
    /// Premises not met; the gap is still computed but carries no guarantee.
    NotApplicable,
}

/// Joint-versus-individual aggregate outputs for a pair of shocks.
#[derive(Debug, Clone)]
pub struct SynergyReport {
    pub log_v_joint: f64,
    pub log_v_a: f64,
    pub log_v_b: f64,
    /// `log_v_joint - log_v_a - log_v_b`, always computed from the three
    /// solves above.
    pub gap: f64,
    pub predicted_sign: PredictedSign,
    /// Whether every shocked sector deviates from 1 in a common direction.
    pub same_direction: bool,
    /// Whether the two shock vectors touch disjoint sector sets.
    pub disjoint: bool,
}

fn aggregate_named(
    net: &ProductionNetwork,
    z: &ShockVector,
    sigma: &Elasticity,
    opts: &SolveOptions,
    which: &'static str,
) -> Result<f64> {
    match domar_aggregate(net, z, sigma, opts) {
        Ok(result) => Ok(result.log_v),
        Err(Error::SingularNetwork { determinant }) => {
            Err(Error::SingularSynergySolve { which, determinant })
        }
        Err(e) => Err(e),
    }
}

/// Synergy gap between a joint shock `z_a . z_b` (component-wise product)
/// and the two individual shocks.
///
/// The sign prediction applies in the paper setting: disjoint supports and a
/// common direction. Overlapping or mixed-direction shocks still produce a
/// gap, flagged [`PredictedSign::NotApplicable`]. At a neutral elasticity the
/// gap vanishes identically regardless of the shock layout.
pub fn synergy_gap(
    net: &ProductionNetwork,
    z_a: &ShockVector,
    z_b: &ShockVector,
    sigma: &Elasticity,
    opts: &SolveOptions,
) -> Result<SynergyReport> {
    let n = net.n();
    if z_a.len() != n {
        return Err(Error::ShockLength {
            expected: n,
            got: z_a.len(),
        });
    }
    if z_b.len() != n {
        return Err(Error::ShockLength {
            expected: n,
            got: z_b.len(),
        });
    }
    let joint = ShockVector::new(z_a.values().component_mul(z_b.values()))?;

    let log_v_joint = aggregate_named(net, &joint, sigma, opts, "joint")?;
    let log_v_a = aggregate_named(net, z_a, sigma, opts, "first")?;
    let log_v_b = aggregate_named(net, z_b, sigma, opts, "second")?;
    let gap = log_v_joint - log_v_a - log_v_b;

    let shocked: Vec<f64> = z_a
        .values()
        .iter()
        .chain(z_b.values().iter())
        .copied()
        .filter(|&v| v != 1.0)
        .collect();
    let same_direction = !shocked.is_empty()
        && (shocked.iter().all(|&v| v > 1.0) || shocked.iter().all(|&v| v < 1.0));
    let disjoint = (0..n).all(|k| z_a.values()[k] == 1.0 || z_b.values()[k] == 1.0);

    let predicted_sign = if sigma.is_neutral() {
        PredictedSign::Zero
    } else if disjoint && same_direction {
        match sigma.regime() {
            crate::network::Regime::Inelastic => PredictedSign::Negative,
            crate::network::Regime::Elastic => PredictedSign::Positive,
            crate::network::Regime::Neutral => PredictedSign::Zero,
        }
    } else {
        PredictedSign::NotApplicable
    };

    Ok(SynergyReport {
        log_v_joint,
        log_v_a,
        log_v_b,
        gap,
        predicted_sign,
        same_direction,
        disjoint,
    })
}

/// Exact two-sector reduction of an n-sector network.
///
/// With shocks confined to sectors `i` and `j`, the unshocked sectors can be
/// eliminated exactly: `hat_A = A_pp + A_pr [I - A_rr]^{-1} A_rp` and
/// `hat_alpha0 = alpha0_p + alpha0_r [I - A_rr]^{-1} A_rp`, where `p = (i, j)`
/// and `r` the rest. Hat coefficients keep the column normalization, so the
/// pair behaves as a two-sector network with self-loops. Tilde coefficients
/// eliminate the self-loops at the reference state.
#[derive(Debug, Clone)]
pub struct ReducedTwoSector {
    /// Original sector indices `(i, j)` mapped to reduced sectors 1 and 2.
    pub sectors: (usize, usize),
    pub hat_alpha0: [f64; 2],
    /// `hat_a[i][j]` = reduced input `i` into reduced sector `j`.
    pub hat_a: [[f64; 2]; 2],
    /// `hat_alpha0 / (1 - self-loop)` per reduced sector.
    pub tilde_alpha0: [f64; 2],
    /// Cross shares after self-loop elimination: `tilde_cross[0]` multiplies
    /// `pi_2` in sector 1's equation, `tilde_cross[1]` multiplies `pi_1` in
    /// sector 2's equation.
    pub tilde_cross: [f64; 2],
}

impl ReducedTwoSector {
    /// Column sums `hat_alpha0_j + sum_i hat_a[i][j]`; equal to one by the
    /// exactness of the elimination.
    pub fn hat_column_sums(&self) -> [f64; 2] {
        [
            self.hat_alpha0[0] + self.hat_a[0][0] + self.hat_a[1][0],
            self.hat_alpha0[1] + self.hat_a[0][1] + self.hat_a[1][1],
        ]
    }

    /// Solves the reduced system for transcendent multipliers `(delta, eps)`
    /// on the two kept sectors. Reproduces the full solve's `(pi_i, pi_j)`
    /// exactly when the remaining sectors are unshocked.
    pub fn transcendent_prices(&self, delta: f64, eps: f64) -> Result<(f64, f64)> {
        let h = &self.hat_a;
        let a0 = &self.hat_alpha0;
        let m00 = 1.0 - delta * h[0][0];
        let m01 = -delta * h[1][0];
        let m10 = -eps * h[0][1];
        let m11 = 1.0 - eps * h[1][1];
        let determinant = m00 * m11 - m01 * m10;
        let scale = 1.0 + [m00, m01, m10, m11].iter().map(|v| v.abs()).fold(0.0, f64::max);
        if determinant <= 1e-12 * scale {
            return Err(Error::SingularNetwork { determinant });
        }
        let b0 = delta * a0[0];
        let b1 = eps * a0[1];
        let pi1 = (b0 * m11 - m01 * b1) / determinant;
        let pi2 = (m00 * b1 - m10 * b0) / determinant;
        if pi1 <= 0.0 || pi2 <= 0.0 {
            return Err(Error::SingularNetwork { determinant });
        }
        Ok((pi1, pi2))
    }
}

/// Eliminates all sectors except `i` and `j` exactly.
pub fn reduce_to_two_sector(
    net: &ProductionNetwork,
    i: usize,
    j: usize,
) -> Result<ReducedTwoSector> {
    let n = net.n();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    if i == j {
        return Err(Error::DuplicateSector(i));
    }

    let a = net.share_matrix();
    let alpha0 = net.labor_shares();
    let p = [i, j];
    let r: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();

    let a_pp = a.select_rows(p.iter()).select_columns(p.iter());
    let (hat_a_m, hat_alpha0_v) = if r.is_empty() {
        (a_pp, DVector::from_vec(vec![alpha0[i], alpha0[j]]))
    } else {
        let m = r.len();
        let a_pr = a.select_rows(p.iter()).select_columns(r.iter());
        let a_rp = a.select_rows(r.iter()).select_columns(p.iter());
        let a_rr = a.select_rows(r.iter()).select_columns(r.iter());
        let lu = (DMatrix::identity(m, m) - a_rr).lu();
        let determinant = lu.determinant();
        if !determinant.is_finite() || determinant.abs() <= 1e-12 {
            return Err(Error::SubmatrixSingular);
        }
        // X = [I - A_rr]^{-1} A_rp
        let x = lu.solve(&a_rp).ok_or(Error::SubmatrixSingular)?;
        let hat_a_m = a_pp + a_pr * &x;
        let alpha0_r = DVector::from_fn(m, |k, _| alpha0[r[k]]);
        let folded = x.transpose() * alpha0_r;
        let hat_alpha0_v =
            DVector::from_vec(vec![alpha0[i] + folded[0], alpha0[j] + folded[1]]);
        (hat_a_m, hat_alpha0_v)
    };

    let hat_a = [
        [hat_a_m[(0, 0)], hat_a_m[(0, 1)]],
        [hat_a_m[(1, 0)], hat_a_m[(1, 1)]],
    ];
    let hat_alpha0 = [hat_alpha0_v[0], hat_alpha0_v[1]];
    let tilde_alpha0 = [
        hat_alpha0[0] / (1.0 - hat_a[0][0]),
        hat_alpha0[1] / (1.0 - hat_a[1][1]),
    ];
    let tilde_cross = [
        hat_a[1][0] / (1.0 - hat_a[0][0]),
        hat_a[0][1] / (1.0 - hat_a[1][1]),
    ];

    Ok(ReducedTwoSector {
        sectors: (i, j),
        hat_alpha0,
        hat_a,
        tilde_alpha0,
        tilde_cross,
    })
}

/// Per-sector superadditivity margins for transcendent multipliers on two
/// sectors.
#[derive(Debug, Clone)]
pub struct MultisectorSynergyReport {
    /// `log pi_k(delta,eps) - log pi_k(delta,1) - log pi_k(1,eps)` per sector.
    pub margins: DVector<f64>,
    /// Aggregate synergy gap from the same three solves.
    pub gap: f64,
    /// Both multipliers strictly on the same side of 1.
    pub same_direction: bool,
    /// Both `|log multiplier|` within [`INFINITESIMAL_CAP`].
    pub within_cap: bool,
    /// Premises for the sign prediction hold. The margins of the two shocked
    /// sectors are then exactly nonnegative; the remaining sectors follow a
    /// first-order argument, so small violations of order (log shock)^2 can
    /// occur for weakly coupled sectors.
    pub sign_guaranteed: bool,
}

fn check_multiplier(index: usize, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidShock { index, value });
    }
    Ok(())
}

fn solve_zeta_named(
    net: &ProductionNetwork,
    zeta: &DVector<f64>,
    sigma: &Elasticity,
    opts: &SolveOptions,
    which: &'static str,
) -> Result<EquilibriumSolution> {
    let solution = solve_transcendent_zeta(net, zeta, sigma, opts)?;
    if solution.status == SolutionStatus::Singular {
        return Err(Error::SingularSynergySolve {
            which,
            determinant: solution.diagnostics.determinant.unwrap_or(f64::NAN),
        });
    }
    Ok(solution)
}

/// Checks log-price superadditivity sector by sector when transcendent
/// multipliers `delta`, `eps` hit sectors `i` and `j`.
///
/// For the two shocked sectors the margin is nonnegative for any
/// same-direction pair: eliminating the other sectors reduces them to an
/// exact two-sector system. For the remaining sectors the superadditivity
/// argument is first-order in the log multipliers, so it is reported as
/// guaranteed only within [`INFINITESIMAL_CAP`] and can still be violated at
/// second order by weakly coupled sectors.
pub fn synergy_multisector_check(
    net: &ProductionNetwork,
    i: usize,
    j: usize,
    delta: f64,
    eps: f64,
    sigma: &Elasticity,
    opts: &SolveOptions,
) -> Result<MultisectorSynergyReport> {
    let n = net.n();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    if i == j {
        return Err(Error::DuplicateSector(i));
    }
    if sigma.is_neutral() {
        return Err(Error::NeutralRegime);
    }
    check_multiplier(i, delta)?;
    check_multiplier(j, eps)?;

    let mut zeta_joint = DVector::from_element(n, 1.0);
    zeta_joint[i] = delta;
    zeta_joint[j] = eps;
    let mut zeta_a = DVector::from_element(n, 1.0);
    zeta_a[i] = delta;
    let mut zeta_b = DVector::from_element(n, 1.0);
    zeta_b[j] = eps;

    let joint = solve_zeta_named(net, &zeta_joint, sigma, opts, "joint")?;
    let only_a = solve_zeta_named(net, &zeta_a, sigma, opts, "first")?;
    let only_b = solve_zeta_named(net, &zeta_b, sigma, opts, "second")?;

    let pi_joint = joint.pi.as_ref().expect("finite solution");
    let pi_a = only_a.pi.as_ref().expect("finite solution");
    let pi_b = only_b.pi.as_ref().expect("finite solution");
    let margins = DVector::from_fn(n, |k, _| {
        pi_joint[k].ln() - pi_a[k].ln() - pi_b[k].ln()
    });
    let gap = log_v_of(&joint, net) - log_v_of(&only_a, net) - log_v_of(&only_b, net);

    let same_direction = (delta - 1.0) * (eps - 1.0) > 0.0;
    let within_cap = delta.ln().abs() <= INFINITESIMAL_CAP && eps.ln().abs() <= INFINITESIMAL_CAP;
    Ok(MultisectorSynergyReport {
        margins,
        gap,
        same_direction,
        within_cap,
        sign_guaranteed: same_direction && within_cap,
    })
}

/// One composed step of the integration chain.
#[derive(Debug, Clone, Copy)]
pub struct IntegrationStep {
    pub delta: f64,
    pub eps: f64,
    /// `log V` at the multipliers composed up to this step.
    pub joint_log_v: f64,
    /// Running sum of the individual per-step aggregates.
    pub individual_sum: f64,
}

/// Outcome of composing a path of per-step multipliers.
#[derive(Debug, Clone)]
pub struct IntegrationReport {
    pub steps: Vec<IntegrationStep>,
    /// `log V` at the fully composed multipliers.
    pub joint_log_v: f64,
    /// Sum of `log V(delta_t, 1) + log V(1, eps_t)` over all steps.
    pub individual_sum: f64,
    /// All path multipliers weakly on one side of 1.
    pub same_side: bool,
    /// Ordering of `joint_log_v` against `individual_sum` at 1e-12 slack.
    pub relation: std::cmp::Ordering,
}

/// Composes a path of per-step transcendent multipliers on sectors `i`, `j`
/// and compares the aggregate at the composed shock against the sum of the
/// per-step individual aggregates. For an elastic network the joint aggregate
/// exceeds the sum; for an inelastic one it falls short. A singular crossing
/// reports the step index at which the composed shock left the viable region.
pub fn synergy_integration_check(
    net: &ProductionNetwork,
    i: usize,
    j: usize,
    sigma: &Elasticity,
    path: &[(f64, f64)],
    opts: &SolveOptions,
) -> Result<IntegrationReport> {
    let n = net.n();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    if i == j {
        return Err(Error::DuplicateSector(i));
    }
    if sigma.is_neutral() {
        return Err(Error::NeutralRegime);
    }
    for &(delta, eps) in path {
        check_multiplier(i, delta)?;
        check_multiplier(j, eps)?;
    }

    let log_v_at = |zi: f64, zj: f64, step: usize| -> Result<f64> {
        let mut zeta = DVector::from_element(n, 1.0);
        zeta[i] = zi;
        zeta[j] = zj;
        let solution = solve_transcendent_zeta(net, &zeta, sigma, opts)?;
        if solution.status == SolutionStatus::Singular {
            return Err(Error::SingularAtStep {
                step,
                determinant: solution.diagnostics.determinant.unwrap_or(f64::NAN),
            });
        }
        Ok(log_v_of(&solution, net))
    };

    let mut steps = Vec::with_capacity(path.len());
    let mut cum_delta = 1.0;
    let mut cum_eps = 1.0;
    let mut individual_sum = 0.0;
    let mut joint_log_v = 0.0;
    for (t, &(delta, eps)) in path.iter().enumerate() {
        cum_delta *= delta;
        cum_eps *= eps;
        individual_sum += log_v_at(delta, 1.0, t)? + log_v_at(1.0, eps, t)?;
        joint_log_v = log_v_at(cum_delta, cum_eps, t)?;
        steps.push(IntegrationStep {
            delta,
            eps,
            joint_log_v,
            individual_sum,
        });
    }

    let all_multipliers = path.iter().flat_map(|&(d, e)| [d, e]);
    let same_side = path.iter().all(|&(d, e)| d >= 1.0 && e >= 1.0)
        || all_multipliers.clone().all(|m| m <= 1.0);
    let relation = if (joint_log_v - individual_sum).abs() <= 1e-12 {
        std::cmp::Ordering::Equal
    } else if joint_log_v < individual_sum {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    };

    Ok(IntegrationReport {
        steps,
        joint_log_v,
        individual_sum,
        same_side,
        relation,
    })
}
