//! Random-instance suites for the viability diagnostics and the two-sector
//! singularity frontier.

mod common;

use domarnet::{
    reference_viability, singularity_frontier, solve_transcendent, viability_check, Elasticity,
    ShockVector, SolutionStatus, SolveOptions, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The executable face of the viability equivalence: spectral radius,
/// Leontief-inverse positivity, power decay, and Hawkins-Simon minors give
/// one verdict on either side of radius one.
#[test]
fn viability_indicators_agree_on_both_sides() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..200 {
        let n = 2 + (trial % 7);
        let target = rng.random_range(0.1..0.92);
        let w = common::random_matrix_with_radius(&mut rng, n, target);
        let report = viability_check(&w).unwrap();
        assert_eq!(report.verdict, Verdict::Viable, "trial {trial}");
        assert!(report.determinant > 0.0);
        assert!(report.principal_minors.iter().all(|&m| m > 0.0));
        assert!(report.spectral_radius < 1.0);
        assert!(report.inverse_positive);
        assert!(report.neumann_converged);
    }
    for trial in 0..200 {
        let n = 2 + (trial % 7);
        let target = rng.random_range(1.08..3.0);
        let w = common::random_matrix_with_radius(&mut rng, n, target);
        let report = viability_check(&w).unwrap();
        assert_eq!(report.verdict, Verdict::NonViable, "trial {trial}");
        assert!(report.spectral_radius > 1.0);
        assert!(!report.inverse_positive, "trial {trial}");
        assert!(!report.neumann_converged);
        assert!(
            report.principal_minors.iter().any(|&m| m <= 0.0),
            "trial {trial}: minors {:?}",
            report.principal_minors
        );
    }
}

/// Validated networks have every eigenvalue strictly inside the unit circle
/// and pass the reference viability check.
#[test]
fn validated_networks_have_subunit_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for trial in 0..100 {
        let n = 1 + (trial % 10);
        let net = common::random_network(&mut rng, n, 0.15);
        let report = reference_viability(&net);
        assert!(
            report.spectral_radius < 1.0,
            "trial {trial}: rho = {}",
            report.spectral_radius
        );
        assert_eq!(report.verdict, Verdict::Viable);
        assert!(report
            .eigenvalues
            .iter()
            .all(|l| l.norm() < 1.0));
    }
}

struct Panel {
    alpha_prod: f64,
    sigma: f64,
}

const PANELS: [Panel; 3] = [
    Panel {
        alpha_prod: 0.8,
        sigma: 0.9,
    },
    Panel {
        alpha_prod: 0.6,
        sigma: 1.5,
    },
    Panel {
        alpha_prod: 0.25,
        sigma: 2.0,
    },
];

fn panel_net(alpha_prod: f64) -> domarnet::ProductionNetwork {
    // symmetric split: a21 = a12 = sqrt(alpha_prod)
    let share = alpha_prod.sqrt();
    common::two_sector(1.0 - share, 1.0 - share, 0.5)
}

/// Just inside the frontier the solve stays finite with exploding
/// transcendent prices; just outside it flags singular.
#[test]
fn frontier_consistency() {
    let opts = SolveOptions::default();
    for panel in &PANELS {
        let sigma = Elasticity::new(panel.sigma).unwrap();
        let critical = singularity_frontier(panel.alpha_prod, &sigma).unwrap();
        let net = panel_net(panel.alpha_prod);
        // D > 0 requires the product above critical for sigma < 1, below for
        // sigma > 1.
        let (finite_product, singular_product) = if panel.sigma < 1.0 {
            (1.001 * critical, 0.999 * critical)
        } else {
            (0.999 * critical, 1.001 * critical)
        };

        let z = finite_product.sqrt();
        let sol = solve_transcendent(
            &net,
            &ShockVector::new(vec![z, z]).unwrap(),
            &sigma,
            &opts,
        )
        .unwrap();
        assert_eq!(sol.status, SolutionStatus::Finite, "panel {}", panel.sigma);
        let pi_norm = sol.pi.as_ref().unwrap().amax();
        assert!(pi_norm > 50.0, "pi should blow up near the frontier, got {pi_norm}");

        let z = singular_product.sqrt();
        let sol = solve_transcendent(
            &net,
            &ShockVector::new(vec![z, z]).unwrap(),
            &sigma,
            &opts,
        )
        .unwrap();
        assert_eq!(sol.status, SolutionStatus::Singular, "panel {}", panel.sigma);
    }
}

/// Ten-point path toward the frontier: inelastic networks with shrinking
/// productivity drive prices and labor coefficients up monotonically;
/// elastic networks with growing productivity drive both toward zero.
#[test]
fn singular_limits_are_monotone_along_frontier_paths() {
    let opts = SolveOptions::default();

    // sigma < 1, z < 1: min p and m0 increase without bound.
    let sigma = Elasticity::new(0.9).unwrap();
    let net = panel_net(0.8);
    let critical = singularity_frontier(0.8, &sigma).unwrap();
    let mut last_min_p = 0.0;
    let mut last_min_m0 = 0.0;
    for k in 0..10 {
        // products decreasing toward the critical value from above
        let product = critical * (1.25 - 0.023 * k as f64);
        let z = product.sqrt();
        assert!(z < 1.0);
        let shock = ShockVector::new(vec![z, z]).unwrap();
        let sol = solve_transcendent(&net, &shock, &sigma, &opts).unwrap();
        assert_eq!(sol.status, SolutionStatus::Finite);
        let min_p = sol.p.as_ref().unwrap().min();
        let m0 = domarnet::labor_coefficients(&net, &shock, &sigma, &sol).unwrap();
        let min_m0 = m0.min();
        assert!(min_p > last_min_p, "step {k}: min p not increasing");
        assert!(min_m0 > last_min_m0, "step {k}: min m0 not increasing");
        last_min_p = min_p;
        last_min_m0 = min_m0;
    }

    // sigma > 1, z > 1: max p and m0 decrease toward zero.
    let sigma = Elasticity::new(1.5).unwrap();
    let net = panel_net(0.6);
    let critical = singularity_frontier(0.6, &sigma).unwrap();
    let mut last_max_p = f64::INFINITY;
    let mut last_max_m0 = f64::INFINITY;
    for k in 0..10 {
        // products increasing toward the critical value from below
        let product = critical * (0.75 + 0.023 * k as f64);
        let z = product.sqrt();
        assert!(z > 1.0);
        let shock = ShockVector::new(vec![z, z]).unwrap();
        let sol = solve_transcendent(&net, &shock, &sigma, &opts).unwrap();
        assert_eq!(sol.status, SolutionStatus::Finite);
        let max_p = sol.p.as_ref().unwrap().max();
        let m0 = domarnet::labor_coefficients(&net, &shock, &sigma, &sol).unwrap();
        let max_m0 = m0.max();
        assert!(max_p < last_max_p, "step {k}: max p not decreasing");
        assert!(max_m0 < last_max_m0, "step {k}: max m0 not decreasing");
        last_max_p = max_p;
        last_max_m0 = max_m0;
    }
}
