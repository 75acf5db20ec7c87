//! CES production-network general equilibrium and Domar aggregation.
//!
//! This crate solves the zero-profit price system of an economy whose sectors
//! share a universal elasticity of substitution `sigma`, aggregates sectoral
//! productivity shocks into output growth, and diagnoses when shocks push the
//! network into singularity:
//!
//! - [`network`] — validated domain types: the cost-share network, shock
//!   vectors, and the elasticity with its regime classification.
//! - [`equilibrium`] — the transcendent linear solver (`sigma != 1`), the
//!   Cobb-Douglas log-linear solver (`sigma = 1`), and a fixed-point
//!   iteration used as an oracle and divergence probe.
//! - [`analysis`] — viability verdicts (determinant, Hawkins-Simon minors,
//!   spectral radius, Leontief-inverse positivity, power decay), eigenvalue
//!   sufficient bounds, and the two-sector singularity frontier.
//! - [`domar`] — Domar weights, linear and nonlinear aggregation, equilibrium
//!   cost shares, labor coefficients, household demand, shock synergy, and
//!   the exact two-sector reduction.
//!
//! # Example
//!
//! ```
//! use domarnet::{Elasticity, ProductionNetwork, ShockVector, SolveOptions};
//! use nalgebra::{DMatrix, DVector};
//!
//! let net = ProductionNetwork::new(
//!     DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]),
//!     DVector::from_vec(vec![0.5, 0.5]),
//!     DVector::from_vec(vec![0.5, 0.5]),
//! )
//! .unwrap();
//! let sigma = Elasticity::new(2.0).unwrap();
//! let z = ShockVector::reference(2);
//! let sol = domarnet::equilibrium::solve(&net, &z, &sigma, &SolveOptions::default()).unwrap();
//! let p = sol.p.unwrap();
//! assert!((p[0] - 1.0).abs() < 1e-12); // reference prices are unity
//! ```

pub mod analysis;
pub mod domar;
pub mod equilibrium;
pub mod error;
pub mod network;

pub use analysis::{
    eigen_bounds, grid_scan, reference_viability, singularity_frontier, two_sector_determinant,
    viability_check, BoundClassification, EigenBoundVerdict, GridScan, Verdict, ViabilityReport,
};
pub use domar::{
    cost_shares, domar_aggregate, household_demand, hulten_weights, labor_coefficients,
    reduce_to_two_sector, synergy_gap, synergy_integration_check, synergy_multisector_check,
    CostShares, DomarResult, IntegrationReport, MultisectorSynergyReport, PredictedSign,
    ReducedTwoSector, SynergyReport,
};
pub use equilibrium::{
    solve, solve_cobb_douglas, solve_fixed_point, solve_fixed_point_zeta, solve_transcendent,
    solve_transcendent_zeta, Diagnostics, EquilibriumSolution, Method, SolutionStatus,
    SolveOptions,
};
pub use error::{Error, Result, Violation};
pub use network::{
    Elasticity, NetworkOptions, ProductionNetwork, Regime, ShockVector, SIGMA_NEUTRAL_TOL,
};
