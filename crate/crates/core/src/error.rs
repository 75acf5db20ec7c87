//! Error types shared across the crate.

use thiserror::Error;

/// A single invariant violation found while validating raw network data.
///
/// Validation collects every violation it finds instead of stopping at the
/// first one, so a rejected file names all offending fields at once.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// An entry is NaN or infinite.
    NonFinite {
        field: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },
    /// A share parameter is negative.
    NegativeShare {
        field: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },
    /// A labor share must be strictly positive.
    NonpositiveLaborShare { sector: usize, value: f64 },
    /// Strict-positivity mode rejects zero intermediate shares.
    ZeroShare { row: usize, col: usize },
    /// Column `sector` of the cost shares does not sum to one.
    ColumnSumViolation { sector: usize, deviation: f64 },
    /// Expenditure shares do not sum to one.
    KappaSumViolation { sum: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonFinite {
                field,
                row,
                col,
                value,
            } => write!(f, "{field}[{row}][{col}] is not finite ({value})"),
            Violation::NegativeShare {
                field,
                row,
                col,
                value,
            } => write!(f, "{field}[{row}][{col}] is negative ({value})"),
            Violation::NonpositiveLaborShare { sector, value } => {
                write!(f, "alpha0[{sector}] must be strictly positive ({value})")
            }
            Violation::ZeroShare { row, col } => {
                write!(f, "A[{row}][{col}] is zero (strict positivity required)")
            }
            Violation::ColumnSumViolation { sector, deviation } => write!(
                f,
                "column {sector}: alpha0 + input shares deviate from 1 by {deviation:e}"
            ),
            Violation::KappaSumViolation { sum } => {
                write!(f, "kappa sums to {sum}, expected 1")
            }
        }
    }
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid network: {}", join_violations(violations))]
    InvalidNetwork { violations: Vec<Violation> },

    #[error("elasticity of substitution must be positive and finite, got {0}")]
    InvalidElasticity(f64),

    #[error("productivity z[{index}] must be positive and finite, got {value}")]
    InvalidShock { index: usize, value: f64 },

    #[error("shock vector has length {got}, network has {expected} sectors")]
    ShockLength { expected: usize, got: usize },

    #[error("operation undefined in the neutral regime (sigma = 1)")]
    NeutralRegime,

    #[error("transformed network is singular: det(I - A<zeta>) = {determinant:e}")]
    SingularNetwork { determinant: f64 },

    #[error(
        "fixed-point iteration stalled after {iterations} iterations \
         (last step {last_step:e}): neither converged nor provably diverging"
    )]
    NonConvergence { iterations: usize, last_step: f64 },

    #[error("equilibrium solution is singular; requested quantity undefined")]
    SingularSolution,

    #[error("price p[{index}] must be positive, got {value}")]
    NonpositivePrice { index: usize, value: f64 },

    #[error("matrix entry ({row},{col}) must be nonnegative and finite, got {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error(
        "network is defective (repeated eigenvalues, min gap {min_gap:e}); \
         eigenvalue bounds not applicable"
    )]
    DefectiveNetwork { min_gap: f64 },

    #[error("sector index {index} out of range for {n} sectors")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("the two selected sectors must differ, got {0} twice")]
    DuplicateSector(usize),

    #[error("submatrix I - A_rr is singular; cannot eliminate remaining sectors")]
    SubmatrixSingular,

    #[error("{which} solve hit a singular network (det = {determinant:e})")]
    SingularSynergySolve {
        which: &'static str,
        determinant: f64,
    },

    #[error("singular network at path step {step} (det = {determinant:e})")]
    SingularAtStep { step: usize, determinant: f64 },

    #[error("failed to parse network file: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
