//! Domain types for production networks, productivity shocks, and the
//! substitution elasticity.
//!
//! A production network is the economy's fixed parameter set: the matrix `A`
//! of intermediate cost shares (entry `a[i][j]` is the share of commodity `i`
//! in sector `j`'s unit cost, so **columns are producing sectors**), the
//! primary-factor (labor) shares `alpha0`, and the household expenditure
//! shares `kappa`. Zero-profit pricing requires every column of shares to sum
//! to one: `alpha0[j] + sum_i a[i][j] = 1`.
//!
//! All types are immutable after construction and safe to share across
//! threads.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{Error, Result, Violation};

/// Absolute tolerance for the column zero-profit normalization.
pub const COLUMN_SUM_TOL: f64 = 1e-12;

/// Absolute tolerance for the expenditure-share normalization.
pub const KAPPA_SUM_TOL: f64 = 1e-12;

/// Half-width of the neutral band around sigma = 1. Inside it the solver
/// routes to the Cobb-Douglas log-linear system: the transcendence exponent
/// 1/(1-sigma) amplifies rounding error catastrophically near sigma = 1.
pub const SIGMA_NEUTRAL_TOL: f64 = 1e-9;

/// Substitution regime implied by the elasticity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// sigma < 1
    Inelastic,
    /// sigma = 1 within [`SIGMA_NEUTRAL_TOL`] (Cobb-Douglas)
    Neutral,
    /// sigma > 1
    Elastic,
}

/// Universal elasticity of substitution, common to all sectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Elasticity {
    sigma: f64,
    regime: Regime,
}

impl Elasticity {
    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidElasticity(sigma));
        }
        let regime = if (sigma - 1.0).abs() < SIGMA_NEUTRAL_TOL {
            Regime::Neutral
        } else if sigma < 1.0 {
            Regime::Inelastic
        } else {
            Regime::Elastic
        };
        Ok(Self { sigma, regime })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Transcendence exponent `1 - sigma` (prices enter the linear system as
    /// `p^(1-sigma)`).
    pub fn exponent(&self) -> f64 {
        1.0 - self.sigma
    }

    pub fn is_neutral(&self) -> bool {
        self.regime == Regime::Neutral
    }
}

/// Sectoral Hicks-neutral productivity levels, reference value 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockVector {
    z: DVector<f64>,
}

impl ShockVector {
    pub fn new(z: impl Into<DVector<f64>>) -> Result<Self> {
        let z = z.into();
        for (index, &value) in z.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidShock { index, value });
            }
        }
        Ok(Self { z })
    }

    /// The unshocked reference state, z = 1 in every sector.
    pub fn reference(n: usize) -> Self {
        Self {
            z: DVector::from_element(n, 1.0),
        }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.z
    }

    pub fn is_reference(&self) -> bool {
        self.z.iter().all(|&v| v == 1.0)
    }

    /// Transcendent shocks `zeta_j = z_j^(sigma-1)`.
    ///
    /// Undefined in the neutral regime, where the equilibrium system lives in
    /// log variables instead.
    pub fn transcendent(&self, sigma: &Elasticity) -> Result<DVector<f64>> {
        if sigma.is_neutral() {
            return Err(Error::NeutralRegime);
        }
        let e = sigma.sigma() - 1.0;
        Ok(self.z.map(|zj| zj.powf(e)))
    }
}

/// Validation policy for [`ProductionNetwork`] construction.
#[derive(Debug, Clone, Copy, Default)]
pub struct NetworkOptions {
    /// Reject zero intermediate shares (`a[i][j] = 0`). The viability proofs
    /// assume strictly positive shares; with zeros admitted the analysis
    /// module verifies viability numerically instead of assuming it. Off by
    /// default: canonical two-sector examples carry zero self-input shares.
    pub require_strict_positivity: bool,
}

/// On-disk network format: JSON object with keys `n`, `A`, `alpha0`, `kappa`,
/// and optional `names`. `A[i][j]` is the share of input commodity `i` in
/// sector `j`'s unit cost (columns are producing sectors).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    n: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    alpha0: Vec<f64>,
    kappa: Vec<f64>,
    #[serde(default)]
    names: Option<Vec<String>>,
}

/// A validated production network.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductionNetwork {
    n: usize,
    a: DMatrix<f64>,
    alpha0: DVector<f64>,
    kappa: DVector<f64>,
    names: Option<Vec<String>>,
}

impl ProductionNetwork {
    /// Validates and constructs a network under the default options.
    pub fn new(a: DMatrix<f64>, alpha0: DVector<f64>, kappa: DVector<f64>) -> Result<Self> {
        Self::with_options(a, alpha0, kappa, None, NetworkOptions::default())
    }

    /// Validates and constructs a network, rejecting with the full list of
    /// violated invariants if any check fails.
    pub fn with_options(
        a: DMatrix<f64>,
        alpha0: DVector<f64>,
        kappa: DVector<f64>,
        names: Option<Vec<String>>,
        options: NetworkOptions,
    ) -> Result<Self> {
        let n = alpha0.len();
        if n == 0 {
            return Err(Error::DimensionMismatch(
                "network must have at least one sector".into(),
            ));
        }
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, expected {n}x{n}",
                a.nrows(),
                a.ncols()
            )));
        }
        if kappa.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "kappa has length {}, expected {n}",
                kappa.len()
            )));
        }
        if let Some(names) = &names {
            if names.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "names has length {}, expected {n}",
                    names.len()
                )));
            }
        }

        let mut violations = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let value = a[(i, j)];
                if !value.is_finite() {
                    violations.push(Violation::NonFinite {
                        field: "A",
                        row: i,
                        col: j,
                        value,
                    });
                } else if value < 0.0 {
                    violations.push(Violation::NegativeShare {
                        field: "A",
                        row: i,
                        col: j,
                        value,
                    });
                } else if value == 0.0 && options.require_strict_positivity {
                    violations.push(Violation::ZeroShare { row: i, col: j });
                }
            }
        }
        for j in 0..n {
            let value = alpha0[j];
            if !value.is_finite() {
                violations.push(Violation::NonFinite {
                    field: "alpha0",
                    row: j,
                    col: 0,
                    value,
                });
            } else if value <= 0.0 {
                violations.push(Violation::NonpositiveLaborShare { sector: j, value });
            }
        }
        for i in 0..n {
            let value = kappa[i];
            if !value.is_finite() {
                violations.push(Violation::NonFinite {
                    field: "kappa",
                    row: i,
                    col: 0,
                    value,
                });
            } else if value < 0.0 {
                violations.push(Violation::NegativeShare {
                    field: "kappa",
                    row: i,
                    col: 0,
                    value,
                });
            }
        }
        // Column normalization only meaningful once entries are finite.
        if violations.iter().all(|v| !matches!(v, Violation::NonFinite { .. })) {
            for j in 0..n {
                let sum = alpha0[j] + a.column(j).sum();
                let deviation = sum - 1.0;
                if deviation.abs() > COLUMN_SUM_TOL {
                    violations.push(Violation::ColumnSumViolation {
                        sector: j,
                        deviation,
                    });
                }
            }
            let kappa_sum: f64 = kappa.sum();
            if (kappa_sum - 1.0).abs() > KAPPA_SUM_TOL {
                violations.push(Violation::KappaSumViolation { sum: kappa_sum });
            }
        }

        if !violations.is_empty() {
            return Err(Error::InvalidNetwork { violations });
        }
        Ok(Self {
            n,
            a,
            alpha0,
            kappa,
            names,
        })
    }

    /// Parses and validates a network from its JSON representation.
    pub fn from_json_str(json: &str, options: NetworkOptions) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(json)?;
        let n = file.n;
        if file.a.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows, expected n = {n}",
                file.a.len()
            )));
        }
        for (i, row) in file.a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "A row {i} has {} entries, expected n = {n}",
                    row.len()
                )));
            }
        }
        if file.alpha0.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "alpha0 has length {}, expected n = {n}",
                file.alpha0.len()
            )));
        }
        if file.kappa.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "kappa has length {}, expected n = {n}",
                file.kappa.len()
            )));
        }
        let a = DMatrix::from_row_iterator(n, n, file.a.into_iter().flatten());
        Self::with_options(
            a,
            DVector::from_vec(file.alpha0),
            DVector::from_vec(file.kappa),
            file.names,
            options,
        )
    }

    /// Reads and validates a network from a JSON file.
    pub fn from_path(path: impl AsRef<std::path::Path>, options: NetworkOptions) -> Result<Self> {
        let json = std::fs::read_to_string(path)?;
        Self::from_json_str(&json, options)
    }

    /// Number of sectors.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The cost-share matrix `A`; `a[(i, j)]` is input `i` into sector `j`.
    pub fn share_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Labor cost shares `alpha0`.
    pub fn labor_shares(&self) -> &DVector<f64> {
        &self.alpha0
    }

    /// Household expenditure shares `kappa`.
    pub fn expenditure_shares(&self) -> &DVector<f64> {
        &self.kappa
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// The transcendent network `A<zeta>`: sector `j`'s shock scales its own
    /// column, giving entries `a[i][j] * zeta[j]`.
    pub fn transformed(&self, zeta: &DVector<f64>) -> DMatrix<f64> {
        debug_assert_eq!(zeta.len(), self.n);
        let mut w = self.a.clone();
        for (j, mut col) in w.column_iter_mut().enumerate() {
            col *= zeta[j];
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_sector() -> (DMatrix<f64>, DVector<f64>, DVector<f64>) {
        (
            DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]),
            DVector::from_vec(vec![0.5, 0.5]),
            DVector::from_vec(vec![0.5, 0.5]),
        )
    }

    #[test]
    fn accepts_symmetric_two_sector() {
        let (a, alpha0, kappa) = two_sector();
        let net = ProductionNetwork::new(a, alpha0, kappa).unwrap();
        assert_eq!(net.n(), 2);
    }

    #[test]
    fn rejects_bad_column_sum() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.6, 0.0]);
        let alpha0 = DVector::from_vec(vec![0.5, 0.5]);
        let kappa = DVector::from_vec(vec![0.5, 0.5]);
        let err = ProductionNetwork::new(a, alpha0, kappa).unwrap_err();
        match err {
            Error::InvalidNetwork { violations } => {
                assert_eq!(violations.len(), 1);
                match &violations[0] {
                    Violation::ColumnSumViolation { sector, deviation } => {
                        assert_eq!(*sector, 0);
                        assert_relative_eq!(*deviation, 0.1, epsilon = 1e-12);
                    }
                    other => panic!("unexpected violation {other:?}"),
                }
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn accepts_single_sector_self_loop() {
        let net = ProductionNetwork::new(
            DMatrix::from_row_slice(1, 1, &[0.5]),
            DVector::from_vec(vec![0.5]),
            DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        assert_eq!(net.n(), 1);
    }

    #[test]
    fn strict_mode_rejects_zero_shares() {
        let (a, alpha0, kappa) = two_sector();
        let err = ProductionNetwork::with_options(
            a,
            alpha0,
            kappa,
            None,
            NetworkOptions {
                require_strict_positivity: true,
            },
        )
        .unwrap_err();
        match err {
            Error::InvalidNetwork { violations } => {
                assert!(violations
                    .iter()
                    .all(|v| matches!(v, Violation::ZeroShare { .. })));
                assert_eq!(violations.len(), 2);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn collects_every_violation() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, -0.1, 0.0]);
        let alpha0 = DVector::from_vec(vec![0.5, 0.5]);
        let kappa = DVector::from_vec(vec![0.7, 0.5]);
        let err = ProductionNetwork::new(a, alpha0, kappa).unwrap_err();
        match err {
            Error::InvalidNetwork { violations } => {
                assert!(violations
                    .iter()
                    .any(|v| matches!(v, Violation::NegativeShare { .. })));
                assert!(violations
                    .iter()
                    .any(|v| matches!(v, Violation::ColumnSumViolation { .. })));
                assert!(violations
                    .iter()
                    .any(|v| matches!(v, Violation::KappaSumViolation { .. })));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn transcendent_shocks_match_hand_values() {
        let sigma = Elasticity::new(0.5).unwrap();
        let z = ShockVector::new(vec![1.0, 1.0]).unwrap();
        let zeta = z.transcendent(&sigma).unwrap();
        assert_eq!(zeta, DVector::from_vec(vec![1.0, 1.0]));

        let z = ShockVector::new(vec![4.0]).unwrap();
        let zeta = z.transcendent(&sigma).unwrap();
        assert_relative_eq!(zeta[0], 0.5, epsilon = 1e-15);

        let sigma = Elasticity::new(2.0).unwrap();
        let s = std::f64::consts::SQRT_2;
        let z = ShockVector::new(vec![s, s]).unwrap();
        let zeta = z.transcendent(&sigma).unwrap();
        assert_relative_eq!(zeta[0], s, epsilon = 1e-15);
        assert_relative_eq!(zeta[1], s, epsilon = 1e-15);
    }

    #[test]
    fn transcendent_rejected_in_neutral_regime() {
        let sigma = Elasticity::new(1.0).unwrap();
        let z = ShockVector::new(vec![2.0]).unwrap();
        assert!(matches!(
            z.transcendent(&sigma),
            Err(Error::NeutralRegime)
        ));
    }

    #[test]
    fn regime_classification() {
        assert_eq!(Elasticity::new(0.5).unwrap().regime(), Regime::Inelastic);
        assert_eq!(Elasticity::new(1.0).unwrap().regime(), Regime::Neutral);
        assert_eq!(
            Elasticity::new(1.0 + 1e-12).unwrap().regime(),
            Regime::Neutral
        );
        assert_eq!(Elasticity::new(1.5).unwrap().regime(), Regime::Elastic);
        assert!(Elasticity::new(0.0).is_err());
        assert!(Elasticity::new(-1.0).is_err());
        assert!(Elasticity::new(f64::NAN).is_err());
    }

    #[test]
    fn json_round_trip_and_field_errors() {
        let json = r#"{
            "n": 2,
            "A": [[0.0, 0.5], [0.5, 0.0]],
            "alpha0": [0.5, 0.5],
            "kappa": [0.5, 0.5],
            "names": ["steel", "grain"]
        }"#;
        let net = ProductionNetwork::from_json_str(json, NetworkOptions::default()).unwrap();
        assert_eq!(net.names().unwrap()[0], "steel");

        let bad = r#"{"n": 2, "A": [[0.0, 0.5]], "alpha0": [0.5, 0.5], "kappa": [0.5, 0.5]}"#;
        assert!(matches!(
            ProductionNetwork::from_json_str(bad, NetworkOptions::default()),
            Err(Error::DimensionMismatch(_))
        ));

        let unknown = r#"{"n": 1, "A": [[0.5]], "alpha0": [0.5], "kappa": [1.0], "extra": 1}"#;
        assert!(matches!(
            ProductionNetwork::from_json_str(unknown, NetworkOptions::default()),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn transformed_scales_columns() {
        let (a, alpha0, kappa) = two_sector();
        let net = ProductionNetwork::new(a, alpha0, kappa).unwrap();
        let zeta = DVector::from_vec(vec![2.0, 3.0]);
        let w = net.transformed(&zeta);
        // column j scaled by zeta[j]
        assert_eq!(w[(1, 0)], 1.0); // 0.5 * 2
        assert_eq!(w[(0, 1)], 1.5); // 0.5 * 3
    }
}
