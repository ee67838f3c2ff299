//! Validated density matrices for one to three spin-1/2s, including the
//! mixed-state families studied as worked examples, generic product states
//! and raw-matrix ingestion.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    hermitian_eigenvalues, kron, matmul, trace, ComplexMatrix, LinalgError, HERMITICITY_TOL,
};

/// Tolerance on trace deviation and eigenvalue negativity for a valid state.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("weights must be non-negative and sum to 1 (sum deviates by {0:.3e})")]
    BadWeights(f64),
    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNormTooLarge(f64),
    #[error("matrix is not Hermitian: deviation {0:.3e} exceeds {1:.3e}")]
    NotHermitian(f64, f64),
    #[error("trace deviates from 1 by {0:.3e}")]
    TraceNotOne(f64),
    #[error("matrix is not positive semidefinite: minimum eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("dimension {dim} does not match 2^{n_spins}")]
    BadDimension { dim: usize, n_spins: usize },
    #[error("n_spins {0} not in 1..=3")]
    BadSpinCount(usize),
    #[error("missing parameter {0} for family {1}")]
    MissingParam(String, &'static str),
    #[error("family {0} requires field {1}")]
    MissingField(&'static str, &'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Hermitian, unit-trace, positive-semidefinite matrix of dimension 2^n.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n_spins: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates all three state invariants and reports the violated one.
    pub fn new(matrix: ComplexMatrix, n_spins: usize) -> Result<Self, StateError> {
        if n_spins == 0 || n_spins > 3 {
            return Err(StateError::BadSpinCount(n_spins));
        }
        if matrix.dim() != 1 << n_spins {
            return Err(StateError::BadDimension {
                dim: matrix.dim(),
                n_spins,
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(StateError::NotHermitian(defect, HERMITICITY_TOL));
        }
        let tr = trace(&matrix);
        let tr_dev = (tr - Complex64::new(1.0, 0.0)).norm();
        if tr_dev > STATE_TOL {
            return Err(StateError::TraceNotOne(tr_dev));
        }
        let eigs = hermitian_eigenvalues(&matrix, HERMITICITY_TOL)?;
        if eigs[0] < -STATE_TOL {
            return Err(StateError::NotPositive(eigs[0]));
        }
        Ok(DensityMatrix { n_spins, matrix })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Tr[rho A].
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<Complex64, StateError> {
        Ok(trace(&matmul(op, &self.matrix)?))
    }

    /// Reduced state over the kept spins.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        let layout = crate::linalg::SubsystemLayout::new(self.n_spins);
        let red = crate::linalg::partial_trace(&self.matrix, layout, keep)?;
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        DensityMatrix::new(red, kept.len())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<(), StateError> {
    if !(lo..=hi).contains(&value) || !value.is_finite() {
        return Err(StateError::ParamOutOfRange { name, value, lo, hi });
    }
    Ok(())
}

/// The four Bell vectors: singlet psi0 then the triplet psi1..psi3, in the
/// basis |++>, |+->, |-+>, |--> with spin 1 most significant.
pub fn bell_basis() -> [Vec<Complex64>; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)],
        vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
        vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-s, 0.0)],
    ]
}

/// (1-x)/4 I + x |psi0><psi0|.
pub fn werner(x: f64) -> Result<DensityMatrix, StateError> {
    check_range("x", x, 0.0, 1.0)?;
    let basis = bell_basis();
    let m = ComplexMatrix::identity(4)
        .scale_re((1.0 - x) / 4.0)
        .add(&ComplexMatrix::outer(&basis[0]).scale_re(x))?;
    DensityMatrix::new(m, 2)
}

/// x |psi0><psi0| + (1-x) |++><++|.
pub fn peres_mix(x: f64) -> Result<DensityMatrix, StateError> {
    check_range("x", x, 0.0, 1.0)?;
    let basis = bell_basis();
    let plus_plus = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let m = ComplexMatrix::outer(&basis[0])
        .scale_re(x)
        .add(&ComplexMatrix::outer(&plus_plus).scale_re(1.0 - x))?;
    DensityMatrix::new(m, 2)
}

/// Convex mixture of the four Bell projectors.
pub fn bell_diagonal(weights: [f64; 4]) -> Result<DensityMatrix, StateError> {
    if weights.iter().any(|&w| w < 0.0) {
        return Err(StateError::BadWeights(f64::NAN));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(StateError::BadWeights(sum - 1.0));
    }
    let basis = bell_basis();
    let mut m = ComplexMatrix::zeros(4);
    for (w, v) in weights.iter().zip(basis.iter()) {
        m = m.add(&ComplexMatrix::outer(v).scale_re(*w))?;
    }
    DensityMatrix::new(m, 2)
}

fn check_alpha_beta(alpha: f64) -> Result<f64, StateError> {
    check_range("alpha", alpha, -1.0, 1.0)?;
    Ok((1.0 - alpha * alpha).sqrt())
}

/// x |psi><psi| + (1-x)/2 (|++><++| + |--><--|) with
/// |psi> = alpha |+-> + beta |-+>, beta = +sqrt(1 - alpha^2).
pub fn gisin(x: f64, alpha: f64) -> Result<DensityMatrix, StateError> {
    check_range("x", x, 0.0, 1.0)?;
    let beta = check_alpha_beta(alpha)?;
    let psi = vec![c(0.0, 0.0), c(alpha, 0.0), c(beta, 0.0), c(0.0, 0.0)];
    let pp = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let mm = vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    let m = ComplexMatrix::outer(&psi)
        .scale_re(x)
        .add(&ComplexMatrix::outer(&pp).scale_re((1.0 - x) / 2.0))?
        .add(&ComplexMatrix::outer(&mm).scale_re((1.0 - x) / 2.0))?;
    DensityMatrix::new(m, 2)
}

/// (1-x) |phi><phi| + x |psi><psi| with |phi> = alpha |++> + beta |-->
/// and |psi> = alpha |+-> + beta |-+>.
pub fn horodecki_mix(x: f64, alpha: f64) -> Result<DensityMatrix, StateError> {
    check_range("x", x, 0.0, 1.0)?;
    let beta = check_alpha_beta(alpha)?;
    let phi = vec![c(alpha, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(beta, 0.0)];
    let psi = vec![c(0.0, 0.0), c(alpha, 0.0), c(beta, 0.0), c(0.0, 0.0)];
    let m = ComplexMatrix::outer(&phi)
        .scale_re(1.0 - x)
        .add(&ComplexMatrix::outer(&psi).scale_re(x))?;
    DensityMatrix::new(m, 2)
}

/// Three-spin state I/8 + (1/6) sum_mu S2_mu S3_mu
/// - (c/4) sum_mu [S1_mu S3_mu + S1_mu S2_mu].
///
/// The valid range of the parameter is not hard-coded; the constructor
/// checks positivity numerically and reports the failure margin.
pub fn toth_acin(cpar: f64) -> Result<DensityMatrix, StateError> {
    let mut m = ComplexMatrix::identity(8).scale_re(1.0 / 8.0);
    let paulis = [
        crate::spin::pauli_x().scale_re(0.5),
        crate::spin::pauli_y().scale_re(0.5),
        crate::spin::pauli_z().scale_re(0.5),
    ];
    for p in &paulis {
        let s1 = crate::spin::embed(p, 1, 3).expect("site in range");
        let s2 = crate::spin::embed(p, 2, 3).expect("site in range");
        let s3 = crate::spin::embed(p, 3, 3).expect("site in range");
        m = m.add(&matmul(&s2, &s3)?.scale_re(1.0 / 6.0))?;
        m = m.sub(&matmul(&s1, &s3)?.add(&matmul(&s1, &s2)?)?.scale_re(cpar / 4.0))?;
    }
    DensityMatrix::new(m, 3)
}

/// Tensor product of single-spin states (I + r . sigma)/2.
pub fn product_state(bloch: &[[f64; 3]]) -> Result<DensityMatrix, StateError> {
    if bloch.is_empty() || bloch.len() > 3 {
        return Err(StateError::BadSpinCount(bloch.len()));
    }
    let mut m = ComplexMatrix::identity(1);
    for r in bloch {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(StateError::BlochNormTooLarge(norm));
        }
        let single = ComplexMatrix::from_rows(&[
            vec![c((1.0 + r[2]) / 2.0, 0.0), c(r[0] / 2.0, -r[1] / 2.0)],
            vec![c(r[0] / 2.0, r[1] / 2.0), c((1.0 - r[2]) / 2.0, 0.0)],
        ]);
        m = kron(&m, &single);
    }
    DensityMatrix::new(m, bloch.len())
}

/// Validates a raw entry grid as a density matrix.
pub fn from_raw(entries: &[Vec<[f64; 2]>], n_spins: usize) -> Result<DensityMatrix, StateError> {
    let dim = entries.len();
    if n_spins == 0 || n_spins > 3 || dim != 1 << n_spins {
        return Err(StateError::BadDimension { dim, n_spins });
    }
    let rows: Vec<Vec<Complex64>> = entries
        .iter()
        .map(|row| row.iter().map(|&[re, im]| c(re, im)).collect())
        .collect();
    for row in &rows {
        if row.len() != dim {
            return Err(StateError::BadDimension { dim: row.len(), n_spins });
        }
    }
    DensityMatrix::new(ComplexMatrix::from_rows(&rows), n_spins)
}

/// Named state family for declarative construction (CLI input, scans).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Werner,
    PeresMix,
    BellDiagonal,
    Gisin,
    HorodeckiMix,
    TothAcin,
    Product,
    Raw,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::PeresMix => "peres_mix",
            Family::BellDiagonal => "bell_diagonal",
            Family::Gisin => "gisin",
            Family::HorodeckiMix => "horodecki_mix",
            Family::TothAcin => "toth_acin",
            Family::Product => "product",
            Family::Raw => "raw",
        }
    }
}

/// Declarative state specification: a family plus its named parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_spins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

impl StateSpec {
    pub fn family(family: Family) -> Self {
        StateSpec {
            family,
            params: BTreeMap::new(),
            bloch: None,
            n_spins: None,
            matrix: None,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    fn param(&self, name: &str) -> Result<f64, StateError> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| StateError::MissingParam(name.to_string(), self.family.name()))
    }

    pub fn build(&self) -> Result<DensityMatrix, StateError> {
        match self.family {
            Family::Werner => werner(self.param("x")?),
            Family::PeresMix => peres_mix(self.param("x")?),
            Family::BellDiagonal => bell_diagonal([
                self.param("x0")?,
                self.param("x1")?,
                self.param("x2")?,
                self.param("x3")?,
            ]),
            Family::Gisin => gisin(self.param("x")?, self.param("alpha")?),
            Family::HorodeckiMix => horodecki_mix(self.param("x")?, self.param("alpha")?),
            Family::TothAcin => toth_acin(self.param("c")?),
            Family::Product => {
                let bloch = self
                    .bloch
                    .as_ref()
                    .ok_or(StateError::MissingField("product", "bloch"))?;
                product_state(bloch)
            }
            Family::Raw => {
                let entries = self
                    .matrix
                    .as_ref()
                    .ok_or(StateError::MissingField("raw", "matrix"))?;
                let n = self
                    .n_spins
                    .ok_or(StateError::MissingField("raw", "n_spins"))?;
                from_raw(entries, n)
            }
        }
    }
}
