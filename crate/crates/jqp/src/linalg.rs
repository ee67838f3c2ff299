//! Dense complex matrix kernels for multi-spin operators and states.
//!
//! Everything here is sized for at most three spin-1/2s (dimension 8), so
//! the representation is a plain row-major `Vec<Complex64>` and the
//! eigensolver is a cyclic Jacobi iteration on the real-symmetric embedding
//! of a Hermitian matrix.
//!
//! Tensor index convention: spin 1 occupies the most significant bit of the
//! computational-basis index. All partial operations below rely on this.

use num_complex::Complex64;
use thiserror::Error;

/// Hermiticity tolerance used when none is supplied explicitly.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Off-diagonal norm target for the Jacobi eigensolver.
pub const JACOBI_TOL: f64 = 1e-12;

/// Iteration cap for the Jacobi eigensolver, in full sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian: max deviation {0:.3e} exceeds tolerance {1:.3e}")]
    NotHermitian(f64, f64),
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("spin index {index} out of range for {n_spins} spins")]
    SpinIndexOutOfRange { index: usize, n_spins: usize },
    #[error("partial trace requires a non-empty keep set")]
    EmptyKeepSet,
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from rows of complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "rows must form a square matrix");
            for (j, z) in row.iter().enumerate() {
                m.data[i * dim + j] = *z;
            }
        }
        m
    }

    /// Builds a matrix from real-valued rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// Rank-one projector |v><v| from a state vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.dim + j] = z;
    }

    pub fn check_finite(&self) -> Result<(), LinalgError> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.get(i, j);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(LinalgError::NonFinite(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch(self.dim, other.dim));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMatrix { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch(self.dim, other.dim));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix { dim: self.dim, data })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Largest entrywise deviation between two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Deviation from Hermiticity, max-entry norm.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / 2.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Layout of a register of spin-1/2s: total dimension 2^n_spins, spin 1 in
/// the most significant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsystemLayout {
    pub n_spins: usize,
}

impl SubsystemLayout {
    pub fn new(n_spins: usize) -> Self {
        SubsystemLayout { n_spins }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_spins
    }

    /// Bit position (from the least significant end) of spin `site` (1-based).
    fn bit(&self, site: usize) -> usize {
        self.n_spins - site
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if a.dim != b.dim {
        return Err(LinalgError::DimensionMismatch(a.dim, b.dim));
    }
    let n = a.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a.get(i, k);
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                let v = out.get(i, j) + aik * b.get(k, j);
                out.set(i, j, v);
            }
        }
    }
    Ok(out)
}

/// Kronecker product; the left factor varies slowest (spin 1 leftmost).
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(na * nb);
    for ia in 0..na {
        for ja in 0..na {
            let za = a.get(ia, ja);
            for ib in 0..nb {
                for jb in 0..nb {
                    out.set(ia * nb + ib, ja * nb + jb, za * b.get(ib, jb));
                }
            }
        }
    }
    out
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    (0..a.dim).map(|i| a.get(i, i)).sum()
}

/// Reduced matrix over the kept spins (1-based indices); trace preserved.
pub fn partial_trace(
    rho: &ComplexMatrix,
    layout: SubsystemLayout,
    keep: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    if keep.is_empty() {
        return Err(LinalgError::EmptyKeepSet);
    }
    for &site in keep {
        if site == 0 || site > layout.n_spins {
            return Err(LinalgError::SpinIndexOutOfRange {
                index: site,
                n_spins: layout.n_spins,
            });
        }
    }
    debug_assert_eq!(rho.dim, layout.dim());
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (1..=layout.n_spins).filter(|s| !kept.contains(s)).collect();

    let k = kept.len();
    let m = traced.len();
    // Assembles a full index from kept-bit pattern `kp` and traced-bit pattern `tp`.
    let full_index = |kp: usize, tp: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &site) in kept.iter().enumerate() {
            let bit = (kp >> (k - 1 - pos)) & 1;
            idx |= bit << layout.bit(site);
        }
        for (pos, &site) in traced.iter().enumerate() {
            let bit = (tp >> (m - 1 - pos)) & 1;
            idx |= bit << layout.bit(site);
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(1 << k);
    for r in 0..(1 << k) {
        for c in 0..(1 << k) {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..(1 << m) {
                acc += rho.get(full_index(r, t), full_index(c, t));
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Transpose applied to the tensor indices of one spin only.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    layout: SubsystemLayout,
    subsystem: usize,
) -> Result<ComplexMatrix, LinalgError> {
    if subsystem == 0 || subsystem > layout.n_spins {
        return Err(LinalgError::SpinIndexOutOfRange {
            index: subsystem,
            n_spins: layout.n_spins,
        });
    }
    debug_assert_eq!(rho.dim, layout.dim());
    let bit = layout.bit(subsystem);
    let mask = 1usize << bit;
    let n = rho.dim;
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            // Swap the subsystem's bit between row and column.
            let r2 = (r & !mask) | (c & mask);
            let c2 = (c & !mask) | (r & mask);
            out.set(r2, c2, rho.get(r, c));
        }
    }
    Ok(out)
}

/// All eigenvalues of a Hermitian matrix, ascending.
///
/// Cyclic Jacobi rotations on the 2d x 2d real-symmetric embedding
/// [[A, -B], [B, A]] of H = A + iB; eigenvalues of the embedding come in
/// duplicated pairs which are averaged.
pub fn hermitian_eigenvalues(h: &ComplexMatrix, tol: f64) -> Result<Vec<f64>, LinalgError> {
    h.check_finite()?;
    let defect = h.hermiticity_defect();
    if defect > tol {
        return Err(LinalgError::NotHermitian(defect, tol));
    }
    let d = h.dim;
    let n = 2 * d;
    let mut m = vec![0.0f64; n * n];
    for i in 0..d {
        for j in 0..d {
            // Symmetrized entries so rounding asymmetry cannot leak in.
            let z = (h.get(i, j) + h.get(j, i).conj()) * 0.5;
            m[i * n + j] = z.re;
            m[(i + d) * n + (j + d)] = z.re;
            m[i * n + (j + d)] = -z.im;
            m[(i + d) * n + j] = z.im;
        }
    }
    let mut eigs = jacobi_symmetric_eigenvalues(&mut m, n)?;
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Pairs (2i, 2i+1) are the duplicated copies.
    let out = (0..d).map(|i| (eigs[2 * i] + eigs[2 * i + 1]) / 2.0).collect();
    Ok(out)
}

fn off_diagonal_norm(m: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[i * n + j] * m[i * n + j];
            }
        }
    }
    acc.sqrt()
}

fn jacobi_symmetric_eigenvalues(m: &mut [f64], n: usize) -> Result<Vec<f64>, LinalgError> {
    let scale = 1.0 + (0..n * n).map(|k| m[k].abs()).fold(0.0, f64::max);
    let target = JACOBI_TOL * scale;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(m, n) <= target {
            return Ok((0..n).map(|i| m[i * n + i]).collect());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= target / (n as f64) {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    if off_diagonal_norm(m, n) <= target {
        Ok((0..n).map(|i| m[i * n + i]).collect())
    } else {
        Err(LinalgError::NoConvergence(JACOBI_MAX_SWEEPS))
    }
}
