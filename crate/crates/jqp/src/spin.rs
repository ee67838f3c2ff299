//! Spin-1/2 component operators, orthonormal frames and the symmetric
//! operator-ordering rule.
//!
//! A spin component along a unit direction n is (n_x sx + n_y sy + n_z sz)/2
//! in terms of the Pauli matrices; its eigenvalues are +-1/2. Frames pair a
//! designated primary axis `a` (the mean-spin direction when it exists) with
//! a deterministic transverse pair (b, c = a x b).

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{kron, matmul, trace, ComplexMatrix, LinalgError};
use crate::states::DensityMatrix;

/// Unit-norm tolerance for directions and frame orthogonality.
pub const DIRECTION_TOL: f64 = 1e-12;

/// Below this mean-spin norm a spin counts as having zero average direction.
pub const ZERO_MEAN_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("direction ({0}, {1}, {2}) is not unit norm")]
    NonUnitDirection(f64, f64, f64),
    #[error("axes are not mutually orthogonal (max dot {0:.3e})")]
    NotOrthogonal(f64),
    #[error("spin index {index} out of range for {n_spins} spins")]
    SiteOutOfRange { index: usize, n_spins: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Unit vector in R^3.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Direction {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Direction {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, SpinError> {
        let n = (x * x + y * y + z * z).sqrt();
        if (n - 1.0).abs() > DIRECTION_TOL {
            return Err(SpinError::NonUnitDirection(x, y, z));
        }
        Ok(Direction { x, y, z })
    }

    /// Normalizes an arbitrary vector; `None` for (near-)zero vectors.
    pub fn normalize(x: f64, y: f64, z: f64) -> Option<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if n < 1e-15 {
            return None;
        }
        Some(Direction {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn x_axis() -> Self {
        Direction { x: 1.0, y: 0.0, z: 0.0 }
    }

    pub fn y_axis() -> Self {
        Direction { x: 0.0, y: 1.0, z: 0.0 }
    }

    pub fn z_axis() -> Self {
        Direction { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> Self {
        Direction {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn neg(&self) -> Self {
        Direction {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Orthonormal direction triple (a, b, c); `a` is the designated primary
/// (mean-spin) axis and the ordering is significant.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Frame {
    pub a: Direction,
    pub b: Direction,
    pub c: Direction,
}

impl Frame {
    pub fn new(a: Direction, b: Direction, c: Direction) -> Result<Self, SpinError> {
        let worst = a
            .dot(&b)
            .abs()
            .max(a.dot(&c).abs())
            .max(b.dot(&c).abs());
        if worst > DIRECTION_TOL {
            return Err(SpinError::NotOrthogonal(worst));
        }
        Ok(Frame { a, b, c })
    }

    pub fn axis(&self, which: crate::table::Axis) -> Direction {
        match which {
            crate::table::Axis::A => self.a,
            crate::table::Axis::B => self.b,
            crate::table::Axis::C => self.c,
        }
    }
}

/// Mean spin vector of one site, components in units of hbar = 1.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct MeanSpin {
    pub vector: [f64; 3],
    pub norm: f64,
}

impl MeanSpin {
    /// The normalized mean direction, or `None` when the average is zero.
    pub fn direction(&self) -> Option<Direction> {
        if self.norm < ZERO_MEAN_TOL {
            None
        } else {
            Direction::normalize(self.vector[0], self.vector[1], self.vector[2])
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]])
}

/// Spin component operator (n . sigma)/2 along a unit direction.
pub fn spin_component(n: &Direction) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c(n.z / 2.0, 0.0), c(n.x / 2.0, -n.y / 2.0)],
        vec![c(n.x / 2.0, n.y / 2.0), c(-n.z / 2.0, 0.0)],
    ])
}

/// Completes a frame around `a`: b is the seed vector's component orthogonal
/// to a, rotated about a by `azimuth`; c = a x b.
///
/// Seed is the x axis, falling back to the y axis when a is nearly aligned
/// with x.
pub fn make_frame(a: &Direction, azimuth: f64) -> Frame {
    let seed = if a.dot(&Direction::x_axis()).abs() > 0.9 {
        Direction::y_axis()
    } else {
        Direction::x_axis()
    };
    let proj = a.dot(&seed);
    let b0 = Direction::normalize(
        seed.x - proj * a.x,
        seed.y - proj * a.y,
        seed.z - proj * a.z,
    )
    .expect("seed fallback keeps the transverse component non-degenerate");
    let axb0 = a.cross(&b0);
    let (cos, sin) = (azimuth.cos(), azimuth.sin());
    let b = Direction::normalize(
        cos * b0.x + sin * axb0.x,
        cos * b0.y + sin * axb0.y,
        cos * b0.z + sin * axb0.z,
    )
    .unwrap();
    let cdir = a.cross(&b);
    Frame { a: *a, b, c: cdir }
}

/// Raising and lowering operators for eigenstates of the component along n,
/// with the transverse pair fixed by `make_frame(n, 0)`.
///
/// S+ = S_b + i S_c and S- = S_b - i S_c, so S_b = (S+ + S-)/2 and
/// S_c = (S+ - S-)/2i.
pub fn ladder_operators(n: &Direction) -> (ComplexMatrix, ComplexMatrix) {
    let frame = make_frame(n, 0.0);
    let sb = spin_component(&frame.b);
    let sc = spin_component(&frame.c);
    let raise = sb.add(&sc.scale(c(0.0, 1.0))).unwrap();
    let lower = sb.add(&sc.scale(c(0.0, -1.0))).unwrap();
    (raise, lower)
}

/// I (x) ... (x) op (x) ... (x) I with `op` at 1-based position `site`.
pub fn embed(op: &ComplexMatrix, site: usize, n_spins: usize) -> Result<ComplexMatrix, SpinError> {
    if site == 0 || site > n_spins {
        return Err(SpinError::SiteOutOfRange { index: site, n_spins });
    }
    let mut out = ComplexMatrix::identity(1);
    for s in 1..=n_spins {
        let factor = if s == site {
            op.clone()
        } else {
            ComplexMatrix::identity(2)
        };
        out = kron(&out, &factor);
    }
    Ok(out)
}

/// Expectation of the spin vector operator at one site.
pub fn mean_spin(rho: &DensityMatrix, site: usize) -> Result<MeanSpin, SpinError> {
    let n = rho.n_spins();
    let mut vector = [0.0f64; 3];
    for (k, pauli) in [pauli_x(), pauli_y(), pauli_z()].iter().enumerate() {
        let op = embed(&pauli.scale_re(0.5), site, n)?;
        let val = trace(&matmul(&op, rho.matrix())?);
        debug_assert!(val.im.abs() <= 1e-10);
        vector[k] = val.re;
    }
    let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(MeanSpin { vector, norm })
}

/// Symmetric ordering of a two-operator product: (AB + BA)/2.
pub fn symmetrize2(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let ab = matmul(a, b)?;
    let ba = matmul(b, a)?;
    Ok(ab.add(&ba)?.scale_re(0.5))
}

/// Symmetric ordering of a three-operator product:
/// (1/12) [A(BC+CB) + (BC+CB)A + (cyclic a->b->c->a) + (cyclic a->c->b->a)].
pub fn symmetrize3(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
) -> Result<ComplexMatrix, LinalgError> {
    let term = |x: &ComplexMatrix, y: &ComplexMatrix, z: &ComplexMatrix| -> Result<ComplexMatrix, LinalgError> {
        let anti = matmul(y, z)?.add(&matmul(z, y)?)?;
        matmul(x, &anti)?.add(&matmul(&anti, x)?)
    };
    let total = term(a, b, c)?.add(&term(b, c, a)?)?.add(&term(c, a, b)?)?;
    Ok(total.scale_re(1.0 / 12.0))
}
