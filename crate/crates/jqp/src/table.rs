//! Joint quasiprobability tables in symmetric operator ordering.
//!
//! A table entry is
//!
//!   p(signs) = 2^(-sum_j (2 - m_j)) Tr[rho prod_j (1/2 + sum_u eps_u S_u)]
//!
//! where the per-site sum runs over the included directions of spin j's
//! frame and m_j counts the marginalized (excluded) directions. With all
//! three directions included at every spin the prefactor is 2^(-2N).
//!
//! Entry storage is lexicographic over sign slots: spin 1 first, directions
//! in a < b < c order, +1 before -1. Slot bit 0 encodes +1, bit 1 encodes -1,
//! and the first slot is the most significant.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{matmul, ComplexMatrix, LinalgError};
use crate::spin::{spin_component, Frame, SpinError};
use crate::states::DensityMatrix;

/// Imaginary residues above this are reported as Hermiticity errors.
pub const IMAG_TOL: f64 = 1e-10;

/// Normalization tolerance on the table sum.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("expected {expected} frames, got {got}")]
    FrameCountMismatch { expected: usize, got: usize },
    #[error("per-spin direction subsets must have size 2 or 3 (spin {0} has {1})")]
    BadSubsetSize(usize, usize),
    #[error("direction {axis:?} not included at spin {spin}")]
    DirectionNotIncluded { spin: usize, axis: Axis },
    #[error("spin index {index} out of range for {n_spins} spins")]
    SpinOutOfRange { index: usize, n_spins: usize },
    #[error("cannot marginalize the last spin of a table")]
    LastSpin,
    #[error("imaginary residue {0:.3e} exceeds tolerance {1:.3e}")]
    ImaginaryResidue(f64, f64),
    #[error("table sum deviates from 1 by {0:.3e}")]
    NotNormalized(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spin(#[from] SpinError),
}

/// One of the three frame directions; the enumeration order a < b < c is the
/// canonical slot and tie-breaking order throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    A,
    B,
    C,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::A, Axis::B, Axis::C];

    pub fn label(&self) -> &'static str {
        match self {
            Axis::A => "a",
            Axis::B => "b",
            Axis::C => "c",
        }
    }
}

/// Which directions are included per spin; each subset has size 2 or 3 and is
/// kept sorted in a < b < c order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionSubset {
    per_spin: Vec<Vec<Axis>>,
}

impl DirectionSubset {
    pub fn new(per_spin: Vec<Vec<Axis>>) -> Result<Self, TableError> {
        let mut cleaned = Vec::with_capacity(per_spin.len());
        for (i, axes) in per_spin.into_iter().enumerate() {
            let mut axes = axes;
            axes.sort_unstable();
            axes.dedup();
            if axes.len() < 2 || axes.len() > 3 {
                return Err(TableError::BadSubsetSize(i + 1, axes.len()));
            }
            cleaned.push(axes);
        }
        Ok(DirectionSubset { per_spin: cleaned })
    }

    /// All three directions at every spin.
    pub fn full(n_spins: usize) -> Self {
        DirectionSubset {
            per_spin: vec![Axis::ALL.to_vec(); n_spins],
        }
    }

    pub fn n_spins(&self) -> usize {
        self.per_spin.len()
    }

    pub fn at(&self, spin: usize) -> &[Axis] {
        &self.per_spin[spin - 1]
    }

    pub fn is_full(&self) -> bool {
        self.per_spin.iter().all(|s| s.len() == 3)
    }

    /// Total number of sign slots.
    pub fn slots(&self) -> usize {
        self.per_spin.iter().map(|s| s.len()).sum()
    }

    /// The {b, c} pair at every spin: what remains after dropping each
    /// spin's primary (mean-direction) axis.
    pub fn residual_pair(n_spins: usize) -> Self {
        DirectionSubset {
            per_spin: vec![vec![Axis::B, Axis::C]; n_spins],
        }
    }

    /// All per-spin combinations of 2-of-3 direction subsets, in
    /// lexicographic order ({a,b} < {a,c} < {b,c} per spin, spin 1 slowest).
    pub fn all_pairs(n_spins: usize) -> Vec<DirectionSubset> {
        let pairs = [
            vec![Axis::A, Axis::B],
            vec![Axis::A, Axis::C],
            vec![Axis::B, Axis::C],
        ];
        let mut out = Vec::with_capacity(3usize.pow(n_spins as u32));
        let mut idx = vec![0usize; n_spins];
        loop {
            out.push(DirectionSubset {
                per_spin: idx.iter().map(|&k| pairs[k].clone()).collect(),
            });
            // odometer increment, last spin fastest
            let mut pos = n_spins;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < 3 {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// Compact label such as "abc;ab".
    pub fn label(&self) -> String {
        self.per_spin
            .iter()
            .map(|axes| axes.iter().map(|a| a.label()).collect::<String>())
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parses a label like "abc;ab;bc".
    pub fn parse(s: &str) -> Result<Self, TableError> {
        let mut per_spin = Vec::new();
        for (i, part) in s.split(';').enumerate() {
            let mut axes = Vec::new();
            for ch in part.chars() {
                match ch {
                    'a' => axes.push(Axis::A),
                    'b' => axes.push(Axis::B),
                    'c' => axes.push(Axis::C),
                    _ => return Err(TableError::BadSubsetSize(i + 1, 0)),
                }
            }
            per_spin.push(axes);
        }
        DirectionSubset::new(per_spin)
    }
}

/// One sign per (spin, included direction), aligned with a DirectionSubset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignAssignment {
    pub signs: Vec<Vec<i8>>,
}

impl SignAssignment {
    /// Decodes table index `idx` (first slot most significant, bit 0 = +1).
    pub fn from_index(subset: &DirectionSubset, idx: usize) -> Self {
        let slots = subset.slots();
        let mut signs = Vec::with_capacity(subset.n_spins());
        let mut pos = 0;
        for spin in 1..=subset.n_spins() {
            let mut per = Vec::with_capacity(subset.at(spin).len());
            for _ in subset.at(spin) {
                let bit = (idx >> (slots - 1 - pos)) & 1;
                per.push(if bit == 0 { 1 } else { -1 });
                pos += 1;
            }
            signs.push(per);
        }
        SignAssignment { signs }
    }

    pub fn to_index(&self, subset: &DirectionSubset) -> usize {
        let slots = subset.slots();
        let mut idx = 0usize;
        let mut pos = 0;
        for per in &self.signs {
            for &s in per {
                if s < 0 {
                    idx |= 1 << (slots - 1 - pos);
                }
                pos += 1;
            }
        }
        debug_assert_eq!(pos, slots);
        idx
    }

    pub fn sign(&self, spin: usize, subset: &DirectionSubset, axis: Axis) -> Option<i8> {
        let k = subset.at(spin).iter().position(|&a| a == axis)?;
        Some(self.signs[spin - 1][k])
    }
}

/// Minimum table entry and the first sign assignment attaining it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableExtremum {
    pub min_value: f64,
    pub argmin: SignAssignment,
}

/// JQP table: per-spin frames and direction subsets, plus one real value per
/// sign assignment.
#[derive(Clone, Debug)]
pub struct JqpTable {
    frames: Vec<Frame>,
    subset: DirectionSubset,
    values: Vec<f64>,
}

impl JqpTable {
    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn subset(&self) -> &DirectionSubset {
        &self.subset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, assignment: &SignAssignment) -> f64 {
        self.values[assignment.to_index(&self.subset)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Per-site affine factor (1/2) I + sum_u eps_u S_u over the included
/// directions of one spin's frame.
pub fn site_factor(frame: &Frame, axes: &[Axis], signs: &[i8]) -> ComplexMatrix {
    debug_assert_eq!(axes.len(), signs.len());
    let mut m = ComplexMatrix::identity(2).scale_re(0.5);
    for (&axis, &s) in axes.iter().zip(signs) {
        let comp = spin_component(&frame.axis(axis));
        m = m.add(&comp.scale_re(s as f64)).expect("2x2 shapes agree");
    }
    m
}

/// Builds the JQP table for a state under per-spin frames and direction
/// subsets. Entries are computed independently per sign assignment.
pub fn jqp_table(
    rho: &DensityMatrix,
    frames: &[Frame],
    subset: &DirectionSubset,
) -> Result<JqpTable, TableError> {
    let n = rho.n_spins();
    if frames.len() != n || subset.n_spins() != n {
        return Err(TableError::FrameCountMismatch {
            expected: n,
            got: if frames.len() != n {
                frames.len()
            } else {
                subset.n_spins()
            },
        });
    }
    // prefactor 2^(-sum_j (2 - m_j)) with m_j = 3 - |subset_j|
    let exponent: i32 = (1..=n).map(|j| subset.at(j).len() as i32 - 1).sum();
    let prefactor = 0.5f64.powi(exponent);

    let slots = subset.slots();
    let size = 1usize << slots;
    use rayon::prelude::*;
    let entries: Vec<Result<f64, TableError>> = (0..size)
        .into_par_iter()
        .map(|idx| {
            let assignment = SignAssignment::from_index(subset, idx);
            let mut op = ComplexMatrix::identity(1 << n);
            for spin in 1..=n {
                let factor = site_factor(
                    &frames[spin - 1],
                    subset.at(spin),
                    &assignment.signs[spin - 1],
                );
                let embedded = crate::spin::embed(&factor, spin, n)?;
                op = matmul(&op, &embedded)?;
            }
            let val = rho.expectation(&op).map_err(|e| match e {
                crate::states::StateError::Linalg(l) => TableError::Linalg(l),
                _ => unreachable!("expectation only fails on linalg errors"),
            })?;
            if val.im.abs() > IMAG_TOL {
                return Err(TableError::ImaginaryResidue(val.im.abs(), IMAG_TOL));
            }
            Ok(prefactor * val.re)
        })
        .collect();
    let mut values = Vec::with_capacity(size);
    for e in entries {
        values.push(e?);
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > NORM_TOL {
        return Err(TableError::NotNormalized(sum - 1.0));
    }
    Ok(JqpTable {
        frames: frames.to_vec(),
        subset: subset.clone(),
        values,
    })
}

/// Sums paired entries over one direction's sign at one spin.
pub fn marginalize_direction(
    t: &JqpTable,
    spin: usize,
    axis: Axis,
) -> Result<JqpTable, TableError> {
    if spin == 0 || spin > t.subset.n_spins() {
        return Err(TableError::SpinOutOfRange {
            index: spin,
            n_spins: t.subset.n_spins(),
        });
    }
    let axes = t.subset.at(spin);
    if !axes.contains(&axis) {
        return Err(TableError::DirectionNotIncluded { spin, axis });
    }
    let mut new_per_spin: Vec<Vec<Axis>> = (1..=t.subset.n_spins())
        .map(|s| t.subset.at(s).to_vec())
        .collect();
    new_per_spin[spin - 1].retain(|&a| a != axis);
    // marginalizing below 2 directions leaves the table domain undefined
    if new_per_spin[spin - 1].len() < 2 {
        return Err(TableError::BadSubsetSize(spin, new_per_spin[spin - 1].len()));
    }
    let new_subset = DirectionSubset::new(new_per_spin)?;

    let mut values = vec![0.0f64; 1 << new_subset.slots()];
    for idx in 0..t.values.len() {
        let assignment = SignAssignment::from_index(&t.subset, idx);
        let mut reduced = assignment.clone();
        let k = axes.iter().position(|&a| a == axis).unwrap();
        reduced.signs[spin - 1].remove(k);
        values[reduced.to_index(&new_subset)] += t.values[idx];
    }
    Ok(JqpTable {
        frames: t.frames.clone(),
        subset: new_subset,
        values,
    })
}

/// Sums over all signs of one spin, yielding the table of the reduced state.
pub fn marginalize_spin(t: &JqpTable, spin: usize) -> Result<JqpTable, TableError> {
    let n = t.subset.n_spins();
    if spin == 0 || spin > n {
        return Err(TableError::SpinOutOfRange { index: spin, n_spins: n });
    }
    if n < 2 {
        return Err(TableError::LastSpin);
    }
    let new_per_spin: Vec<Vec<Axis>> = (1..=n)
        .filter(|&s| s != spin)
        .map(|s| t.subset.at(s).to_vec())
        .collect();
    let new_subset = DirectionSubset::new(new_per_spin)?;
    let new_frames: Vec<Frame> = t
        .frames
        .iter()
        .enumerate()
        .filter(|(i, _)| i + 1 != spin)
        .map(|(_, f)| *f)
        .collect();
    let mut values = vec![0.0f64; 1 << new_subset.slots()];
    for idx in 0..t.values.len() {
        let assignment = SignAssignment::from_index(&t.subset, idx);
        let mut signs = assignment.signs.clone();
        signs.remove(spin - 1);
        let reduced = SignAssignment { signs };
        values[reduced.to_index(&new_subset)] += t.values[idx];
    }
    Ok(JqpTable {
        frames: new_frames,
        subset: new_subset,
        values,
    })
}

/// Exact minimum by exhaustive scan; ties resolve to the lexicographically
/// first assignment (+1 before -1, a before b before c, spin 1 outermost).
pub fn extremum(t: &JqpTable) -> TableExtremum {
    let mut best_idx = 0usize;
    let mut best = t.values[0];
    for (idx, &v) in t.values.iter().enumerate().skip(1) {
        if v < best {
            best = v;
            best_idx = idx;
        }
    }
    TableExtremum {
        min_value: best,
        argmin: SignAssignment::from_index(&t.subset, best_idx),
    }
}
