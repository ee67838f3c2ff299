//! Shared helpers for the integration suites: seeded random states,
//! directions and frames.

#![allow(dead_code)]

use jqp::linalg::{matmul, trace, ComplexMatrix};
use jqp::spin::{make_frame, Direction, Frame};
use jqp::states::DensityMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random full-rank density matrix: G G^dagger / Tr for a matrix G with
/// uniform complex entries (a Ginibre-style draw; the distribution does not
/// matter for the invariants tested, only that the state is generic).
pub fn random_density(rng: &mut ChaCha8Rng, n_spins: usize) -> DensityMatrix {
    let dim = 1usize << n_spins;
    let mut g = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            g.set(
                i,
                j,
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            );
        }
    }
    let gram = matmul(&g, &g.dagger()).unwrap();
    let rho = gram.scale_re(1.0 / trace(&gram).re);
    DensityMatrix::new(rho, n_spins).unwrap()
}

/// Random pure state |v><v| for a uniform complex vector v.
pub fn random_pure(rng: &mut ChaCha8Rng, n_spins: usize) -> DensityMatrix {
    let dim = 1usize << n_spins;
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    DensityMatrix::new(ComplexMatrix::outer(&v), n_spins).unwrap()
}

pub fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    loop {
        let x = 2.0 * rng.gen::<f64>() - 1.0;
        let y = 2.0 * rng.gen::<f64>() - 1.0;
        let z = 2.0 * rng.gen::<f64>() - 1.0;
        let r2 = x * x + y * y + z * z;
        if r2 > 1e-4 && r2 <= 1.0 {
            return Direction::normalize(x, y, z).unwrap();
        }
    }
}

pub fn random_frame(rng: &mut ChaCha8Rng) -> Frame {
    let a = random_direction(rng);
    let azimuth = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    make_frame(&a, azimuth)
}

/// Random Bloch vector with norm strictly below 1 (mixed single-spin state).
pub fn random_bloch(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let d = random_direction(rng);
    let r = rng.gen::<f64>() * 0.999;
    [r * d.x, r * d.y, r * d.z]
}
