//! Seeded random states and unitaries (Ginibre construction).

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{QcorrError, Result};
use crate::linalg::{trace_re, CMatrix};
use crate::state::DensityMatrix;

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    // explicit loop order keeps the draw sequence independent of storage layout
    let mut g = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            g[(i, j)] = complex_gaussian(rng);
        }
    }
    g
}

/// `G G† / Tr[G G†]` with `G` a `dim × rank` Ginibre matrix drawn from `seed`.
pub fn random_density_matrix(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_matrix_with(&mut rng, dim, rank)
}

pub fn random_density_matrix_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(QcorrError::InvalidDimension(format!("rank {rank} outside 1..={dim}")));
    }
    let g = ginibre(rng, dim, rank);
    let w = &g * g.adjoint();
    let tr = trace_re(&w);
    DensityMatrix::new(w.unscale(tr))
}

/// Haar-random unit vector.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = ginibre(rng, n, n);
    let mut q = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut v = g.column(j).clone_owned();
        for k in 0..j {
            let qk = q.column(k);
            let proj = qk.dotc(&v);
            v -= qk * proj;
        }
        let norm = v.norm();
        q.set_column(j, &v.unscale(norm));
    }
    q
}
