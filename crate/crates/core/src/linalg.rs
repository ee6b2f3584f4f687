//! Dense complex matrix helpers and the small eigensolvers used throughout
//! the crate.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::error::{QcorrError, Result};

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Tolerance on asymmetry / non-Hermiticity accepted by the eigensolvers.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Largest matrix accepted by [`hermitian_eigenvalues`].
pub const MAX_JACOBI_DIM: usize = 64;

const MAX_SWEEPS: usize = 100;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Real part of the trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// `Tr[a b]` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest `|m_ij − conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m†)/2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Partial transpose over the second factor of a `da·db` dimensional operator.
pub fn partial_transpose_b(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    let n = da * db;
    assert_eq!(m.nrows(), n, "partial transpose: dimension mismatch");
    CMatrix::from_fn(n, n, |row, col| {
        let (a, b) = (row / db, row % db);
        let (a2, b2) = (col / db, col % db);
        m[(a * db + b2, a2 * db + b)]
    })
}

/// Partial trace over the first factor of a `da·db` dimensional operator.
pub fn partial_trace_a(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(db, db, |j, k| (0..da).map(|a| m[(a * db + j, a * db + k)]).sum())
}

/// Eigenvalues of a real symmetric 3×3 matrix in descending order.
///
/// Closed-form trigonometric solution of the characteristic cubic on the
/// centered matrix `B = (M − q I)/p`, `q = Tr M / 3`.
pub fn sym3_eigenvalues(m: &Matrix3<f64>) -> Result<[f64; 3]> {
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(QcorrError::NotSymmetric(asym));
    }
    let m = (m + m.transpose()) * 0.5;

    let q = m.trace() / 3.0;
    let off = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
    let p2 = (m[(0, 0)] - q).powi(2) + (m[(1, 1)] - q).powi(2) + (m[(2, 2)] - q).powi(2) + 2.0 * off;
    if p2 == 0.0 {
        return Ok([q, q, q]);
    }
    let p = (p2 / 6.0).sqrt();
    let b = (m - Matrix3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;

    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    let mut out = [largest, middle, smallest];
    out.sort_by(|x, y| y.total_cmp(x));
    Ok(out)
}

/// All eigenvalues of a Hermitian matrix in descending order (cyclic Jacobi).
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(QcorrError::InvalidDimension(format!("{}x{} matrix is not square", n, h.ncols())));
    }
    if n > MAX_JACOBI_DIM {
        return Err(QcorrError::InvalidDimension(format!(
            "{n}x{n} exceeds the Jacobi solver limit of {MAX_JACOBI_DIM}"
        )));
    }
    let dev = hermitian_deviation(h);
    if dev > SYMMETRY_TOL * max_abs(h).max(1.0) {
        return Err(QcorrError::NotHermitian(dev));
    }
    let mut a = hermitize(h);
    jacobi_diagonalize(&mut a);
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

fn off_diagonal_norm2(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// Drives `a` to diagonal form in place by unitary two-index rotations.
fn jacobi_diagonalize(a: &mut CMatrix) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let total = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if total == 0.0 {
        return;
    }
    let threshold = total * 1e-32;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm2(a) <= threshold {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
                let (s, cs) = theta.sin_cos();

                // V = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on indices (p, q).
                let pc = phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs - akq * pc * s;
                    a[(k, q)] = akp * s + akq * pc * cs;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * cs;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
}
