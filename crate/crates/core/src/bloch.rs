//! Bloch representation of 2⊗d states.
//!
//! With Pauli matrices σ_ν on A and generators τ_λ on B normalized as
//! `Tr[τ_a τ_b] = 2 δ_ab`,
//!
//! ```text
//! ρ = 1/(2d) · ( I + Σ x_ν σ_ν⊗I + (d/2) Σ y_λ I⊗τ_λ + (d/2) Σ c_νλ σ_ν⊗τ_λ )
//! ```
//!
//! where `x_ν = Tr[ρ σ_ν⊗I]`, `y_λ = Tr[ρ I⊗τ_λ]` and `c_νλ = Tr[ρ σ_ν⊗τ_λ]`.
//! For `d = 2` this is the familiar `ρ = ¼ Σ R_νλ σ_ν⊗σ_λ`.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::basis::{gellmann_basis, pauli_basis};
use crate::error::{QcorrError, Result};
use crate::linalg::{identity, kron, trace_of_product, CMatrix};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct BlochRecord {
    /// Local Bloch vector of the qubit A.
    pub x: Vector3<f64>,
    /// Local Bloch vector of B, `d² − 1` components.
    pub y: DVector<f64>,
    /// Correlation matrix, 3 × (d² − 1).
    pub corr: DMatrix<f64>,
}

impl BlochRecord {
    pub fn zeros(d: usize) -> Self {
        let n = d * d - 1;
        Self { x: Vector3::zeros(), y: DVector::zeros(n), corr: DMatrix::zeros(3, n) }
    }

    /// Dimension of B implied by the component counts, if consistent.
    pub fn subsystem_dim(&self) -> Option<usize> {
        let n = self.y.len();
        let d = ((n + 1) as f64).sqrt().round() as usize;
        (d >= 2 && d * d - 1 == n && self.corr.nrows() == 3 && self.corr.ncols() == n).then_some(d)
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        match self.subsystem_dim() {
            Some(found) if found == d => Ok(()),
            Some(found) => Err(QcorrError::DimensionMismatch { expected: d, actual: found }),
            None => Err(QcorrError::InvalidDimension(format!(
                "inconsistent Bloch record: y has {} entries, C is {}x{}",
                self.y.len(),
                self.corr.nrows(),
                self.corr.ncols()
            ))),
        }
    }

    /// Largest elementwise difference to another record of the same shape.
    pub fn max_difference(&self, other: &BlochRecord) -> f64 {
        let dx = (self.x - other.x).amax();
        let dy = (&self.y - &other.y).amax();
        let dc = (&self.corr - &other.corr).amax();
        dx.max(dy).max(dc)
    }

    /// The operator built from the record; no positivity check.
    pub fn to_matrix(&self, d: usize) -> Result<CMatrix> {
        self.check_dim(d)?;
        let sigma = pauli_basis();
        let tau = gellmann_basis(d)?;
        let id_a = identity(2);
        let id_b = identity(d);
        let half_d = d as f64 / 2.0;

        let mut m = identity(2 * d);
        for (nu, s) in sigma.generators().iter().enumerate() {
            if self.x[nu] != 0.0 {
                m += kron(s, &id_b).scale(self.x[nu]);
            }
        }
        for (lambda, t) in tau.generators().iter().enumerate() {
            if self.y[lambda] != 0.0 {
                m += kron(&id_a, t).scale(half_d * self.y[lambda]);
            }
        }
        for (nu, s) in sigma.generators().iter().enumerate() {
            for (lambda, t) in tau.generators().iter().enumerate() {
                let cv = self.corr[(nu, lambda)];
                if cv != 0.0 {
                    m += kron(s, t).scale(half_d * cv);
                }
            }
        }
        Ok(m.scale(1.0 / (2 * d) as f64))
    }
}

/// Extracts `x`, `y` and `C` from a 2⊗d state.
pub fn bloch_decompose(rho: &DensityMatrix, d: usize) -> Result<BlochRecord> {
    decompose_operator(rho.matrix(), d)
}

/// Same as [`bloch_decompose`] for an arbitrary Hermitian operator (e.g. a
/// deviation matrix).
pub fn decompose_operator(m: &CMatrix, d: usize) -> Result<BlochRecord> {
    if d < 2 {
        return Err(QcorrError::InvalidDimension(format!("subsystem dimension must be >= 2, got {d}")));
    }
    if m.nrows() != 2 * d || m.ncols() != 2 * d {
        return Err(QcorrError::DimensionMismatch { expected: 2 * d, actual: m.nrows() });
    }
    let sigma = pauli_basis();
    let tau = gellmann_basis(d)?;
    let id_a = identity(2);
    let id_b = identity(d);
    let n = d * d - 1;

    let x = Vector3::from_fn(|nu, _| trace_of_product(m, &kron(&sigma.generators()[nu], &id_b)).re);
    let y = DVector::from_fn(n, |l, _| trace_of_product(m, &kron(&id_a, &tau.generators()[l])).re);
    let corr =
        DMatrix::from_fn(3, n, |nu, l| trace_of_product(m, &kron(&sigma.generators()[nu], &tau.generators()[l])).re);
    Ok(BlochRecord { x, y, corr })
}

/// Rebuilds the density matrix from a Bloch record.
pub fn bloch_compose(record: &BlochRecord, d: usize) -> Result<DensityMatrix> {
    DensityMatrix::new(record.to_matrix(d)?)
}
