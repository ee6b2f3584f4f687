//! Density matrices, Bell-diagonal states and NMR deviation states.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::pauli_basis;
use crate::error::{QcorrError, Result};
use crate::linalg::{
    hermitian_deviation, hermitian_eigenvalues, hermitize, identity, kron, max_abs, trace_re, CMatrix,
};

/// Tolerance on `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Tolerance on the stored matrix being Hermitian before symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a positive semidefinite state.
pub const PSD_TOL: f64 = -1e-10;

/// Default NMR polarization ratio.
pub const DEFAULT_EPSILON: f64 = 1e-5;

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates `m` and stores its Hermitian part, so that
    /// `entry(i,j) == conj(entry(j,i))` holds bit for bit.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(QcorrError::InvalidDimension(format!(
                "density matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL * max_abs(&m).max(1.0) {
            return Err(QcorrError::NotHermitian(dev));
        }
        let m = hermitize(&m);
        let tr = trace_re(&m);
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(QcorrError::BadTrace(tr));
        }
        let min = *hermitian_eigenvalues(&m)?.last().expect("non-empty");
        if min < PSD_TOL {
            return Err(QcorrError::NotPositive(min));
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: identity(dim).scale(1.0 / dim as f64) }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn from_pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(QcorrError::InvalidDimension("zero state vector".into()));
        }
        let v = psi.unscale(norm);
        Self::new(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m).expect("validated state is Hermitian")
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(QcorrError::DimensionMismatch { expected: self.dim(), actual: u.nrows() });
        }
        Self::new(u * &self.m * u.adjoint())
    }

    /// Expectation value `Tr[ρ O]` (real part).
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        crate::linalg::trace_of_product(&self.m, op).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellMode {
    /// Coefficients describe the full state `(I + Σ c_i σ_i⊗σ_i)/4`.
    Full,
    /// Coefficients are in units of ε: the state is `I/4 + ε Δρ`,
    /// `Δρ = Σ c_i σ_i⊗σ_i / 4`.
    Deviation,
}

/// Two-qubit state diagonal in the Bell basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonalState {
    c: [f64; 3],
    mode: BellMode,
}

impl BellDiagonalState {
    /// Full-state coefficients; rejected outside the tetrahedron of valid states.
    pub fn full(c: [f64; 3]) -> Result<Self> {
        let state = Self { c, mode: BellMode::Full };
        let min = state.bell_weights().into_iter().fold(f64::INFINITY, f64::min);
        if min < PSD_TOL {
            return Err(QcorrError::NotPositive(min));
        }
        Ok(state)
    }

    /// Coefficients in units of ε. No positivity constraint applies.
    pub fn deviation(c: [f64; 3]) -> Self {
        Self { c, mode: BellMode::Deviation }
    }

    pub fn new(c: [f64; 3], mode: BellMode) -> Result<Self> {
        match mode {
            BellMode::Full => Self::full(c),
            BellMode::Deviation => Ok(Self::deviation(c)),
        }
    }

    /// Builds coefficients from magnitudes with the sign pattern (+, −, +).
    pub fn from_magnitudes(magnitudes: [f64; 3], mode: BellMode) -> Result<Self> {
        let [a, b, c] = magnitudes.map(f64::abs);
        Self::new([a, -b, c], mode)
    }

    pub fn coefficients(&self) -> [f64; 3] {
        self.c
    }

    pub fn mode(&self) -> BellMode {
        self.mode
    }

    /// Populations of Φ+, Φ−, Ψ+, Ψ− for the full-state reading of the
    /// coefficients.
    pub fn bell_weights(&self) -> [f64; 4] {
        let [c1, c2, c3] = self.c;
        [(1.0 + c1 - c2 + c3) / 4.0, (1.0 - c1 + c2 + c3) / 4.0, (1.0 + c1 + c2 - c3) / 4.0, (1.0 - c1 - c2 - c3) / 4.0]
    }

    /// `Σ c_i σ_i⊗σ_i / 4`: the traceless part of the state (the deviation
    /// matrix in deviation mode).
    pub fn correlation_part(&self) -> CMatrix {
        let p = pauli_basis();
        let mut m = CMatrix::zeros(4, 4);
        for (ci, s) in self.c.iter().zip(p.generators()) {
            m += kron(s, s).scale(ci / 4.0);
        }
        m
    }

    /// The physical density matrix. `epsilon` is used only in deviation mode.
    pub fn density_matrix(&self, epsilon: f64) -> Result<DensityMatrix> {
        match self.mode {
            BellMode::Full => DensityMatrix::new(identity(4).scale(0.25) + self.correlation_part()),
            BellMode::Deviation => self.deviation_state(epsilon)?.compose(),
        }
    }

    pub fn deviation_state(&self, epsilon: f64) -> Result<DeviationState> {
        DeviationState::new(epsilon, self.correlation_part())
    }
}

/// High-temperature NMR state `I/n + ε Δρ` with traceless Hermitian `Δρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationState {
    epsilon: f64,
    delta: CMatrix,
}

impl DeviationState {
    pub fn new(epsilon: f64, delta: CMatrix) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(QcorrError::OutOfRange { name: "epsilon", value: epsilon, range: "(0, 1]" });
        }
        if delta.nrows() != delta.ncols() {
            return Err(QcorrError::InvalidDimension("deviation matrix must be square".into()));
        }
        let dev = hermitian_deviation(&delta);
        if dev > HERMITIAN_TOL * max_abs(&delta).max(1.0) {
            return Err(QcorrError::NotHermitian(dev));
        }
        let tr = trace_re(&delta);
        if tr.abs() > TRACE_TOL {
            return Err(QcorrError::BadTrace(tr));
        }
        Ok(Self { epsilon, delta: hermitize(&delta) })
    }

    /// Recovers `Δρ = (ρ − I/n)/ε` from a physical state.
    pub fn from_density(rho: &DensityMatrix, epsilon: f64) -> Result<Self> {
        let n = rho.dim();
        let delta = (rho.matrix() - identity(n).scale(1.0 / n as f64)).unscale(epsilon);
        let tr = trace_re(&delta);
        let delta = delta - identity(n).scale(tr / n as f64);
        Self::new(epsilon, delta)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> &CMatrix {
        &self.delta
    }

    pub fn compose(&self) -> Result<DensityMatrix> {
        let n = self.delta.nrows();
        DensityMatrix::new(identity(n).scale(1.0 / n as f64) + self.delta.scale(self.epsilon))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn rejects_bad_trace_and_non_psd() {
        let m = identity(2).scale(0.6);
        assert!(matches!(DensityMatrix::new(m), Err(QcorrError::BadTrace(_))));
        let m = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.), c(0., 0.), c(0., 0.), c(-0.5, 0.)]);
        assert!(matches!(DensityMatrix::new(m), Err(QcorrError::NotPositive(v)) if (v + 0.5).abs() < 1e-12));
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.1, 0.), c(0.2, 0.), c(0.5, 0.)]);
        assert!(matches!(DensityMatrix::new(m), Err(QcorrError::NotHermitian(_))));
    }

    #[test]
    fn stored_matrix_is_exactly_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.2), c(0.1 + 1e-14, -0.2), c(0.5, 1e-15)]);
        let rho = DensityMatrix::new(m).unwrap();
        let s = rho.matrix();
        assert_eq!(s[(0, 1)], s[(1, 0)].conj());
        assert_eq!(s[(1, 1)].im, 0.0);
    }

    #[test]
    fn bell_matrix_matches_explicit_display() {
        let (c1, c2, c3) = (0.3, -0.2, 0.1);
        let rho = BellDiagonalState::full([c1, c2, c3]).unwrap().density_matrix(0.0).unwrap();
        let m = rho.matrix();
        let expect = |i: usize, j: usize| -> f64 {
            match (i, j) {
                (0, 0) | (3, 3) => (1.0 + c3) / 4.0,
                (1, 1) | (2, 2) => (1.0 - c3) / 4.0,
                (0, 3) | (3, 0) => (c1 - c2) / 4.0,
                (1, 2) | (2, 1) => (c1 + c2) / 4.0,
                _ => 0.0,
            }
        };
        for i in 0..4 {
            for j in 0..4 {
                assert!((m[(i, j)] - c(expect(i, j), 0.0)).norm() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn bell_weights_are_spectrum() {
        let s = BellDiagonalState::full([0.3, -0.2, 0.1]).unwrap();
        let mut w = s.bell_weights().to_vec();
        w.sort_by(|a, b| b.total_cmp(a));
        let e = s.density_matrix(0.0).unwrap().eigenvalues();
        for (a, b) in w.iter().zip(&e) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn tetrahedron_constraint() {
        assert!(BellDiagonalState::full([1.0, -1.0, 1.0]).is_ok());
        assert!(BellDiagonalState::full([1.0, 1.0, 1.0]).is_err());
        // deviation mode carries no positivity constraint
        let dev = BellDiagonalState::deviation([5.0, 5.0, 5.0]);
        assert!(dev.density_matrix(1e-5).is_ok());
    }

    #[test]
    fn deviation_round_trip() {
        let s = BellDiagonalState::deviation([0.5, -0.06, 0.24]);
        let rho = s.density_matrix(1e-5).unwrap();
        let back = DeviationState::from_density(&rho, 1e-5).unwrap();
        assert!(max_abs(&(back.delta() - s.correlation_part())) < 1e-10);
        assert!(DeviationState::new(0.0, identity(4)).is_err());
        assert!(matches!(DeviationState::new(1e-5, identity(4)), Err(QcorrError::BadTrace(_))));
    }

    #[test]
    fn pure_state_has_unit_purity() {
        let psi = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
    }
}
