//! Single-qubit relaxation channels of a liquid-state NMR two-qubit register
//! and the scalar-coupling evolution.
//!
//! Each qubit relaxes independently through generalized amplitude damping
//! (longitudinal, `T1`) followed by phase damping (transverse, `T2`). The
//! composite map on the pair is the operator sum
//! `Σ_ij (E_i ⊗ F_j) ρ (E_i ⊗ F_j)†`.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{QcorrError, Result};
use crate::linalg::{c, identity, kron, max_abs, CMatrix};
use crate::state::{DensityMatrix, DEFAULT_EPSILON};

/// Tolerance on `‖Σ E†E − I‖` for a Kraus set to be accepted.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Relaxation times of the two spins and the thermal polarization ratio.
///
/// `epsilon` is `ħω_L / 4 k_B T` (Larmor frequency over room temperature
/// thermal energy), about 1e−5 for the ¹H/¹³C pair in chloroform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelaxationParams {
    /// Longitudinal relaxation of qubit A (¹H), seconds.
    pub t1_a: f64,
    /// Transverse relaxation of qubit A, seconds.
    pub t2_a: f64,
    /// Longitudinal relaxation of qubit B (¹³C), seconds.
    pub t1_b: f64,
    /// Transverse relaxation of qubit B, seconds.
    pub t2_b: f64,
    pub epsilon: f64,
    /// Scalar coupling, Hz.
    pub j_coupling: f64,
}

impl Default for RelaxationParams {
    fn default() -> Self {
        Self { t1_a: 3.57, t2_a: 1.2, t1_b: 10.0, t2_b: 0.19, epsilon: DEFAULT_EPSILON, j_coupling: 215.1 }
    }
}

impl RelaxationParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t1_a", self.t1_a), ("t2_a", self.t2_a), ("t1_b", self.t1_b), ("t2_b", self.t2_b)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QcorrError::OutOfRange { name, value: v, range: "(0, ∞)" });
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(QcorrError::OutOfRange { name: "epsilon", value: self.epsilon, range: "(0, 1]" });
        }
        if !self.j_coupling.is_finite() {
            return Err(QcorrError::OutOfRange { name: "j_coupling", value: self.j_coupling, range: "finite" });
        }
        Ok(())
    }

    /// Steady-state population weight `γ = ½ − ε/2` of the amplitude damping.
    pub fn gad_gamma(&self) -> f64 {
        0.5 - self.epsilon / 2.0
    }

    /// Per-qubit channels at time `t`: `(A, B)`.
    pub fn kraus_at(&self, t: f64) -> Result<(KrausSet, KrausSet)> {
        self.validate()?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(QcorrError::OutOfRange { name: "t", value: t, range: "[0, ∞)" });
        }
        let gamma = self.gad_gamma();
        let qubit = |t1: f64, t2: f64| -> Result<KrausSet> {
            let p = -(-t / t1).exp_m1();
            let lambda = -(-t / t2).exp_m1();
            Ok(gad_kraus(p, gamma)?.then(&pd_kraus(lambda)?))
        };
        Ok((qubit(self.t1_a, self.t2_a)?, qubit(self.t1_b, self.t2_b)?))
    }
}

/// Kraus operators of one single-qubit channel.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<CMatrix>,
}

impl KrausSet {
    /// Stores the operators as given; completeness is checked where the set is
    /// applied.
    pub fn new(operators: Vec<CMatrix>) -> Self {
        Self { operators }
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// `max |Σ E†E − I|`.
    pub fn completeness_error(&self) -> f64 {
        let Some(first) = self.operators.first() else {
            return f64::INFINITY;
        };
        let n = first.nrows();
        let sum = self.operators.iter().fold(CMatrix::zeros(n, n), |acc, e| acc + e.adjoint() * e);
        max_abs(&(sum - identity(n)))
    }

    pub fn is_complete(&self) -> bool {
        self.completeness_error() <= COMPLETENESS_TOL
    }

    /// The channel "`self` then `next`": operators `F_j E_i`.
    pub fn then(&self, next: &KrausSet) -> KrausSet {
        let operators = self.operators.iter().flat_map(|e| next.operators.iter().map(move |f| f * e)).collect();
        KrausSet { operators }
    }

    /// `Σ E ρ E†` on a single-qubit operator.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let n = rho.nrows();
        self.operators.iter().fold(CMatrix::zeros(n, n), |acc, e| acc + e * rho * e.adjoint())
    }
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(QcorrError::OutOfRange { name, value: v, range: "[0, 1]" })
    }
}

fn m2(a: f64, b: f64, cc: f64, d: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0)])
}

/// Generalized amplitude damping `E0..E3` with damping probability `p` and
/// population weight `gamma`.
pub fn gad_kraus(p: f64, gamma: f64) -> Result<KrausSet> {
    check_unit("p", p)?;
    check_unit("gamma", gamma)?;
    let g = gamma.sqrt();
    let h = (1.0 - gamma).sqrt();
    let keep = (1.0 - p).sqrt();
    let jump = p.sqrt();
    Ok(KrausSet::new(vec![
        m2(g, 0.0, 0.0, g * keep),
        m2(0.0, g * jump, 0.0, 0.0),
        m2(h * keep, 0.0, 0.0, h),
        m2(0.0, 0.0, h * jump, 0.0),
    ]))
}

/// Phase damping `E4 = √(1 − λ/2) I`, `E5 = √(λ/2) σ_z`.
pub fn pd_kraus(lambda: f64) -> Result<KrausSet> {
    check_unit("lambda", lambda)?;
    let a = (1.0 - lambda / 2.0).sqrt();
    let b = (lambda / 2.0).sqrt();
    Ok(KrausSet::new(vec![m2(a, 0.0, 0.0, a), m2(b, 0.0, 0.0, -b)]))
}

/// Independent channels on both qubits of a two-qubit state.
pub fn apply_two_qubit_channel(rho: &DensityMatrix, kraus_a: &KrausSet, kraus_b: &KrausSet) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(QcorrError::DimensionMismatch { expected: 4, actual: rho.dim() });
    }
    for set in [kraus_a, kraus_b] {
        let err = set.completeness_error();
        if err.is_nan() || err > COMPLETENESS_TOL {
            return Err(QcorrError::IncompleteKraus(err));
        }
        if set.operators().iter().any(|e| e.nrows() != 2 || e.ncols() != 2) {
            return Err(QcorrError::InvalidDimension("Kraus operators must be 2x2".into()));
        }
    }
    let mut out = CMatrix::zeros(4, 4);
    for ea in kraus_a.operators() {
        for eb in kraus_b.operators() {
            let k = kron(ea, eb);
            out += &k * rho.matrix() * k.adjoint();
        }
    }
    DensityMatrix::new(out)
}

/// State at time `t` under relaxation of both qubits, evaluated directly from
/// `t = 0` (phase damping applied after amplitude damping on each qubit).
pub fn evolve(rho0: &DensityMatrix, t: f64, params: &RelaxationParams) -> Result<DensityMatrix> {
    let (ka, kb) = params.kraus_at(t)?;
    apply_two_qubit_channel(rho0, &ka, &kb)
}

/// `exp(−i 2πJt σ_z⊗σ_z / 4)`, the scalar coupling `2πJ I_z I_z` in the
/// rotating frame.
pub fn j_coupling_unitary(j: f64, t: f64) -> CMatrix {
    let phase = 2.0 * std::f64::consts::PI * j * t / 4.0;
    let mut u = CMatrix::zeros(4, 4);
    for (i, zz) in [1.0, -1.0, -1.0, 1.0].into_iter().enumerate() {
        u[(i, i)] = c(0.0, -phase * zz).exp();
    }
    u
}

/// Pseudo-EPR gate acting on a diagonal deviation matrix
/// `diag(α, β, γ, δ)`, producing the X-shaped matrix with diagonal
/// `(α+γ, β+δ, β+δ, α+γ)/2`, corners `(γ−α)/2` and inner anti-diagonal
/// `(δ−β)/2`.
pub fn pseudo_epr_transform(populations: [f64; 4]) -> Matrix4<f64> {
    let [alpha, beta, gamma, delta] = populations;
    let outer = (alpha + gamma) / 2.0;
    let inner = (beta + delta) / 2.0;
    let corner = (gamma - alpha) / 2.0;
    let anti = (delta - beta) / 2.0;
    Matrix4::new(
        outer, 0.0, 0.0, corner, //
        0.0, inner, anti, 0.0, //
        0.0, anti, inner, 0.0, //
        corner, 0.0, 0.0, outer,
    )
}
