//! Direct measurement of the correlation matrix without tomography.
//!
//! Each element `c_νλ = Tr[(σ_ν⊗σ_λ) ρ]` is mapped onto the single-spin
//! magnetization `Tr[(σ_x⊗I) ξ]` of the state `ξ = U ρ U†`, with
//! `U = CNOT_{A→B} · (R_{φν}(θ) ⊗ R_{φλ}(θ))`. Since the CNOT maps `σ_x⊗I`
//! to `σ_x⊗σ_x` in the Heisenberg picture, the rotations only have to carry
//! σ_x to σ_ν on A and to σ_λ on B.
//!
//! On hardware the z rotations are realized as `(π/2)_{−y}(π/2)_x(π/2)_y`
//! and the CNOT as a sequence of π/2 pulses around a `U(3/2J)` free
//! evolution; here both are applied as ideal unitaries.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::basis::pauli_basis;
use crate::error::{QcorrError, Result};
use crate::linalg::{c, identity, kron, CMatrix};
use crate::measures::SMatrix;
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn pauli(self) -> CMatrix {
        let idx = match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        };
        pauli_basis().generators()[idx].clone()
    }
}

/// `exp(−i · angle · σ_axis / 2)`.
pub fn rotation_gate(axis: Axis, angle: f64) -> CMatrix {
    let (s, co) = (angle / 2.0).sin_cos();
    identity(2).scale(co) - axis.pauli().map(|z| z * c(0.0, s))
}

/// CNOT with A (the first qubit) as control.
pub fn cnot_gate() -> CMatrix {
    let mut u = CMatrix::zeros(4, 4);
    for &(row, col) in &[(0, 0), (1, 1), (3, 2), (2, 3)] {
        u[(row, col)] = c(1.0, 0.0);
    }
    u
}

/// Local rotations used to read out one correlation-matrix element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSpec {
    pub nu: usize,
    pub lambda: usize,
    pub axis_a: Axis,
    pub axis_b: Axis,
    pub angle: f64,
    /// Sign applied to the readout value.
    pub sign: f64,
}

const fn spec(nu: usize, lambda: usize, axis_a: Axis, axis_b: Axis, angle: f64, sign: f64) -> RotationSpec {
    RotationSpec { nu, lambda, axis_a, axis_b, angle, sign }
}

/// Rotation table indexed `(ν, λ)` with ν, λ ∈ {1 = x, 2 = y, 3 = z}.
pub const ROTATION_TABLE: [RotationSpec; 9] = [
    spec(1, 1, Axis::X, Axis::X, 0.0, 1.0),
    spec(2, 2, Axis::Z, Axis::Z, FRAC_PI_2, 1.0),
    spec(3, 3, Axis::Y, Axis::Y, FRAC_PI_2, 1.0),
    spec(1, 2, Axis::X, Axis::Z, 3.0 * FRAC_PI_2, 1.0),
    spec(2, 1, Axis::Z, Axis::X, 3.0 * FRAC_PI_2, 1.0),
    spec(1, 3, Axis::X, Axis::Y, FRAC_PI_2, 1.0),
    spec(3, 1, Axis::Y, Axis::X, FRAC_PI_2, 1.0),
    spec(2, 3, Axis::Z, Axis::Y, FRAC_PI_2, -1.0),
    spec(3, 2, Axis::Y, Axis::Z, FRAC_PI_2, -1.0),
];

/// Single-qubit alignment bringing σ_ν onto σ_x for the local readouts.
const LOCAL_TABLE: [(Axis, f64); 3] = [(Axis::X, 0.0), (Axis::Z, 3.0 * FRAC_PI_2), (Axis::Y, FRAC_PI_2)];

fn check_index(name: &str, v: usize) -> Result<()> {
    if (1..=3).contains(&v) {
        Ok(())
    } else {
        Err(QcorrError::InvalidIndex(format!("{name} = {v}, expected 1..=3")))
    }
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() == 4 {
        Ok(())
    } else {
        Err(QcorrError::Unsupported(format!("direct protocol needs a two-qubit state, got dim {}", rho.dim())))
    }
}

pub fn rotation_spec(nu: usize, lambda: usize) -> Result<RotationSpec> {
    check_index("nu", nu)?;
    check_index("lambda", lambda)?;
    Ok(*ROTATION_TABLE.iter().find(|s| s.nu == nu && s.lambda == lambda).expect("table is complete"))
}

impl RotationSpec {
    pub fn unitary(&self) -> CMatrix {
        cnot_gate() * kron(&rotation_gate(self.axis_a, self.angle), &rotation_gate(self.axis_b, self.angle))
    }
}

fn sigma_x_a() -> CMatrix {
    kron(&pauli_basis().generators()[0], &identity(2))
}

/// `Tr[(σ_x⊗I) U ρ U†]`.
fn magnetization(rho: &DensityMatrix, u: &CMatrix) -> f64 {
    let xi = u * rho.matrix() * u.adjoint();
    crate::linalg::trace_of_product(&sigma_x_a(), &xi).re
}

/// Readout of `c_νλ` through rotations, CNOT and a σ_x magnetization on A.
pub fn direct_correlation(rho: &DensityMatrix, nu: usize, lambda: usize) -> Result<f64> {
    check_two_qubit(rho)?;
    let spec = rotation_spec(nu, lambda)?;
    Ok(spec.sign * magnetization(rho, &spec.unitary()))
}

fn local_unitary(nu: usize) -> CMatrix {
    let (axis, angle) = LOCAL_TABLE[nu - 1];
    kron(&rotation_gate(axis, angle), &identity(2))
}

/// Readout of `x_ν = Tr[(σ_ν⊗I) ρ]` through a single rotation on A.
pub fn direct_local(rho: &DensityMatrix, nu: usize) -> Result<f64> {
    check_two_qubit(rho)?;
    check_index("nu", nu)?;
    Ok(magnetization(rho, &local_unitary(nu)))
}

/// Outcome of the direct protocol on a two-qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub x_est: [f64; 3],
    pub c_est: [[f64; 3]; 3],
    pub readout_count: usize,
    pub shots: Option<u64>,
    pub seed: u64,
}

impl MeasurementRecord {
    /// `S = (x xᵀ + C Cᵀ)/4` from the estimates.
    pub fn s_matrix(&self) -> SMatrix {
        let x = nalgebra::Vector3::from(self.x_est);
        let corr = nalgebra::DMatrix::from_fn(3, 3, |i, j| self.c_est[i][j]);
        crate::measures::s_from_parts(&x, &corr, 2)
    }

    /// Binomial standard error of each correlation estimate, `√((1 − c²)/shots)`.
    /// `None` in exact mode.
    pub fn correlation_std_errors(&self) -> Option<[[f64; 3]; 3]> {
        let n = self.shots? as f64;
        Some(self.c_est.map(|row| row.map(|v| ((1.0 - v * v).max(0.0) / n).sqrt())))
    }

    pub fn local_std_errors(&self) -> Option<[f64; 3]> {
        let n = self.shots? as f64;
        Some(self.x_est.map(|v| ((1.0 - v * v).max(0.0) / n).sqrt()))
    }
}

impl Serialize for MeasurementRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let flat: Vec<f64> = self.c_est.iter().flatten().copied().collect();
        let mut st = serializer.serialize_struct("MeasurementRecord", 5)?;
        st.serialize_field("x_est", &self.x_est)?;
        st.serialize_field("c_est", &flat)?;
        st.serialize_field("readout_count", &self.readout_count)?;
        st.serialize_field("shots", &self.shots)?;
        st.serialize_field("seed", &self.seed)?;
        st.end()
    }
}

/// Sample mean of `shots` ±1 outcomes whose exact expectation is `exact`.
fn sample_readout(exact: f64, shots: u64, seed: u64, stream: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let p_plus = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
    let k = Binomial::new(shots, p_plus).expect("p in [0, 1]").sample(&mut rng);
    (2.0 * k as f64 - shots as f64) / shots as f64
}

/// Runs the 9 correlation readouts and 3 local readouts.
///
/// With `shots = None` every readout is exact. Otherwise each readout is the
/// mean of `shots` simulated ±1 outcomes; readout `k` (row-major correlation
/// elements first, then x_1..x_3) draws from its own stream of the seeded
/// generator.
pub fn run_direct_protocol(rho: &DensityMatrix, shots: Option<u64>, seed: u64) -> Result<MeasurementRecord> {
    check_two_qubit(rho)?;
    if shots == Some(0) {
        return Err(QcorrError::OutOfRange { name: "shots", value: 0.0, range: "[1, ∞)" });
    }
    let readout = |exact_magnetization: f64, sign: f64, stream: u64| -> f64 {
        match shots {
            None => sign * exact_magnetization,
            Some(n) => sign * sample_readout(exact_magnetization, n, seed, stream),
        }
    };

    let mut c_est = [[0.0; 3]; 3];
    for nu in 1..=3 {
        for lambda in 1..=3 {
            let spec = rotation_spec(nu, lambda)?;
            let m = magnetization(rho, &spec.unitary());
            let stream = ((nu - 1) * 3 + (lambda - 1)) as u64;
            c_est[nu - 1][lambda - 1] = readout(m, spec.sign, stream);
        }
    }
    let mut x_est = [0.0; 3];
    for nu in 1..=3 {
        let m = magnetization(rho, &local_unitary(nu));
        x_est[nu - 1] = readout(m, 1.0, 8 + nu as u64);
    }
    let (readout_count, _) = measurement_budget(2)?;
    Ok(MeasurementRecord { x_est, c_est, readout_count, shots, seed })
}

/// `(3d², 4d² − 1)`: direct readouts versus full-tomography measurements.
pub fn measurement_budget(d: usize) -> Result<(usize, usize)> {
    if d < 2 {
        return Err(QcorrError::InvalidDimension(format!("measurement budget needs d >= 2, got {d}")));
    }
    Ok((3 * d * d, 4 * d * d - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::bloch_decompose;
    use crate::linalg::max_abs;
    use crate::measures::s_matrix;
    use crate::random::random_density_matrix;
    use crate::state::BellDiagonalState;
    use nalgebra::DVector;
    use std::f64::consts::PI;

    fn ket(bits: usize) -> DensityMatrix {
        let mut v = DVector::from_element(4, c(0.0, 0.0));
        v[bits] = c(1.0, 0.0);
        DensityMatrix::from_pure(&v).unwrap()
    }

    fn phi_plus() -> DensityMatrix {
        BellDiagonalState::full([1.0, -1.0, 1.0]).unwrap().density_matrix(0.0).unwrap()
    }

    #[test]
    fn rotation_basics() {
        assert!(max_abs(&(rotation_gate(Axis::Z, 0.0) - identity(2))) < 1e-15);
        let flipped = rotation_gate(Axis::Y, PI) * DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(flipped[0].norm() < 1e-15 && (flipped[1].norm() - 1.0).abs() < 1e-15);

        // R_x(π/2) σ_y R_x(π/2)† = σ_z
        let r = rotation_gate(Axis::X, FRAC_PI_2);
        let conj = &r * Axis::Y.pauli() * r.adjoint();
        assert!(max_abs(&(conj - Axis::Z.pauli())) < 1e-15);

        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for &angle in &[0.3, FRAC_PI_2, 3.0 * FRAC_PI_2, 2.0 * PI] {
                let u = rotation_gate(axis, angle);
                assert!(max_abs(&(u.adjoint() * &u - identity(2))) < 1e-12);
            }
        }
    }

    #[test]
    fn cnot_truth_table() {
        let u = cnot_gate();
        let on = |bits: usize| -> usize { (0..4).find(|&r| u[(r, bits)].norm() > 0.5).unwrap() };
        assert_eq!((on(0), on(1), on(2), on(3)), (0, 1, 3, 2));
        assert!(max_abs(&(&u * &u - identity(4))) < 1e-15);

        let h = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(1., 0.), c(-1., 0.)])
            .scale(std::f64::consts::FRAC_1_SQRT_2);
        let mut zero = DVector::from_element(4, c(0.0, 0.0));
        zero[0] = c(1.0, 0.0);
        let out = &u * kron(&h, &identity(2)) * zero;
        let rho = &out * out.adjoint();
        assert!(max_abs(&(rho - phi_plus().matrix())) < 1e-15);
    }

    #[test]
    fn direct_correlation_examples() {
        assert!((direct_correlation(&phi_plus(), 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((direct_correlation(&ket(0), 3, 3).unwrap() - 1.0).abs() < 1e-12);
        let rho2 = BellDiagonalState::full([0.5, -0.06, 0.24]).unwrap().density_matrix(0.0).unwrap();
        assert!((direct_correlation(&rho2, 2, 2).unwrap() + 0.06).abs() < 1e-12);
        assert!(direct_correlation(&rho2, 0, 1).is_err());
        assert!(direct_correlation(&rho2, 1, 4).is_err());
    }

    #[test]
    fn table_satisfies_readout_identity() {
        let p = pauli_basis();
        for seed in 0..100 {
            let rho = random_density_matrix(4, 1 + (seed as usize) % 4, seed).unwrap();
            for s in ROTATION_TABLE {
                let global = rho.expectation(&kron(&p.generators()[s.nu - 1], &p.generators()[s.lambda - 1]));
                let direct = direct_correlation(&rho, s.nu, s.lambda).unwrap();
                assert!((global - direct).abs() < 1e-12, "({},{})", s.nu, s.lambda);
            }
        }
    }

    #[test]
    fn direct_local_examples() {
        assert!((direct_local(&ket(0), 3).unwrap() - 1.0).abs() < 1e-12);
        let bell = BellDiagonalState::full([0.3, -0.2, 0.1]).unwrap().density_matrix(0.0).unwrap();
        for nu in 1..=3 {
            assert!(direct_local(&bell, nu).unwrap().abs() < 1e-12);
        }
        for seed in 0..50 {
            let rho = random_density_matrix(4, 2, seed).unwrap();
            let rec = bloch_decompose(&rho, 2).unwrap();
            for nu in 1..=3 {
                assert!((direct_local(&rho, nu).unwrap() - rec.x[nu - 1]).abs() < 1e-12);
            }
        }
        assert!(direct_local(&bell, 4).is_err());
    }

    #[test]
    fn exact_protocol_reproduces_tomographic_s() {
        for seed in 0..100 {
            let rho = random_density_matrix(4, 4, seed).unwrap();
            let rec = run_direct_protocol(&rho, None, 0).unwrap();
            assert_eq!(rec.readout_count, 12);
            let tomo = s_matrix(&bloch_decompose(&rho, 2).unwrap(), 2).unwrap();
            assert!((rec.s_matrix().matrix() - tomo.matrix()).amax() < 1e-12);
        }
    }

    #[test]
    fn shot_mode() {
        let rec = run_direct_protocol(&phi_plus(), Some(1_000_000), 5).unwrap();
        assert!((rec.c_est[0][0] - 1.0).abs() < 5e-3);
        let again = run_direct_protocol(&phi_plus(), Some(1_000_000), 5).unwrap();
        assert_eq!(rec, again);
        assert!(run_direct_protocol(&phi_plus(), Some(0), 5).is_err());
        assert!(rec.correlation_std_errors().is_some());
    }

    #[test]
    fn shot_noise_scales_as_inverse_sqrt() {
        let rho = random_density_matrix(4, 4, 77).unwrap();
        let exact = run_direct_protocol(&rho, None, 0).unwrap();
        let rms = |shots: u64| -> f64 {
            let mut acc = 0.0;
            let mut count = 0.0;
            for seed in 0..200 {
                let r = run_direct_protocol(&rho, Some(shots), seed).unwrap();
                for i in 0..3 {
                    for j in 0..3 {
                        acc += (r.c_est[i][j] - exact.c_est[i][j]).powi(2);
                        count += 1.0;
                    }
                }
            }
            (acc / count).sqrt()
        };
        let ratio = rms(1_000) / rms(4_000);
        assert!((ratio - 2.0).abs() < 0.25, "ratio {ratio}");
    }

    #[test]
    fn budget() {
        assert_eq!(measurement_budget(2).unwrap(), (12, 15));
        assert_eq!(measurement_budget(3).unwrap(), (27, 35));
        assert_eq!(measurement_budget(10).unwrap(), (300, 399));
        assert!(measurement_budget(1).is_err());
    }

    #[test]
    fn record_json_layout() {
        let rec = run_direct_protocol(&phi_plus(), None, 3).unwrap();
        let v = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["c_est"].as_array().unwrap().len(), 9);
        assert_eq!(v["readout_count"], 12);
        assert!(v["shots"].is_null());
        assert_eq!(v["seed"], 3);
    }
}
