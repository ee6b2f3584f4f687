//! Geometric discord, its lower bound `Q`, negativity of quantumness and
//! entanglement negativity.
//!
//! All discord-type quantities are functions of the 3×3 matrix
//!
//! ```text
//! S = 1/(2d) · ( x xᵀ + (d/2) C Cᵀ )
//! ```
//!
//! built from the Bloch record (see [`crate::bloch`] for the normalization;
//! for two qubits this is `(x xᵀ + C Cᵀ)/4`). With `k_max` the largest
//! eigenvalue of `S`, `D_G = 2(Tr S − k_max)`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_decompose, decompose_operator, BlochRecord};
use crate::error::{QcorrError, Result};
use crate::linalg::{hermitian_eigenvalues, partial_transpose_b, sym3_eigenvalues, SYMMETRY_TOL};
use crate::state::{BellDiagonalState, DensityMatrix, DeviationState, PSD_TOL};

/// Below `DEGENERACY_REL · (Tr S)²` the spread `3Tr[S²] − Tr[S]²` is treated
/// as zero and θ is reported as degenerate.
pub const DEGENERACY_REL: f64 = 1e-24;

/// Tolerance on off-diagonal correlations and transverse local components
/// for a state to count as Bell-diagonal.
pub const BELL_DIAGONAL_TOL: f64 = 1e-8;

/// The real symmetric positive semidefinite matrix feeding the discord formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix(Matrix3<f64>);

impl SMatrix {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let scale = m.amax().max(1.0);
        let asym = (m - m.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(QcorrError::NotSymmetric(asym));
        }
        let m = (m + m.transpose()) * 0.5;
        let min = sym3_eigenvalues(&m)?[2];
        if min < PSD_TOL * scale {
            return Err(QcorrError::NotPositive(min));
        }
        Ok(Self(m))
    }

    /// `diag(c_i²/4)`, the S matrix of a Bell-diagonal state.
    pub fn bell_diagonal(c: [f64; 3]) -> Self {
        Self(Matrix3::from_diagonal(&Vector3::from(c.map(|v| v * v / 4.0))))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        sym3_eigenvalues(&self.0).expect("S is symmetric by construction")
    }

    /// `(Tr S, 3Tr[S²] − Tr[S]², 2Tr[S]³ − 9Tr[S]Tr[S²] + 9Tr[S³])`,
    /// evaluated through the centered matrix `S − (Tr S/3) I` to avoid
    /// cancellation.
    fn moments(&self) -> (f64, f64, f64) {
        let t1 = self.0.trace();
        let b = self.0 - Matrix3::identity() * (t1 / 3.0);
        let b2 = b * b;
        let spread = 3.0 * b2.trace();
        let skew = 9.0 * (b2 * b).trace();
        (t1, spread.max(0.0), skew)
    }
}

/// `S = (x xᵀ + (d/2) C Cᵀ)/(2d)`.
pub fn s_matrix(record: &BlochRecord, d: usize) -> Result<SMatrix> {
    record.check_dim(d)?;
    Ok(s_from_parts(&record.x, &record.corr, d))
}

pub(crate) fn s_from_parts(x: &Vector3<f64>, corr: &nalgebra::DMatrix<f64>, d: usize) -> SMatrix {
    let df = d as f64;
    let cct = corr * corr.transpose();
    let cct = Matrix3::from_fn(|i, j| cct[(i, j)]);
    let m = (x * x.transpose() + cct * (df / 2.0)) / (2.0 * df);
    SMatrix((m + m.transpose()) * 0.5)
}

/// Closed-form geometric discord
///
/// ```text
/// D_G = (4/3) Tr S − (2/3) √(6Tr[S²] − 2Tr[S]²) · cos(θ/3)
/// θ   = arccos{ √2 (2Tr[S]³ − 9Tr[S]Tr[S²] + 9Tr[S³]) (3Tr[S²] − Tr[S]²)^(−3/2) }
/// ```
///
/// Returns `(D_G, θ)`; θ is `None` when all eigenvalues of S coincide, in
/// which case θ = 0 is used (D_G = Q).
pub fn geometric_discord_closed(s: &SMatrix) -> (f64, Option<f64>) {
    let (t1, spread, skew) = s.moments();
    let radical = (2.0 * spread).sqrt();
    if spread <= DEGENERACY_REL * t1 * t1 {
        return (4.0 / 3.0 * t1 - 2.0 / 3.0 * radical, None);
    }
    let arg = (std::f64::consts::SQRT_2 * skew * spread.powf(-1.5)).clamp(-1.0, 1.0);
    let theta = arg.acos();
    (4.0 / 3.0 * t1 - 2.0 / 3.0 * radical * (theta / 3.0).cos(), Some(theta))
}

/// `2(Tr S − k_max)` with `k_max` from the Jacobi eigensolver.
pub fn geometric_discord_eig(s: &SMatrix) -> f64 {
    let m = crate::linalg::CMatrix::from_fn(3, 3, |i, j| crate::linalg::c(s.0[(i, j)], 0.0));
    let k_max = hermitian_eigenvalues(&m).expect("3x3 is within the Jacobi limit")[0];
    2.0 * (s.trace() - k_max)
}

/// Lower bound `Q`: the closed form at θ = 0.
pub fn q_lower_bound(s: &SMatrix) -> f64 {
    let (t1, spread, _) = s.moments();
    4.0 / 3.0 * t1 - 2.0 / 3.0 * (2.0 * spread).sqrt()
}

/// Half the intermediate `|c_i|`.
pub fn negativity_of_quantumness_bell(state: &BellDiagonalState) -> f64 {
    middle_abs_half(state.coefficients())
}

fn middle_abs_half(c: [f64; 3]) -> f64 {
    let mut m = c.map(f64::abs);
    m.sort_by(|a, b| b.total_cmp(a));
    m[1] / 2.0
}

/// Entanglement negativity of a two-qubit state, normalized so that a Bell
/// state has `N = 1`: twice the sum of the magnitudes of the negative
/// eigenvalues of the partial transpose.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(QcorrError::Unsupported(format!(
            "negativity is implemented for two qubits only (dim 4), got dim {}",
            rho.dim()
        )));
    }
    let pt = partial_transpose_b(rho.matrix(), 2, 2);
    let eig = hermitian_eigenvalues(&pt)?;
    Ok(2.0 * eig.iter().filter(|&&v| v < 0.0).map(|v| -v).sum::<f64>())
}

/// How the Bloch components are scaled before the measures are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Plain state; all measures dimensionless.
    Full,
    /// NMR deviation units: `x`, `y`, `C` divided by ε, so `D_G`, `Q` come
    /// out in units of ε² and `Q_N` in units of ε.
    Deviation { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub scale: Scale,
    /// When false, the local vector `x` is dropped from S.
    pub include_local_bloch: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { scale: Scale::Full, include_local_bloch: true }
    }
}

impl ReportOptions {
    pub fn deviation(epsilon: f64) -> Self {
        Self { scale: Scale::Deviation { epsilon }, include_local_bloch: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// Every measure is dimensionless.
    Absolute,
    /// `d_g`, `q` in ε², `q_n` in ε; `negativity` is of the physical state.
    Deviation,
}

impl Units {
    pub fn describe(&self) -> &'static str {
        match self {
            Units::Absolute => "d_g, q, q_n, negativity dimensionless",
            Units::Deviation => "d_g, q in eps^2; q_n in eps; negativity of the physical state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub d_g: f64,
    pub q: f64,
    /// `None` when θ is degenerate (all eigenvalues of S equal).
    pub theta: Option<f64>,
    /// Only for (numerically) Bell-diagonal two-qubit states.
    pub q_n: Option<f64>,
    /// Only for two-qubit states.
    pub negativity: Option<f64>,
    pub units: Units,
}

/// All measures of a state.
pub fn full_report(rho: &DensityMatrix, d: usize, options: &ReportOptions) -> Result<CorrelationReport> {
    let (record, units) = scaled_record(rho, d, options.scale)?;
    let neg = if d == 2 { Some(negativity(rho)?) } else { None };
    report_from_record(&record, d, options.include_local_bloch, neg, units)
}

/// Bloch record of `rho`, divided by `ε` on the deviation scale.
pub fn scaled_record(rho: &DensityMatrix, d: usize, scale: Scale) -> Result<(BlochRecord, Units)> {
    let mut record = bloch_decompose(rho, d)?;
    let units = match scale {
        Scale::Full => Units::Absolute,
        Scale::Deviation { epsilon } => {
            if epsilon.is_nan() || epsilon <= 0.0 {
                return Err(QcorrError::OutOfRange { name: "epsilon", value: epsilon, range: "(0, 1]" });
            }
            record.x /= epsilon;
            record.y /= epsilon;
            record.corr /= epsilon;
            Units::Deviation
        }
    };
    Ok((record, units))
}

pub fn deviation_report(state: &DeviationState, include_local_bloch: bool) -> Result<CorrelationReport> {
    let n = state.delta().nrows();
    if !n.is_multiple_of(2) || n < 4 {
        return Err(QcorrError::InvalidDimension(format!("deviation matrix of dim {n} is not 2⊗d")));
    }
    let d = n / 2;
    let record = decompose_operator(state.delta(), d)?;
    let neg = if d == 2 { Some(negativity(&state.compose()?)?) } else { None };
    report_from_record(&record, d, include_local_bloch, neg, Units::Deviation)
}

/// Whether a record is Bell-diagonal: diagonal `C`, no transverse local
/// components. The z components of `x` and `y` are tolerated since
/// generalized amplitude damping polarizes both qubits along z.
pub fn is_bell_diagonal(record: &BlochRecord) -> bool {
    if record.subsystem_dim() != Some(2) {
        return false;
    }
    let off_diag = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .all(|(i, j)| record.corr[(i, j)].abs() <= BELL_DIAGONAL_TOL);
    let transverse = [record.x[0], record.x[1], record.y[0], record.y[1]].iter().all(|v| v.abs() <= BELL_DIAGONAL_TOL);
    off_diag && transverse
}

pub fn report_from_record(
    record: &BlochRecord,
    d: usize,
    include_local_bloch: bool,
    negativity: Option<f64>,
    units: Units,
) -> Result<CorrelationReport> {
    let x = if include_local_bloch { record.x } else { Vector3::zeros() };
    record.check_dim(d)?;
    let s = s_from_parts(&x, &record.corr, d);
    let (d_g, theta) = geometric_discord_closed(&s);
    let q = q_lower_bound(&s);
    let q_n = is_bell_diagonal(record)
        .then(|| middle_abs_half([record.corr[(0, 0)], record.corr[(1, 1)], record.corr[(2, 2)]]));
    Ok(CorrelationReport { d_g, q, theta, q_n, negativity, units })
}
