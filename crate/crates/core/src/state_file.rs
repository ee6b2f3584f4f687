//! JSON state files.
//!
//! ```json
//! {"kind": "matrix", "dim": 4, "re": [[...], ...], "im": [[...], ...]}
//! {"kind": "bell", "c": [0.5, -0.06, 0.24], "mode": "deviation"}
//! ```
//!
//! `im` may be omitted for real matrices; `mode` defaults to `full`.

use serde::{Deserialize, Serialize};

use crate::error::{QcorrError, Result};
use crate::linalg::{c, CMatrix};
use crate::state::{BellDiagonalState, BellMode, DensityMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateFile {
    Matrix {
        dim: usize,
        re: Vec<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
    Bell {
        c: [f64; 3],
        mode: BellMode,
    },
}

fn default_mode() -> BellMode {
    BellMode::Full
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFields {
    dim: usize,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BellFields {
    c: [f64; 3],
    #[serde(default = "default_mode")]
    mode: BellMode,
}

fn fields<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            QcorrError::StateFile(e.into_inner().to_string())
        } else {
            QcorrError::StateFile(format!("field `{path}`: {}", e.into_inner()))
        }
    })
}

/// A state read from file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Matrix(DensityMatrix),
    Bell(BellDiagonalState),
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| QcorrError::StateFile(e.to_string()))?;
        let obj = value.as_object_mut().ok_or_else(|| QcorrError::StateFile("expected a JSON object".into()))?;
        let kind = obj.remove("kind").ok_or_else(|| QcorrError::StateFile("missing field `kind`".into()))?;
        match kind.as_str() {
            Some("matrix") => {
                let MatrixFields { dim, re, im } = fields(value)?;
                Ok(StateFile::Matrix { dim, re, im })
            }
            Some("bell") => {
                let BellFields { c, mode } = fields(value)?;
                Ok(StateFile::Bell { c, mode })
            }
            _ => Err(QcorrError::StateFile(format!("field `kind`: expected \"matrix\" or \"bell\", got {kind}"))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serializes")
    }

    pub fn from_matrix(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let n = m.nrows();
        let rows = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        StateFile::Matrix { dim: n, re: rows(|z| z.re), im: Some(rows(|z| z.im)) }
    }

    pub fn from_bell(state: &BellDiagonalState) -> Self {
        StateFile::Bell { c: state.coefficients(), mode: state.mode() }
    }

    /// Shape checks name the offending field; positivity failures surface as
    /// [`QcorrError::NotPositive`] with the smallest eigenvalue.
    pub fn into_state(self) -> Result<LoadedState> {
        match self {
            StateFile::Bell { c, mode } => Ok(LoadedState::Bell(BellDiagonalState::new(c, mode)?)),
            StateFile::Matrix { dim, re, im } => {
                if dim < 4 || dim % 2 != 0 {
                    return Err(QcorrError::StateFile(format!("field `dim`: expected an even value >= 4, got {dim}")));
                }
                check_shape("re", &re, dim)?;
                if let Some(im) = &im {
                    check_shape("im", im, dim)?;
                }
                let m = CMatrix::from_fn(dim, dim, |i, j| c(re[i][j], im.as_ref().map_or(0.0, |im| im[i][j])));
                Ok(LoadedState::Matrix(DensityMatrix::new(m)?))
            }
        }
    }
}

fn check_shape(field: &str, rows: &[Vec<f64>], dim: usize) -> Result<()> {
    if rows.len() != dim {
        return Err(QcorrError::StateFile(format!("field `{field}`: expected {dim} rows, got {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(QcorrError::StateFile(format!(
                "field `{field}[{i}]`: expected {dim} entries, got {}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(QcorrError::StateFile(format!("field `{field}[{i}][{j}]`: not a finite number")));
        }
    }
    Ok(())
}

impl LoadedState {
    /// Dimension `d` of subsystem B.
    pub fn subsystem_dim(&self) -> usize {
        match self {
            LoadedState::Matrix(rho) => rho.dim() / 2,
            LoadedState::Bell(_) => 2,
        }
    }
}
