//! Traceless Hermitian operator bases normalized as `Tr[τ_a τ_b] = 2 δ_ab`.

use crate::error::{QcorrError, Result};
use crate::linalg::{c, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    d: usize,
    generators: Vec<CMatrix>,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// σ_x, σ_y, σ_z.
pub fn pauli_basis() -> OperatorBasis {
    gellmann_basis(2).expect("d = 2 is valid")
}

/// Generalized Gell-Mann matrices for a `d`-level system.
///
/// Ordering: for each pair `j < k` the symmetric then antisymmetric
/// off-diagonal generator, followed by the `d − 1` diagonal generators. For
/// `d = 2` this is exactly (σ_x, σ_y, σ_z).
pub fn gellmann_basis(d: usize) -> Result<OperatorBasis> {
    if d < 2 {
        return Err(QcorrError::InvalidDimension(format!("operator basis needs d >= 2, got {d}")));
    }
    let mut generators = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = c(1.0, 0.0);
            sym[(k, j)] = c(1.0, 0.0);
            generators.push(sym);

            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = c(0.0, -1.0);
            anti[(k, j)] = c(0.0, 1.0);
            generators.push(anti);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(d, d);
        for j in 0..l {
            diag[(j, j)] = c(norm, 0.0);
        }
        diag[(l, l)] = c(-(l as f64) * norm, 0.0);
        generators.push(diag);
    }
    Ok(OperatorBasis { d, generators })
}
