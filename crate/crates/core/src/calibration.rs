//! Calibrations h: Z^N → Γ ⊂ R^d and the lattice Ξ = ker(h).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use thiserror::Error;

use crate::linalg::{int_kernel_scalar, monomial_expansion, rank_of, solve_int_scalar, LinalgError, ScalarMatrix, ScalarVector};
use crate::scalar::{Scalar, ScalarField};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CalibrationError {
    #[error("calibration matrix has {rows} rows, expected d = {d}")]
    RowCount { rows: usize, d: usize },
    #[error("virtual index {0} out of range")]
    VirtualOutOfRange(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `h` as a `d × N` matrix whose column `i` is `h(e_i)`, with the virtual
/// generator indices `𝓘` (0-based).
#[derive(Clone, Debug)]
pub struct Calibration {
    field: ScalarField,
    columns: ScalarMatrix,
    virtual_set: BTreeSet<usize>,
}

/// Z-basis of `Ξ = {m ∈ Z^N : Σ m_i h(e_i) = 0}` in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiLattice {
    pub basis: Vec<Vec<BigInt>>,
    pub rank: usize,
}

impl Calibration {
    pub fn new(field: &ScalarField, d: usize, columns: ScalarMatrix, virtual_set: BTreeSet<usize>) -> Result<Self, CalibrationError> {
        if columns.rows() != d {
            return Err(CalibrationError::RowCount { rows: columns.rows(), d });
        }
        if let Some(&i) = virtual_set.iter().find(|&&i| i >= columns.cols()) {
            return Err(CalibrationError::VirtualOutOfRange(i));
        }
        Ok(Calibration {
            field: field.clone(),
            columns,
            virtual_set,
        })
    }

    pub fn from_columns(field: &ScalarField, d: usize, cols: &[ScalarVector], virtual_set: &[usize]) -> Result<Self, CalibrationError> {
        let m = ScalarMatrix::from_columns(d, cols)?;
        Calibration::new(field, d, m, virtual_set.iter().copied().collect())
    }

    pub fn from_int_columns(field: &ScalarField, d: usize, cols: &[Vec<i64>], virtual_set: &[usize]) -> Result<Self, CalibrationError> {
        let cols: Vec<ScalarVector> = cols.iter().map(|c| crate::linalg::int_vector(c)).collect();
        Calibration::from_columns(field, d, &cols, virtual_set)
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn d(&self) -> usize {
        self.columns.rows()
    }

    pub fn n(&self) -> usize {
        self.columns.cols()
    }

    pub fn matrix(&self) -> &ScalarMatrix {
        &self.columns
    }

    pub fn column(&self, i: usize) -> ScalarVector {
        self.columns.col(i)
    }

    pub fn columns(&self, idx: &[usize]) -> Vec<ScalarVector> {
        idx.iter().map(|&i| self.column(i)).collect()
    }

    pub fn virtual_set(&self) -> &BTreeSet<usize> {
        &self.virtual_set
    }

    pub fn is_virtual(&self, i: usize) -> bool {
        self.virtual_set.contains(&i)
    }

    pub fn non_virtual(&self) -> Vec<usize> {
        (0..self.n()).filter(|i| !self.is_virtual(*i)).collect()
    }

    /// First `d` columns are `e_1..e_d` and `𝓘` is a terminal segment.
    pub fn is_standard(&self) -> bool {
        let d = self.d();
        let n = self.n();
        if n < d {
            return false;
        }
        for j in 0..d {
            for i in 0..d {
                let want = if i == j { Scalar::one() } else { Scalar::zero() };
                if *self.columns.get(i, j) != want {
                    return false;
                }
            }
        }
        let k = self.virtual_set.len();
        self.virtual_set.iter().copied().eq(n - k..n)
    }

    /// Non-virtual columns span R^d.
    pub fn validate_virtual_span(&self) -> bool {
        rank_of(self.d(), &self.columns(&self.non_virtual())) == self.d()
    }

    pub fn xi_lattice(&self) -> XiLattice {
        let basis = int_kernel_scalar(&self.columns);
        XiLattice { rank: basis.len(), basis }
    }

    /// Rank over Q of the per-monomial integer system defining Ξ.
    pub fn monomial_rank(&self) -> usize {
        monomial_expansion(&self.columns).rank()
    }

    /// Integer coordinates of `v` on the generators of Γ, if `v ∈ Γ`.
    pub fn gamma_coordinates(&self, v: &[Scalar]) -> Option<Vec<BigInt>> {
        solve_int_scalar(&self.columns, v).ok()
    }

    /// Same columns with a different virtual set.
    pub fn with_virtual(&self, virtual_set: BTreeSet<usize>) -> Result<Self, CalibrationError> {
        Calibration::new(&self.field, self.d(), self.columns.clone(), virtual_set)
    }
}
