//! Exact dense linear algebra over Q(α₁, …, α_m) and over Z.

mod int;
mod matrix;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

pub use int::{big_vec, IntMatrix};
pub use matrix::{dot, int_vector, rank_of, unit_vector, ScalarMatrix, ScalarVector};

use crate::scalar::{Exponents, Poly, Scalar, ScalarError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("system is inconsistent")]
    Inconsistent,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Integer matrix `E` with the same integer solutions as `m`:
/// for `x ∈ Z^cols`, `m · x = 0` iff `E · x = 0`.
///
/// Each row of `m` is multiplied by the product of its distinct
/// denominators, then split into one rational equation per monomial in the
/// symbols; denominators of the rational coefficients are cleared last.
/// This is exact because the symbols are independent.
pub fn monomial_expansion(m: &ScalarMatrix) -> IntMatrix {
    let cols = m.cols();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..m.rows() {
        let row = m.row(i);
        let mut dens: Vec<Poly> = Vec::new();
        for x in &row {
            let d = x.denominator();
            if d.as_constant().is_some_and(|c| c.is_one()) || dens.contains(d) {
                continue;
            }
            dens.push(d.clone());
        }
        let common = dens.iter().fold(Poly::one(), |acc, d| acc.mul(d));
        let mut by_monomial: BTreeMap<Exponents, Vec<BigRational>> = BTreeMap::new();
        for (j, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let poly = if dens.is_empty() {
                x.numerator().clone()
            } else {
                let q = common
                    .div_exact(x.denominator())
                    .expect("denominator divides the product of row denominators");
                x.numerator().mul(&q)
            };
            for (e, c) in poly.terms() {
                by_monomial
                    .entry(e.clone())
                    .or_insert_with(|| vec![BigRational::from_integer(0.into()); cols])[j] += c;
            }
        }
        for coeffs in by_monomial.into_values() {
            let l = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            out.push(coeffs.iter().map(|c| (c * &l).to_integer()).collect());
        }
    }
    IntMatrix::from_big_rows(out, cols)
}

/// Z-basis (HNF rows) of `{x ∈ Z^cols : m · x = 0}` for a matrix over Q(α).
pub fn int_kernel_scalar(m: &ScalarMatrix) -> Vec<Vec<BigInt>> {
    let e = monomial_expansion(m);
    if e.rows() == 0 {
        return IntMatrix::identity(m.cols()).to_rows();
    }
    e.int_kernel()
}

/// Some integer `x` with `m · x = b`, for `m` and `b` over Q(α).
pub fn solve_int_scalar(m: &ScalarMatrix, b: &[Scalar]) -> Result<Vec<BigInt>, LinalgError> {
    let rhs = ScalarMatrix::from_columns(m.rows(), &[b.to_vec()])?;
    let e = monomial_expansion(&m.hstack(&rhs)?);
    let n = m.cols();
    let idx: Vec<usize> = (0..n).collect();
    let lhs = e.select_columns(&idx);
    let rhs: Vec<BigInt> = e.col(n);
    lhs.solve_int(&rhs)
}
