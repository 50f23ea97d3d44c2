use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::linalg::ScalarVector;
use crate::scalar::{Scalar, ScalarError, ScalarField, Sign};

/// Canonical positive representative of the ray through `v`: a primitive
/// integer vector when `v` is rational, otherwise `v / |v_k|` for the first
/// nonzero coordinate `k`.
pub fn normalize_ray(field: &ScalarField, v: &[Scalar]) -> Result<ScalarVector, ScalarError> {
    if let Some(q) = v.iter().map(Scalar::as_rational).collect::<Option<Vec<_>>>() {
        return Ok(primitive(&q).into_iter().map(Scalar::from_bigint).collect());
    }
    let Some(k) = v.iter().position(|x| !x.is_zero()) else {
        return Ok(v.to_vec());
    };
    let scale = field.abs(&v[k])?.inv()?;
    Ok(v.iter().map(|x| x * &scale).collect())
}

/// Primitive integer vector positively proportional to a rational vector.
pub fn primitive(q: &[BigRational]) -> Vec<BigInt> {
    let l = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = q.iter().map(|x| (x * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// `u = λ v` for some `λ > 0`.
pub fn positively_proportional(field: &ScalarField, u: &[Scalar], v: &[Scalar]) -> Result<bool, ScalarError> {
    let Some(k) = v.iter().position(|x| !x.is_zero()) else {
        return Ok(u.iter().all(Scalar::is_zero));
    };
    let lambda = u[k].checked_div(&v[k])?;
    if lambda.is_zero() || !u.iter().zip(v).all(|(x, y)| *x == &lambda * y) {
        return Ok(false);
    }
    Ok(field.sign(&lambda)? == Sign::Positive)
}

/// `u = λ v` for some `λ ≠ 0`.
pub fn proportional(u: &[Scalar], v: &[Scalar]) -> bool {
    let Some(k) = v.iter().position(|x| !x.is_zero()) else {
        return u.iter().all(Scalar::is_zero);
    };
    let Ok(lambda) = u[k].checked_div(&v[k]) else {
        return false;
    };
    !lambda.is_zero() && u.iter().zip(v).all(|(x, y)| *x == &lambda * y)
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn add_vectors(a: &[Scalar], b: &[Scalar]) -> ScalarVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale_vector(a: &[Scalar], c: &Scalar) -> ScalarVector {
    a.iter().map(|x| x * c).collect()
}

pub fn neg_vector(a: &[Scalar]) -> ScalarVector {
    a.iter().map(|x| -x).collect()
}
