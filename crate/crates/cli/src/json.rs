use std::collections::BTreeSet;

use num_bigint::BigInt;
use qtoric::io::format_scalar;
use qtoric::{IntMatrix, IrrationalBasis, Scalar, ScalarMatrix};
use serde_json::{json, Value};

pub fn scalar(x: &Scalar, basis: &IrrationalBasis) -> Value {
    Value::String(format_scalar(x, basis))
}

pub fn vector(v: &[Scalar], basis: &IrrationalBasis) -> Value {
    Value::Array(v.iter().map(|x| scalar(x, basis)).collect())
}

pub fn matrix(m: &ScalarMatrix, basis: &IrrationalBasis) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector(r, basis)).collect())
}

pub fn int(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(n) => json!(n),
        Err(_) => Value::String(x.to_string()),
    }
}

pub fn int_vector(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn int_rows(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(rows.iter().map(|r| int_vector(r)).collect())
}

pub fn int_matrix(m: &IntMatrix) -> Value {
    int_rows(&m.to_rows())
}

pub fn set(s: &BTreeSet<usize>) -> Value {
    json!(s)
}

/// Rescales so that the last nonzero entry is 1.
pub fn normalized_line(v: &[Scalar]) -> Vec<Scalar> {
    match v.iter().rev().find(|x| !x.is_zero()) {
        Some(p) => {
            let p = p.clone();
            v.iter().map(|x| x.checked_div(&p).expect("nonzero pivot")).collect()
        }
        None => v.to_vec(),
    }
}

/// `x0^2*x3`, or `1` for the empty monomial.
pub fn monomial(exponents: &[u64]) -> String {
    let parts: Vec<String> = exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{}", i) } else { format!("x{}^{}", i, e) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}
