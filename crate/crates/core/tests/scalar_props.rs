use std::sync::Arc;

use proptest::prelude::*;
use qtoric::scalar::Sign;
use qtoric::{IrrationalBasis, Scalar, ScalarError, ScalarField};

/// A multilinear polynomial in u = √2, v = √3 as `(coefficient, deg u, deg v)`
/// terms; multilinearity keeps its real value zero only when it is zero,
/// and the float evaluation is computed without the library.
#[derive(Clone, Debug)]
struct Recipe(Vec<(i64, u32, u32)>);

impl Recipe {
    fn scalar(&self) -> Scalar {
        self.0.iter().fold(Scalar::zero(), |acc, &(c, a, b)| {
            acc + Scalar::from_int(c) * Scalar::symbol(0).pow(a) * Scalar::symbol(1).pow(b)
        })
    }

    fn float(&self) -> f64 {
        self.0
            .iter()
            .map(|&(c, a, b)| c as f64 * 2f64.sqrt().powi(a as i32) * 3f64.sqrt().powi(b as i32))
            .sum()
    }
}

fn field() -> ScalarField {
    ScalarField::new(Arc::new(IrrationalBasis::sqrt_symbols(&[("u", 2), ("v", 3)]).unwrap()))
}

fn recipe() -> impl Strategy<Value = Recipe> {
    proptest::collection::vec((-6i64..=6, 0u32..2, 0u32..2), 0..4).prop_map(Recipe)
}

/// `(scalar, float value or None when the denominator vanishes)`.
fn fraction() -> impl Strategy<Value = (Scalar, f64)> {
    (recipe(), recipe()).prop_map(|(n, d)| {
        let ds = d.scalar();
        if ds.is_zero() {
            (n.scalar(), n.float())
        } else {
            (n.scalar().checked_div(&ds).unwrap(), n.float() / d.float())
        }
    })
}

fn add(a: &Scalar, b: &Scalar) -> Scalar {
    a.clone() + b.clone()
}

fn mul(a: &Scalar, b: &Scalar) -> Scalar {
    a.clone() * b.clone()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms((x, _) in fraction(), (y, _) in fraction(), (z, _) in fraction()) {
        prop_assert_eq!(add(&x, &y), add(&y, &x));
        prop_assert_eq!(mul(&x, &y), mul(&y, &x));
        prop_assert_eq!(add(&add(&x, &y), &z), add(&x, &add(&y, &z)));
        prop_assert_eq!(mul(&mul(&x, &y), &z), mul(&x, &mul(&y, &z)));
        prop_assert_eq!(mul(&x, &add(&y, &z)), add(&mul(&x, &y), &mul(&x, &z)));
        prop_assert_eq!(add(&x, &Scalar::zero()), x.clone());
        prop_assert_eq!(mul(&x, &Scalar::one()), x.clone());
        prop_assert!(add(&x, &-x.clone()).is_zero());
        if x.is_zero() {
            prop_assert_eq!(x.inv().unwrap_err(), ScalarError::DivisionByZero);
        } else {
            prop_assert!(mul(&x, &x.inv().unwrap()).is_one());
            prop_assert_eq!(mul(&y, &x).checked_div(&x).unwrap(), y.clone());
        }
    }

    #[test]
    fn signs((x, fx) in fraction(), (y, fy) in fraction()) {
        let f = field();
        let sx = f.sign(&x).unwrap();
        let sy = f.sign(&y).unwrap();
        if fx.abs() > 1e-9 {
            prop_assert_eq!(sx, if fx > 0.0 { Sign::Positive } else { Sign::Negative });
        }
        prop_assert_eq!(x.is_zero(), sx == Sign::Zero);
        prop_assert_eq!(f.sign(&-x.clone()).unwrap(), sx.flip());
        prop_assert_eq!(f.sign(&mul(&x, &y)).unwrap().as_i8(), sx.as_i8() * sy.as_i8());
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(f.cmp(&x, &y).unwrap(), fx.partial_cmp(&fy).unwrap());
        }
    }

    #[test]
    fn normalization_is_idempotent((x, _) in fraction()) {
        let once = x.clone().normalized();
        let twice = once.clone().normalized();
        prop_assert_eq!(once.numerator(), twice.numerator());
        prop_assert_eq!(once.denominator(), twice.denominator());
        prop_assert_eq!(once, x);
    }
}

#[test]
fn dependent_symbols_fail_safe() {
    let f = field().with_max_bits(256);
    // u² − 2 is zero in the reals, but the symbols are treated as independent
    let x = Scalar::symbol(0).pow(2) - Scalar::from_int(2);
    assert!(matches!(f.sign(&x), Err(ScalarError::AmbiguousSign { max_bits: 256, .. })));
}
