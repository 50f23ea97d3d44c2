//! Exact arithmetic in Q(α₁, …, α_m) with an interval sign oracle.
//!
//! A [`Scalar`] is a fraction of two rational polynomials in the declared
//! irrational symbols. Fractions are never reduced by a polynomial gcd;
//! equality is decided by cross multiplication, which is sound because the
//! symbols are declared algebraically independent. Signs of non-rational
//! scalars come from evaluating numerator and denominator on interval
//! enclosures of the symbols, refined until both exclude zero.

mod basis;
mod interval;
mod poly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use basis::{parse_rational, DigitStream, IrrationalBasis, Refiner, SqrtRefiner, Symbol};
pub use interval::Interval;
pub use poly::{Exponents, Poly};

/// Initial precision of the refinement schedule, in fractional bits.
pub const START_BITS: u32 = 64;
/// Default precision budget of the sign oracle.
pub const DEFAULT_MAX_BITS: u32 = 4096;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("sign of {expr} could not be resolved within {max_bits} bits")]
    AmbiguousSign { expr: String, max_bits: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn from_i8(s: i8) -> Sign {
        match s {
            s if s < 0 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        Sign::from_i8(-self.as_i8())
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_i8(self.as_i8() * rhs.as_i8())
    }
}

/// Element of Q(α₁, …, α_m), stored as `num / den`.
///
/// Canonical form: the numerator of zero is the zero polynomial over `1`; a
/// constant denominator is folded into the numerator; otherwise the
/// denominator is monic in lex order (leading coefficient `1`), and an exact
/// polynomial quotient is taken whenever one side divides the other.
#[derive(Clone)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::from_rational(BigRational::from_integer(n))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar {
            num: Poly::constant(q),
            den: Poly::one(),
        }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(BigRational::new(n.into(), d.into()))
    }

    /// The symbol α_index.
    pub fn symbol(index: usize) -> Self {
        Scalar {
            num: Poly::variable(index),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar { num: p, den: Poly::one() }
    }

    /// `num / den` in canonical form.
    pub fn from_fraction(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar { num, den }.normalized())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den == self.num
    }

    /// The rational value if no symbol occurs.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn is_rational(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    /// Number of symbols referenced.
    pub fn num_symbols(&self) -> usize {
        self.num.num_symbols().max(self.den.num_symbols())
    }

    /// Applies the canonical-form rules; idempotent.
    pub fn normalized(self) -> Scalar {
        let Scalar { num, den } = self;
        if num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = den.as_constant() {
            return Scalar {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        if let Some(q) = num.div_exact(&den) {
            return Scalar { num: q, den: Poly::one() };
        }
        let (num, den) = match (num.is_constant(), den.div_exact(&num)) {
            // num/den = 1/q
            (false, Some(q)) => (Poly::one(), q),
            _ => (num, den),
        };
        let lc = den.leading_coeff().cloned().expect("nonzero denominator").recip();
        Scalar {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar {
            num: self.den.clone(),
            den: self.num.clone(),
        }
        .normalized())
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if rhs.den.is_one_poly() && self.den.is_one_poly() {
            return Scalar::from_fraction(self.num.clone(), rhs.num.clone());
        }
        Scalar::from_fraction(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut out = Scalar::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Exact value at a rational point of the symbols, if the denominator
    /// does not vanish there.
    pub fn eval_rational(&self, point: &[BigRational]) -> Option<BigRational> {
        let d = self.den.eval_rational(point);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_rational(point) / d)
    }

    /// Canonical textual form using the given symbol names.
    pub fn display<'a>(&'a self, basis: &'a IrrationalBasis) -> impl fmt::Display + 'a {
        ScalarDisplay { s: self, basis: Some(basis) }
    }

    fn add_impl(&self, rhs: &Scalar) -> Scalar {
        if self.den.is_one_poly() && rhs.den.is_one_poly() {
            return Scalar::from_poly(self.num.add(&rhs.num));
        }
        if self.den == rhs.den {
            return Scalar {
                num: self.num.add(&rhs.num),
                den: self.den.clone(),
            }
            .normalized();
        }
        Scalar {
            num: self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            den: self.den.mul(&rhs.den),
        }
        .normalized()
    }

    fn mul_impl(&self, rhs: &Scalar) -> Scalar {
        if self.den.is_one_poly() && rhs.den.is_one_poly() {
            return Scalar::from_poly(self.num.mul(&rhs.num));
        }
        Scalar {
            num: self.num.mul(&rhs.num),
            den: self.den.mul(&rhs.den),
        }
        .normalized()
    }

    fn neg_impl(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

trait PolyExt {
    fn is_one_poly(&self) -> bool;
}

impl PolyExt for Poly {
    fn is_one_poly(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::from_rational(q)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar::from_bigint(n)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$imp(rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$imp(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$imp(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$imp(&rhs)
            }
        }
    };
}

impl Scalar {
    fn sub_impl(&self, rhs: &Scalar) -> Scalar {
        self.add_impl(&rhs.neg_impl())
    }
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_impl()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_impl()
    }
}

struct PolyDisplay<'a>(&'a Poly, &'a dyn Fn(usize) -> String);

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_with(f, self.1)
    }
}

struct ScalarDisplay<'a> {
    s: &'a Scalar,
    basis: Option<&'a IrrationalBasis>,
}

impl fmt::Display for ScalarDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |i: usize| match self.basis {
            Some(b) => b.name(i),
            None => format!("x{}", i),
        };
        if let Some(q) = self.s.as_rational() {
            return write!(f, "{}", q);
        }
        let paren = |p: &Poly| p.num_terms() > 1;
        if paren(&self.s.num) && !self.s.den.is_one_poly() {
            write!(f, "(")?;
            self.s.num.fmt_with(f, &names)?;
            write!(f, ")")?;
        } else {
            self.s.num.fmt_with(f, &names)?;
        }
        if !self.s.den.is_one_poly() {
            let den = PolyDisplay(&self.s.den, &names).to_string();
            if paren(&self.s.den) || den.contains(['*', '/']) {
                write!(f, "/({})", den)?;
            } else {
                write!(f, "/{}", den)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ScalarDisplay { s: self, basis: None })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ScalarDisplay { s: self, basis: None })
    }
}

/// Sign oracle over a fixed irrational basis.
///
/// Cheap to clone; the basis is shared and its refinement caches are
/// thread-safe.
#[derive(Clone, Debug)]
pub struct ScalarField {
    basis: Arc<IrrationalBasis>,
    max_bits: u32,
}

impl ScalarField {
    pub fn new(basis: Arc<IrrationalBasis>) -> Self {
        ScalarField {
            basis,
            max_bits: DEFAULT_MAX_BITS,
        }
    }

    /// Field with no symbols: plain rational arithmetic.
    pub fn rational() -> Self {
        ScalarField::new(Arc::new(IrrationalBasis::empty()))
    }

    pub fn with_max_bits(mut self, max_bits: u32) -> Self {
        self.max_bits = max_bits;
        self
    }

    pub fn basis(&self) -> &IrrationalBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<IrrationalBasis> {
        &self.basis
    }

    pub fn max_bits(&self) -> u32 {
        self.max_bits
    }

    /// Sign of `x`, never wrong: either resolved exactly or `AmbiguousSign`.
    pub fn sign(&self, x: &Scalar) -> Result<Sign, ScalarError> {
        self.sign_with_budget(x, self.max_bits)
    }

    pub fn sign_with_budget(&self, x: &Scalar, max_bits: u32) -> Result<Sign, ScalarError> {
        if x.num.is_zero() {
            return Ok(Sign::Zero);
        }
        if let (Some(n), Some(d)) = (x.num.constant_sign(), x.den.constant_sign()) {
            return Ok(Sign::from_i8(n * d));
        }
        if x.num_symbols() > self.basis.len() {
            return Err(ScalarError::AmbiguousSign {
                expr: format!("{:?}", x),
                max_bits,
            });
        }
        let try_at = |bits: u32, work_bits: u32| -> Option<Sign> {
            let enc = self.basis.enclosures_at(bits);
            let n = x.num.eval_interval(&enc, work_bits).sign()?;
            let d = x.den.eval_interval(&enc, work_bits).sign()?;
            Some(Sign::from_i8(n * d))
        };
        if let Some(s) = try_at(0, START_BITS) {
            return Ok(s);
        }
        let mut bits = START_BITS;
        while bits <= max_bits {
            if let Some(s) = try_at(bits, bits + 16) {
                return Ok(s);
            }
            bits = bits.saturating_mul(2);
        }
        Err(ScalarError::AmbiguousSign {
            expr: format!("{}", x.display(&self.basis)),
            max_bits,
        })
    }

    pub fn is_positive(&self, x: &Scalar) -> Result<bool, ScalarError> {
        Ok(self.sign(x)? == Sign::Positive)
    }

    pub fn is_negative(&self, x: &Scalar) -> Result<bool, ScalarError> {
        Ok(self.sign(x)? == Sign::Negative)
    }

    pub fn cmp(&self, a: &Scalar, b: &Scalar) -> Result<std::cmp::Ordering, ScalarError> {
        Ok(match self.sign(&(a - b))? {
            Sign::Negative => std::cmp::Ordering::Less,
            Sign::Zero => std::cmp::Ordering::Equal,
            Sign::Positive => std::cmp::Ordering::Greater,
        })
    }

    pub fn abs(&self, x: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(match self.sign(x)? {
            Sign::Negative => -x,
            _ => x.clone(),
        })
    }

    /// Floating point approximation for display purposes only.
    pub fn approx_f64(&self, x: &Scalar) -> f64 {
        if let Some(q) = x.as_rational() {
            return q.to_f64().unwrap_or(f64::NAN);
        }
        let enc = self.basis.enclosures_at(START_BITS);
        let n = x.num.eval_interval(&enc, START_BITS + 16).midpoint();
        let d = x.den.eval_interval(&enc, START_BITS + 16).midpoint();
        if d.is_zero() {
            return f64::NAN;
        }
        (n / d).to_f64().unwrap_or(f64::NAN)
    }

    /// `true` for scalars whose value is certified positive or zero.
    pub fn is_nonnegative(&self, x: &Scalar) -> Result<bool, ScalarError> {
        Ok(self.sign(x)? != Sign::Negative)
    }
}

/// Value of a rational, used in tests and diagnostics.
pub fn rational_sign(q: &BigRational) -> Sign {
    if q.is_positive() {
        Sign::Positive
    } else if q.is_negative() {
        Sign::Negative
    } else {
        Sign::Zero
    }
}
