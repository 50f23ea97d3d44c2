use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;

/// Exponent vector of a monomial, with trailing zeros trimmed so that every
/// monomial has exactly one representation. `Vec` ordering on trimmed vectors
/// coincides with lexicographic order on the zero-padded vectors.
pub type Exponents = Vec<u32>;

fn trim(mut e: Exponents) -> Exponents {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn add_exponents(a: &[u32], b: &[u32]) -> Exponents {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect();
    trim(out)
}

fn sub_exponents(a: &[u32], b: &[u32]) -> Option<Exponents> {
    if b.len() > a.len() {
        return None;
    }
    let mut out = Vec::with_capacity(a.len());
    for (i, &ai) in a.iter().enumerate() {
        let bi = b.get(i).copied().unwrap_or(0);
        out.push(ai.checked_sub(bi)?);
    }
    Some(trim(out))
}

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in lexicographic monomial order; no stored coefficient is
/// zero, so the zero polynomial is the empty map.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Exponents, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    /// The polynomial `x_index`.
    pub fn variable(index: usize) -> Self {
        let mut e = vec![0; index + 1];
        e[index] = 1;
        Poly::monomial(e, BigRational::one())
    }

    pub fn monomial(exponents: Exponents, coeff: BigRational) -> Self {
        let mut p = Poly::zero();
        if !coeff.is_zero() {
            p.terms.insert(trim(exponents), coeff);
        }
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs, merging
    /// repeated monomials.
    pub fn from_terms<I: IntoIterator<Item = (BigRational, Exponents)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (c, e) in terms {
            p.add_term(trim(e), c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *slot += c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial involves no symbol.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Number of symbols referenced, i.e. one past the highest symbol index.
    pub fn num_symbols(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(&Exponents, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.leading_term().map(|(_, c)| c)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(add_exponents(ea, eb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Exact quotient `self / divisor` when the division leaves no remainder.
    ///
    /// Uses leading-term division in lex order: if `divisor` divides `self`,
    /// every intermediate remainder is again a multiple of `divisor`, so its
    /// leading monomial must be divisible by the divisor's.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (de, dc) = divisor.leading_term()?;
        let (de, dc) = (de.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        // the remainder's leading monomial strictly decreases, and it is bounded
        // below by the smallest monomial of self times that of divisor; cap work anyway
        let mut budget = 4096usize;
        while let Some((re, rc)) = rem.leading_term() {
            if budget == 0 {
                return None;
            }
            budget -= 1;
            let qe = sub_exponents(re, &de)?;
            let qc = rc / &dc;
            let step = Poly::monomial(qe, qc);
            rem = rem.sub(&step.mul(divisor));
            quot = quot.add(&step);
        }
        Some(quot)
    }

    /// Product of the coefficient denominators' lcm, so that `self * lcm` has
    /// integer coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Interval enclosure of the polynomial's value when each symbol `i`
    /// ranges over `enclosures[i]`. Intermediate endpoints are rounded
    /// outward to `bits` fractional bits.
    pub fn eval_interval(&self, enclosures: &[Interval], bits: u32) -> Interval {
        let mut acc = Interval::point(BigRational::zero());
        for (e, c) in &self.terms {
            let mut term = Interval::point(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&enclosures[i].pow(k)).round_outward(bits);
                }
            }
            acc = acc.add(&term).round_outward(bits);
        }
        acc
    }

    /// Exact value at rational points.
    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Sign of the constant polynomial; `None` when symbols are present.
    pub fn constant_sign(&self) -> Option<i8> {
        self.as_constant().map(|c| {
            if c.is_positive() {
                1
            } else if c.is_negative() {
                -1
            } else {
                0
            }
        })
    }

    /// Writes the polynomial with the given symbol names, terms from the
    /// leading monomial down.
    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, names: &dyn Fn(usize) -> String) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let is_unit_monomial = !e.is_empty();
            if !(abs.is_one() && is_unit_monomial) {
                write!(f, "{}", abs)?;
                if is_unit_monomial {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for (i, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", names(i))?;
                if p > 1 {
                    write!(f, "^{}", p)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &|i| format!("x{}", i))
    }
}
