use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::ScalarError;

/// Source of ever tighter enclosures for one irrational symbol.
pub trait Refiner: Send + Sync + fmt::Debug {
    /// An enclosure of width at most `2^-bits`, or the tightest one the
    /// source can produce when it is exhausted.
    fn refine(&self, bits: u32) -> Interval;
}

/// Truncated decimal expansion, e.g. `"1.41421356"`. With `k` fractional
/// digits available the value lies within `10^-k` of the truncation.
#[derive(Clone, Debug)]
pub struct DigitStream {
    negative: bool,
    int_part: BigInt,
    frac: Vec<u8>,
}

impl DigitStream {
    pub fn parse(digits: &str) -> Result<Self, ScalarError> {
        let s = digits.trim().trim_end_matches("...");
        let (negative, s) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (ip, fp) = s.split_once('.').unwrap_or((s, ""));
        let bad = || ScalarError::Parse(format!("invalid digit stream {:?}", digits));
        if ip.is_empty() || !ip.bytes().all(|b| b.is_ascii_digit()) || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        Ok(DigitStream {
            negative,
            int_part: ip.parse().map_err(|_| bad())?,
            frac: fp.bytes().map(|b| b - b'0').collect(),
        })
    }

    pub fn available_digits(&self) -> usize {
        self.frac.len()
    }

    /// Enclosure using the first `k` fractional digits.
    pub fn enclosure_with_digits(&self, k: usize) -> Interval {
        let k = k.min(self.frac.len());
        let mut n = self.int_part.clone();
        for &d in &self.frac[..k] {
            n = n * 10 + d;
        }
        let den = num_traits::pow(BigInt::from(10), k);
        let t = BigRational::new(n.clone(), den.clone());
        let t1 = BigRational::new(n + 1, den);
        if self.negative {
            Interval::new(-t1, -t)
        } else {
            Interval::new(t, t1)
        }
    }
}

impl Refiner for DigitStream {
    fn refine(&self, bits: u32) -> Interval {
        // 10^-k <= 2^-bits  <=>  k >= bits * log10(2)
        let k = (bits as usize * 30103).div_ceil(100000) + 1;
        self.enclosure_with_digits(k)
    }
}

/// Exact square root of a positive rational, refined by integer square roots.
#[derive(Clone, Debug)]
pub struct SqrtRefiner {
    radicand: BigRational,
}

impl SqrtRefiner {
    pub fn new(radicand: BigRational) -> Result<Self, ScalarError> {
        if !radicand.is_positive() {
            return Err(ScalarError::Parse("square root of a non-positive number".into()));
        }
        Ok(SqrtRefiner { radicand })
    }
}

impl Refiner for SqrtRefiner {
    fn refine(&self, bits: u32) -> Interval {
        // sqrt(p/q) = sqrt(p q) / q
        let p = self.radicand.numer();
        let q = self.radicand.denom();
        let scaled = p * q * (BigInt::one() << (2 * bits));
        let s = scaled.sqrt();
        let den = q * (BigInt::one() << bits);
        Interval::new(BigRational::new(s.clone(), den.clone()), BigRational::new(s + 1, den))
    }
}

/// One irrational generator of the coefficient field.
#[derive(Debug)]
pub struct Symbol {
    pub name: String,
    pub enclosure: Interval,
    pub refiner: Option<Arc<dyn Refiner>>,
    cache: RwLock<BTreeMap<u32, Interval>>,
}

impl Symbol {
    pub fn new(name: impl Into<String>, enclosure: Interval, refiner: Option<Arc<dyn Refiner>>) -> Result<Self, ScalarError> {
        let name = name.into();
        if enclosure.lo >= enclosure.hi {
            return Err(ScalarError::Parse(format!("enclosure of {} must satisfy lower < upper", name)));
        }
        Ok(Symbol {
            name,
            enclosure,
            refiner,
            cache: RwLock::new(BTreeMap::new()),
        })
    }

    /// Enclosure at the given precision; `bits == 0` is the declared one.
    pub fn enclosure_at(&self, bits: u32) -> Interval {
        let refiner = match (&self.refiner, bits) {
            (Some(r), b) if b > 0 => r,
            _ => return self.enclosure.clone(),
        };
        if let Some(hit) = self.cache.read().unwrap().get(&bits) {
            return hit.clone();
        }
        let fresh = refiner
            .refine(bits)
            .intersect(&self.enclosure)
            .unwrap_or_else(|| self.enclosure.clone());
        self.cache.write().unwrap().insert(bits, fresh.clone());
        fresh
    }
}

/// The declared algebraically independent irrationals α₁..α_m.
///
/// Independence is a precondition that is not verified: a dependent input
/// (say α = √2 together with α² − 2 appearing in a computation) makes the
/// sign oracle fail with `AmbiguousSign` instead of answering.
#[derive(Debug, Default)]
pub struct IrrationalBasis {
    symbols: Vec<Symbol>,
}

impl IrrationalBasis {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, ScalarError> {
        let mut seen = HashSet::new();
        for s in &symbols {
            if !seen.insert(s.name.clone()) {
                return Err(ScalarError::Parse(format!("duplicate symbol name {}", s.name)));
            }
        }
        Ok(IrrationalBasis { symbols })
    }

    pub fn empty() -> Self {
        IrrationalBasis::default()
    }

    /// Basis of square roots of the given positive integers, named as given.
    pub fn sqrt_symbols(specs: &[(&str, i64)]) -> Result<Self, ScalarError> {
        let mut symbols = Vec::new();
        for &(name, n) in specs {
            let refiner = SqrtRefiner::new(BigRational::from_integer(n.into()))?;
            let enclosure = refiner.refine(8);
            symbols.push(Symbol::new(name, enclosure, Some(Arc::new(refiner)))?);
        }
        IrrationalBasis::new(symbols)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn name(&self, i: usize) -> String {
        self.symbols
            .get(i)
            .map(|s| s.name.clone())
            .unwrap_or_else(|| format!("x{}", i))
    }

    pub fn enclosures_at(&self, bits: u32) -> Vec<Interval> {
        self.symbols.iter().map(|s| s.enclosure_at(bits)).collect()
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-1.25"` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let t = s.trim();
    let bad = || ScalarError::Parse(format!("invalid rational {:?}", s));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let (neg, ip) = match ip.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, ip.strip_prefix('+').unwrap_or(ip)),
        };
        if !fp.bytes().all(|b| b.is_ascii_digit()) || !ip.bytes().all(|b| b.is_ascii_digit()) || (ip.is_empty() && fp.is_empty()) {
            return Err(bad());
        }
        let digits = format!("{}{}", ip, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = BigRational::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}
