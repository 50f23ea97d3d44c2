use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Closed interval with exact rational endpoints, `lo <= hi`.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(±1)` when the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().cloned().unwrap();
        let hi = cands.iter().max().cloned().unwrap();
        Interval { lo, hi }
    }

    pub fn pow(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(BigRational::one());
        }
        let pw = |x: &BigRational| -> BigRational {
            let mut r = BigRational::one();
            for _ in 0..k {
                r *= x;
            }
            r
        };
        let a = pw(&self.lo);
        let b = pw(&self.hi);
        if k % 2 == 1 {
            Interval { lo: a, hi: b }
        } else if self.lo.is_negative() && self.hi.is_positive() {
            Interval {
                lo: BigRational::zero(),
                hi: a.max(b),
            }
        } else if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// Smallest enclosing interval whose endpoints are multiples of `2^-bits`.
    pub fn round_outward(self, bits: u32) -> Interval {
        let scale = BigInt::one() << bits;
        let floor = |x: &BigRational| {
            let n = (x.numer() * &scale).div_floor(x.denom());
            BigRational::new(n, scale.clone())
        };
        let ceil = |x: &BigRational| {
            let n = -((-(x.numer() * &scale)).div_floor(x.denom()));
            BigRational::new(n, scale.clone())
        };
        Interval {
            lo: floor(&self.lo),
            hi: ceil(&self.hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn even_power_of_straddling_interval() {
        let x = Interval::new(r(-1, 1), r(2, 1));
        let sq = x.pow(2);
        assert_eq!(sq.lo, r(0, 1));
        assert_eq!(sq.hi, r(4, 1));
    }

    #[test]
    fn rounding_is_outward() {
        let x = Interval::new(r(1, 3), r(2, 3)).round_outward(4);
        assert!(x.lo <= r(1, 3) && x.hi >= r(2, 3));
        assert_eq!(x.lo, r(5, 16));
        assert_eq!(x.hi, r(11, 16));
    }
}
