//! Closed f64 intervals and exact rational intervals with directed rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest f64 that is `<= r`.
pub fn rat_down(r: &BigRational) -> f64 {
    let x = r.to_f64().unwrap_or(if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY });
    if !x.is_finite() {
        return if x > 0.0 { f64::MAX } else { f64::NEG_INFINITY };
    }
    match BigRational::from_float(x) {
        Some(ex) if &ex > r => x.next_down(),
        _ => x,
    }
}

/// Smallest f64 that is `>= r`.
pub fn rat_up(r: &BigRational) -> f64 {
    let x = r.to_f64().unwrap_or(if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY });
    if !x.is_finite() {
        return if x > 0.0 { f64::INFINITY } else { f64::MIN };
    }
    match BigRational::from_float(x) {
        Some(ex) if &ex < r => x.next_up(),
        _ => x,
    }
}

/// Exact rational value of a finite f64.
pub fn rat_of(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// A closed interval `[lo, hi]` of f64 values; `lo <= hi` always.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Outward-rounded enclosure of the rational interval `[lo, hi]`.
    pub fn from_rationals(lo: &BigRational, hi: &BigRational) -> Self {
        Interval { lo: rat_down(lo), hi: rat_up(hi) }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Exact closed interval of rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn add_int(&self, k: &BigInt) -> RatInterval {
        let k = BigRational::from_integer(k.clone());
        RatInterval { lo: &self.lo + &k, hi: &self.hi + &k }
    }

    pub fn scale(&self, s: &BigRational) -> RatInterval {
        RatInterval::new(&self.lo * s, &self.hi * s)
    }

    pub fn scale_int(&self, s: &BigInt) -> RatInterval {
        self.scale(&BigRational::from_integer(s.clone()))
    }

    pub fn square(&self) -> RatInterval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if !self.lo.is_positive() && !self.hi.is_negative() {
            RatInterval { lo: BigRational::zero(), hi: a.max(b) }
        } else {
            RatInterval::new(a, b)
        }
    }

    /// Enclosure of `{|x| : x in self}`.
    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            RatInterval { lo: -&self.hi, hi: -&self.lo }
        } else {
            RatInterval { lo: BigRational::zero(), hi: (-&self.lo).max(self.hi.clone()) }
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn to_interval(&self) -> Interval {
        Interval::from_rationals(&self.lo, &self.hi)
    }
}

/// Outward-rounded square root of a nonnegative f64 interval.
pub fn sqrt_interval(x: Interval) -> Interval {
    let lo = x.lo.max(0.0).sqrt();
    let hi = x.hi.max(0.0).sqrt();
    let lo = if lo * lo > x.lo { lo.next_down().max(0.0) } else { lo };
    let hi = if hi * hi < x.hi { hi.next_up() } else { hi };
    Interval::new(lo, hi)
}
