//! Continued fractions, certified distances `dist(n*theta, Z)` and the growth trichotomy.

mod expansion;
mod growth;
mod theta;

pub(crate) use expansion::reduce as reduce_interval;
pub use expansion::{reduced_multiple, Expansion, Stop};
pub use growth::{classify_growth, empirical_label, CertificateKind, GrowthLabel, GrowthSource, GrowthVerdict};
pub use theta::{make_az_theta, AzTheta, CfRule, CfStream, FloatInterval, QuadraticIrrational, Schedule, ThetaSpec};

use crate::error::{Error, Result};
use crate::interval::{Interval, RatInterval};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Precision policy for certified evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Precision {
    /// Cap on the size of convergent denominators and constructed partial quotients.
    pub max_bits: u64,
    /// Target absolute width of certified intervals.
    pub abs_tol: f64,
    /// Target width relative to the enclosed distance.
    pub rel_tol: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { max_bits: 4096, abs_tol: 1e-13, rel_tol: 1e-14 }
    }
}

impl Precision {
    pub fn with_bits(bits: u64) -> Self {
        Precision { max_bits: bits, ..Precision::default() }
    }
}

/// `a_k`, `p_k / q_k` and the certified error `beta_k = |q_k theta - p_k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Convergent {
    pub index: usize,
    pub a: BigInt,
    pub p: BigInt,
    pub q: BigInt,
    pub beta: Interval,
}

/// Convergents `k = 1..=count`.
pub fn cf_convergents(theta: &ThetaSpec, count: usize, prec: &Precision) -> Result<Vec<Convergent>> {
    let mut exp = Expansion::new(theta, prec);
    convergents_of(&mut exp, count)
}

pub(crate) fn convergents_of(exp: &mut Expansion, count: usize) -> Result<Vec<Convergent>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if !exp.ensure(count) {
        return Err(exp.stop_error(&format!("convergent {count}")));
    }
    // look ahead a little so the last errors get a tight enclosure
    exp.ensure(count + 2);
    let enc = exp.best_enclosure().expect("nonempty expansion");
    Ok((1..=count)
        .map(|k| {
            let q = BigRational::from_integer(exp.q[k].clone());
            let p = exp.p[k].clone();
            let x = enc.scale(&q).add_int(&-p);
            Convergent {
                index: k,
                a: exp.a[k].clone(),
                p: exp.p[k].clone(),
                q: exp.q[k].clone(),
                beta: x.abs().to_interval(),
            }
        })
        .collect())
}

/// Certified enclosure of `e_n = min_m |n theta - m|`.
pub fn best_approx_error(theta: &ThetaSpec, n: u64, prec: &Precision) -> Result<Interval> {
    require_positive(n)?;
    let mut exp = Expansion::new(theta, prec);
    distance_of(&mut exp, &BigInt::from(n), prec)
}

pub(crate) fn distance_of(exp: &mut Expansion, n: &BigInt, prec: &Precision) -> Result<Interval> {
    if n.is_zero() {
        return Ok(Interval::point(0.0));
    }
    Ok(reduced_multiple(exp, n, prec)?.abs().to_interval())
}

/// `factor * theta`, read mod 1 when used as a rotation number.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledTheta {
    pub theta: ThetaSpec,
    pub factor: BigInt,
}

impl ScaledTheta {
    pub fn new(theta: ThetaSpec) -> Self {
        ScaledTheta { theta, factor: BigInt::one() }
    }

    pub fn times(&self, k: &BigInt) -> Self {
        ScaledTheta { theta: self.theta.clone(), factor: &self.factor * k }
    }

    /// Rational or multiplied by zero.
    pub fn is_rational(&self) -> bool {
        self.factor.is_zero() || self.theta.is_rational()
    }

    /// Exact value when rational.
    pub fn rational_value(&self) -> Option<BigRational> {
        if self.factor.is_zero() {
            return Some(BigRational::zero());
        }
        self.theta.as_rational().map(|r| r * BigRational::from_integer(self.factor.clone()))
    }

    /// Simplest equivalent spec when the multiplication is exact.
    pub fn collapse(&self) -> Option<ThetaSpec> {
        self.theta.scaled(&self.factor)
    }
}

impl From<ThetaSpec> for ScaledTheta {
    fn from(t: ThetaSpec) -> Self {
        ScaledTheta::new(t)
    }
}

/// Cached evaluator for `n * factor * theta` reduced mod 1.
pub struct ScaledEvaluator {
    exp: Expansion,
    factor: BigInt,
    prec: Precision,
}

impl ScaledEvaluator {
    pub fn new(s: &ScaledTheta, prec: &Precision) -> Self {
        ScaledEvaluator { exp: Expansion::new(&s.theta, prec), factor: s.factor.clone(), prec: *prec }
    }

    /// Enclosure of `n * factor * theta - m` for the nearest integer `m`.
    pub fn reduced(&mut self, n: &BigInt) -> Result<RatInterval> {
        let k = n * &self.factor;
        if k.is_zero() {
            return Ok(RatInterval::point(BigRational::zero()));
        }
        reduced_multiple(&mut self.exp, &k, &self.prec)
    }

    /// Certified `dist(n * factor * theta, Z)`.
    pub fn distance(&mut self, n: &BigInt) -> Result<Interval> {
        Ok(self.reduced(n)?.abs().to_interval())
    }
}

/// Certified `min_{m1, m2} max(|n p - m1|, |n q - m2|)`.
pub fn orbit_distance(p: &ThetaSpec, q: &ThetaSpec, n: u64, prec: &Precision) -> Result<Interval> {
    require_positive(n)?;
    let a = best_approx_error(p, n, prec)?;
    let b = best_approx_error(q, n, prec)?;
    Ok(max_interval(a, b))
}

pub(crate) fn max_interval(a: Interval, b: Interval) -> Interval {
    Interval::new(a.lo.max(b.lo), a.hi.max(b.hi))
}

pub(crate) fn require_positive(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput("n must be positive".into()))
    } else {
        Ok(())
    }
}
