//! Degree-zero line bundles on an elliptic curve as unitary flat bundles.

use crate::diophantine::{
    classify_growth, GrowthSource, GrowthVerdict, Precision, ScaledEvaluator, ScaledTheta, ThetaSpec,
};
use crate::error::{Error, Result};
use crate::interval::{rat_down, rat_of, rat_up, Interval, RatInterval};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexJson> for Complex64 {
    fn from(c: ComplexJson) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for ComplexJson {
    fn from(c: Complex64) -> Self {
        ComplexJson { re: c.re, im: c.im }
    }
}

/// `C / <1, tau>` together with the period `tau_hat` used to embed monodromies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticCurve {
    tau: Complex64,
    tau_hat: Complex64,
}

impl EllipticCurve {
    pub fn new(tau: Complex64, tau_hat: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::InvalidInput(format!("Im(tau) must be positive, got {tau}")));
        }
        if !(tau_hat.im > 0.0) || !tau_hat.re.is_finite() || !tau_hat.im.is_finite() {
            return Err(Error::InvalidInput(format!("Im(tau_hat) must be positive, got {tau_hat}")));
        }
        Ok(EllipticCurve { tau, tau_hat })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn tau_hat(&self) -> Complex64 {
        self.tau_hat
    }
}

impl Default for EllipticCurve {
    fn default() -> Self {
        EllipticCurve { tau: Complex64::i(), tau_hat: Complex64::i() }
    }
}

/// Flat bundle with monodromy `(p, q)` read mod 1; powers are tracked as factors.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatLineBundle {
    pub curve: EllipticCurve,
    pub p: ScaledTheta,
    pub q: ScaledTheta,
}

impl FlatLineBundle {
    pub fn new(curve: EllipticCurve, p: ThetaSpec, q: ThetaSpec) -> Self {
        FlatLineBundle { curve, p: canonical(p), q: canonical(q) }
    }

    /// Bundle on the default curve.
    pub fn standard(p: ThetaSpec, q: ThetaSpec) -> Self {
        FlatLineBundle::new(EllipticCurve::default(), p, q)
    }

    pub fn trivial() -> Self {
        FlatLineBundle::standard(ThetaSpec::integer(0), ThetaSpec::integer(0))
    }

    /// `F^n`.
    pub fn power(&self, n: i64) -> FlatLineBundle {
        self.power_big(&BigInt::from(n))
    }

    pub fn power_big(&self, n: &BigInt) -> FlatLineBundle {
        let scale = |s: &ScaledTheta| {
            let t = s.times(n);
            match t.rational_value() {
                Some(r) => canonical(ThetaSpec::Rational(r)),
                None => t,
            }
        };
        FlatLineBundle { curve: self.curve, p: scale(&self.p), q: scale(&self.q) }
    }

    pub fn inverse(&self) -> FlatLineBundle {
        self.power(-1)
    }

    /// Whether both monodromies are rational, with the order of the bundle.
    pub fn is_torsion(&self) -> (bool, Option<BigInt>) {
        match (self.p.rational_value(), self.q.rational_value()) {
            (Some(a), Some(b)) => (true, Some(a.denom().lcm(b.denom()))),
            _ => (false, None),
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.is_torsion(), (true, Some(o)) if o.is_one())
    }

    /// Certified enclosures of `(n p - m1, n q - m2)` for the nearest integers.
    pub fn reduced_phases(&self, n: &BigInt, prec: &Precision) -> Result<(RatInterval, RatInterval)> {
        let a = ScaledEvaluator::new(&self.p, prec).reduced(n)?;
        let b = ScaledEvaluator::new(&self.q, prec).reduced(n)?;
        Ok((a, b))
    }

    /// Growth verdict for `n -> d(1, F^n)`.
    pub fn case_label(&self, horizon: usize, prec: &Precision) -> Result<GrowthVerdict> {
        classify_growth(&GrowthSource::Pair(self.p.clone(), self.q.clone()), horizon, prec)
    }

    /// Certified `d(1, F)`.
    pub fn distance_to_trivial(&self, prec: &Precision) -> Result<Interval> {
        let (a, b) = self.reduced_phases(&BigInt::one(), prec)?;
        lattice_distance(&a, &b, self.curve.tau_hat)
    }
}

/// Reduces rational and quadratic inputs into `[0, 1)`; other variants are
/// shifted by their integer part when that is exactly known.
fn canonical(t: ThetaSpec) -> ScaledTheta {
    let shift = match &t {
        ThetaSpec::Rational(r) => Some(r.floor().to_integer()),
        _ => {
            let mut e = crate::diophantine::Expansion::new(&t, &Precision::default());
            if e.ensure(0) {
                e.a_first()
            } else {
                None
            }
        }
    };
    match shift {
        Some(k) if !k.is_zero() => ScaledTheta::new(t.add_integer(&-k)),
        _ => ScaledTheta::new(t),
    }
}

/// Certified `min over (m1, m2) of |(u - m1) + (v - m2) tau_hat|` for `u`, `v` in the
/// given enclosures, which must already be reduced to `|u|, |v| <= 1/2` up to width.
pub fn lattice_distance(u: &RatInterval, v: &RatInterval, tau_hat: Complex64) -> Result<Interval> {
    let x = rat_of(tau_hat.re);
    let y = rat_of(tau_hat.im);
    // any minimizer has |(v - m2) y| <= value at (0, 0) <= (1 + |tau_hat|) / 2 + slack
    let bound = (1.0 + tau_hat.norm()) / (2.0 * tau_hat.im) + 1.0;
    let m2_max = bound.ceil() as i64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for m2 in -m2_max..=m2_max {
        let vv = v.add_int(&BigInt::from(-m2));
        let im = vv.scale(&y);
        let re_base = u.add(&vv.scale(&x));
        // nearest m1 to the center of re_base, plus neighbours
        let center = (&re_base.lo + &re_base.hi) * &half;
        let m1c = (center + &half).floor().to_integer();
        for d in -1..=1 {
            let m1 = &m1c + BigInt::from(d);
            let re = re_base.add_int(&-m1);
            let n2 = re.square().add(&im.square());
            lo = lo.min(rat_down(&n2.lo));
            hi = hi.min(rat_up(&n2.hi));
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::PrecisionExhausted("lattice distance search failed".into()));
    }
    Ok(crate::interval::sqrt_interval(Interval::new(lo.max(0.0), hi)))
}

/// Embedding `p + q tau_hat` of a monodromy pair given as f64 values.
pub fn embed(p: f64, q: f64, tau_hat: Complex64) -> Complex64 {
    Complex64::new(p, 0.0) + tau_hat * q
}

#[derive(Serialize, Deserialize)]
struct BundleJson {
    #[serde(default = "default_i")]
    tau: ComplexJson,
    #[serde(default = "default_i")]
    tau_hat: ComplexJson,
    p: ThetaSpec,
    q: ThetaSpec,
}

fn default_i() -> ComplexJson {
    ComplexJson { re: 0.0, im: 1.0 }
}

impl Serialize for FlatLineBundle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let spec = |t: &ScaledTheta| {
            t.collapse()
                .ok_or_else(|| serde::ser::Error::custom("power of a non-quadratic irrational has no JSON form"))
        };
        BundleJson {
            tau: self.curve.tau.into(),
            tau_hat: self.curve.tau_hat.into(),
            p: spec(&self.p)?,
            q: spec(&self.q)?,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FlatLineBundle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = BundleJson::deserialize(d)?;
        let curve = EllipticCurve::new(j.tau.into(), j.tau_hat.into()).map_err(serde::de::Error::custom)?;
        Ok(FlatLineBundle::new(curve, j.p, j.q))
    }
}

/// Approximate f64 value of `k * theta` mod 1 in `[-1/2, 1/2]`; used for display only.
pub fn approx_phase(s: &ScaledTheta, prec: &Precision) -> Result<f64> {
    let r = ScaledEvaluator::new(s, prec).reduced(&BigInt::one())?;
    Ok(r.to_interval().mid())
}
