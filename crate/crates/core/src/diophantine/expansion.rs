//! Lazy continued-fraction expansion with cached convergents.

use super::theta::{floor_rat, AzTheta, CfStream, QuadraticIrrational, ThetaSpec};
use super::Precision;
use crate::error::{Error, Result};
use crate::interval::{rat_of, RatInterval};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::VecDeque;

/// Produces `a_0, a_1, ...`; `Ok(None)` marks the end of a finite expansion.
trait TermSource: Send {
    fn next_term(&mut self, prec: &Precision) -> Result<Option<BigInt>>;
}

struct RationalSource {
    num: BigInt,
    den: BigInt,
    done: bool,
}

impl TermSource for RationalSource {
    fn next_term(&mut self, _: &Precision) -> Result<Option<BigInt>> {
        if self.done {
            return Ok(None);
        }
        let (a, r) = self.num.div_mod_floor(&self.den);
        if r.is_zero() {
            self.done = true;
        } else {
            self.num = std::mem::replace(&mut self.den, r);
        }
        Ok(Some(a))
    }
}

/// `(p + sqrt(d)) / q` with `q | d - p^2`.
struct QuadraticSource {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    root: BigInt,
}

impl QuadraticSource {
    fn new(x: &QuadraticIrrational) -> Self {
        let s = if x.b.is_negative() { -BigInt::one() } else { BigInt::one() };
        let mut p = &s * &x.a;
        let mut d = &x.b * &x.b * &x.d;
        let mut q = &s * &x.c;
        if !(&d - &p * &p).is_multiple_of(&q) {
            let qa = q.abs();
            p *= &qa;
            d *= &q * &q;
            q *= &qa;
        }
        let root = d.sqrt();
        QuadraticSource { p, q, d, root }
    }
}

impl TermSource for QuadraticSource {
    fn next_term(&mut self, _: &Precision) -> Result<Option<BigInt>> {
        let a = if self.q.is_positive() {
            (&self.p + &self.root).div_floor(&self.q)
        } else {
            let neg_q: BigInt = -&self.q;
            let f: BigInt = (&self.p + &self.root).div_floor(&neg_q);
            -(f + BigInt::one())
        };
        let p = &a * &self.q - &self.p;
        let q = (&self.d - &p * &p) / &self.q;
        self.p = p;
        self.q = q;
        Ok(Some(a))
    }
}

struct StreamSource {
    stream: CfStream,
    k: usize,
}

impl TermSource for StreamSource {
    fn next_term(&mut self, _: &Precision) -> Result<Option<BigInt>> {
        let a = if self.k == 0 { self.stream.a0.clone() } else { self.stream.term(self.k) };
        if self.k > 0 && a < BigInt::one() {
            return Err(Error::InvalidInput(format!("stream partial quotient a_{} = {a} < 1", self.k)));
        }
        self.k += 1;
        Ok(Some(a))
    }
}

struct AzSource {
    az: AzTheta,
    emitted_a0: bool,
    k: u64,
    q_prev: BigInt,
    q_cur: BigInt,
}

impl TermSource for AzSource {
    fn next_term(&mut self, prec: &Precision) -> Result<Option<BigInt>> {
        if !self.emitted_a0 {
            self.emitted_a0 = true;
            return Ok(Some(self.az.a0.clone()));
        }
        let b = self.az.schedule.bound(self.k);
        let exp = self.q_cur.to_u32().ok_or_else(|| {
            Error::PrecisionExhausted(format!("schedule term a_{} has exponent q = {}", self.k + 1, self.q_cur))
        })?;
        let bits = exp as f64 * (b as f64).log2();
        if bits > prec.max_bits as f64 {
            return Err(Error::PrecisionExhausted(format!(
                "schedule term a_{} needs about {bits:.0} bits, cap is {}",
                self.k + 1,
                prec.max_bits
            )));
        }
        let a = BigInt::from(b).pow(exp);
        let q_next = &a * &self.q_cur + &self.q_prev;
        self.q_prev = std::mem::replace(&mut self.q_cur, q_next);
        self.k += 1;
        Ok(Some(a))
    }
}

/// Terms of `-x` from terms of an irrational `x`.
struct NegatedSource {
    inner: Box<dyn TermSource>,
    queue: VecDeque<BigInt>,
    started: bool,
}

impl TermSource for NegatedSource {
    fn next_term(&mut self, prec: &Precision) -> Result<Option<BigInt>> {
        if !self.started {
            let pull = |s: &mut Box<dyn TermSource>| -> Result<BigInt> {
                s.next_term(prec)?.ok_or_else(|| Error::InvalidInput("negation of a finite stream".into()))
            };
            let b0 = pull(&mut self.inner)?;
            let b1 = pull(&mut self.inner)?;
            self.queue.push_back(-b0 - 1);
            if b1 > BigInt::one() {
                self.queue.push_back(BigInt::one());
                self.queue.push_back(b1 - 1);
            } else {
                let b2 = pull(&mut self.inner)?;
                self.queue.push_back(b2 + 1);
            }
            self.started = true;
        }
        match self.queue.pop_front() {
            Some(a) => Ok(Some(a)),
            None => self.inner.next_term(prec),
        }
    }
}

/// Certifies terms of every real in `[lo, hi]`.
struct IntervalSource {
    lo: BigRational,
    hi: BigRational,
}

impl TermSource for IntervalSource {
    fn next_term(&mut self, _: &Precision) -> Result<Option<BigInt>> {
        let fl = floor_rat(&self.lo);
        let fh = floor_rat(&self.hi);
        let fl_r = BigRational::from_integer(fl.clone());
        if fl != fh || self.lo == fl_r {
            return Err(Error::PrecisionExhausted("float interval cannot certify the next partial quotient".into()));
        }
        let lo = (&self.hi - &fl_r).recip();
        let hi = (&self.lo - &fl_r).recip();
        self.lo = lo;
        self.hi = hi;
        Ok(Some(fl))
    }
}

fn source_for(theta: &ThetaSpec) -> Box<dyn TermSource> {
    match theta {
        ThetaSpec::Rational(r) => {
            Box::new(RationalSource { num: r.numer().clone(), den: r.denom().clone(), done: false })
        }
        ThetaSpec::Quadratic(q) => Box::new(QuadraticSource::new(q)),
        ThetaSpec::CfStream(s) => {
            let base = Box::new(StreamSource { stream: CfStream { negated: false, ..s.clone() }, k: 0 });
            if s.negated {
                Box::new(NegatedSource { inner: base, queue: VecDeque::new(), started: false })
            } else {
                base
            }
        }
        ThetaSpec::Az(z) => {
            let base = Box::new(AzSource {
                az: AzTheta { negated: false, ..z.clone() },
                emitted_a0: false,
                k: 0,
                q_prev: BigInt::zero(),
                q_cur: BigInt::one(),
            });
            if z.negated {
                Box::new(NegatedSource { inner: base, queue: VecDeque::new(), started: false })
            } else {
                base
            }
        }
        ThetaSpec::FloatInterval(f) => {
            Box::new(IntervalSource { lo: rat_of(f.mid) - rat_of(f.rad), hi: rat_of(f.mid) + rat_of(f.rad) })
        }
    }
}

/// Why an expansion stopped producing terms.
#[derive(Clone, Debug, PartialEq)]
pub enum Stop {
    /// The number is rational and its expansion is complete.
    Finite,
    /// The next term could not be produced.
    Exhausted(Error),
}

/// Cached expansion `a_0, a_1, ...` with convergents `p_k / q_k`.
pub struct Expansion {
    theta: ThetaSpec,
    source: Box<dyn TermSource>,
    prec: Precision,
    pub(crate) a: Vec<BigInt>,
    pub(crate) p: Vec<BigInt>,
    pub(crate) q: Vec<BigInt>,
    stop: Option<Stop>,
}

impl Expansion {
    pub fn new(theta: &ThetaSpec, prec: &Precision) -> Self {
        Expansion {
            theta: theta.clone(),
            source: source_for(theta),
            prec: *prec,
            a: Vec::new(),
            p: Vec::new(),
            q: Vec::new(),
            stop: None,
        }
    }

    pub fn theta(&self) -> &ThetaSpec {
        &self.theta
    }

    pub fn stop(&self) -> Option<&Stop> {
        self.stop.as_ref()
    }

    /// Number of terms known so far.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn a_first(&self) -> Option<BigInt> {
        self.a.first().cloned()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Makes `a_k` available; returns false if the expansion stopped first.
    pub fn ensure(&mut self, k: usize) -> bool {
        while self.a.len() <= k {
            if self.stop.is_some() {
                return false;
            }
            if let Some(q) = self.q.last() {
                if q.bits() > self.prec.max_bits {
                    self.stop = Some(Stop::Exhausted(Error::PrecisionExhausted(format!(
                        "denominator exceeds {} bits",
                        self.prec.max_bits
                    ))));
                    return false;
                }
            }
            match self.source.next_term(&self.prec) {
                Ok(Some(a)) => self.push(a),
                Ok(None) => self.stop = Some(Stop::Finite),
                Err(e) => self.stop = Some(Stop::Exhausted(e)),
            }
        }
        true
    }

    fn push(&mut self, a: BigInt) {
        let k = self.a.len();
        let (p2, q2, p1, q1) = match k {
            0 => (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero()),
            1 => (BigInt::one(), BigInt::zero(), self.p[0].clone(), self.q[0].clone()),
            _ => (self.p[k - 2].clone(), self.q[k - 2].clone(), self.p[k - 1].clone(), self.q[k - 1].clone()),
        };
        self.p.push(&a * &p1 + p2);
        self.q.push(&a * &q1 + q2);
        self.a.push(a);
    }

    /// Error for a stop, or `NotDefined` for a finite expansion.
    pub(crate) fn stop_error(&self, what: &str) -> Error {
        match &self.stop {
            Some(Stop::Exhausted(e)) => e.clone(),
            _ => Error::NotDefined(format!("{what} beyond the finite expansion of a rational")),
        }
    }

    /// Exact value, if the expansion is known to be finite.
    pub fn exact_value(&self) -> Option<BigRational> {
        match (&self.stop, self.p.last(), self.q.last()) {
            (Some(Stop::Finite), Some(p), Some(q)) => Some(BigRational::new(p.clone(), q.clone())),
            _ => None,
        }
    }

    /// Enclosure of theta from the prefix `a_0..a_k` of an infinite expansion.
    pub fn enclosure(&self, k: usize) -> RatInterval {
        let (pm, qm) =
            if k == 0 { (BigInt::one(), BigInt::zero()) } else { (self.p[k - 1].clone(), self.q[k - 1].clone()) };
        let conv = BigRational::new(self.p[k].clone(), self.q[k].clone());
        let med = BigRational::new(&self.p[k] + pm, &self.q[k] + qm);
        RatInterval::new(conv, med)
    }

    /// Tightest enclosure currently available.
    pub fn best_enclosure(&self) -> Option<RatInterval> {
        if let Some(v) = self.exact_value() {
            return Some(RatInterval::point(v));
        }
        if let ThetaSpec::FloatInterval(f) = &self.theta {
            return Some(RatInterval::new(rat_of(f.mid) - rat_of(f.rad), rat_of(f.mid) + rat_of(f.rad)));
        }
        if self.a.is_empty() {
            None
        } else {
            Some(self.enclosure(self.a.len() - 1))
        }
    }
}

/// Reduction of an enclosure of `x` to an enclosure of `x - m` for the nearest integer `m`.
/// Returns `None` while the enclosure straddles a half-integer.
pub(crate) fn reduce(x: &RatInterval) -> Option<(RatInterval, BigInt)> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let m_lo = floor_rat(&(&x.lo + &half));
    let m_hi = floor_rat(&(&x.hi + &half));
    if m_lo != m_hi {
        return None;
    }
    let m = BigRational::from_integer(m_lo.clone());
    Some((RatInterval { lo: &x.lo - &m, hi: &x.hi - &m }, m_lo))
}

/// Enclosure of `n * theta - m` where `m` is the nearest integer, refined until the
/// width meets the tolerance of `prec` (absolute and relative to the distance).
pub fn reduced_multiple(exp: &mut Expansion, n: &BigInt, prec: &Precision) -> Result<RatInterval> {
    let n_r = BigRational::from_integer(n.clone());
    let abs_tol = rat_of(prec.abs_tol);
    let rel_tol = rat_of(prec.rel_tol);
    let accept = |r: &RatInterval| -> bool {
        let w = r.width();
        if w.is_zero() {
            return true;
        }
        if r.contains_zero() || w > abs_tol {
            return false;
        }
        let dist = if r.lo.is_positive() { r.lo.clone() } else { -&r.hi };
        w <= &rel_tol * dist
    };

    if let ThetaSpec::FloatInterval(_) = exp.theta() {
        let enc = exp.best_enclosure().expect("float enclosure");
        let x = enc.scale(&n_r);
        return match reduce(&x) {
            Some((r, _)) if accept(&r) => Ok(r),
            _ => Err(Error::PrecisionExhausted(format!(
                "float interval too wide for n = {n} at the requested tolerance"
            ))),
        };
    }

    let n_abs = n.abs();
    let mut k = 0usize;
    loop {
        if !exp.ensure(k) {
            if let Some(v) = exp.exact_value() {
                let x = RatInterval::point(v * &n_r);
                return Ok(reduce(&x).expect("point interval").0);
            }
            return Err(exp.stop_error("reduction"));
        }
        // width of the prefix enclosure is 1/(q_k (q_k + q_{k-1})); skip cheaply until small
        let qk = &exp.q[k];
        let qkm = if k == 0 { BigInt::zero() } else { exp.q[k - 1].clone() };
        let denom = qk * (qk + &qkm);
        let width = BigRational::new(n_abs.clone(), denom);
        if width <= abs_tol {
            let x = exp.enclosure(k).scale(&n_r);
            if let Some((r, _)) = reduce(&x) {
                if accept(&r) {
                    return Ok(r);
                }
            }
        }
        k += 1;
    }
}
