use super::nerve::{Cover, EdgeRef};
use crate::diophantine::Precision;
use crate::error::{Error, Result};
use crate::interval::RatInterval;
use crate::pic0::FlatLineBundle;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use std::f64::consts::TAU;

/// `exp(i psi) - 1` without cancellation for small `psi`.
pub(crate) fn expm1_i(psi: f64) -> Complex64 {
    let h = (0.5 * psi).sin();
    Complex64::new(-2.0 * h * h, psi.sin())
}

/// Complex value per vertex, stored as `frame_j * (base + dev_j)`.
///
/// The frame is a unit-modulus gauge; keeping `base` and `dev` apart preserves the
/// relative size of tiny deviations from a twisted constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain0 {
    frame: Option<Vec<Complex64>>,
    base: Complex64,
    dev: Vec<Complex64>,
}

impl Cochain0 {
    pub fn from_values(values: Vec<Complex64>) -> Self {
        Cochain0 { frame: None, base: Complex64::zero(), dev: values }
    }

    pub fn zeros(n: usize) -> Self {
        Cochain0::from_values(vec![Complex64::zero(); n])
    }

    pub(crate) fn structured(frame: Vec<Complex64>, base: Complex64, dev: Vec<Complex64>) -> Self {
        debug_assert_eq!(frame.len(), dev.len());
        Cochain0 { frame: Some(frame), base, dev }
    }

    /// Same frame, new parts.
    pub(crate) fn rebased(&self, base: Complex64, dev: Vec<Complex64>) -> Self {
        debug_assert_eq!(dev.len(), self.dev.len());
        Cochain0 { frame: self.frame.clone(), base, dev }
    }

    pub fn len(&self) -> usize {
        self.dev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dev.is_empty()
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn dev(&self) -> &[Complex64] {
        &self.dev
    }

    pub fn frame(&self) -> Option<&[Complex64]> {
        self.frame.as_deref()
    }

    /// Value in the frame, `base + dev_j`.
    pub fn framed(&self, j: usize) -> Complex64 {
        self.base + self.dev[j]
    }

    pub fn value(&self, j: usize) -> Complex64 {
        let h = self.framed(j);
        match &self.frame {
            Some(u) => u[j] * h,
            None => h,
        }
    }

    pub fn values(&self) -> Vec<Complex64> {
        (0..self.len()).map(|j| self.value(j)).collect()
    }

    /// `max_j |f_j|`, evaluated in the frame where it is exact up to one rounding.
    pub fn sup_norm(&self) -> f64 {
        (0..self.len()).map(|j| self.framed(j).norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Cochain0 {
        Cochain0 { frame: self.frame.clone(), base: self.base * c, dev: self.dev.iter().map(|d| d * c).collect() }
    }

    /// `max_j |f_j - other_j|` computed without cancelling the shared constant.
    pub fn sup_distance(&self, other: &Cochain0) -> f64 {
        if self.frame.is_some() && self.frame == other.frame {
            let db = self.base - other.base;
            return (0..self.len()).map(|j| (db + self.dev[j] - other.dev[j]).norm()).fold(0.0, f64::max);
        }
        (0..self.len()).map(|j| (self.value(j) - other.value(j)).norm()).fold(0.0, f64::max)
    }
}

/// Complex value per stored edge (in the stored orientation).
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain1 {
    pub values: Vec<Complex64>,
}

impl Cochain1 {
    pub fn new(values: Vec<Complex64>) -> Self {
        Cochain1 { values }
    }

    pub fn zeros(n: usize) -> Self {
        Cochain1 { values: vec![Complex64::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Cochain1 {
        Cochain1 { values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn sub(&self, o: &Cochain1) -> Cochain1 {
        Cochain1 { values: self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, o: &Cochain1) -> Cochain1 {
        Cochain1 { values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect() }
    }
}

/// The twisted Cech complex `C^0 -> C^1` of a cover for one bundle power.
#[derive(Clone, Debug)]
pub struct TwistedComplex<'a> {
    cover: &'a Cover,
    level: BigInt,
    phase: [f64; 2],
    trivial: bool,
    exact: bool,
    s: Vec<Complex64>,
    tau: Vec<Complex64>,
    gauge: Vec<Complex64>,
    eps: f64,
}

fn rat_mid(r: &RatInterval) -> f64 {
    r.to_interval().mid()
}

/// Classifies `x` mod 1: `Some(true)` if certainly an integer, `Some(false)` if certainly not.
fn certainly_integer(x: &RatInterval) -> Option<bool> {
    match crate::diophantine::reduce_interval(x) {
        None if x.width() < BigRational::new(1.into(), 2.into()) => Some(false),
        None => None,
        Some((r, _)) => {
            if r.is_point() {
                Some(r.lo.is_zero())
            } else if r.contains_zero() {
                None
            } else {
                Some(false)
            }
        }
    }
}

/// Transition data of `F^n` on the cover.
pub fn transitions<'a>(
    cover: &'a Cover,
    bundle: &FlatLineBundle,
    n: &BigInt,
    prec: &Precision,
) -> Result<TwistedComplex<'a>> {
    let (pi, qi) = bundle.reduced_phases(n, prec)?;
    let exact = pi.is_point() && qi.is_point();
    let phase = [rat_mid(&pi), rat_mid(&qi)];
    let mut trivial = true;
    for v in cover.cycles() {
        let x =
            pi.scale(&BigRational::from_integer(v[0].into())).add(&qi.scale(&BigRational::from_integer(v[1].into())));
        match certainly_integer(&x) {
            Some(true) => {}
            Some(false) => {
                trivial = false;
                break;
            }
            None => {
                return Err(Error::PrecisionExhausted(format!(
                    "cannot decide whether the holonomy of level {n} is trivial"
                )))
            }
        }
    }
    let pot = cover.potentials();
    let gauge: Vec<Complex64> =
        pot.iter().map(|a| Complex64::from_polar(1.0, TAU * (phase[0] * a[0] + phase[1] * a[1]))).collect();
    let mut s = Vec::with_capacity(cover.num_edges());
    let mut tau = Vec::with_capacity(cover.num_edges());
    for e in cover.edges() {
        let lam = [e.deck[0] as f64, e.deck[1] as f64];
        s.push(Complex64::from_polar(1.0, TAU * (phase[0] * lam[0] + phase[1] * lam[1])));
        let d = [lam[0] + pot[e.to][0] - pot[e.from][0], lam[1] + pot[e.to][1] - pot[e.from][1]];
        tau.push(expm1_i(TAU * (phase[0] * d[0] + phase[1] * d[1])));
    }
    let eps = tau.iter().map(|t| t.norm()).fold(0.0, f64::max);
    Ok(TwistedComplex { cover, level: n.clone(), phase, trivial, exact, s, tau, gauge, eps })
}

impl<'a> TwistedComplex<'a> {
    pub fn cover(&self) -> &'a Cover {
        self.cover
    }

    pub fn level(&self) -> &BigInt {
        &self.level
    }

    /// Reduced `n (p, q)` as f64.
    pub fn phase(&self) -> [f64; 2] {
        self.phase
    }

    /// Whether the holonomy is trivial, i.e. `delta` has a kernel.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// Whether the reduced phases are exact rationals.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn transitions(&self) -> &[Complex64] {
        &self.s
    }

    /// Gauge-frame transitions minus one.
    pub fn tau(&self) -> &[Complex64] {
        &self.tau
    }

    pub fn gauge(&self) -> &[Complex64] {
        &self.gauge
    }

    /// `max_e |tau_e|`.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub(crate) fn require_nontrivial(&self) -> Result<()> {
        if self.trivial {
            Err(Error::TorsionLevel(self.level.to_string()))
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_vertices(&self, f: &Cochain0) -> Result<()> {
        if f.len() != self.cover.num_vertices() {
            return Err(Error::IndexMismatch(format!(
                "0-cochain has {} entries, cover has {} vertices",
                f.len(),
                self.cover.num_vertices()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_edges(&self, g: &Cochain1) -> Result<()> {
        if g.len() != self.cover.num_edges() {
            return Err(Error::IndexMismatch(format!(
                "1-cochain has {} entries, cover has {} edges",
                g.len(),
                self.cover.num_edges()
            )));
        }
        Ok(())
    }

    /// `(base, dev)` of `f` in this complex's gauge frame.
    pub(crate) fn in_frame(&self, f: &Cochain0) -> (Complex64, Vec<Complex64>) {
        if f.frame.as_deref() == Some(&self.gauge[..]) {
            return (f.base, f.dev.clone());
        }
        let dev = (0..f.len()).map(|j| self.gauge[j].conj() * f.value(j)).collect();
        (Complex64::zero(), dev)
    }

    /// Coboundary in the frame: `(dev_k - dev_j) + tau_e (base + dev_k)`.
    pub(crate) fn framed_coboundary(&self, base: Complex64, dev: &[Complex64]) -> Vec<Complex64> {
        self.cover
            .edges()
            .iter()
            .zip(&self.tau)
            .map(|(e, t)| (dev[e.to] - dev[e.from]) + t * (base + dev[e.to]))
            .collect()
    }

    /// `(delta f)_{jk} = -f_j + s_{jk} f_k`.
    pub fn coboundary(&self, f: &Cochain0) -> Result<Cochain1> {
        self.check_vertices(f)?;
        let (base, dev) = self.in_frame(f);
        let framed = self.framed_coboundary(base, &dev);
        Ok(Cochain1 { values: self.cover.edges().iter().zip(framed).map(|(e, v)| self.gauge[e.from] * v).collect() })
    }

    /// Value on the ordered pair described by `r`; reversed pairs use `-s_{kj} g_{jk}`.
    fn oriented(&self, g: &Cochain1, r: EdgeRef) -> Complex64 {
        if r.forward {
            g.values[r.edge]
        } else {
            -self.s[r.edge].conj() * g.values[r.edge]
        }
    }

    fn oriented_s(&self, r: EdgeRef) -> Complex64 {
        if r.forward {
            self.s[r.edge]
        } else {
            self.s[r.edge].conj()
        }
    }

    /// `max` over triangles of `|g_ik - g_ij - s_ij g_jk|`.
    pub fn cocycle_residual(&self, g: &Cochain1) -> Result<f64> {
        self.check_edges(g)?;
        Ok(self
            .cover
            .triangles()
            .iter()
            .map(|t| {
                let gij = self.oriented(g, t.ij);
                let gjk = self.oriented(g, t.jk);
                let gik = self.oriented(g, t.ik);
                (gik - gij - self.oriented_s(t.ij) * gjk).norm()
            })
            .fold(0.0, f64::max))
    }

    /// `max_e |g_e - h_e|`.
    pub fn sup_distance(&self, g: &Cochain1, h: &Cochain1) -> f64 {
        g.sub(h).sup_norm()
    }
}
