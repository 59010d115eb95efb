//! Growth trichotomy for `n -> dist(n theta, Z)` and for two-dimensional orbits.

use super::expansion::Expansion;
use super::theta::{CfRule, ThetaSpec};
use super::{Precision, ScaledEvaluator, ScaledTheta};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GrowthLabel {
    Torsion,
    CaseI,
    CaseII,
    CaseIII,
}

impl fmt::Display for GrowthLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GrowthLabel::Torsion => "Torsion",
            GrowthLabel::CaseI => "CaseI",
            GrowthLabel::CaseII => "CaseII",
            GrowthLabel::CaseIII => "CaseIII",
        };
        f.write_str(s)
    }
}

impl GrowthLabel {
    /// Cases I and II: some uniform exponential lower bound exists.
    pub fn is_asymptotically_positive(self) -> bool {
        matches!(self, GrowthLabel::CaseI | GrowthLabel::CaseII)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    /// Decided by the generator class of the input.
    Structural,
    /// Read off a finite prefix; never a proof.
    Empirical,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateKind::Structural => "Structural",
            CertificateKind::Empirical => "Empirical",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthVerdict {
    pub label: GrowthLabel,
    pub certificate: CertificateKind,
    /// Largest observed `log(1/e_n) / n`; absent for torsion.
    pub exponent: Option<f64>,
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GrowthSource {
    Single(ScaledTheta),
    Pair(ScaledTheta, ScaledTheta),
}

impl GrowthSource {
    pub fn single(t: ThetaSpec) -> Self {
        GrowthSource::Single(t.into())
    }

    pub fn pair(p: ThetaSpec, q: ThetaSpec) -> Self {
        GrowthSource::Pair(p.into(), q.into())
    }
}

const MIN_HORIZON: usize = 3;

/// Label forced by the generator class, if any.
fn structural_label(s: &ScaledTheta) -> Option<GrowthLabel> {
    if s.is_rational() {
        return Some(GrowthLabel::Torsion);
    }
    match &s.theta {
        ThetaSpec::Quadratic(_) => Some(GrowthLabel::CaseI),
        ThetaSpec::CfStream(cf) if matches!(cf.rule, CfRule::Periodic { .. }) => Some(GrowthLabel::CaseI),
        ThetaSpec::Az(_) => Some(GrowthLabel::CaseIII),
        _ => None,
    }
}

/// Trichotomy label from rates `r_k`, which tend to 0 in Case I, stay bounded in
/// Case II and are unbounded in Case III.
///
/// With `h` the maximum over the first half and `t` over the second half:
/// CaseIII if `t > 2 max(h, 1)`, CaseI if `t < 0.05`, CaseII otherwise.
pub fn empirical_label(rates: &[f64]) -> GrowthLabel {
    let mid = rates.len() / 2;
    let max = |xs: &[f64]| xs.iter().cloned().fold(0.0f64, f64::max);
    let h = max(&rates[..mid]);
    let t = max(&rates[mid..]);
    if t > 2.0 * h.max(1.0) {
        GrowthLabel::CaseIII
    } else if t < 0.05 {
        GrowthLabel::CaseI
    } else {
        GrowthLabel::CaseII
    }
}

/// Natural log of a positive integer of any size.
pub(crate) fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

fn rate(n: &BigInt, upper: f64) -> Option<f64> {
    let n = n.to_f64()?;
    if upper <= 0.0 {
        return None;
    }
    Some((-upper.ln()).max(0.0) / n)
}

/// `E` sampled at the convergent denominators `q_1..q_K` of the base number.
fn exponent_at_denominators(exp: &mut Expansion, s: &ScaledTheta, horizon: usize, prec: &Precision) -> Option<f64> {
    let mut ev = ScaledEvaluator::new(s, prec);
    let mut best: Option<f64> = None;
    for k in 1..=horizon {
        if !exp.ensure(k) {
            break;
        }
        let n = exp.q[k].clone();
        match ev.distance(&n) {
            Ok(d) => {
                if let Some(r) = rate(&n, d.hi) {
                    best = Some(best.map_or(r, |b: f64| b.max(r)));
                }
            }
            Err(_) => break,
        }
    }
    best
}

fn classify_single(s: &ScaledTheta, horizon: usize, prec: &Precision) -> Result<GrowthVerdict> {
    if let Some(GrowthLabel::Torsion) = structural_label(s) {
        return Ok(GrowthVerdict {
            label: GrowthLabel::Torsion,
            certificate: CertificateKind::Structural,
            exponent: None,
            horizon,
        });
    }
    let mut exp = Expansion::new(&s.theta, prec);
    if let Some(label) = structural_label(s) {
        let exponent = exponent_at_denominators(&mut exp, s, horizon, prec);
        return Ok(GrowthVerdict { label, certificate: CertificateKind::Structural, exponent, horizon });
    }
    // scaling by a nonzero integer preserves the class, so the base expansion decides
    exp.ensure(horizon);
    let avail = exp.len().saturating_sub(1).min(horizon);
    if avail < MIN_HORIZON {
        return Err(exp.stop_error("empirical classification"));
    }
    let rates: Vec<f64> = (1..avail)
        .map(|k| {
            let qk = exp.q[k].to_f64().unwrap_or(f64::INFINITY);
            big_ln(&exp.q[k + 1]) / qk
        })
        .collect();
    let label = empirical_label(&rates);
    let exponent = exponent_at_denominators(&mut exp, s, avail, prec);
    Ok(GrowthVerdict { label, certificate: CertificateKind::Empirical, exponent, horizon: avail })
}

/// Orbit rates `log(1/d_n)/n` for `n = 1..=horizon` with `d_n` the max-norm orbit distance.
fn orbit_rates(p: &ScaledTheta, q: &ScaledTheta, horizon: usize, prec: &Precision) -> Result<Vec<f64>> {
    let mut ep = ScaledEvaluator::new(p, prec);
    let mut eq = ScaledEvaluator::new(q, prec);
    (1..=horizon)
        .map(|n| {
            let n = BigInt::from(n);
            let d = ep.distance(&n)?.hi.max(eq.distance(&n)?.hi);
            Ok(rate(&n, d).unwrap_or(f64::INFINITY))
        })
        .collect()
}

fn classify_pair(p: &ScaledTheta, q: &ScaledTheta, horizon: usize, prec: &Precision) -> Result<GrowthVerdict> {
    let lp = structural_label(p);
    let lq = structural_label(q);
    let is_zero = |s: &ScaledTheta| s.rational_value().is_some_and(|r| r.is_integer());
    if is_zero(p) {
        return classify_single(q, horizon, prec);
    }
    if is_zero(q) {
        return classify_single(p, horizon, prec);
    }
    if lp == Some(GrowthLabel::Torsion) && lq == Some(GrowthLabel::Torsion) {
        return Ok(GrowthVerdict {
            label: GrowthLabel::Torsion,
            certificate: CertificateKind::Structural,
            exponent: None,
            horizon,
        });
    }
    let structural = match (lp, lq) {
        (Some(GrowthLabel::Torsion), Some(l)) | (Some(l), Some(GrowthLabel::Torsion)) => Some(l),
        (Some(GrowthLabel::CaseI), _) | (_, Some(GrowthLabel::CaseI)) => Some(GrowthLabel::CaseI),
        (Some(GrowthLabel::CaseIII), Some(GrowthLabel::CaseIII)) if p.theta == q.theta => Some(GrowthLabel::CaseIII),
        _ => None,
    };
    let rates = orbit_rates(p, q, horizon, prec)?;
    let exponent = rates.iter().cloned().filter(|r| r.is_finite()).reduce(f64::max);
    match structural {
        Some(label) => Ok(GrowthVerdict { label, certificate: CertificateKind::Structural, exponent, horizon }),
        None => {
            // one rational component only shifts the orbit by a finite-order rotation
            let other = match (lp, lq) {
                (Some(GrowthLabel::Torsion), _) => Some(q),
                (_, Some(GrowthLabel::Torsion)) => Some(p),
                _ => None,
            };
            if let Some(s) = other {
                let v = classify_single(s, horizon, prec)?;
                return Ok(GrowthVerdict { exponent, ..v });
            }
            Ok(GrowthVerdict {
                label: empirical_label(&rates),
                certificate: CertificateKind::Empirical,
                exponent,
                horizon,
            })
        }
    }
}

/// Trichotomy label with its certificate kind.
///
/// `horizon` counts convergents for a single number and orbit points for a pair.
pub fn classify_growth(source: &GrowthSource, horizon: usize, prec: &Precision) -> Result<GrowthVerdict> {
    if horizon < MIN_HORIZON {
        return Err(Error::InsufficientHorizon { need: MIN_HORIZON, got: horizon });
    }
    match source {
        GrowthSource::Single(s) => classify_single(s, horizon, prec),
        GrowthSource::Pair(p, q) => classify_pair(p, q, horizon, prec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::CfStream;

    fn single(t: ThetaSpec) -> GrowthVerdict {
        classify_growth(&GrowthSource::single(t), 40, &Precision::default()).unwrap()
    }

    #[test]
    fn structural_labels() {
        assert_eq!(single(ThetaSpec::rational(1, 3).unwrap()).label, GrowthLabel::Torsion);
        let g = single(ThetaSpec::golden());
        assert_eq!((g.label, g.certificate), (GrowthLabel::CaseI, CertificateKind::Structural));
        let z = single(ThetaSpec::az_default());
        assert_eq!((z.label, z.certificate), (GrowthLabel::CaseIII, CertificateKind::Structural));
        assert!(z.exponent.unwrap() > 1.0);
    }

    #[test]
    fn horizon_too_small() {
        let r = classify_growth(&GrowthSource::single(ThetaSpec::golden()), 2, &Precision::default());
        assert!(matches!(r, Err(Error::InsufficientHorizon { .. })));
    }

    #[test]
    fn empirical_streams() {
        let bounded = CfStream::function(0, "1,2,1,2", |k| BigInt::from(1 + (k % 2) as u32));
        let v = single(ThetaSpec::CfStream(bounded));
        assert_eq!((v.label, v.certificate), (GrowthLabel::CaseI, CertificateKind::Empirical));

        // a_{k+1} = 2^{q_k}: rates log(q_{k+1})/q_k stay near log 2
        let mut qs = vec![BigInt::from(0), BigInt::from(1)];
        let mut terms = vec![BigInt::from(0)];
        for _ in 0..4 {
            let a = BigInt::from(2).pow(qs.last().unwrap().to_u32().unwrap());
            let next = &a * qs.last().unwrap() + &qs[qs.len() - 2];
            terms.push(a);
            qs.push(next);
        }
        let stream = CfStream::function(0, "two-power", move |k| terms.get(k).cloned().unwrap_or(BigInt::from(1)));
        let v = classify_growth(&GrowthSource::single(ThetaSpec::CfStream(stream)), 4, &Precision::default()).unwrap();
        assert_eq!(v.certificate, CertificateKind::Empirical);
        assert_eq!(v.label, GrowthLabel::CaseII);
    }

    #[test]
    fn empirical_label_thresholds() {
        assert_eq!(empirical_label(&[0.5, 0.2, 0.01, 0.001]), GrowthLabel::CaseI);
        assert_eq!(empirical_label(&[1.0, 1.0, 1.0, 1.0]), GrowthLabel::CaseII);
        assert_eq!(empirical_label(&[1.0, 2.0, 5.0, 30.0]), GrowthLabel::CaseIII);
    }

    #[test]
    fn pair_rules() {
        let p = Precision::default();
        let c = |a: ThetaSpec, b: ThetaSpec| classify_growth(&GrowthSource::pair(a, b), 40, &p).unwrap();
        let half = ThetaSpec::rational(1, 2).unwrap();
        let third = ThetaSpec::rational(1, 3).unwrap();
        assert_eq!(c(half.clone(), third).label, GrowthLabel::Torsion);
        assert_eq!(c(ThetaSpec::integer(0), ThetaSpec::golden()).label, GrowthLabel::CaseI);
        assert_eq!(c(half, ThetaSpec::az_default()).label, GrowthLabel::CaseIII);
        assert_eq!(c(ThetaSpec::az_default(), ThetaSpec::golden()).label, GrowthLabel::CaseI);
        let v = c(ThetaSpec::integer(0), ThetaSpec::az_default());
        assert_eq!((v.label, v.certificate), (GrowthLabel::CaseIII, CertificateKind::Structural));
    }
}
