use super::formal::{twist_power, Direction, FormalCocycle};
use crate::cover::{transitions, ueda_bounds, Cochain0, Cochain1, Cover, UedaOptions};
use crate::diophantine::{cf_convergents, Precision, Schedule, ThetaSpec};
use crate::error::{Error, Result};
use crate::pic0::FlatLineBundle;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::BTreeMap;

/// One selected level of a witness family.
#[derive(Clone, Debug)]
pub struct WitnessLevel {
    /// Selection index `nu`, starting at 1.
    pub position: usize,
    pub level: i64,
    /// Family index, `None` when the position lies beyond `lambda_max`.
    pub lambda: Option<u32>,
    /// Achieved Ueda ratio at this level.
    pub ratio: f64,
    /// `R^n` (Taylor) or `R_nu^n` (Laurent).
    pub threshold: f64,
    pub f: Cochain0,
    pub g: Cochain1,
    pub max_f: f64,
    pub max_g: f64,
    /// Laurent only: `2 (2 R_nu)^{-n}`.
    pub g_bound: Option<f64>,
    /// Whether the normalization hit its target exactly.
    pub exact: bool,
    pub pass: bool,
}

/// Per-level record of a witness scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub level: i64,
    pub k_lower: f64,
    pub k_upper: f64,
    pub threshold: f64,
    pub kept: bool,
}

#[derive(Clone, Debug)]
pub struct WitnessFamily {
    pub direction: Direction,
    /// Taylor growth rate.
    pub r: Option<f64>,
    /// Laurent schedule `R_nu`.
    pub schedule: Option<Schedule>,
    pub lambda_max: u32,
    pub levels: Vec<WitnessLevel>,
    pub scan: Vec<ScanRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateEntry {
    pub lambda: Option<u32>,
    pub position: usize,
    pub level: i64,
    pub max_f: f64,
    pub max_g: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_bound: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessCertificate {
    pub direction: Direction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    pub lambda_max: u32,
    pub levels: Vec<CertificateEntry>,
    pub pass: bool,
}

/// Family index of selection position `nu`: positions `2^{lambda-1} * odd`.
pub fn lambda_of(position: usize, lambda_max: u32) -> Option<u32> {
    let l = position.trailing_zeros() + 1;
    (position > 0 && l <= lambda_max).then_some(l)
}

impl WitnessFamily {
    /// Levels of family `lambda`.
    pub fn supports(&self, lambda: u32) -> Vec<i64> {
        self.levels.iter().filter(|w| w.lambda == Some(lambda)).map(|w| w.level).collect()
    }

    /// All levels carried by some family `1..=lambda_max`.
    pub fn support_levels(&self) -> Vec<i64> {
        self.levels.iter().filter(|w| w.lambda.is_some()).map(|w| w.level).collect()
    }

    /// For every `lambda != lambda'`, the supports with positions in `2^{max+1} Z` removed
    /// share no level.
    pub fn supports_disjoint(&self) -> bool {
        let kept = |l: u32, m: u32| -> Vec<i64> {
            let modulus = 1usize << (m + 1);
            self.levels.iter().filter(|w| w.lambda == Some(l) && w.position % modulus != 0).map(|w| w.level).collect()
        };
        (1..=self.lambda_max).all(|a| {
            (a + 1..=self.lambda_max).all(|b| {
                let (sa, sb) = (kept(a, b), kept(b, b));
                sa.iter().all(|n| !sb.contains(n))
            })
        })
    }

    pub fn certified(&self) -> bool {
        !self.levels.is_empty() && self.levels.iter().all(|w| w.pass)
    }

    pub fn norms(&self) -> Vec<(i64, f64)> {
        self.levels.iter().map(|w| (w.level, w.max_f)).collect()
    }

    pub fn certificate(&self) -> WitnessCertificate {
        WitnessCertificate {
            direction: self.direction,
            r: self.r,
            schedule: self.schedule,
            lambda_max: self.lambda_max,
            levels: self
                .levels
                .iter()
                .map(|w| CertificateEntry {
                    lambda: w.lambda,
                    position: w.position,
                    level: w.level,
                    max_f: w.max_f,
                    max_g: w.max_g,
                    threshold: w.threshold,
                    g_bound: w.g_bound,
                    pass: w.pass,
                })
                .collect(),
            pass: self.certified(),
        }
    }

    /// The cocycle `g^{(lambda)}`, or every selected level when `lambda` is `None`.
    pub fn cocycle(&self, lambda: Option<u32>) -> FormalCocycle {
        let levels = self
            .levels
            .iter()
            .filter(|w| lambda.is_none() || w.lambda == lambda)
            .map(|w| (w.level, w.g.clone()))
            .collect();
        FormalCocycle::new(self.direction, levels).expect("witness levels match direction")
    }

    /// `c1 g^{(l1)} + c2 g^{(l2)}`.
    pub fn combined(&self, (l1, c1): (u32, Complex64), (l2, c2): (u32, Complex64)) -> FormalCocycle {
        let mut levels: BTreeMap<i64, Cochain1> = BTreeMap::new();
        for w in &self.levels {
            let c = if w.lambda == Some(l1) {
                c1
            } else if w.lambda == Some(l2) {
                c2
            } else {
                continue;
            };
            let term = w.g.scale(c);
            let slot = levels.entry(w.level).or_insert_with(|| Cochain1::zeros(term.len()));
            *slot = slot.add(&term);
        }
        FormalCocycle::new(self.direction, levels).expect("witness levels match direction")
    }
}

/// Rescales `f` by positive reals until `measure(f) == target` exactly, nudging by ulps
/// when plain division oscillates.
fn normalize(mut f: Cochain0, target: f64, measure: impl Fn(&Cochain0) -> f64) -> (Cochain0, f64, bool) {
    for i in 0..64 {
        let v = measure(&f);
        if v == target {
            return (f, v, true);
        }
        let c = if i < 4 {
            target / v
        } else {
            let k = (i - 3) as f64 * f64::EPSILON;
            if v > target {
                1.0 - k
            } else {
                1.0 + k
            }
        };
        f = f.scale(Complex64::new(c, 0.0));
    }
    let v = measure(&f);
    (f, v, v == target)
}

/// Rescales `f` so that `max_j |f_j| == target` exactly: the largest vertex is moved into
/// the base, which is set to `target`, and the other deviations shrink by ulps on ties.
fn anchor_max(f: &Cochain0, target: f64) -> (Cochain0, f64, bool) {
    let dev = f.dev();
    let top =
        (0..dev.len()).max_by(|&a, &b| f.framed(a).norm().total_cmp(&f.framed(b).norm())).expect("nonempty cochain");
    let c = Complex64::new(target, 0.0) / f.framed(top);
    let moved: Vec<Complex64> = dev.iter().map(|d| (d - dev[top]) * c).collect();
    let mut shrink = 1.0;
    for k in 0..64 {
        let d: Vec<Complex64> = moved.iter().map(|z| z * shrink).collect();
        let g = f.rebased(Complex64::new(target, 0.0), d);
        let v = g.sup_norm();
        if v == target || k == 63 {
            return (g, v, v == target);
        }
        shrink *= 1.0 - f64::EPSILON * (1u64 << k.min(40)) as f64;
    }
    unreachable!()
}

fn check_rate(r: f64) -> Result<()> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("growth rate must exceed 1, got {r}")));
    }
    Ok(())
}

/// Scans `n = 1..=budget` and keeps levels whose achieved Ueda ratio beats `R^n`; each kept
/// level carries `g = delta f` normalized to `max|g| = 1`.
pub fn build_taylor_witness(
    cover: &Cover,
    bundle: &FlatLineBundle,
    r: f64,
    lambda_max: u32,
    budget: u64,
    opts: &UedaOptions,
    prec: &Precision,
) -> Result<WitnessFamily> {
    check_rate(r)?;
    let mut levels = Vec::new();
    let mut scan = Vec::new();
    for k in 1..=budget {
        let n = Direction::Taylor.level(k);
        let cx = transitions(cover, bundle, &twist_power(n), prec)?;
        let b = ueda_bounds(&cx, opts)?;
        let threshold = r.powi(k as i32);
        let kept = b.k_lower > threshold;
        scan.push(ScanRow { level: n, k_lower: b.k_lower, k_upper: b.k_upper, threshold, kept });
        if !kept {
            continue;
        }
        let measure = |f: &Cochain0| cx.coboundary(f).expect("sized").sup_norm();
        let (f, max_g, exact) = normalize(b.argmax, 1.0, measure);
        let g = cx.coboundary(&f)?;
        let max_f = f.sup_norm();
        let position = levels.len() + 1;
        levels.push(WitnessLevel {
            position,
            level: n,
            lambda: lambda_of(position, lambda_max),
            ratio: b.k_lower,
            threshold,
            max_f,
            max_g,
            pass: exact && max_g == 1.0 && max_f > threshold,
            f,
            g,
            g_bound: None,
            exact,
        });
    }
    if levels.is_empty() {
        return Err(Error::NoLevelsFound(format!("no level n <= {budget} has ratio above {r}^n")));
    }
    Ok(WitnessFamily { direction: Direction::Taylor, r: Some(r), schedule: None, lambda_max, levels, scan })
}

/// Selects `n_nu` in order with achieved ratio above `R_nu^{n_nu}`, normalized so that
/// `max_j |f_{j,-n}| = 2^{-n}`.
pub fn build_laurent_witness(
    cover: &Cover,
    bundle: &FlatLineBundle,
    schedule: Schedule,
    lambda_max: u32,
    budget: u64,
    opts: &UedaOptions,
    prec: &Precision,
) -> Result<WitnessFamily> {
    if let Schedule::Constant { .. } | Schedule::Linear { slope: 0, .. } = schedule {
        return Err(Error::ScheduleInvalid("the Laurent schedule must be unbounded".into()));
    }
    let mut levels = Vec::new();
    let mut scan = Vec::new();
    for k in 1..=budget {
        let n = Direction::Laurent.level(k);
        let nu = levels.len() as u64 + 1;
        let rnu = schedule.bound(nu) as f64;
        let cx = transitions(cover, bundle, &twist_power(n), prec)?;
        let b = ueda_bounds(&cx, opts)?;
        let threshold = rnu.powi(k as i32);
        let kept = b.k_lower > threshold;
        scan.push(ScanRow { level: n, k_lower: b.k_lower, k_upper: b.k_upper, threshold, kept });
        if !kept {
            continue;
        }
        let target = 0.5f64.powi(k as i32);
        let (f, max_f, exact) = anchor_max(&b.argmax, target);
        let g = cx.coboundary(&f)?;
        let max_g = g.sup_norm();
        let g_bound = 2.0 * (2.0 * rnu).powi(-(k as i32));
        let position = levels.len() + 1;
        levels.push(WitnessLevel {
            position,
            level: n,
            lambda: lambda_of(position, lambda_max),
            ratio: b.k_lower,
            threshold,
            max_f,
            max_g,
            pass: exact && max_f == target && max_g < g_bound,
            f,
            g,
            g_bound: Some(g_bound),
            exact,
        });
    }
    if levels.is_empty() {
        return Err(Error::NoLevelsFound(format!("no level n <= {budget} beats the schedule")));
    }
    Ok(WitnessFamily { direction: Direction::Laurent, r: None, schedule: Some(schedule), lambda_max, levels, scan })
}

/// `sum` over selected levels with `|n| > q` of `max|g_n| r^n` (Taylor) or
/// `max|g_{-n}| r^{-n}` (Laurent).
pub fn partial_coboundary_gap(w: &WitnessFamily, r: f64, q: u64) -> Result<f64> {
    let ok = match w.direction {
        Direction::Taylor => 0.0 < r && r < 1.0,
        Direction::Laurent => 0.5 < r && r < 1.0,
    };
    if !ok {
        return Err(Error::InvalidInput(format!("radius {r} outside the admissible range")));
    }
    let mut terms: Vec<f64> = w
        .levels
        .iter()
        .filter(|l| l.level.unsigned_abs() > q)
        .map(|l| {
            let k = l.level.unsigned_abs() as f64;
            let e = match w.direction {
                Direction::Taylor => k * r.ln(),
                Direction::Laurent => -k * r.ln(),
            };
            l.max_g * e.exp()
        })
        .collect();
    // ascending order keeps the sum independent of level order and monotone in q
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum())
}

/// `q_count` of `theta`: the level budget covering its first `count` denominators.
pub fn denominator_budget(theta: &ThetaSpec, count: usize, prec: &Precision) -> Result<u64> {
    let cs = cf_convergents(theta, count, prec)?;
    let q = &cs.last().ok_or_else(|| Error::InvalidInput("count must be positive".into()))?.q;
    q.to_u64().ok_or_else(|| Error::PrecisionExhausted(format!("denominator {q} exceeds the level range")))
}
