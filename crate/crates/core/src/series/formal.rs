use crate::cover::{k_upper, solve_coboundary, transitions, Cochain0, Cochain1, Cover};
use crate::diophantine::Precision;
use crate::error::{Error, Result};
use crate::pic0::FlatLineBundle;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Taylor levels are `n >= 1`, Laurent levels `n <= -1`; either way the twist at level
/// `n` is `N^{-n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Taylor,
    Laurent,
}

impl Direction {
    pub fn admits(self, level: i64) -> bool {
        match self {
            Direction::Taylor => level >= 1,
            Direction::Laurent => level <= -1,
        }
    }

    /// Signed level for the `k`-th term, `k >= 1`.
    pub fn level(self, k: u64) -> i64 {
        match self {
            Direction::Taylor => k as i64,
            Direction::Laurent => -(k as i64),
        }
    }
}

/// Power of the normal-bundle datum that twists level `n`.
pub fn twist_power(level: i64) -> BigInt {
    BigInt::from(-level)
}

/// Graded family of 1-cochains, one per level.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalCocycle {
    direction: Direction,
    levels: BTreeMap<i64, Cochain1>,
}

impl FormalCocycle {
    pub fn new(direction: Direction, levels: BTreeMap<i64, Cochain1>) -> Result<Self> {
        if let Some(bad) = levels.keys().find(|&&n| !direction.admits(n)) {
            return Err(Error::InvalidInput(format!("level {bad} is not a {direction:?} level")));
        }
        Ok(FormalCocycle { direction, levels })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn levels(&self) -> &BTreeMap<i64, Cochain1> {
        &self.levels
    }

    pub fn norms(&self) -> Vec<(i64, f64)> {
        self.levels.iter().map(|(&n, g)| (n, g.sup_norm())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct LevelSolution {
    pub f: Cochain0,
    /// `M_n = max_j |f_{j,n}|`.
    pub m: f64,
    pub g_norm: f64,
    pub k_upper: f64,
    pub residual: f64,
}

impl LevelSolution {
    /// `M_n <= K_upper * max|g_n|`.
    pub fn estimate_holds(&self) -> bool {
        self.m <= self.k_upper * self.g_norm
    }
}

#[derive(Clone, Debug)]
pub struct FormalSolution {
    direction: Direction,
    levels: BTreeMap<i64, LevelSolution>,
}

impl FormalSolution {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn levels(&self) -> &BTreeMap<i64, LevelSolution> {
        &self.levels
    }

    pub fn norms(&self) -> Vec<(i64, f64)> {
        self.levels.iter().map(|(&n, s)| (n, s.m)).collect()
    }

    pub fn estimate_violations(&self) -> Vec<i64> {
        self.levels.iter().filter(|(_, s)| !s.estimate_holds()).map(|(&n, _)| n).collect()
    }

    /// `max` over the second half of stored levels of `M_n^{1/|n|}`.
    pub fn growth(&self) -> f64 {
        tail_growth(&self.norms())
    }
}

fn root(level: i64, m: f64) -> f64 {
    let k = level.unsigned_abs() as f64;
    (m.ln() / k).exp()
}

fn tail(norms: &[(i64, f64)]) -> &[(i64, f64)] {
    &norms[norms.len() / 2..]
}

fn tail_growth(norms: &[(i64, f64)]) -> f64 {
    tail(&sorted_by_order(norms)).iter().map(|&(n, m)| root(n, m)).fold(0.0, f64::max)
}

/// Levels in increasing `|n|`.
fn sorted_by_order(norms: &[(i64, f64)]) -> Vec<(i64, f64)> {
    let mut v = norms.to_vec();
    v.sort_by_key(|&(n, _)| n.unsigned_abs());
    v
}

/// Solves `delta f_n = g_n` levelwise under the twist `N^{-n}`.
pub fn solve_formal(
    cover: &Cover,
    bundle: &FlatLineBundle,
    g: &FormalCocycle,
    prec: &Precision,
) -> Result<FormalSolution> {
    let mut levels = BTreeMap::new();
    for (&n, gn) in &g.levels {
        let cx = transitions(cover, bundle, &twist_power(n), prec)?;
        let sol = solve_coboundary(&cx, gn)?;
        let ku = k_upper(&cx)?;
        let m = sol.f.sup_norm();
        levels.insert(n, LevelSolution { f: sol.f, m, g_norm: gn.sup_norm(), k_upper: ku, residual: sol.residual });
    }
    Ok(FormalSolution { direction: g.direction, levels })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum RadiusVerdict {
    /// Taylor: the stored tail never outgrows `1`.
    TrivialCandidate,
    /// Taylor: `M_n >= R^n` with `R > 1` on the listed tail levels.
    NontrivialCertified { r: f64, levels: Vec<i64> },
    /// Laurent: `M_{-n}^{1/n}` decays along the stored tail.
    InImageCandidate,
    /// Laurent: `M_{-n} >= rho0^n` on the listed tail levels without decay.
    NotInImageCertified { rho0: f64, levels: Vec<i64> },
    /// Neither pattern is present in the stored levels.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusReport {
    pub direction: Direction,
    /// `limsup M^{1/|n|}` over the stored tail.
    pub estimate: f64,
    /// Cauchy-Hadamard radius in the Taylor variable, or the inner radius `estimate` of
    /// the Laurent annulus of convergence.
    pub radius: f64,
    pub verdict: RadiusVerdict,
}

pub const MIN_LEVELS: usize = 10;
const GROWTH_TOL: f64 = 1e-9;

/// Radius verdict on stored levels `(n, M_n)`.
pub fn radius_verdict(direction: Direction, norms: &[(i64, f64)]) -> Result<RadiusReport> {
    if norms.len() < MIN_LEVELS {
        return Err(Error::InsufficientLevels { need: MIN_LEVELS, got: norms.len() });
    }
    if let Some(&(bad, _)) = norms.iter().find(|&&(n, _)| !direction.admits(n)) {
        return Err(Error::InvalidInput(format!("level {bad} is not a {direction:?} level")));
    }
    let sorted = sorted_by_order(norms);
    let estimate = tail_growth(&sorted);
    let t = tail(&sorted);
    let verdict = match direction {
        Direction::Taylor => {
            if estimate <= 1.0 + GROWTH_TOL {
                RadiusVerdict::TrivialCandidate
            } else {
                let hits: Vec<(i64, f64)> =
                    t.iter().filter(|&&(n, m)| root(n, m) > 1.0 + GROWTH_TOL).copied().collect();
                if hits.len() >= 2 {
                    let r = hits.iter().map(|&(n, m)| root(n, m)).fold(f64::INFINITY, f64::min);
                    // certificate is checked against the reported R
                    let levels = hits.iter().filter(|&&(n, m)| m >= r.powi(n as i32)).map(|&(n, _)| n).collect();
                    RadiusVerdict::NontrivialCertified { r, levels }
                } else {
                    RadiusVerdict::Inconclusive
                }
            }
        }
        Direction::Laurent => {
            let positive = |s: &[(i64, f64)]| -> Vec<(i64, f64)> { s.iter().filter(|p| p.1 > 0.0).copied().collect() };
            let head_pos = positive(&sorted[..sorted.len() / 2]);
            let tail_pos = positive(t);
            let min_root = |s: &[(i64, f64)]| s.iter().map(|&(n, m)| root(n, m)).fold(f64::INFINITY, f64::min);
            if tail_pos.len() >= 2 && !head_pos.is_empty() && min_root(&tail_pos) >= 0.9 * min_root(&head_pos) {
                RadiusVerdict::NotInImageCertified {
                    rho0: min_root(&tail_pos),
                    levels: tail_pos.iter().map(|p| p.0).collect(),
                }
            } else {
                RadiusVerdict::InImageCandidate
            }
        }
    };
    let radius = match direction {
        Direction::Taylor => {
            if estimate == 0.0 {
                f64::INFINITY
            } else {
                1.0 / estimate
            }
        }
        Direction::Laurent => estimate,
    };
    Ok(RadiusReport { direction, estimate, radius, verdict })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub converges: bool,
    /// `1 - max` geometric ratio over the two radii; negative when divergent.
    pub margin: f64,
    /// Stored geometric bound `M_n <= rho^{|n|}`.
    pub rho: f64,
    /// Radius at which divergence is certified, with the levels whose terms are `>= 1`.
    pub divergence: Option<DivergenceCertificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceCertificate {
    pub radius: f64,
    pub levels: Vec<i64>,
}

/// Whether `sum M_n r^n` (Taylor) or `sum M_{-n} r^{-n}` (Laurent) is dominated by a
/// convergent geometric series at both `r_in` and `r_out`, using `M_n <= rho^{|n|}`
/// with `rho = max M_n^{1/|n|}` over the stored levels.
pub fn convergence_check(
    direction: Direction,
    norms: &[(i64, f64)],
    r_in: f64,
    r_out: f64,
) -> Result<ConvergenceReport> {
    if norms.is_empty() {
        return Err(Error::InsufficientLevels { need: 1, got: 0 });
    }
    if !(0.0 < r_in && r_in < r_out) || !r_out.is_finite() {
        return Err(Error::InvalidInput(format!("need 0 < r_in < r_out, got {r_in}, {r_out}")));
    }
    let rho = norms.iter().filter(|p| p.1 > 0.0).map(|&(n, m)| root(n, m)).fold(0.0, f64::max);
    let ratio = |r: f64| match direction {
        Direction::Taylor => rho * r,
        Direction::Laurent => rho / r,
    };
    let worst = ratio(r_in).max(ratio(r_out));
    let converges = worst < 1.0;
    let divergence = if converges {
        None
    } else {
        // the binding radius is the one where terms are largest
        let radius = if ratio(r_in) >= ratio(r_out) { r_in } else { r_out };
        let levels: Vec<i64> = norms
            .iter()
            .filter(|&&(n, m)| {
                let k = n.unsigned_abs() as f64;
                let lr = match direction {
                    Direction::Taylor => k * radius.ln(),
                    Direction::Laurent => -k * radius.ln(),
                };
                m > 0.0 && m.ln() + lr >= 0.0
            })
            .map(|p| p.0)
            .collect();
        Some(DivergenceCertificate { radius, levels })
    };
    Ok(ConvergenceReport { converges, margin: 1.0 - worst, rho, divergence })
}
