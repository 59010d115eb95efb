//! Theorem-level reports: neighborhood rows, surface verdicts, toroidal groups and
//! the nine-point blow-up of the plane.

use crate::diophantine::{
    classify_growth, CertificateKind, GrowthLabel, GrowthSource, GrowthVerdict, Precision, ScaledTheta, ThetaSpec,
};
use crate::error::{Error, Result};
use crate::pic0::{approx_phase, ComplexJson, FlatLineBundle};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

/// `dim H^1(X, O_X) = 1 - (e(X) + sum deg) / 12`, required to be a nonnegative integer.
pub fn surface_h1_dim(euler: i64, degrees: &[u64]) -> Result<u64> {
    let total = BigInt::from(euler) + degrees.iter().map(|&d| BigInt::from(d)).sum::<BigInt>();
    let dim = BigRational::from_integer(BigInt::from(1)) - BigRational::new(total, BigInt::from(12));
    if !dim.is_integer() || dim.is_negative() {
        return Err(Error::InconsistentInput(format!(
            "1 - (e + sum deg)/12 = {dim} is not a nonnegative integer (e = {euler}, degrees = {degrees:?})"
        )));
    }
    dim.to_integer().to_u64().ok_or_else(|| Error::InconsistentInput("dimension does not fit in u64".into()))
}

/// Dimension of a cohomology group or its non-Hausdorff status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CohomologyDim {
    Finite(u64),
    NonHausdorff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapStatus {
    #[serde(rename = "bijective")]
    Bijective,
    /// Left open in the source classification; never guessed.
    #[serde(rename = "unknown per paper")]
    UnknownPerPaper,
}

/// Neighborhood classification row for one curve component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub component: usize,
    pub label: GrowthLabel,
    pub certificate: CertificateKind,
    pub h1_v: CohomologyDim,
    pub h1_v_punctured: CohomologyDim,
    pub restriction: MapStatus,
}

fn row_for(component: usize, v: &GrowthVerdict) -> Result<Table1Row> {
    let (h1_v, h1_v_punctured, restriction) = match v.label {
        GrowthLabel::Torsion => {
            return Err(Error::TorsionInput(
                "torsion normal bundles have elliptic-fibration neighborhoods; no row is computed".into(),
            ))
        }
        GrowthLabel::CaseI => (CohomologyDim::Finite(1), CohomologyDim::Finite(1), MapStatus::Bijective),
        GrowthLabel::CaseII => (CohomologyDim::NonHausdorff, CohomologyDim::NonHausdorff, MapStatus::Bijective),
        GrowthLabel::CaseIII => (CohomologyDim::NonHausdorff, CohomologyDim::NonHausdorff, MapStatus::UnknownPerPaper),
    };
    Ok(Table1Row { component, label: v.label, certificate: v.certificate, h1_v, h1_v_punctured, restriction })
}

/// Row for a neighborhood of a curve with normal bundle `f`.
pub fn neighborhood_profile(f: &FlatLineBundle, horizon: usize, prec: &Precision) -> Result<Table1Row> {
    if f.is_torsion().0 {
        return Err(Error::TorsionInput(
            "torsion normal bundles have elliptic-fibration neighborhoods; no row is computed".into(),
        ));
    }
    row_for(0, &f.case_label(horizon, prec)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceComponent {
    pub bundle: FlatLineBundle,
    #[serde(default)]
    pub degree: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub euler_number: i64,
    pub components: Vec<SurfaceComponent>,
    /// `dim H^1(X, O_X)`; derived from the Euler number when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h1_dim: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    /// Finite-dimensional, equal to `dim H^1(X)`.
    Finite,
    NonHausdorff,
    /// Infinite-dimensional but Hausdorff.
    InfiniteHausdorff,
    /// Torsion or positive-degree input, described but not decided.
    OutOfTrichotomy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DdbarStatus {
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentReport {
    pub label: GrowthLabel,
    pub certificate: CertificateKind,
    pub exponent: Option<f64>,
    pub degree: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeNumber {
    pub p: u32,
    pub q: u32,
    pub dim: u32,
}

/// Betti numbers `b_0..b_2` and Hodge numbers `h^{p,q}` with `p + q <= 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HodgeTable(pub Vec<HodgeNumber>);

impl HodgeTable {
    pub fn get(&self, p: u32, q: u32) -> u32 {
        self.0.iter().find(|h| h.p == p && h.q == q).map_or(0, |h| h.dim)
    }

    /// `sum_{p+q=r} h^{p,q}`.
    pub fn total(&self, r: u32) -> u32 {
        (0..=r).map(|p| self.get(p, r - p)).sum()
    }

    /// Whether `b_r = sum_{p+q=r} h^{p,q}` for each given Betti number.
    pub fn matches_betti(&self, betti: &[u32]) -> bool {
        betti.iter().enumerate().all(|(r, &b)| self.total(r as u32) == b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CohomologyProfile {
    pub verdict: String,
    pub kind: VerdictKind,
    /// `dim H^1(M, O_M)` when finite.
    pub dim_h1: Option<u64>,
    pub per_component: Vec<ComponentReport>,
    pub table1_rows: Vec<Table1Row>,
    pub ddbar: Option<DdbarStatus>,
    pub betti: Option<[u32; 3]>,
    pub hodge: Option<HodgeTable>,
    pub assumptions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ninth_point: Option<ComplexJson>,
}

impl CohomologyProfile {
    /// Whether every component label carries a structural certificate.
    pub fn is_structural(&self) -> bool {
        self.per_component.iter().all(|c| c.certificate == CertificateKind::Structural)
    }
}

/// Verdict for the complement of the curves in `spec`.
pub fn theorem_main_profile(spec: &SurfaceSpec, horizon: usize, prec: &Precision) -> Result<CohomologyProfile> {
    if spec.components.is_empty() {
        return Err(Error::InvalidInput("surface needs at least one component".into()));
    }
    let degrees: Vec<u64> = spec.components.iter().map(|c| c.degree).collect();
    let dim_x = match (spec.h1_dim, surface_h1_dim(spec.euler_number, &degrees)) {
        (Some(given), Ok(derived)) if given != derived => {
            return Err(Error::InconsistentInput(format!(
                "given dim H^1(X) = {given}, Euler-number formula gives {derived}"
            )))
        }
        (Some(given), _) => given,
        (None, r) => r?,
    };
    let mut per_component = Vec::new();
    let mut rows = Vec::new();
    let mut outside = false;
    for (i, c) in spec.components.iter().enumerate() {
        let v = c.bundle.case_label(horizon, prec)?;
        let note = if c.degree > 0 {
            outside = true;
            Some("positive degree: strongly 1-convex neighborhood, not decided here".to_string())
        } else if v.label == GrowthLabel::Torsion {
            outside = true;
            Some("torsion normal bundle: elliptic-fibration neighborhood, not decided here".to_string())
        } else {
            rows.push(row_for(i, &v)?);
            None
        };
        per_component.push(ComponentReport {
            label: v.label,
            certificate: v.certificate,
            exponent: v.exponent,
            degree: c.degree,
            note,
        });
    }
    let (verdict, kind, dim_h1) = if outside {
        ("out of trichotomy: reported descriptively".to_string(), VerdictKind::OutOfTrichotomy, None)
    } else if per_component.iter().all(|c| c.label.is_asymptotically_positive()) {
        (format!("(i) dim H^1(M, O_M) = dim H^1(X, O_X) = {dim_x}"), VerdictKind::Finite, Some(dim_x))
    } else {
        ("(ii) non-Hausdorff type".to_string(), VerdictKind::NonHausdorff, None)
    };
    Ok(CohomologyProfile {
        verdict,
        kind,
        dim_h1,
        per_component,
        table1_rows: rows,
        ddbar: None,
        betti: None,
        hodge: None,
        assumptions: Vec::new(),
        ninth_point: None,
    })
}

/// `C^2 / <(0, 1), (1, p), (tau, q)>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToroidalSpec {
    pub tau: ComplexJson,
    pub p: ThetaSpec,
    pub q: ThetaSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToroidalKind {
    Theta,
    Wild,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToroidalReport {
    pub kind: ToroidalKind,
    pub growth: GrowthVerdict,
}

pub fn toroidal_classify(spec: &ToroidalSpec, horizon: usize, prec: &Precision) -> Result<ToroidalReport> {
    if !(spec.tau.im > 0.0) {
        return Err(Error::InvalidInput(format!("Im(tau) must be positive, got {}", spec.tau.im)));
    }
    if spec.p.is_rational() && spec.q.is_rational() {
        return Err(Error::TorsionInput("both p and q are rational".into()));
    }
    let growth = classify_growth(&GrowthSource::pair(spec.p.clone(), spec.q.clone()), horizon, prec)?;
    let kind = match growth.label {
        GrowthLabel::CaseI | GrowthLabel::CaseII => ToroidalKind::Theta,
        GrowthLabel::CaseIII => ToroidalKind::Wild,
        GrowthLabel::Torsion => return Err(Error::TorsionInput("orbit is finite".into())),
    };
    Ok(ToroidalReport { kind, growth })
}

/// Plane blown up at eight points of a cubic `C` and one more point `q_theta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Blowup9Spec {
    pub tau: ComplexJson,
    pub points: [ComplexJson; 8],
    pub theta: ThetaSpec,
    #[serde(default = "origin")]
    pub s0: ComplexJson,
}

fn origin() -> ComplexJson {
    ComplexJson { re: 0.0, im: 0.0 }
}

impl Blowup9Spec {
    /// Eight points at the origin of `C / <1, tau>`, base class 0.
    pub fn new(tau: Complex64, theta: ThetaSpec) -> Result<Self> {
        Blowup9Spec { tau: tau.into(), points: [origin(); 8], theta, s0: origin() }.normalized()
    }

    /// Validates `tau` and reduces every point into the fundamental parallelogram.
    pub fn normalized(mut self) -> Result<Self> {
        let tau: Complex64 = self.tau.into();
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::InvalidInput(format!("Im(tau) must be positive, got {tau}")));
        }
        for p in self.points.iter_mut() {
            *p = reduce_mod_lattice((*p).into(), tau).into();
        }
        self.s0 = reduce_mod_lattice(self.s0.into(), tau).into();
        Ok(self)
    }
}

/// Lattice coordinates `(x, y)` with `z = x + y tau`.
pub fn lattice_coords(z: Complex64, tau: Complex64) -> (f64, f64) {
    let y = z.im / tau.im;
    (z.re - y * tau.re, y)
}

/// Representative of `z` with lattice coordinates in `[0, 1)`.
pub fn reduce_mod_lattice(z: Complex64, tau: Complex64) -> Complex64 {
    let (x, y) = lattice_coords(z, tau);
    let frac = |t: f64| {
        let f = t - t.floor();
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    };
    Complex64::new(frac(x), 0.0) + tau * frac(y)
}

/// `theta mod 1` as an f64 in `[0, 1)`.
fn phase01(theta: &ThetaSpec, prec: &Precision) -> Result<f64> {
    let x = approx_phase(&ScaledTheta::new(theta.clone()), prec)?;
    Ok(if x < 0.0 { x + 1.0 } else { x })
}

/// Point `z(theta) = theta tau` of `C` carrying the bundle with monodromy `(0, theta)`.
pub fn monodromy_point(theta: &ThetaSpec, tau: Complex64, prec: &Precision) -> Result<Complex64> {
    Ok(tau * phase01(theta, prec)?)
}

/// `q_theta = s0 - sum p_i - z(theta)` reduced mod `<1, tau>`.
pub fn blowup9_ninth_point(spec: &Blowup9Spec, prec: &Precision) -> Result<Complex64> {
    let tau: Complex64 = spec.tau.into();
    let sum: Complex64 = spec.points.iter().map(|&p| Complex64::from(p)).sum();
    let z = monodromy_point(&spec.theta, tau, prec)?;
    Ok(reduce_mod_lattice(Complex64::from(spec.s0) - sum - z, tau))
}

/// Monodromy `(p, q)` in `[0, 1)^2` of `[C]|_C - p_1 - ... - p_8 - q`, read through the
/// point `s0 - sum p_i - q` of `C`.
pub fn restriction_monodromy(spec: &Blowup9Spec, q: Complex64) -> (f64, f64) {
    let tau: Complex64 = spec.tau.into();
    let sum: Complex64 = spec.points.iter().map(|&p| Complex64::from(p)).sum();
    let w = reduce_mod_lattice(Complex64::from(spec.s0) - sum - q, tau);
    lattice_coords(w, tau)
}

const HODGE_ASSUMPTIONS: [&str; 2] = [
    "unchecked hypothesis: no three of the nine blown-up points are collinear",
    "unchecked hypothesis: the complement M_theta contains no compact curves",
];

/// Betti numbers of the complement of the anticanonical cubic in the nine-point blow-up.
pub const BLOWUP9_BETTI: [u32; 3] = [1, 0, 11];

/// Hodge numbers `h^{p,q}` with `p + q <= 2` for asymptotically positive `theta`.
pub fn blowup9_hodge() -> HodgeTable {
    let mut v = Vec::new();
    for r in 0..=2u32 {
        for p in (0..=r).rev() {
            let q = r - p;
            let dim = match (p, q) {
                (0, 0) | (2, 0) => 1,
                (1, 1) => 10,
                _ => 0,
            };
            v.push(HodgeNumber { p, q, dim });
        }
    }
    HodgeTable(v)
}

/// Verdict for `M_theta`, the complement of the cubic in the nine-point blow-up.
pub fn blowup9_profile(spec: &Blowup9Spec, horizon: usize, prec: &Precision) -> Result<CohomologyProfile> {
    let growth = classify_growth(&GrowthSource::single(spec.theta.clone()), horizon, prec)?;
    let q = blowup9_ninth_point(spec, prec)?;
    let rows = match growth.label {
        GrowthLabel::Torsion => Vec::new(),
        _ => vec![row_for(0, &growth)?],
    };
    let (verdict, kind, dim_h1, ddbar, hodge, assumptions) = match growth.label {
        GrowthLabel::Torsion => {
            ("(i) infinite-dimensional, Hausdorff", VerdictKind::InfiniteHausdorff, None, None, None, Vec::new())
        }
        GrowthLabel::CaseI | GrowthLabel::CaseII => (
            "(ii) H^1(M, O_M) = 0",
            VerdictKind::Finite,
            Some(0),
            Some(DdbarStatus::Holds),
            Some(blowup9_hodge()),
            HODGE_ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        ),
        GrowthLabel::CaseIII => {
            ("(iii) non-Hausdorff type", VerdictKind::NonHausdorff, None, Some(DdbarStatus::Fails), None, Vec::new())
        }
    };
    let note = (growth.label == GrowthLabel::Torsion)
        .then(|| "torsion normal bundle: elliptic-fibration neighborhood".to_string());
    Ok(CohomologyProfile {
        verdict: verdict.to_string(),
        kind,
        dim_h1,
        per_component: vec![ComponentReport {
            label: growth.label,
            certificate: growth.certificate,
            exponent: growth.exponent,
            degree: 0,
            note,
        }],
        table1_rows: rows,
        ddbar,
        betti: Some(BLOWUP9_BETTI),
        hodge,
        assumptions,
        ninth_point: Some(q.into()),
    })
}

/// Closest distance between `(x, y)` and `(x', y')` on the unit torus.
pub fn torus_gap(a: (f64, f64), b: (f64, f64)) -> f64 {
    let d = |s: f64, t: f64| {
        let x = (s - t).rem_euclid(1.0);
        x.min(1.0 - x)
    };
    d(a.0, b.0).max(d(a.1, b.1))
}
