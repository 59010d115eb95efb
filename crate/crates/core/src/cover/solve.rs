use super::complex::{Cochain0, Cochain1, TwistedComplex};
use super::linalg::{lstsq, smallest_right};
use super::nerve::CoverKind;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Relative cocycle-residual tolerance accepted on input.
pub const COCYCLE_TOL: f64 = 1e-9;
/// Relative post-solve residual tolerance.
pub const SOLVE_TOL: f64 = 1e-10;

/// Below this twist size the smallest singular value is found by a reduced secular
/// equation instead of a dense SVD, whose absolute error would swamp it.
const SECULAR_BELOW: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct CoboundarySolution {
    pub f: Cochain0,
    /// `max_e |delta f - g|`.
    pub residual: f64,
    /// Cocycle residual of the input.
    pub input_residual: f64,
}

/// Dense frame matrix `(dev_k - dev_j) + tau_e dev_k` of shape `E x J`.
fn frame_matrix(cx: &TwistedComplex<'_>) -> DMatrix<Complex64> {
    let c = cx.cover();
    let one = Complex64::new(1.0, 0.0);
    let mut a = DMatrix::from_element(c.num_edges(), c.num_vertices(), Complex64::zero());
    for (i, (e, t)) in c.edges().iter().zip(cx.tau()).enumerate() {
        a[(i, e.to)] += one + t;
        a[(i, e.from)] -= one;
    }
    a
}

fn framed_g(cx: &TwistedComplex<'_>, g: &Cochain1) -> Vec<Complex64> {
    cx.cover().edges().iter().zip(&g.values).map(|(e, v)| cx.gauge()[e.from].conj() * v).collect()
}

/// Unique `f` with `delta f = g` at a non-torsion level.
///
/// Unknowns are a twisted constant `c` and deviations `w` with `w_0 = 0`; the constant is
/// scaled by the twist size so the system stays well conditioned as the twist shrinks.
pub fn solve_coboundary(cx: &TwistedComplex<'_>, g: &Cochain1) -> Result<CoboundarySolution> {
    cx.check_edges(g)?;
    cx.require_nontrivial()?;
    let eps = cx.eps();
    if eps == 0.0 {
        return Err(Error::PrecisionExhausted(format!("twist at level {} underflows", cx.level())));
    }
    let nv = cx.cover().num_vertices();
    let gnorm = g.sup_norm();
    let input_residual = cx.cocycle_residual(g)?;
    if gnorm == 0.0 {
        let f = Cochain0::structured(cx.gauge().to_vec(), Complex64::zero(), vec![Complex64::zero(); nv]);
        return Ok(CoboundarySolution { f, residual: 0.0, input_residual });
    }
    if input_residual > COCYCLE_TOL * gnorm {
        return Err(Error::NotACocycle(input_residual / gnorm));
    }

    let full = frame_matrix(cx);
    let ne = full.nrows();
    let mut m = DMatrix::from_element(ne, nv, Complex64::zero());
    for i in 0..ne {
        m[(i, 0)] = cx.tau()[i] / eps;
        for v in 1..nv {
            m[(i, v)] = full[(i, v)];
        }
    }
    let gf = framed_g(cx, g);
    let rhs = DVector::from_vec(gf.clone());
    let x = lstsq(&m, &rhs, 1e-14).ok_or_else(|| Error::InvalidInput("least-squares solve failed".into()))?;
    let base = x[0] / eps;
    let mut dev = vec![Complex64::zero(); nv];
    for v in 1..nv {
        dev[v] = x[v];
    }
    let back = cx.framed_coboundary(base, &dev);
    let residual = back.iter().zip(&gf).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if residual > SOLVE_TOL * gnorm {
        return Err(Error::NotACocycle(residual / gnorm));
    }
    Ok(CoboundarySolution { f: Cochain0::structured(cx.gauge().to_vec(), base, dev), residual, input_residual })
}

/// `max|f| / max|delta f|` evaluated in the gauge frame.
pub fn ueda_ratio(cx: &TwistedComplex<'_>, f: &Cochain0) -> Result<f64> {
    cx.check_vertices(f)?;
    let (base, dev) = cx.in_frame(f);
    Ok(framed_ratio(cx, base, &dev))
}

fn framed_ratio(cx: &TwistedComplex<'_>, base: Complex64, dev: &[Complex64]) -> f64 {
    let num = dev.iter().map(|d| (base + d).norm()).fold(0.0, f64::max);
    let den = cx.framed_coboundary(base, dev).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaRoute {
    Svd,
    Secular,
}

#[derive(Clone, Debug)]
pub struct UedaBounds {
    /// An evaluated ratio, hence a lower bound for the constant.
    pub k_lower: f64,
    /// `sqrt(|E|) / sigma_min`.
    pub k_upper: f64,
    pub argmax: Cochain0,
    /// Certified lower bound for the smallest singular value of `delta`.
    pub sigma_min: f64,
    pub route: SigmaRoute,
}

#[derive(Clone, Copy, Debug)]
pub struct UedaOptions {
    pub iterations: usize,
    pub seed: u64,
}

impl Default for UedaOptions {
    fn default() -> Self {
        UedaOptions { iterations: 4000, seed: 0 }
    }
}

struct Smallest {
    sigma: f64,
    base: Complex64,
    dev: Vec<Complex64>,
    route: SigmaRoute,
}

fn smallest_by_svd(a: &DMatrix<Complex64>) -> Smallest {
    let (s, dev) = smallest_right(a);
    let fro = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let sigma = s - 64.0 * f64::EPSILON * fro;
    Smallest { sigma, base: Complex64::zero(), dev, route: SigmaRoute::Svd }
}

/// Orthonormal basis of the complement of the constant vector.
fn helmert(n: usize) -> DMatrix<Complex64> {
    let mut q = DMatrix::from_element(n, n - 1, Complex64::zero());
    for k in 1..n {
        let kf = k as f64;
        let h = 1.0 / (kf * (kf + 1.0)).sqrt();
        for i in 0..k {
            q[(i, k - 1)] = Complex64::new(h, 0.0);
        }
        q[(k, k - 1)] = Complex64::new(-kf * h, 0.0);
    }
    q
}

/// Smallest singular pair near the twisted constants, where `tau` is harmonic and
/// hence orthogonal to the untwisted coboundaries up to `O(eps^2)`.
fn smallest_by_secular(cx: &TwistedComplex<'_>, a: &DMatrix<Complex64>) -> Option<Smallest> {
    let nv = a.ncols();
    if nv < 2 {
        return None;
    }
    let eps = cx.eps();
    let jf = nv as f64;
    let t = DVector::from_iterator(a.nrows(), cx.tau().iter().map(|z| z / eps));
    let q = helmert(nv);
    let m = a * &q;
    let c = m.adjoint() * &m;
    let b = m.adjoint() * &t * Complex64::new(1.0 / jf.sqrt(), 0.0);
    let a0 = t.norm_squared() / jf;
    let lam = c.clone().symmetric_eigen().eigenvalues.min();
    let mut mu = a0;
    let mut y = DVector::from_element(nv - 1, Complex64::zero());
    for _ in 0..100 {
        let shift = eps * eps * mu;
        if !(shift < 0.5 * lam) {
            return None;
        }
        let mut cs = c.clone();
        for i in 0..nv - 1 {
            cs[(i, i)] -= Complex64::new(shift, 0.0);
        }
        let sol = cs.cholesky()?.solve(&b);
        let next = a0 - b.dotc(&sol).re;
        y = sol;
        let done = (next - mu).abs() <= 1e-16 * mu.abs();
        mu = next;
        if done {
            break;
        }
    }
    if !(mu > 0.0) {
        return None;
    }
    let base = Complex64::new(1.0 / jf.sqrt(), 0.0);
    let dev: Vec<Complex64> = (&q * (y * Complex64::new(-eps, 0.0))).iter().copied().collect();
    Some(Smallest { sigma: eps * mu.sqrt() * (1.0 - 1e-10), base, dev, route: SigmaRoute::Secular })
}

fn smallest(cx: &TwistedComplex<'_>, a: &DMatrix<Complex64>) -> Result<Smallest> {
    cx.require_nontrivial()?;
    if cx.eps() == 0.0 {
        return Err(Error::PrecisionExhausted(format!("twist at level {} underflows", cx.level())));
    }
    let small = if cx.eps() < SECULAR_BELOW {
        smallest_by_secular(cx, a).unwrap_or_else(|| smallest_by_svd(a))
    } else {
        smallest_by_svd(a)
    };
    if !(small.sigma > 0.0) {
        return Err(Error::PrecisionExhausted(format!(
            "smallest singular value at level {} is below working precision",
            cx.level()
        )));
    }
    Ok(small)
}

/// `sqrt(|E|) / sigma_min`, an upper bound for the Ueda constant.
pub fn k_upper(cx: &TwistedComplex<'_>) -> Result<f64> {
    let a = frame_matrix(cx);
    let small = smallest(cx, &a)?;
    Ok((a.nrows() as f64).sqrt() / small.sigma)
}

/// Certified bounds for the Ueda constant of `cx`.
pub fn ueda_bounds(cx: &TwistedComplex<'_>, opts: &UedaOptions) -> Result<UedaBounds> {
    let a = frame_matrix(cx);
    let small = smallest(cx, &a)?;
    let k_upper = (a.nrows() as f64).sqrt() / small.sigma;
    let mut start = (small.base, small.dev);
    let mut best = framed_ratio(cx, start.0, &start.1);
    // translations act on grid complexes by unimodular gauges, so one target vertex suffices
    let targets = match cx.cover().kind() {
        CoverKind::Grid { .. } => 1,
        CoverKind::Custom => a.ncols(),
    };
    for v in 0..targets {
        if let Some(dev) = vertex_minimax(cx, &a, v) {
            let r = framed_ratio(cx, Complex64::new(1.0, 0.0), &dev);
            if r > best {
                best = r;
                start = (Complex64::new(1.0, 0.0), dev);
            }
        }
    }
    let (base, dev) = local_search(cx, start.0, start.1, opts);
    let k_lower = framed_ratio(cx, base, &dev);
    Ok(UedaBounds {
        k_lower,
        k_upper,
        argmax: Cochain0::structured(cx.gauge().to_vec(), base, dev),
        sigma_min: small.sigma,
        route: small.route,
    })
}

const LAWSON_STEPS: usize = 400;

/// `argmin max_e |(delta f)_e|` over `f` with `f_v = 1` in the frame, by Lawson's
/// reweighted least squares; returns the deviations from the constant `1`.
fn vertex_minimax(cx: &TwistedComplex<'_>, a: &DMatrix<Complex64>, v: usize) -> Option<Vec<Complex64>> {
    let (ne, nv) = a.shape();
    if nv < 2 {
        return Some(vec![Complex64::zero(); nv]);
    }
    let cols: Vec<usize> = (0..nv).filter(|&j| j != v).collect();
    let ar = DMatrix::from_fn(ne, nv - 1, |i, k| a[(i, cols[k])]);
    let tau = DVector::from_column_slice(cx.tau());
    let mut w = vec![1.0 / ne as f64; ne];
    let mut best: Option<(f64, DVector<Complex64>)> = None;
    for _ in 0..LAWSON_STEPS {
        let wmax = w.iter().copied().fold(0.0, f64::max);
        let floor = 1e-12 * wmax;
        let mut aw = ar.clone();
        let mut tw = tau.clone();
        for i in 0..ne {
            let s = Complex64::new(w[i].max(floor).sqrt(), 0.0);
            aw.row_mut(i).scale_mut(s.re);
            tw[i] *= s;
        }
        let normal = aw.adjoint() * &aw;
        let rhs = -(aw.adjoint() * &tw);
        let x = normal.cholesky()?.solve(&rhs);
        let r = &ar * &x + &tau;
        let rmax = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(b, _)| rmax < *b) {
            best = Some((rmax, x.clone()));
        }
        let total: f64 = w.iter().zip(r.iter()).map(|(wi, ri)| wi * ri.norm()).sum();
        if !(total > 0.0) {
            break;
        }
        for (wi, ri) in w.iter_mut().zip(r.iter()) {
            *wi *= ri.norm() / total;
        }
    }
    let (_, x) = best?;
    let mut dev = vec![Complex64::zero(); nv];
    for (k, &j) in cols.iter().enumerate() {
        dev[j] = x[k];
    }
    Some(dev)
}

fn unit_disk(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm_sqr() <= 1.0 {
            return z;
        }
    }
}

/// Seeded hill climb on `max|f| / max|delta f|`, perturbing one coordinate at a time.
pub(crate) fn local_search(
    cx: &TwistedComplex<'_>,
    mut base: Complex64,
    mut dev: Vec<Complex64>,
    opts: &UedaOptions,
) -> (Complex64, Vec<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let nv = dev.len();
    let mut best = framed_ratio(cx, base, &dev);
    let mut step = 0.1;
    for _ in 0..opts.iterations {
        let scale = dev.iter().map(|d| d.norm()).fold(0.0, f64::max).max(base.norm() * cx.eps());
        if scale == 0.0 {
            break;
        }
        let z = unit_disk(&mut rng) * (step * scale);
        let pick = rng.random_range(0..=nv);
        let (nb, nd) = if pick == nv {
            (base + z, dev.clone())
        } else {
            let mut d = dev.clone();
            d[pick] += z;
            (base, d)
        };
        let r = framed_ratio(cx, nb, &nd);
        if r > best {
            best = r;
            base = nb;
            dev = nd;
            step *= 1.5;
        } else {
            step *= 0.7;
            if step < 1e-6 {
                step = 0.1;
            }
        }
    }
    (base, dev)
}

/// Best ratio over `samples` random cochains with entries in the unit disk.
pub fn ueda_oracle(cx: &TwistedComplex<'_>, samples: usize, seed: u64) -> Result<f64> {
    cx.require_nontrivial()?;
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = cx.cover().num_vertices();
    let mut best: f64 = 0.0;
    let mut buf = vec![Complex64::zero(); nv];
    for _ in 0..samples {
        for b in buf.iter_mut() {
            *b = unit_disk(&mut rng);
        }
        let f = Cochain0::from_values(buf.clone());
        best = best.max(ueda_ratio(cx, &f)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{transitions, Cover, Edge};
    use crate::diophantine::{Precision, ThetaSpec};
    use crate::pic0::FlatLineBundle;
    use num_bigint::BigInt;

    fn p() -> Precision {
        Precision::default()
    }

    fn golden() -> FlatLineBundle {
        FlatLineBundle::standard(ThetaSpec::integer(0), ThetaSpec::golden())
    }

    fn toy() -> Cover {
        let e = vec![Edge { from: 0, to: 1, deck: [0, 0] }, Edge { from: 0, to: 1, deck: [0, 1] }];
        Cover::custom(2, e, &[]).unwrap()
    }

    fn random_f(n: usize, rng: &mut ChaCha8Rng) -> Cochain0 {
        Cochain0::from_values((0..n).map(|_| unit_disk(rng)).collect())
    }

    #[test]
    fn roundtrip_recovers_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = Cover::grid(3).unwrap();
        let cx = transitions(&c, &golden(), &BigInt::from(1), &p()).unwrap();
        let f0 = random_f(9, &mut rng);
        let g = cx.coboundary(&f0).unwrap();
        let sol = solve_coboundary(&cx, &g).unwrap();
        assert!(sol.f.sup_distance(&f0) <= 1e-10, "{}", sol.f.sup_distance(&f0));
        assert!(sol.residual <= 1e-10 * g.sup_norm());
    }

    #[test]
    fn torsion_level_is_rejected() {
        let c = Cover::grid(3).unwrap();
        let f = FlatLineBundle::standard(ThetaSpec::rational(1, 2).unwrap(), ThetaSpec::integer(0));
        let cx = transitions(&c, &f, &BigInt::from(2), &p()).unwrap();
        let g = Cochain1::zeros(c.num_edges());
        assert!(matches!(solve_coboundary(&cx, &g), Err(Error::TorsionLevel(_))));
        assert!(matches!(ueda_bounds(&cx, &UedaOptions::default()), Err(Error::TorsionLevel(_))));
    }

    #[test]
    fn perturbed_edge_is_not_a_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = Cover::grid(3).unwrap();
        let cx = transitions(&c, &golden(), &BigInt::from(1), &p()).unwrap();
        let mut g = cx.coboundary(&random_f(9, &mut rng)).unwrap();
        g.values[7] += Complex64::new(0.1, 0.0);
        // the defect is visible on every triangle through edge 7
        assert!(cx.cocycle_residual(&g).unwrap() >= 0.1 - 1e-12);
        assert!(matches!(solve_coboundary(&cx, &g), Err(Error::NotACocycle(_))));
    }

    #[test]
    fn tiny_twist_roundtrip() {
        // level 82 of the asymptotically-zero number has twist near 2^-170
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = Cover::grid(4).unwrap();
        let n = FlatLineBundle::standard(ThetaSpec::integer(0), ThetaSpec::az_default());
        let cx = transitions(&c, &n, &BigInt::from(82), &p()).unwrap();
        assert!(cx.eps() < 1e-50);
        // extremal-like input: deviations of the twist's size around a constant
        let dev: Vec<Complex64> = (0..16).map(|_| unit_disk(&mut rng) * cx.eps()).collect();
        let f0 = Cochain0::structured(cx.gauge().to_vec(), Complex64::new(1.0, 3.0), dev);
        let g = cx.coboundary(&f0).unwrap();
        assert!(g.sup_norm() < 1e-49);
        let sol = solve_coboundary(&cx, &g).unwrap();
        assert!(sol.f.sup_distance(&f0) <= 1e-12 * f0.sup_norm());
        assert!(sol.residual <= 1e-10 * g.sup_norm());
        // differences of deviations are recovered relative to the twist
        let (s, o) = (sol.f.dev(), f0.dev());
        for j in 1..16 {
            let d = (s[j] - s[0]) - (o[j] - o[0]);
            assert!(d.norm() <= 1e-9 * cx.eps(), "{d}");
        }
    }

    #[test]
    fn toy_nerve_bounds() {
        let c = toy();
        let f = FlatLineBundle::standard(ThetaSpec::integer(0), ThetaSpec::rational(1, 2).unwrap());
        let cx = transitions(&c, &f, &BigInt::from(1), &p()).unwrap();
        let hand = ueda_ratio(&cx, &Cochain0::from_values(vec![Complex64::new(1.0, 0.0); 2])).unwrap();
        assert_eq!(hand, 0.5);
        let b = ueda_bounds(&cx, &UedaOptions::default()).unwrap();
        assert!(b.k_lower >= 0.5);
        assert!(b.k_lower <= b.k_upper);
        let oracle = ueda_oracle(&cx, 20_000, 0).unwrap();
        assert!(b.k_lower <= oracle * 1.5 && oracle <= 2.0 * b.k_lower);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = Cover::grid(3).unwrap();
        let cx = transitions(&c, &golden(), &BigInt::from(2), &p()).unwrap();
        for _ in 0..100 {
            let f = random_f(9, &mut rng);
            let a = ueda_ratio(&cx, &f).unwrap();
            let b = ueda_ratio(&cx, &f.scale(Complex64::new(3.0, 0.0))).unwrap();
            let c4 = ueda_ratio(&cx, &f.scale(Complex64::new(0.0, 4.0))).unwrap();
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * a);
            assert_eq!(a, c4);
        }
    }

    #[test]
    fn bounds_are_ordered_and_close() {
        for m in [3, 4] {
            let c = Cover::grid(m).unwrap();
            for n in [1, 2, 5, 13] {
                let cx = transitions(&c, &golden(), &BigInt::from(n), &p()).unwrap();
                let b = ueda_bounds(&cx, &UedaOptions::default()).unwrap();
                let slack = ((c.num_edges() * c.num_vertices()) as f64).sqrt() * 1.01;
                assert!(0.0 < b.k_lower && b.k_lower <= b.k_upper);
                assert!(b.k_upper / b.k_lower <= slack);
                let r = ueda_ratio(&cx, &b.argmax).unwrap();
                assert_eq!(r, b.k_lower);
            }
        }
    }

    #[test]
    fn secular_route_matches_svd_at_moderate_twist() {
        // both routes are accurate around eps ~ 1e-3; compare them on the same matrix
        let c = Cover::grid(3).unwrap();
        let f = FlatLineBundle::standard(ThetaSpec::integer(0), ThetaSpec::rational(1, 4000).unwrap());
        let cx = transitions(&c, &f, &BigInt::from(1), &p()).unwrap();
        let a = frame_matrix(&cx);
        let s1 = smallest_by_svd(&a).sigma;
        let s2 = smallest_by_secular(&cx, &a).unwrap().sigma;
        assert!((s1 - s2).abs() <= 1e-9 * s1, "{s1} {s2}");
    }

    #[test]
    fn lower_bound_beats_searched_samples() {
        let c = Cover::grid(3).unwrap();
        let cx = transitions(&c, &golden(), &BigInt::from(1), &p()).unwrap();
        let b = ueda_bounds(&cx, &UedaOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut wins = 0;
        for seed in 0..20 {
            let f = random_f(9, &mut rng);
            let (base, dev) = cx.in_frame(&f);
            let (nb, nd) = local_search(&cx, base, dev, &UedaOptions { iterations: 400, seed });
            if b.k_lower >= framed_ratio(&cx, nb, &nd) {
                wins += 1;
            }
        }
        assert_eq!(wins, 20);
    }
}
