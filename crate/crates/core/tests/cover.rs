use flatcoh::cover::{
    solve_coboundary, transitions, ueda_bounds, ueda_oracle, ueda_ratio, Cochain0, Cover, NerveJson, UedaOptions,
};
use flatcoh::pic0::FlatLineBundle;
use flatcoh::{Precision, ThetaSpec};
use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prec() -> Precision {
    Precision::default()
}

fn golden() -> FlatLineBundle {
    FlatLineBundle::standard(ThetaSpec::integer(0), ThetaSpec::golden())
}

fn random_f(rng: &mut ChaCha8Rng, n: usize) -> Cochain0 {
    Cochain0::from_values(
        (0..n)
            .map(|_| Complex64::from_polar(rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU))
            .collect(),
    )
}

#[test]
fn lower_bound_dominates_seeded_searches() {
    let c = Cover::grid(3).unwrap();
    let mut wins = 0;
    for seed in 0..100u64 {
        let n = BigInt::from(seed % 5 + 1);
        let cx = transitions(&c, &golden(), &n, &prec()).unwrap();
        let b = ueda_bounds(&cx, &UedaOptions { iterations: 500, seed }).unwrap();
        let sampled = ueda_oracle(&cx, 200, seed).unwrap();
        assert!(b.k_lower <= b.k_upper);
        if b.k_lower >= sampled {
            wins += 1;
        }
    }
    assert!(wins >= 95, "{wins} of 100");
}

#[test]
fn half_period_transitions_are_consistent_on_both_grids() {
    let f = FlatLineBundle::standard(ThetaSpec::rational(1, 2).unwrap(), ThetaSpec::integer(0));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in [3, 4] {
        let c = Cover::grid(m).unwrap();
        let cx = transitions(&c, &f, &BigInt::from(1), &prec()).unwrap();
        assert!(cx.is_exact());
        let g = cx.coboundary(&random_f(&mut rng, m * m)).unwrap();
        assert!(cx.cocycle_residual(&g).unwrap() <= 1e-14, "m = {m}");
    }
}

#[test]
fn sandwich_on_three_grid() {
    // K d stays within fixed bounds along the golden orbit
    let c = Cover::grid(3).unwrap();
    let f = golden();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for n in 1..=20i64 {
        let cx = transitions(&c, &f, &BigInt::from(n), &prec()).unwrap();
        let b = ueda_bounds(&cx, &UedaOptions::default()).unwrap();
        let d = f.power(n).distance_to_trivial(&prec()).unwrap().mid();
        lo = lo.min(b.k_lower * d);
        hi = hi.max(b.k_upper * d);
    }
    assert!(lo > 0.1 && hi < 10.0, "[{lo}, {hi}]");
}

#[test]
fn toy_nerve_from_json_matches_oracle() {
    let txt = r#"{"vertices":2,"edges":[{"from":0,"to":1,"deck":[0,0]},{"from":0,"to":1,"deck":[0,1]}]}"#;
    let c = serde_json::from_str::<NerveJson>(txt).unwrap().into_cover().unwrap();
    let f = FlatLineBundle::standard(ThetaSpec::integer(0), ThetaSpec::rational(1, 2).unwrap());
    let cx = transitions(&c, &f, &BigInt::from(1), &prec()).unwrap();
    let oracle = ueda_oracle(&cx, 1_000_000, 0).unwrap();
    assert!(oracle >= 0.5);
    let b = ueda_bounds(&cx, &UedaOptions::default()).unwrap();
    let r = ueda_ratio(&cx, &b.argmax).unwrap();
    assert!(r <= oracle * 1.5, "{r} vs {oracle}");
    assert_eq!(r, b.k_lower);
}

#[test]
fn solves_are_deterministic_and_exact() {
    let c = Cover::grid(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [1i64, 7, 30] {
        let cx = transitions(&c, &golden(), &BigInt::from(n), &prec()).unwrap();
        let f0 = random_f(&mut rng, 16);
        let g = cx.coboundary(&f0).unwrap();
        let a = solve_coboundary(&cx, &g).unwrap();
        let b = solve_coboundary(&cx, &g).unwrap();
        assert_eq!(a.f.values(), b.f.values());
        assert!(a.f.sup_distance(&f0) <= 1e-10, "n = {n}");
        assert!(a.residual <= 1e-10 * g.sup_norm());
    }
}
