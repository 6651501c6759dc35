use proptest::prelude::*;
use zladder_core::ladder::{
    ladder_asymptotic, ladder_ode, mirror_point, pi_count, IdentityLadder, LadderModel, PrimeCounter, TabulatedLadder,
};
use zladder_core::quad::{transform_residual, QuadSpec};

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[test]
fn pi_count_matches_trial_division_to_1e5() {
    let pc = PrimeCounter::sieve(100_000).unwrap();
    let mut count = 0;
    for n in 0..=100_000u64 {
        if is_prime(n) {
            count += 1;
        }
        assert_eq!(pi_count(n as f64, &pc).unwrap(), count, "n = {n}");
        if n < 100_000 {
            assert_eq!(pi_count(n as f64 + 0.5, &pc).unwrap(), count, "n = {n}.5");
        }
    }
}

#[test]
fn ode_round_trip_on_dense_sample() {
    let seed = ladder_asymptotic((10.0, 1e8)).unwrap();
    let anchor = mirror_point(&seed, 1e6).unwrap();
    let m = ladder_ode(anchor, 600.0, &seed).unwrap();
    assert!(m.unconverged().is_empty());
    let (lo, hi) = m.image().unwrap();
    for i in 0..=2000 {
        let target = lo + (hi - lo) * i as f64 / 2000.0;
        let s = mirror_point(&m, target).unwrap();
        assert!((m.eval(s).unwrap() - target).abs() <= 1e-8 * target, "target {target}");
    }
    // nondecreasing, with derivative Z̃² ≥ 0
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=5000 {
        let t = anchor + 600.0 * i as f64 / 5000.0;
        let v = m.eval(t).unwrap();
        assert!(v >= prev);
        assert!(m.deriv(t).unwrap() >= 0.0);
        prev = v;
    }
}

#[test]
fn substitution_holds_for_every_ladder_model() {
    let asym = ladder_asymptotic((10.0, 1e8)).unwrap();
    let ident = IdentityLadder::new((100.0, 1e8));
    let anchor = mirror_point(&asym, 2e5 - 50.0).unwrap();
    let ode = ladder_ode(anchor, 500.0, &asym).unwrap();
    let table = TabulatedLadder::from_model(&asym, 4000).unwrap();
    let models: [&dyn LadderModel; 4] = [&asym, &ident, &ode, &table];
    let q = QuadSpec::default();
    let f = |x: f64| (x / 7.0).sin() + 1e-5 * x;
    for m in models {
        let r = transform_residual(m, &f, 2e5, 300.0, &q).unwrap();
        assert!(r.within(10.0), "{}: {} > 10 × {}", m.kind(), r.residual, r.tolerance);
    }
}

#[test]
fn checkpoint_round_trip() {
    let asym = ladder_asymptotic((1e4, 1e6)).unwrap();
    let table = TabulatedLadder::from_model(&asym, 500).unwrap();
    let mut buf = Vec::new();
    table.write_csv(&mut buf).unwrap();
    let back = TabulatedLadder::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, table);
    for t in [1e4, 2.5e4, 3.3e5, 1e6] {
        assert!((table.eval(t).unwrap() - asym.eval(t).unwrap()).abs() <= table.tolerance().max(1e-9 * t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn asymptotic_mirror_round_trip(target in 1e3f64..1e8) {
        let m = ladder_asymptotic((10.0, 4e8)).unwrap();
        let s = mirror_point(&m, target).unwrap();
        prop_assert!(s > target);
        prop_assert!((m.eval(s).unwrap() - target).abs() <= 1e-8 * target);
    }

    #[test]
    fn asymptotic_increasing(a in 20f64..1e8, d in 1e-3f64..1e3) {
        let m = ladder_asymptotic((10.0, 4e8)).unwrap();
        prop_assert!(m.eval(a + d).unwrap() > m.eval(a).unwrap());
        prop_assert!(m.deriv(a).unwrap() > 0.0);
    }
}
