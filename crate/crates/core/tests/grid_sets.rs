use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zladder_core::grid::{
    build_g1, build_g2, default_tol, grid_range, sign_partition, solve_grid_point, SetLabel, SignScan, WindowSpec,
};
use zladder_core::rs::{hardy_z, RSConfig};

fn z(t: f64) -> f64 {
    hardy_z(t, &RSConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grid_residual_within_tolerance(nu in 1i64..50_000_000, tau in -PI..=PI) {
        let p = solve_grid_point(nu, tau, default_tol(1e9)).unwrap();
        prop_assert!(p.residual().abs() <= default_tol(p.t), "{p:?}");
    }

    #[test]
    fn grid_points_increase_in_tau(nu in 1i64..10_000_000, a in -PI..PI, b in -PI..PI) {
        prop_assume!(a < b);
        let pa = solve_grid_point(nu, a, 1.0).unwrap();
        let pb = solve_grid_point(nu, b, 1.0).unwrap();
        prop_assert!(pa.t < pb.t);
    }

    #[test]
    fn interleaved_and_disjoint(t in 1e3f64..1e6, h in 20f64..200.0, x in 0.01f64..=FRAC_PI_2) {
        let w = WindowSpec::with_h(t, h).unwrap();
        let g1 = build_g1(&w, x).unwrap();
        let g2 = build_g2(&w, x).unwrap();
        for c in [&g1, &g2] {
            prop_assert!(c.intervals().iter().all(|iv| iv.lo < iv.hi));
            prop_assert!(c.intervals().windows(2).all(|p| p[0].hi <= p[1].lo));
            let (lo, hi) = c.window();
            prop_assert!(c.intervals().iter().all(|iv| iv.lo >= lo && iv.hi <= hi));
        }
        let u = g1.union(&g2, SetLabel::Other);
        prop_assert_eq!(u.len(), g1.len() + g2.len());
        for p in u.intervals().windows(2) {
            prop_assert!(p[0].hi <= p[1].lo);
            prop_assert_ne!(g1.contains(0.5 * (p[0].lo + p[0].hi)), g1.contains(0.5 * (p[1].lo + p[1].hi)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn measure_law(t in 1e6f64..1e7, x in 0.05f64..=FRAC_PI_2) {
        let w = WindowSpec::with_h(t, 1e3).unwrap();
        let g1 = build_g1(&w, x).unwrap();
        let g2 = build_g2(&w, x).unwrap();
        for c in [g1, g2] {
            let r = c.measure() * PI / (x * 1e3);
            prop_assert!((r - 1.0).abs() <= 0.02, "{r}");
        }
    }

    #[test]
    fn sign_partition_audit(t in 1e4f64..1e7, seed in any::<u64>()) {
        let w = WindowSpec::with_h(t, 60.0).unwrap();
        let c = build_g1(&w, FRAC_PI_2).unwrap().union(&build_g2(&w, FRAC_PI_2).unwrap(), SetLabel::Other);
        let p = sign_partition(&c, z, &SignScan::for_height(t, 1e-9)).unwrap();
        prop_assert!(p.gap_measure() <= p.gap_budget);
        // one bracket of adjacent doubles per root is the finest possible
        let floor = 2.0 * f64::EPSILON * (t + 60.0) * p.gaps.len() as f64;
        prop_assert!(p.gap_budget <= (1e-9 * c.measure()).max(floor));
        let total = p.pos.measure() + p.neg.measure() + p.gap_measure();
        prop_assert!((total - c.measure()).abs() <= 1e-9 * c.measure());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (part, positive) in [(&p.pos, true), (&p.neg, false)] {
            for _ in 0..300 {
                let iv = part.intervals()[rng.random_range(0..part.len())];
                let s = iv.lo + iv.len() * rng.random::<f64>();
                prop_assert_eq!(z(s) > 0.0, positive, "t = {}", s);
            }
        }
    }
}

#[test]
fn grid_count_tracks_theta() {
    for t in [1e3, 1e5, 1e7] {
        let w = WindowSpec::with_h(t, 100.0).unwrap();
        let pts = grid_range(&w).unwrap();
        let expected = 100.0 * (t / (2.0 * PI)).ln() / (2.0 * PI);
        assert!((pts.len() as f64 - expected).abs() <= 2.0, "{} vs {expected}", pts.len());
        assert!(pts.windows(2).all(|p| p[1].nu == p[0].nu + 1 && p[1].t > p[0].t));
    }
}

#[test]
fn interval_table_round_trip() {
    let w = WindowSpec::with_h(5e5, 80.0).unwrap();
    let g = build_g2(&w, 1.0).unwrap();
    let mut buf = Vec::new();
    g.write_csv(&mut buf).unwrap();
    let back = zladder_core::grid::IntervalCollection::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, g);
}
