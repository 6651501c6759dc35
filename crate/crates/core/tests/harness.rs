use std::f64::consts::PI;

use proptest::prelude::*;
use zladder_core::harness::report::{merge_runs, read_run, write_run};
use zladder_core::harness::{integrate_sets, theorem_trend, ExperimentConfig, Relation, Verdict};
use zladder_core::ladder::LadderKind;

fn small() -> ExperimentConfig {
    ExperimentConfig {
        t: 3e5,
        h_override: Some(80.0),
        ..ExperimentConfig::default()
    }
}

#[test]
fn snapshot_reproduces_run() {
    let rows = integrate_sets(&small()).unwrap();
    for r in &rows {
        assert!(Relation::ALL.contains(&r.relation));
        let again = integrate_sets(&r.metadata.config).unwrap();
        let twin = again.iter().find(|a| a.experiment_id == r.experiment_id).unwrap();
        assert_eq!(twin.measured.to_bits(), r.measured.to_bits());
        assert_eq!(twin.verdict, r.verdict);
    }
}

#[test]
fn run_files_round_trip_and_merge() {
    let dir = tempfile::tempdir().unwrap();
    let rows = integrate_sets(&small()).unwrap();
    let path = write_run(dir.path(), "integrate", &rows).unwrap();
    let back = read_run(&path).unwrap();
    assert_eq!(back.reports, rows);
    let mut buf = Vec::new();
    assert_eq!(merge_runs(dir.path(), &mut buf).unwrap(), rows.len());
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("T,H,x,y,command,experiment_id,relation,measured,predicted,error_estimate,verdict"));
}

#[test]
fn deviation_shrinks_with_window_length() {
    let cfg = ExperimentConfig::default();
    let (table, row) = theorem_trend(&cfg, &[1e2, 1e3, 1e4]).unwrap();
    assert_eq!(row.verdict, Verdict::Informative);
    assert!(row.measured <= 0.0, "{table:?}");
}

proptest! {
    #[test]
    fn config_text_round_trip(
        t in 1e3f64..1e8,
        eps in 0.001f64..0.083,
        h in proptest::option::of(10f64..1e4),
        x in 0.01f64..=PI / 2.0,
        y in 0.01f64..=PI / 2.0,
        asym in any::<bool>(),
        terms in 0u8..=5,
        seed in any::<u64>(),
    ) {
        let cfg = ExperimentConfig {
            t,
            epsilon: eps,
            h_override: h,
            x,
            y,
            ladder_kind: if asym { LadderKind::Asymptotic } else { LadderKind::Ode },
            seed,
            rs: zladder_core::rs::RSConfig { correction_terms: terms, ..Default::default() },
            ..ExperimentConfig::default()
        };
        prop_assert_eq!(ExperimentConfig::from_text(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn half_widths_outside_range_rejected(x in prop_oneof![-1.0f64..=0.0, 1.5708f64..4.0]) {
        let cfg = ExperimentConfig { x, ..ExperimentConfig::default() };
        prop_assert!(cfg.validate().is_err());
    }
}
