use std::sync::OnceLock;

use fickett_core::fronts::DetectorConfig;
use fickett_core::regime::{
    acceleration_fit, chi_invariance_suite, classify, relative_gap, sweep, Regime,
};
use fickett_core::{run, Error, RunRecord, SimParams, SolverConfig};

fn config(t_end: f64) -> SolverConfig {
    SolverConfig {
        t_end,
        domain_length: 2.0 * t_end + 1.0,
        ..SolverConfig::default()
    }
}

fn record(k: f64) -> &'static RunRecord {
    static R: OnceLock<Vec<RunRecord>> = OnceLock::new();
    let all = R.get_or_init(|| {
        [(0.2, 3.0), (2.0, 2.6), (5.0, 2.2)]
            .iter()
            .map(|&(k, t)| run(&SimParams::with_rates(k, 0.2).unwrap(), &config(t)).unwrap())
            .collect()
    });
    all.iter().find(|r| r.params.k() == k).unwrap()
}

#[test]
fn slow_reaction_is_smooth() {
    let r = classify(record(0.2)).unwrap();
    assert_eq!(r.regime, Regime::SmoothAcceleration);
    assert!(r.internal_shock_formation.is_none());
    assert!(r.merge_event.is_none() && r.speed_ratio_to_cj.is_none());
    assert!((r.chi - 1.0).abs() < 1e-15);
    let a = r.fire_origin_acceleration_fit.unwrap();
    assert!((a - 0.125).abs() / 0.125 < 0.2, "fit {a}");
}

#[test]
fn faster_reactions_form_internal_shocks() {
    for k in [2.0, 5.0] {
        let r = classify(record(k)).unwrap();
        assert_eq!(r.regime, Regime::InternalShockSubCj, "K = {k}");
        assert!(r.internal_shock_formation.is_some());
        assert!(r.merge_event.is_some() && r.speed_ratio_to_cj.is_some());
        assert_eq!(r.cj_reference, 2.0);
        assert!(r.speed_variance.is_some());
    }
    let m = classify(record(5.0)).unwrap().merge_event.unwrap();
    assert!((m.speed - 1.5).abs() < 0.1);
}

#[test]
fn classification_is_repeatable() {
    let rec = record(2.0);
    assert_eq!(classify(rec).unwrap(), classify(rec).unwrap());
}

#[test]
fn formation_earlier_for_larger_rate() {
    let t2 = classify(record(2.0)).unwrap().internal_shock_formation.unwrap().1;
    let t5 = classify(record(5.0)).unwrap().internal_shock_formation.unwrap().1;
    assert!(t5 <= t2);
}

#[test]
fn formation_time_trend_on_finer_grid() {
    let grid: Vec<SimParams> = [2.0, 3.0, 4.0, 5.0, 6.0]
        .iter()
        .map(|&k| SimParams::with_rates(k, 0.2).unwrap())
        .collect();
    let cfg = SolverConfig { points_per_unit: 800, ..config(2.4) };
    let times: Vec<f64> = sweep(&grid, &cfg, &DetectorConfig::default())
        .into_iter()
        .map(|e| e.report.unwrap().internal_shock_formation.unwrap().1)
        .collect();
    for w in times.windows(2) {
        assert!(w[1] <= w[0], "{times:?}");
    }
}

#[test]
fn inert_acceleration_is_noise() {
    let rec = run(&SimParams::new(0.0, 1.0, 0.2, 0.0).unwrap(), &config(3.0)).unwrap();
    let a = acceleration_fit(&rec).unwrap();
    // the start-up of the captured shock bends the first cells slightly;
    // stays under a tenth of the K = 0.2 value
    assert!(a.abs() < 0.0125, "fit {a}");
}

#[test]
fn window_too_small_for_large_chi() {
    let rec = run(&SimParams::with_rates(40.0, 0.2).unwrap(), &SolverConfig {
        points_per_unit: 400,
        ..config(1.6)
    })
    .unwrap();
    assert!(matches!(acceleration_fit(&rec), Err(Error::WindowTooSmall(_))));
    let r = classify(&rec).unwrap();
    assert!(r.fire_origin_acceleration_fit.is_none());
    assert!(r.acceleration_fit_note.unwrap().contains("too small"));
}

#[test]
fn sweep_regimes_and_order() {
    let grid: Vec<SimParams> = [0.2, 2.0, 5.0]
        .iter()
        .map(|&k| SimParams::with_rates(k, 0.2).unwrap())
        .collect();
    let out = sweep(&grid, &SolverConfig { points_per_unit: 800, ..config(2.6) }, &DetectorConfig::default());
    let regimes: Vec<Regime> = out.iter().map(|e| e.report.as_ref().unwrap().regime).collect();
    assert_eq!(
        regimes,
        [Regime::SmoothAcceleration, Regime::InternalShockSubCj, Regime::InternalShockSubCj]
    );
    for (e, p) in out.iter().zip(&grid) {
        assert_eq!(e.params, *p);
        assert_eq!(e.report.as_ref().unwrap().chi, p.k() / p.epsilon());
    }
}

#[test]
fn sweep_edge_cases() {
    let cfg = SolverConfig { points_per_unit: 200, ..config(1.5) };
    assert!(sweep(&[], &cfg, &DetectorConfig::default()).is_empty());
    let p = SimParams::with_rates(2.0, 0.2).unwrap();
    let out = sweep(&[p, p], &cfg, &DetectorConfig::default());
    assert_eq!(out[0], out[1]);
    // a failing run is recorded and the rest continue
    let short = SolverConfig { domain_length: 0.5, ..cfg };
    let out = sweep(&[p], &short, &DetectorConfig::default());
    assert!(out[0].report.is_err());
}

#[test]
fn identical_pairs_do_not_differ() {
    let cfg = SolverConfig { points_per_unit: 400, ..config(2.4) };
    let rep = chi_invariance_suite(10.0, &[(2.0, 0.2), (2.0, 0.2)], 1.0, 0.0, &cfg, &DetectorConfig::default()).unwrap();
    assert_eq!(rep.max_formation_deviation(), Some((0.0, 0.0)));
    assert_eq!(rep.pairs[0].fire, Some(0.0));
}

#[test]
fn smooth_pairs_compare_fire() {
    let cfg = SolverConfig { points_per_unit: 400, ..config(2.5) };
    let rep = chi_invariance_suite(1.0, &[(0.2, 0.2), (0.4, 0.4)], 1.0, 0.0, &cfg, &DetectorConfig::default()).unwrap();
    assert!(rep.all_smooth);
    assert!(rep.max_formation_deviation().is_none());
    let fire = rep.pairs[0].fire.unwrap();
    assert!(fire < 0.05, "fire gap {fire}");
    assert!(rep.runs.iter().all(|r| r.fire_closed_form_deviation.unwrap() < 0.05));
}

#[test]
fn mismatched_pair_rejected() {
    let cfg = config(1.0);
    let err = chi_invariance_suite(20.0, &[(2.0, 0.1), (4.0, 0.1)], 1.0, 0.0, &cfg, &DetectorConfig::default());
    assert!(matches!(err, Err(Error::Config(_))));
}

#[test]
fn gap_is_symmetric() {
    assert_eq!(relative_gap(1.0, 3.0), 1.0);
    assert_eq!(relative_gap(3.0, 1.0), 1.0);
    assert_eq!(relative_gap(0.0, 0.0), 0.0);
}
