use std::sync::OnceLock;

use fickett_core::characteristics::{
    cplus_fan, piston_seeds, trace_cplus, trace_czero, verify_eq6, Family, Termination, Tracer,
};
use fickett_core::fronts::fire_trajectory;
use fickett_core::{run, RunRecord, SimParams, SolverConfig};

fn config(t_end: f64) -> SolverConfig {
    SolverConfig {
        t_end,
        domain_length: 2.0 * t_end + 1.0,
        ..SolverConfig::default()
    }
}

fn inert() -> &'static RunRecord {
    static R: OnceLock<RunRecord> = OnceLock::new();
    R.get_or_init(|| run(&SimParams::new(0.0, 1.0, 0.2, 0.0).unwrap(), &config(4.0)).unwrap())
}

fn slow() -> &'static RunRecord {
    static R: OnceLock<RunRecord> = OnceLock::new();
    R.get_or_init(|| run(&SimParams::with_rates(0.2, 0.2).unwrap(), &config(3.0)).unwrap())
}

fn fast() -> &'static RunRecord {
    static R: OnceLock<RunRecord> = OnceLock::new();
    R.get_or_init(|| run(&SimParams::with_rates(2.0, 0.2).unwrap(), &config(2.6)).unwrap())
}

#[test]
fn unit_speed_behind_inert_shock() {
    let p = trace_cplus(inert(), (0.0, 1.0)).unwrap();
    assert!(matches!(p.termination, Termination::LeadShock { .. }));
    for s in p.samples.iter().filter(|s| s.shock_gap > 0.05) {
        assert!((s.x - (s.t - 1.0)).abs() < 1e-9, "x = {} at t = {}", s.x, s.t);
    }
    // meets the shock x = t / 2 near (1, 2)
    let last = p.samples.last().unwrap();
    assert!((last.t - 2.0).abs() < 0.01 && (last.x - 1.0).abs() < 0.01);
}

#[test]
fn stationary_ahead_of_shock() {
    let p = trace_cplus(inert(), (1.8, 0.5)).unwrap();
    assert!(matches!(p.termination, Termination::LeadShock { .. }));
    for s in p.samples.iter().filter(|s| s.t < 3.5) {
        assert_eq!(s.x, 1.8);
        assert_eq!(s.rho, 0.0);
    }
}

#[test]
fn zero_residual_ahead_of_shock() {
    let p = trace_cplus(slow(), (2.0, 0.5)).unwrap();
    assert!(matches!(p.termination, Termination::EndTime));
    let r = verify_eq6(&p, &slow().params).unwrap();
    assert_eq!(r.max, 0.0);
    assert_eq!(r.rms, 0.0);
}

#[test]
fn inert_fan_is_parallel() {
    let fan = cplus_fan(inert(), &piston_seeds(0.5, 3.0, 0.5)).unwrap();
    assert_eq!(fan.len(), 6);
    for p in fan {
        let p = p.unwrap();
        let outside: Vec<_> = p.samples.iter().filter(|s| s.shock_gap > 0.05).collect();
        let (a, b) = (outside[0], outside[outside.len() - 1]);
        let slope = (b.x - a.x) / (b.t - a.t);
        assert!((slope - 1.0).abs() < 1e-3, "seed {:?}: slope {slope}", p.seed);
    }
}

#[test]
fn reaches_shock_from_first_fire() {
    let p = trace_cplus(slow(), (0.0, 1.0)).unwrap();
    match p.termination {
        Termination::LeadShock { path_speed, shock_speed } => {
            assert!(path_speed > shock_speed, "{path_speed} <= {shock_speed}");
        }
        other => panic!("ended with {other:?}"),
    }
    let last = p.samples.last().unwrap();
    assert!(last.t < slow().config.t_end);
}

#[test]
fn paths_accelerate_in_reaction_zone() {
    let p = trace_cplus(slow(), (0.0, 1.5)).unwrap();
    let peak = p.samples.iter().map(|s| s.rho).fold(0.0, f64::max);
    assert!(peak > 1.02, "peak rho {peak}");
    let rho: Vec<f64> = p.samples.iter().filter(|s| s.shock_gap > 0.05).map(|s| s.rho).collect();
    assert!(rho[rho.len() - 1] > rho[0]);
}

#[test]
fn paths_converge_ahead_of_fire() {
    // arrival-time spacing of neighbouring paths at fixed x shrinks
    let gap_at = |rec: &RunRecord, x: f64| {
        let arrival = |t0: f64| {
            let p = trace_cplus(rec, (0.0, t0)).unwrap();
            p.samples.iter().find(|s| s.x >= x).map(|s| s.t).unwrap()
        };
        arrival(1.2) - arrival(1.1)
    };
    let (near, far) = (gap_at(fast(), 0.1), gap_at(fast(), 0.6));
    let (slow_near, slow_far) = (gap_at(slow(), 0.1), gap_at(slow(), 0.6));
    assert!(far < 0.8 * near, "{near} -> {far}");
    assert!(far / near < slow_far / slow_near);
    let fire = fire_trajectory(fast());
    assert!(fire.time_at(0.6).unwrap() > 1.4);
}

#[test]
fn no_crossing_from_behind_below_shock_speed() {
    for p in cplus_fan(slow(), &piston_seeds(0.2, 2.8, 0.2)).unwrap() {
        if let Termination::LeadShock { path_speed, shock_speed } = p.unwrap().termination {
            assert!(path_speed >= shock_speed - 1e-3, "{path_speed} < {shock_speed}");
        }
    }
}

#[test]
fn particle_paths_are_vertical() {
    let p = trace_czero(fast(), (0.3, 0.2)).unwrap();
    assert_eq!(p.family, Family::Czero);
    assert!(p.samples.iter().all(|s| s.x == 0.3));
    assert!(p.samples.windows(2).all(|w| w[1].t > w[0].t));
    assert!(verify_eq6(&p, &fast().params).is_err());
}

#[test]
fn cplus_paths_move_forward() {
    for p in cplus_fan(fast(), &piston_seeds(0.1, 2.5, 0.1)).unwrap() {
        let p = p.unwrap();
        assert!(p.samples.windows(2).all(|w| w[1].t > w[0].t && w[1].x >= w[0].x));
    }
}

#[test]
fn samples_match_interpolator() {
    let rec = slow();
    let tracer = Tracer::new(rec).unwrap();
    let p = tracer.trace_cplus(0.0, 1.4).unwrap();
    for s in p.samples.iter().step_by(7) {
        assert_eq!(s.rho, tracer.sampler().rho(s.x, s.t));
    }
}

#[test]
fn inert_residual_is_tiny() {
    let p = trace_cplus(inert(), (0.0, 1.5)).unwrap();
    let r = verify_eq6(&p, &inert().params).unwrap();
    assert!(r.rms < 1e-5, "rms {}", r.rms);
    assert_eq!(r.mean_source, 0.0);
}

#[test]
fn reacting_residual_within_tenth_of_source() {
    let rec = slow();
    let bound = 0.1 * 0.5 * rec.params.k() * rec.params.q();
    for t0 in [1.4, 1.8, 2.2] {
        let r = verify_eq6(&trace_cplus(rec, (0.0, t0)).unwrap(), &rec.params).unwrap();
        assert!(r.mean_source > 0.0);
        assert!(r.rms < bound, "seed t = {t0}: rms {}", r.rms);
    }
}

#[test]
fn bad_seeds_fail_alone() {
    let out = cplus_fan(slow(), &[(-1.0, 1.0), (0.0, 1.0), (0.0, 50.0)]).unwrap();
    assert!(out[0].is_err());
    assert!(out[1].is_ok());
    assert!(out[2].is_err());
}

#[test]
fn short_path_has_no_residual() {
    let rec = slow();
    let p = trace_cplus(rec, (0.0, rec.config.t_end - 0.005)).unwrap();
    assert!(p.samples.len() < 10);
    assert!(verify_eq6(&p, &rec.params).is_err());
}

#[test]
fn piston_seed_spacing() {
    let s = piston_seeds(0.1, 0.5, 0.1);
    assert_eq!(s.len(), 5);
    assert!((s[4].1 - 0.5).abs() < 1e-12);
    assert!(piston_seeds(1.0, 0.5, 0.1).is_empty());
}
