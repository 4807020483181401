use fickett_core::solver::initial_state;
use fickett_core::{run, Error, FieldState, Grid, RunRecord, SimParams, Solver, SolverConfig};

fn config(t_end: f64, ppu: usize) -> SolverConfig {
    SolverConfig {
        t_end,
        domain_length: 2.0 * t_end + 1.0,
        points_per_unit: ppu,
        ..SolverConfig::default()
    }
}

fn inert(t_end: f64, ppu: usize, kinetics: bool) -> RunRecord {
    let p = SimParams::new(0.0, 1.0, 0.2, 0.0).unwrap();
    run(&p, &SolverConfig { kinetics, ..config(t_end, ppu) }).unwrap()
}

#[test]
fn initial_state_has_zero_pressure() {
    let g = Grid::new(100, 2.0).unwrap();
    let s = initial_state(&g);
    assert_eq!(s.time, 0.0);
    assert!(s.cells.iter().all(|c| (c.rho, c.lambda_i, c.lambda_r) == (0.0, 1.0, 0.0)));
    assert!(s.cells.iter().all(|c| c.pressure(1.0) == 0.0));
}

#[test]
fn inert_density_ignores_kinetics() {
    let a = inert(2.0, 400, true);
    let b = inert(2.0, 400, false);
    assert_eq!(a.final_state.cells.len(), b.final_state.cells.len());
    for (x, y) in a.final_state.cells.iter().zip(&b.final_state.cells) {
        assert_eq!(x.rho.to_bits(), y.rho.to_bits());
    }
    // the lambdas did evolve
    assert!(a.final_state.cells[0].lambda_i < 1.0);
    assert!(b.final_state.cells[0].lambda_i == 1.0);
}

#[test]
fn inert_final_profile_is_a_step() {
    let rec = inert(2.0, 800, true);
    let x_s = 0.5 * rec.final_state.time;
    for (j, c) in rec.final_state.cells.iter().enumerate() {
        let x = rec.grid.x_center(j);
        if x < x_s - 0.02 {
            assert!((c.rho - 1.0).abs() < 1e-9, "x = {x}, rho = {}", c.rho);
        } else if x > x_s + 0.02 {
            assert_eq!(c.rho, 0.0, "x = {x}");
        }
    }
}

#[test]
fn first_fire_at_piston_near_unit_time() {
    let rec = run(&SimParams::with_rates(0.2, 0.2).unwrap(), &config(1.5, 1600)).unwrap();
    let t0 = rec.fire_onset[0].unwrap();
    // exact value at the first cell centre is 1 + dx; the captured shock adds
    // a lag of about 3 steps
    let exact = 1.0 + rec.grid.dx;
    assert!((t0 - exact).abs() <= 4.0 * rec.dt_max, "t*(0) = {t0}");
}

#[test]
fn fire_recorded_once_per_cell() {
    let rec = run(&SimParams::with_rates(0.2, 0.2).unwrap(), &config(2.0, 400)).unwrap();
    let fired = rec.fire_onset.iter().flatten().count();
    let burning = rec
        .final_state
        .cells
        .iter()
        .filter(|c| c.lambda_i == 0.0)
        .count();
    assert_eq!(fired, burning);
}

#[test]
fn runs_are_bit_identical() {
    let p = SimParams::with_rates(2.0, 0.2).unwrap();
    let a = run(&p, &config(1.5, 400)).unwrap();
    let b = run(&p, &config(1.5, 400)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mass_balance_closes() {
    for k in [0.2, 2.0, 5.0] {
        let rec = run(&SimParams::with_rates(k, 0.2).unwrap(), &config(2.0, 800)).unwrap();
        assert!(rec.mass_defect().abs() < 1e-10, "K = {k}: {}", rec.mass_defect());
    }
}

#[test]
fn shock_position_converges() {
    let p = SimParams::with_rates(0.2, 0.2).unwrap();
    let at = |ppu: usize| {
        let rec = run(&p, &config(4.0, ppu)).unwrap();
        let f = rec.frames.iter().find(|f| (f.time - 4.0).abs() < 1e-9).unwrap();
        rec.grid.x_center(fickett_core::fronts::lead_index(f).unwrap())
    };
    let (a, b) = (at(1600), at(3200));
    assert!((a - b).abs() / b < 0.005, "{a} vs {b}");
}

#[test]
fn rejects_bad_config() {
    let p = SimParams::with_rates(1.0, 0.2).unwrap();
    for cfg in [
        SolverConfig { cfl: 0.0, ..config(1.0, 100) },
        SolverConfig { cfl: 1.5, ..config(1.0, 100) },
        SolverConfig { t_end: -1.0, ..config(1.0, 100) },
        SolverConfig { snapshot_interval: 0.0, ..config(1.0, 100) },
    ] {
        assert!(matches!(run(&p, &cfg), Err(Error::InvalidParameter { .. })));
    }
}

#[test]
fn short_domain_is_rejected() {
    let p = SimParams::with_rates(1.0, 0.2).unwrap();
    let cfg = SolverConfig { domain_length: 0.5, ..config(2.0, 200) };
    assert!(matches!(run(&p, &cfg), Err(Error::BoundaryReached { .. })));
}

#[test]
fn solver_steps_respect_limit() {
    let p = SimParams::with_rates(0.2, 0.2).unwrap();
    let cfg = config(1.0, 200);
    let g = cfg.grid().unwrap();
    let mut s = Solver::from_state(p, cfg, FieldState { time: 0.0, cells: initial_state(&g).cells }).unwrap();
    let dt = s.step(1e-5).unwrap();
    assert!(dt <= 1e-5);
    assert!(s.state().time <= 1e-5);
}
