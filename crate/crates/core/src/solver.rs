//! Explicit finite-volume integration of the piston problem.
//!
//! Hydrodynamics is first-order Godunov on a uniform Lagrangian grid. All
//! characteristic speeds `dp/drho = rho` are nonnegative, so the Godunov
//! flux is the upwind (left-state) pressure. Kinetics are split around the
//! hydro step (Strang: half, full, half). Within a kinetic substep the
//! density is frozen, so both rates are integrated exactly and the time at
//! which `lambda_i` hits zero (the fire) is recorded per cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{pressure, CellState, SimParams};

/// Density threshold marking shock arrival, half the nominal post-shock value.
pub const SHOCK_THRESHOLD: f64 = 0.5;

const DT_RHO_FLOOR: f64 = 1e-12;
const GUARD_FRACTION: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub points_per_unit: usize,
    pub dx: f64,
    pub n_cells: usize,
}

impl Grid {
    pub fn new(points_per_unit: usize, domain_length: f64) -> Result<Self> {
        if points_per_unit == 0 {
            return Err(Error::Config("points_per_unit must be positive".into()));
        }
        if !(domain_length > 0.0) || !domain_length.is_finite() {
            return Err(Error::InvalidParameter {
                name: "domain_length",
                value: domain_length,
                constraint: "domain_length > 0",
            });
        }
        let n_cells = (domain_length * points_per_unit as f64).round() as usize;
        if n_cells < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 cells, got {n_cells}"
            )));
        }
        Ok(Self {
            points_per_unit,
            dx: 1.0 / points_per_unit as f64,
            n_cells,
        })
    }

    /// Piston face.
    pub fn x_left(&self) -> f64 {
        0.0
    }

    pub fn x_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx
    }

    pub fn length(&self) -> f64 {
        self.n_cells as f64 * self.dx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub cfl: f64,
    pub t_end: f64,
    pub domain_length: f64,
    pub points_per_unit: usize,
    pub snapshot_interval: f64,
    /// Record per-cell fire onset times.
    pub fire_record: bool,
    /// Integrate the source terms at all; off gives pure Burgers.
    pub kinetics: bool,
    /// `lambda_r` level that marks the end of the reaction layer.
    pub reaction_end_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            t_end: 6.0,
            domain_length: 9.0,
            points_per_unit: 1600,
            snapshot_interval: 0.01,
            fire_record: true,
            kinetics: true,
            reaction_end_threshold: 0.99,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, constraint| {
            Err(Error::InvalidParameter {
                name,
                value,
                constraint,
            })
        };
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl", self.cfl, "0 < cfl <= 1");
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return bad("t_end", self.t_end, "t_end > 0");
        }
        if !(self.snapshot_interval > 0.0) || !self.snapshot_interval.is_finite() {
            return bad(
                "snapshot_interval",
                self.snapshot_interval,
                "snapshot_interval > 0",
            );
        }
        if !(self.reaction_end_threshold > 0.0 && self.reaction_end_threshold < 1.0) {
            return bad(
                "reaction_end_threshold",
                self.reaction_end_threshold,
                "0 < reaction_end_threshold < 1",
            );
        }
        Grid::new(self.points_per_unit, self.domain_length)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.points_per_unit, self.domain_length)
    }

    /// Number of stored frames: one at `t = 0` and one per elapsed interval.
    pub fn frame_count(&self) -> usize {
        (self.t_end / self.snapshot_interval * (1.0 + 1e-12)).floor() as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub time: f64,
    pub cells: Vec<CellState>,
}

/// Quiescent unshocked medium at `t = 0`.
pub fn initial_state(grid: &Grid) -> FieldState {
    FieldState {
        time: 0.0,
        cells: vec![CellState::QUIESCENT; grid.n_cells],
    }
}

/// Interface flux for the upwind scheme: the pressure of the left state.
///
/// This is the Godunov flux for a convex flux with nonnegative
/// characteristic speeds on both sides.
#[inline]
pub fn hydro_flux(rho_left: f64, _rho_right: f64, lambda_r_upwind: f64, q: f64) -> f64 {
    pressure(rho_left, lambda_r_upwind, q)
}

/// Stored snapshot. Cells past `rho.len()` are quiescent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub time: f64,
    pub rho: Vec<f64>,
    pub lambda_i: Vec<f64>,
    pub lambda_r: Vec<f64>,
}

impl Frame {
    fn capture(state: &FieldState, active_end: usize) -> Self {
        let cells = &state.cells[..active_end];
        Self {
            time: state.time,
            rho: cells.iter().map(|c| c.rho).collect(),
            lambda_i: cells.iter().map(|c| c.lambda_i).collect(),
            lambda_r: cells.iter().map(|c| c.lambda_r).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn cell(&self, j: usize) -> CellState {
        if j < self.rho.len() {
            CellState {
                rho: self.rho[j],
                lambda_i: self.lambda_i[j],
                lambda_r: self.lambda_r[j],
            }
        } else {
            CellState::QUIESCENT
        }
    }
}

/// Everything a completed run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub params: SimParams,
    pub config: SolverConfig,
    pub grid: Grid,
    pub frames: Vec<Frame>,
    /// Time at which each cell's density first reached [`SHOCK_THRESHOLD`].
    pub shock_arrival: Vec<Option<f64>>,
    /// Time at which each cell's induction expired.
    pub fire_onset: Vec<Option<f64>>,
    /// Time at which each cell's `lambda_r` reached the reaction-end threshold.
    pub reaction_end: Vec<Option<f64>>,
    pub final_state: FieldState,
    pub initial_mass: f64,
    /// Time-integrated piston inflow flux.
    pub inflow: f64,
    /// Time-integrated right-boundary outflow flux.
    pub outflow: f64,
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl RunRecord {
    pub fn mass(state: &FieldState, dx: f64) -> f64 {
        state.cells.iter().map(|c| c.rho).sum::<f64>() * dx
    }

    /// `final - initial - (inflow - outflow)` relative to the final mass.
    pub fn mass_defect(&self) -> f64 {
        let final_mass = Self::mass(&self.final_state, self.grid.dx);
        let balance = final_mass - self.initial_mass - (self.inflow - self.outflow);
        balance / final_mass.abs().max(f64::MIN_POSITIVE)
    }
}

/// Closed-form advance of `d lambda_r/dt = K (1 - lambda_r)^nu` over `tau`.
pub fn advance_reaction(lambda_r: f64, k: f64, nu: f64, tau: f64) -> f64 {
    if tau <= 0.0 || lambda_r >= 1.0 {
        return lambda_r;
    }
    let fuel = 1.0 - lambda_r;
    let next = if nu == 1.0 {
        lambda_r - fuel * (-k * tau).exp_m1()
    } else if nu == 0.0 {
        lambda_r + k * tau
    } else if nu < 1.0 {
        let m = 1.0 - nu;
        let base = fuel.powf(m) - m * k * tau;
        if base <= 0.0 {
            1.0
        } else {
            1.0 - base.powf(1.0 / m)
        }
    } else {
        let m = nu - 1.0;
        1.0 - (fuel.powf(-m) + m * k * tau).powf(-1.0 / m)
    };
    next.clamp(lambda_r, 1.0)
}

/// Time for `lambda_r` to climb from `from` to `to` under the same ODE.
pub fn reaction_time_between(from: f64, to: f64, k: f64, nu: f64) -> f64 {
    let (y0, y1) = (1.0 - from, 1.0 - to);
    if nu == 1.0 {
        (y0 / y1).ln() / k
    } else {
        let m = 1.0 - nu;
        (y0.powf(m) - y1.powf(m)) / (m * k)
    }
}

/// Events produced by a kinetic substep of one cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KineticEvents {
    pub fire: Option<f64>,
    pub reaction_end: Option<f64>,
}

/// Integrates both rates for one cell over `[t0, t0 + h]` with density frozen.
pub fn advance_kinetics(
    cell: &mut CellState,
    params: &SimParams,
    t0: f64,
    h: f64,
    reaction_end_threshold: f64,
) -> KineticEvents {
    let mut events = KineticEvents::default();
    let mut start = t0;
    let end = t0 + h;
    if cell.lambda_i > 0.0 {
        let rate = ((cell.rho - 1.0) / params.epsilon()).exp();
        let left = cell.lambda_i - rate * h;
        if left > 0.0 {
            cell.lambda_i = left;
            return events;
        }
        let fire = (t0 + cell.lambda_i / rate).min(end);
        cell.lambda_i = 0.0;
        events.fire = Some(fire);
        start = fire;
    }
    let tau = end - start;
    if tau > 0.0 && cell.lambda_r < 1.0 {
        let before = cell.lambda_r;
        let after = advance_reaction(before, params.k(), params.nu(), tau);
        if before < reaction_end_threshold && after >= reaction_end_threshold {
            let dt = reaction_time_between(before, reaction_end_threshold, params.k(), params.nu());
            events.reaction_end = Some((start + dt).min(end));
        }
        cell.lambda_r = after;
    }
    events
}

/// Time-stepping driver for one run.
pub struct Solver {
    params: SimParams,
    config: SolverConfig,
    grid: Grid,
    state: FieldState,
    /// Kinetics run only in cells the lead shock has passed.
    activated: Vec<bool>,
    activation_time: Vec<f64>,
    shock_arrival: Vec<Option<f64>>,
    fire_onset: Vec<Option<f64>>,
    reaction_end: Vec<Option<f64>>,
    /// Cells at and beyond this index are quiescent and receive no flux.
    active_end: usize,
    guard_start: usize,
    guard_armed: bool,
    flux: Vec<f64>,
    inflow: f64,
    outflow: f64,
    initial_mass: f64,
    steps: usize,
    dt_min: f64,
    dt_max: f64,
}

impl Solver {
    pub fn new(params: SimParams, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        let state = initial_state(&grid);
        Self::from_state(params, config, state)
    }

    /// Starts from an arbitrary state. Cells with `rho >= 0.5` count as
    /// already shocked. The boundary guard is disarmed when the given state
    /// already reaches into the guard zone.
    pub fn from_state(params: SimParams, config: SolverConfig, state: FieldState) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        if state.cells.len() != grid.n_cells {
            return Err(Error::Config(format!(
                "state has {} cells, grid has {}",
                state.cells.len(),
                grid.n_cells
            )));
        }
        let n = grid.n_cells;
        let activated: Vec<bool> = state
            .cells
            .iter()
            .map(|c| c.rho >= SHOCK_THRESHOLD)
            .collect();
        let active_end = state
            .cells
            .iter()
            .zip(&activated)
            .rposition(|(c, &a)| c.rho != 0.0 || c.lambda_r != 0.0 || a)
            .map_or(0, |j| j + 1);
        let guard_start = ((GUARD_FRACTION * n as f64).ceil() as usize).min(n - 1);
        let initial_mass = RunRecord::mass(&state, grid.dx);
        Ok(Self {
            params,
            config,
            grid,
            activation_time: vec![state.time; n],
            state,
            activated,
            shock_arrival: vec![None; n],
            fire_onset: vec![None; n],
            reaction_end: vec![None; n],
            active_end,
            guard_start,
            guard_armed: active_end <= guard_start,
            flux: vec![0.0; n + 1],
            inflow: 0.0,
            outflow: 0.0,
            initial_mass,
            steps: 0,
            dt_min: f64::INFINITY,
            dt_max: 0.0,
        })
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Largest stable step for the current state.
    pub fn stable_dt(&self) -> f64 {
        // the piston ghost holds rho = 1
        let max_rho = self.state.cells[..self.active_end]
            .iter()
            .fold(1.0f64, |m, c| m.max(c.rho));
        self.config.cfl * self.grid.dx / max_rho.max(DT_RHO_FLOOR)
    }

    /// Advances by `dt` (caller guarantees `dt <= stable_dt()`).
    pub fn step_by(&mut self, dt: f64) -> Result<()> {
        let t = self.state.time;
        if !(dt > 1e-14 * t.max(1.0)) || !dt.is_finite() {
            let max_rho = self.state.cells.iter().fold(0.0f64, |m, c| m.max(c.rho));
            return Err(Error::TimeStepUnderflow { t, dt, max_rho });
        }
        let half = 0.5 * dt;
        if self.config.kinetics {
            self.kinetics(t, half);
        }
        self.hydro(t, dt)?;
        if self.config.kinetics {
            self.kinetics(t + half, half);
        }
        self.state.time = t + dt;
        self.steps += 1;
        self.dt_min = self.dt_min.min(dt);
        self.dt_max = self.dt_max.max(dt);
        Ok(())
    }

    /// One CFL-limited step, clipped so as not to pass `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<f64> {
        let stable = self.stable_dt();
        let remaining = t_limit - self.state.time;
        if remaining <= stable * (1.0 + 1e-9) {
            // land exactly on the limit so no sliver step follows
            self.step_by(remaining)?;
            self.state.time = t_limit;
            Ok(remaining)
        } else {
            self.step_by(stable)?;
            Ok(stable)
        }
    }

    fn kinetics(&mut self, t0: f64, h: f64) {
        let threshold = self.config.reaction_end_threshold;
        let record_fire = self.config.fire_record;
        for j in 0..self.active_end {
            if !self.activated[j] {
                continue;
            }
            let start = t0.max(self.activation_time[j]);
            let span = t0 + h - start;
            if span <= 0.0 {
                continue;
            }
            let cell = &mut self.state.cells[j];
            if cell.lambda_r >= 1.0 && cell.lambda_i <= 0.0 {
                continue;
            }
            let events = advance_kinetics(cell, &self.params, start, span, threshold);
            if record_fire {
                if let Some(tf) = events.fire {
                    self.fire_onset[j].get_or_insert(tf);
                }
            }
            if let Some(te) = events.reaction_end {
                self.reaction_end[j].get_or_insert(te);
            }
        }
    }

    fn hydro(&mut self, t: f64, dt: f64) -> Result<()> {
        let n = self.grid.n_cells;
        let q = self.params.q();
        let cells = &mut self.state.cells;
        // interfaces 0..=upto carry flux; beyond, everything is zero
        let upto = (self.active_end + 1).min(n);
        let first = cells[0];
        self.flux[0] = hydro_flux(1.0, first.rho, first.lambda_r, q);
        for i in 1..upto {
            let (l, r) = (cells[i - 1], cells[i]);
            self.flux[i] = hydro_flux(l.rho, r.rho, l.lambda_r, q);
        }
        let right_flux = if upto == n {
            let last = cells[n - 1];
            hydro_flux(last.rho, last.rho, last.lambda_r, q)
        } else {
            0.0
        };
        self.flux[upto] = right_flux;

        let ratio = dt / self.grid.dx;
        for j in 0..upto {
            let old = cells[j].rho;
            let new = old + ratio * (self.flux[j] - self.flux[j + 1]);
            cells[j].rho = new;
            if !self.activated[j] && new >= SHOCK_THRESHOLD {
                let frac = if new > old {
                    ((SHOCK_THRESHOLD - old) / (new - old)).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                let ts = t + frac * dt;
                self.activated[j] = true;
                self.activation_time[j] = ts;
                self.shock_arrival[j] = Some(ts);
            }
        }
        self.inflow += dt * self.flux[0];
        self.outflow += dt * right_flux;

        while self.active_end < n {
            let c = cells[self.active_end];
            if c.rho != 0.0 || c.lambda_r != 0.0 || self.activated[self.active_end] {
                self.active_end += 1;
            } else {
                break;
            }
        }
        if !cells[..upto].iter().all(|c| c.rho.is_finite()) {
            return Err(Error::TimeStepUnderflow {
                t,
                dt,
                max_rho: f64::INFINITY,
            });
        }
        if self.guard_armed && self.active_end > self.guard_start {
            return Err(Error::BoundaryReached {
                x: self.grid.x_center(self.active_end - 1),
                t: t + dt,
                length: self.grid.length(),
            });
        }
        Ok(())
    }

    fn snapshot(&self) -> Frame {
        Frame::capture(&self.state, self.active_end)
    }

    /// Integrates to `t_end`, storing frames at every snapshot time.
    pub fn run(mut self) -> Result<RunRecord> {
        let interval = self.config.snapshot_interval;
        let count = self.config.frame_count();
        let t_end = self.config.t_end;
        let mut frames = Vec::with_capacity(count);
        frames.push(self.snapshot());
        for k in 1..=count {
            let target = if k < count {
                k as f64 * interval
            } else {
                t_end
            };
            if target <= self.state.time {
                continue;
            }
            while self.state.time < target {
                self.step(target)?;
            }
            if k < count {
                frames.push(self.snapshot());
            }
        }
        Ok(RunRecord {
            params: self.params,
            config: self.config,
            grid: self.grid,
            frames,
            shock_arrival: self.shock_arrival,
            fire_onset: self.fire_onset,
            reaction_end: self.reaction_end,
            final_state: self.state,
            initial_mass: self.initial_mass,
            inflow: self.inflow,
            outflow: self.outflow,
            steps: self.steps,
            dt_min: self.dt_min,
            dt_max: self.dt_max,
        })
    }
}

/// Runs the piston problem from the quiescent initial state.
pub fn run(params: &SimParams, config: &SolverConfig) -> Result<RunRecord> {
    Solver::new(*params, *config)?.run()
}
