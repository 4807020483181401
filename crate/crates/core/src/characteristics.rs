//! Characteristic paths traced through the stored frame stack.
//!
//! `C+` paths follow `dx/dt = rho`, along which `dp/dt = r Q / 2`. `C0`
//! paths are particle paths, which are vertical in the Lagrangian frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fronts::{shock_trajectory, Trajectory};
use crate::model::{pressure, reaction_rate, CellState, SimParams};
use crate::solver::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cplus,
    Czero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub x: f64,
    pub rho: f64,
    pub p: f64,
    pub lambda_i: f64,
    pub lambda_r: f64,
    /// Lead-shock position minus `x`; negative ahead of the shock.
    pub shock_gap: f64,
}

/// Samples closer than this many cells behind the lead shock sit in its
/// smeared profile and are left out of the residual.
pub const SHOCK_LAYER_CELLS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached within one cell of the lead shock. Speeds are taken at the
    /// last sample outside the shock's smeared profile.
    LeadShock { path_speed: f64, shock_speed: f64 },
    EndTime,
    DomainEdge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicPath {
    pub family: Family,
    pub seed: (f64, f64),
    pub samples: Vec<PathSample>,
    pub termination: Termination,
    pub cell_width: f64,
}

/// Bilinear interpolation of the frame stack: linear in `x` between cell
/// centres and linear in `t` between frames.
pub struct FieldSampler<'a> {
    record: &'a RunRecord,
    t0: f64,
    t1: f64,
    interval: f64,
}

impl<'a> FieldSampler<'a> {
    pub fn new(record: &'a RunRecord) -> Result<Self> {
        let (first, last) = match (record.frames.first(), record.frames.last()) {
            (Some(a), Some(b)) if record.frames.len() >= 2 => (a, b),
            _ => return Err(Error::InsufficientData("need at least two frames".into())),
        };
        Ok(Self {
            record,
            t0: first.time,
            t1: last.time,
            interval: record.config.snapshot_interval,
        })
    }

    pub fn time_range(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn length(&self) -> f64 {
        self.record.grid.length()
    }

    pub fn contains(&self, x: f64, t: f64) -> bool {
        (self.t0..=self.t1).contains(&t) && (0.0..=self.length()).contains(&x)
    }

    fn at_frame(&self, k: usize, x: f64) -> CellState {
        let f = &self.record.frames[k];
        let dx = self.record.grid.dx;
        let s = (x / dx - 0.5).max(0.0);
        let j = s.floor() as usize;
        let w = s - j as f64;
        let (a, b) = (f.cell(j), f.cell(j + 1));
        let mix = |u: f64, v: f64| u + w * (v - u);
        CellState {
            rho: mix(a.rho, b.rho),
            lambda_i: mix(a.lambda_i, b.lambda_i),
            lambda_r: mix(a.lambda_r, b.lambda_r),
        }
    }

    /// Interpolated state at `(x, t)`, clamped to the stored time range.
    pub fn state(&self, x: f64, t: f64) -> CellState {
        let frames = &self.record.frames;
        let s = ((t - self.t0) / self.interval).max(0.0);
        let k = (s.floor() as usize).min(frames.len() - 2);
        let ta = frames[k].time;
        let tb = frames[k + 1].time;
        let w = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
        let (a, b) = (self.at_frame(k, x), self.at_frame(k + 1, x));
        let mix = |u: f64, v: f64| u + w * (v - u);
        CellState {
            rho: mix(a.rho, b.rho),
            lambda_i: mix(a.lambda_i, b.lambda_i),
            lambda_r: mix(a.lambda_r, b.lambda_r),
        }
    }

    pub fn rho(&self, x: f64, t: f64) -> f64 {
        self.state(x, t).rho
    }

    fn sample(&self, x: f64, t: f64, shock_x: f64) -> PathSample {
        let c = self.state(x, t);
        PathSample {
            t,
            x,
            rho: c.rho,
            p: pressure(c.rho, c.lambda_r, self.record.params.q()),
            lambda_i: c.lambda_i,
            lambda_r: c.lambda_r,
            shock_gap: shock_x - x,
        }
    }
}

/// Path tracer bound to one record.
pub struct Tracer<'a> {
    sampler: FieldSampler<'a>,
    shock: Trajectory,
    dx: f64,
    h: f64,
}

impl<'a> Tracer<'a> {
    pub fn new(record: &'a RunRecord) -> Result<Self> {
        Ok(Self {
            sampler: FieldSampler::new(record)?,
            shock: shock_trajectory(record),
            dx: record.grid.dx,
            h: record.config.snapshot_interval / 4.0,
        })
    }

    pub fn sampler(&self) -> &FieldSampler<'a> {
        &self.sampler
    }

    /// Lead-shock position at `t`; zero before the first arrival.
    fn shock_x(&self, t: f64) -> f64 {
        let pts = self.shock.points();
        match (pts.first(), pts.last()) {
            (Some(a), _) if t < a.1 => 0.0,
            (_, Some(b)) if t > b.1 => b.0,
            _ => self.shock.position_at(t).unwrap_or(0.0),
        }
    }

    fn shock_speed(&self, t: f64) -> f64 {
        let d = 2.0 * self.h;
        (self.shock_x(t + d) - self.shock_x(t - d)) / (2.0 * d)
    }

    fn check_seed(&self, x0: f64, t0: f64) -> Result<()> {
        if self.sampler.contains(x0, t0) && t0 < self.sampler.t1 {
            Ok(())
        } else {
            Err(Error::Region {
                x: x0,
                t: t0,
                reason: "outside the stored domain",
            })
        }
    }

    fn sample(&self, x: f64, t: f64) -> PathSample {
        self.sampler.sample(x, t, self.shock_x(t))
    }

    /// Integrates `dx/dt = rho` from `(x0, t0)` with the explicit midpoint rule.
    ///
    /// A path launched behind the lead shock stops once it comes within one
    /// cell of it; a path launched ahead stops when the shock reaches it.
    /// Otherwise the trace ends with the stored time range or at the right
    /// edge of the domain.
    pub fn trace_cplus(&self, x0: f64, t0: f64) -> Result<CharacteristicPath> {
        self.check_seed(x0, t0)?;
        let (t_end, length) = (self.sampler.t1, self.sampler.length());
        let behind = x0 < self.shock_x(t0) - self.dx;
        let hit = |x: f64, t: f64| {
            let xs = self.shock_x(t);
            if behind {
                x >= xs - self.dx
            } else {
                xs >= x - self.dx
            }
        };
        let mut samples = vec![self.sample(x0, t0)];
        let (mut x, mut t) = (x0, t0);
        let termination = loop {
            if samples.len() > 1 && hit(x, t) {
                // approach speed, taken before the path entered the shock profile
                let layer = SHOCK_LAYER_CELLS * self.dx;
                let last = samples
                    .iter()
                    .rfind(|s| s.shock_gap >= layer)
                    .unwrap_or(&samples[0]);
                break Termination::LeadShock {
                    path_speed: last.rho,
                    shock_speed: self.shock_speed(last.t),
                };
            }
            if t >= t_end {
                break Termination::EndTime;
            }
            let h = self.h.min(t_end - t);
            let xm = x + 0.5 * h * self.sampler.rho(x, t);
            let xn = x + h * self.sampler.rho(xm, t + 0.5 * h);
            t = if h == t_end - t { t_end } else { t + h };
            if xn >= length {
                break Termination::DomainEdge;
            }
            x = xn;
            samples.push(self.sample(x, t));
        };
        Ok(CharacteristicPath {
            family: Family::Cplus,
            seed: (x0, t0),
            samples,
            termination,
            cell_width: self.dx,
        })
    }

    /// Particle path at fixed `x0`, sampled at the tracer step.
    pub fn trace_czero(&self, x0: f64, t0: f64) -> Result<CharacteristicPath> {
        self.check_seed(x0, t0)?;
        let t_end = self.sampler.t1;
        let n = ((t_end - t0) / self.h).ceil() as usize;
        let samples = (0..=n)
            .map(|i| self.sample(x0, (t0 + i as f64 * self.h).min(t_end)))
            .collect();
        Ok(CharacteristicPath {
            family: Family::Czero,
            seed: (x0, t0),
            samples,
            termination: Termination::EndTime,
            cell_width: self.dx,
        })
    }
}

pub fn trace_cplus(record: &RunRecord, seed: (f64, f64)) -> Result<CharacteristicPath> {
    Tracer::new(record)?.trace_cplus(seed.0, seed.1)
}

pub fn trace_czero(record: &RunRecord, seed: (f64, f64)) -> Result<CharacteristicPath> {
    Tracer::new(record)?.trace_czero(seed.0, seed.1)
}

/// Piston seeds `(0, t)` at `t = start, start + spacing, ...` up to `end`.
pub fn piston_seeds(start: f64, end: f64, spacing: f64) -> Vec<(f64, f64)> {
    if !(spacing > 0.0) || end < start {
        return Vec::new();
    }
    let n = ((end - start) / spacing * (1.0 + 1e-12)).floor() as usize;
    (0..=n).map(|i| (0.0, start + i as f64 * spacing)).collect()
}

/// Traces every seed; a failing seed does not affect the others.
pub fn cplus_fan(record: &RunRecord, seeds: &[(f64, f64)]) -> Result<Vec<Result<CharacteristicPath>>> {
    let tracer = Tracer::new(record)?;
    Ok(seeds
        .iter()
        .map(|&(x, t)| tracer.trace_cplus(x, t))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max: f64,
    pub rms: f64,
    /// Mean of the reference source `r Q / 2` over the compared samples.
    pub mean_source: f64,
    pub samples: usize,
}

/// Compares `dp/dt` along a `C+` path with `r Q / 2` from the fields.
///
/// The derivative is a central difference over neighbouring samples.
/// Samples inside the lead shock's smeared profile are skipped. A sample
/// with `lambda_r > 0` counts as past its fire even where time interpolation
/// leaves a trace of `lambda_i`.
pub fn verify_eq6(path: &CharacteristicPath, params: &SimParams) -> Result<Residual> {
    if path.family != Family::Cplus {
        return Err(Error::InsufficientData("residual needs a C+ path".into()));
    }
    let s = &path.samples;
    if s.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "residual needs at least 10 samples, got {}",
            s.len()
        )));
    }
    let layer = SHOCK_LAYER_CELLS * path.cell_width;
    let (mut max, mut sum_sq, mut sum_src) = (0.0f64, 0.0, 0.0);
    let mut n = 0usize;
    for i in 1..s.len() - 1 {
        if s[i - 1..=i + 1]
            .iter()
            .any(|p| p.shock_gap >= 0.0 && p.shock_gap < layer)
        {
            continue;
        }
        n += 1;
        let dpdt = (s[i + 1].p - s[i - 1].p) / (s[i + 1].t - s[i - 1].t);
        let c = s[i];
        let lambda_i = if c.lambda_r > 0.0 { 0.0 } else { c.lambda_i };
        let source = 0.5 * reaction_rate(lambda_i, c.lambda_r, params.k(), params.nu()) * params.q();
        let res = dpdt - source;
        max = max.max(res.abs());
        sum_sq += res * res;
        sum_src += source;
    }
    if n == 0 {
        return Err(Error::InsufficientData(
            "every sample lies in the lead-shock layer".into(),
        ));
    }
    Ok(Residual {
        max,
        rms: (sum_sq / n as f64).sqrt(),
        mean_source: sum_src / n as f64,
        samples: n,
    })
}
