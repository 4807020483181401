//! Ignition-regime classification, parameter sweeps, and comparisons at
//! fixed `chi = K / epsilon`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::closed_form_fire;
use crate::error::{Error, Result};
use crate::fronts::{
    fire_trajectory, front_speed, internal_shock_events, lead_index, shock_trajectory,
    DetectorConfig, InternalShockEvents, MergeEvent, Trajectory,
};
use crate::model::{cj_speed, SimParams};
use crate::numerics::polyfit;
use crate::solver::{run, RunRecord, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmoothAcceleration,
    InternalShockSubCj,
    InternalShockSuperCj,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::SmoothAcceleration => "smooth_acceleration",
            Regime::InternalShockSubCj => "internal_shock_sub_cj",
            Regime::InternalShockSuperCj => "internal_shock_super_cj",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub params: SimParams,
    /// Always `K / epsilon` of `params`.
    pub chi: f64,
    pub regime: Regime,
    pub internal_shock_formation: Option<(f64, f64)>,
    pub merge_event: Option<MergeEvent>,
    /// Merge speed over the CJ speed of the fully reacted wave into `rho = 1`.
    pub speed_ratio_to_cj: Option<f64>,
    pub cj_reference: f64,
    /// Internal-wave speed above the density just ahead of it.
    pub supersonic: Option<bool>,
    /// Variance of the windowed internal-wave speed after formation.
    pub speed_variance: Option<f64>,
    pub fire_origin_acceleration_fit: Option<f64>,
    /// Why the acceleration fit is missing, when it is.
    pub acceleration_fit_note: Option<String>,
}

/// Minimum pre-shock fire samples for the acceleration fit.
pub const MIN_FIT_POINTS: usize = 20;

/// Origin acceleration from fire samples `(x, t)`: cubic least squares of
/// `x` in `tau = t - 1` over the first tenth of the samples, returning twice
/// the quadratic coefficient.
///
/// The cubic term absorbs the curvature change across the window; a plain
/// quadratic on the same window is biased by a few percent. The free
/// constant absorbs the fixed lag of the captured shock behind the exact one.
pub fn acceleration_fit_points(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::WindowTooSmall(format!(
            "{} fire samples before internal-shock formation, need {MIN_FIT_POINTS}",
            points.len()
        )));
    }
    let n = (points.len() as f64 * 0.1).ceil().max(4.0) as usize;
    let (tau, x): (Vec<f64>, Vec<f64>) = points[..n].iter().map(|&(x, t)| (t - 1.0, x)).unzip();
    let c = polyfit(&tau, &x, 3)?;
    Ok(2.0 * c[2])
}

/// Fire samples before internal-shock formation and with `x < 1`.
pub fn pre_shock_fire(record: &RunRecord, events: &InternalShockEvents) -> Trajectory {
    let fire = fire_trajectory(record).x_range(0.0, 1.0 - 1e-12);
    match events.formation {
        Some((_, t)) => fire.before(t),
        None => fire,
    }
}

/// Fitted origin acceleration of the numerical fire locus.
pub fn acceleration_fit(record: &RunRecord) -> Result<f64> {
    let events = internal_shock_events(record, &DetectorConfig::default());
    acceleration_fit_points(pre_shock_fire(record, &events).points())
}

pub fn classify(record: &RunRecord) -> Result<RegimeReport> {
    classify_with(record, &DetectorConfig::default())
}

/// Regime of a completed run.
///
/// The wave speed compared with CJ is the merge speed, or the terminal speed
/// of the internal shock when the run ends before a merge.
pub fn classify_with(record: &RunRecord, detector: &DetectorConfig) -> Result<RegimeReport> {
    let params = record.params;
    let cj_reference = cj_speed(1.0, params.q())?;
    let events = internal_shock_events(record, detector);
    let (fit, note) = match acceleration_fit_points(pre_shock_fire(record, &events).points()) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut report = RegimeReport {
        params,
        chi: params.chi(),
        regime: Regime::SmoothAcceleration,
        internal_shock_formation: events.formation,
        merge_event: events.merge,
        speed_ratio_to_cj: events.merge.map(|m| m.speed / cj_reference),
        cj_reference,
        supersonic: None,
        speed_variance: None,
        fire_origin_acceleration_fit: fit,
        acceleration_fit_note: note,
    };
    if events.formation.is_none() {
        return Ok(report);
    }
    let traj = &events.trajectory;
    let speed = events
        .merge
        .map(|m| m.speed)
        .or_else(|| crate::fronts::terminal_speed(traj, 0.1));
    report.regime = match speed {
        Some(s) if s >= cj_reference => Regime::InternalShockSuperCj,
        _ => Regime::InternalShockSubCj,
    };
    if let (Some(s), Some(&(x, t))) = (speed, traj.points().last()) {
        report.supersonic = density_ahead(record, x, t).map(|rho| s > rho);
    }
    let window = (traj.len() / 4).clamp(2, 21);
    if let Ok(profile) = front_speed(traj, window) {
        let n = profile.len() as f64;
        let mean = profile.iter().map(|p| p.1).sum::<f64>() / n;
        report.speed_variance =
            Some(profile.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / n);
    }
    Ok(report)
}

/// Density a few cells ahead of interface position `x` in the frame at `t`.
fn density_ahead(record: &RunRecord, x: f64, t: f64) -> Option<f64> {
    let f = record.frames.iter().rfind(|f| f.time <= t)?;
    let j = (x / record.grid.dx).round() as usize + 4;
    (j <= lead_index(f)?).then(|| f.rho[j])
}

/// One parameter point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub params: SimParams,
    pub report: std::result::Result<RegimeReport, String>,
}

/// Runs and classifies every parameter set; order follows `grid`.
pub fn sweep(grid: &[SimParams], config: &SolverConfig, detector: &DetectorConfig) -> Vec<SweepEntry> {
    grid.par_iter()
        .map(|p| SweepEntry {
            params: *p,
            report: run(p, config)
                .and_then(|rec| classify_with(&rec, detector))
                .map_err(|e| e.to_string()),
        })
        .collect()
}

/// Per-run outcome inside a fixed-`chi` comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiRun {
    pub k: f64,
    pub epsilon: f64,
    pub regime: Regime,
    pub formation: Option<(f64, f64)>,
    pub merge: Option<MergeEvent>,
    /// Largest relative deviation of the pre-shock fire locus from the
    /// closed form over `x < 0.95`.
    pub fire_closed_form_deviation: Option<f64>,
    #[serde(skip)]
    pub shock: Trajectory,
    #[serde(skip)]
    pub fire: Trajectory,
}

/// Deviations between two runs at the same `chi`, relative to the mean of
/// the two values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDeviation {
    pub a: usize,
    pub b: usize,
    pub formation_x: Option<f64>,
    pub formation_t: Option<f64>,
    pub merge_x: Option<f64>,
    pub merge_t: Option<f64>,
    /// Largest relative gap of the lead-shock arrival times after the later
    /// formation point.
    pub shock_after_formation: Option<f64>,
    /// Largest relative gap of the fire loci over their common pre-shock range.
    pub fire: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiInvarianceReport {
    pub chi: f64,
    pub runs: Vec<ChiRun>,
    pub pairs: Vec<PairDeviation>,
    pub all_smooth: bool,
}

impl ChiInvarianceReport {
    /// Largest pairwise formation deviation in `x` and in `t`.
    pub fn max_formation_deviation(&self) -> Option<(f64, f64)> {
        self.pairs.iter().try_fold((0.0f64, 0.0f64), |(mx, mt), p| {
            Some((mx.max(p.formation_x?), mt.max(p.formation_t?)))
        })
    }
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = 0.5 * (a.abs() + b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn trajectory_gap(a: &Trajectory, b: &Trajectory, x_from: f64) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for &(x, ta) in a.points() {
        if x < x_from {
            continue;
        }
        if let Some(tb) = b.time_at(x) {
            let g = relative_gap(ta, tb);
            worst = Some(worst.map_or(g, |w| w.max(g)));
        }
    }
    worst
}

/// Runs every `(K, epsilon)` pair at the common `chi` and compares them.
pub fn chi_invariance_suite(
    chi: f64,
    pairs: &[(f64, f64)],
    q: f64,
    nu: f64,
    config: &SolverConfig,
    detector: &DetectorConfig,
) -> Result<ChiInvarianceReport> {
    let mut params = Vec::with_capacity(pairs.len());
    for &(k, eps) in pairs {
        let p = SimParams::new(q, k, eps, nu)?;
        if (p.chi() - chi).abs() > 1e-9 * chi.abs().max(1.0) {
            return Err(Error::Config(format!(
                "pair (K = {k}, epsilon = {eps}) has K/epsilon = {}, expected {chi}",
                p.chi()
            )));
        }
        params.push(p);
    }
    let runs = params
        .par_iter()
        .map(|p| -> Result<ChiRun> {
            let rec = run(p, config)?;
            let events = internal_shock_events(&rec, detector);
            let report = classify_with(&rec, detector)?;
            let fire = pre_shock_fire(&rec, &events);
            let fire_dev = fire
                .points()
                .iter()
                .filter(|pt| pt.0 <= crate::asymptotics::X_MAX_LIMIT)
                .map(|&(x, t)| closed_form_fire(x, p.q(), p.zeta()).map(|c| (t - c).abs() / c))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .reduce(f64::max);
            Ok(ChiRun {
                k: p.k(),
                epsilon: p.epsilon(),
                regime: report.regime,
                formation: events.formation,
                merge: events.merge,
                fire_closed_form_deviation: fire_dev,
                shock: shock_trajectory(&rec),
                fire,
            })
        })
        .collect::<Result<Vec<ChiRun>>>()?;
    let mut out = Vec::new();
    for a in 0..runs.len() {
        for b in a + 1..runs.len() {
            let (ra, rb) = (&runs[a], &runs[b]);
            let both = |f: fn(&ChiRun) -> Option<f64>| Some(relative_gap(f(ra)?, f(rb)?));
            let x_from = match (ra.formation, rb.formation) {
                (Some(fa), Some(fb)) => Some(fa.0.max(fb.0)),
                _ => None,
            };
            out.push(PairDeviation {
                a,
                b,
                formation_x: both(|r| r.formation.map(|f| f.0)),
                formation_t: both(|r| r.formation.map(|f| f.1)),
                merge_x: both(|r| r.merge.map(|m| m.x)),
                merge_t: both(|r| r.merge.map(|m| m.t)),
                shock_after_formation: x_from.and_then(|x| trajectory_gap(&ra.shock, &rb.shock, x)),
                fire: trajectory_gap(&ra.fire, &rb.fire, 0.0),
            });
        }
    }
    let all_smooth = runs.iter().all(|r| r.regime == Regime::SmoothAcceleration);
    Ok(ChiInvarianceReport {
        chi,
        runs,
        pairs: out,
        all_smooth,
    })
}
