//! Front extraction from a completed run: lead shock, fire, end of the
//! reaction layer, and internal shocks inside the induction zone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linear_fit;
use crate::solver::{Frame, RunRecord, SHOCK_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontKind {
    Shock,
    Fire,
    ReactionEnd,
    InternalShock,
}

impl FrontKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FrontKind::Shock => "shock",
            FrontKind::Fire => "fire",
            FrontKind::ReactionEnd => "reaction_end",
            FrontKind::InternalShock => "internal_shock",
        }
    }
}

/// A forward-moving front sampled as `(x, t)` pairs with both coordinates
/// strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    kind: FrontKind,
    points: Vec<(f64, f64)>,
}

impl Trajectory {
    /// Validating constructor.
    pub fn new(kind: FrontKind, points: Vec<(f64, f64)>) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(Error::InsufficientData(format!(
                    "{} trajectory not strictly increasing at x = {}",
                    kind.as_str(),
                    w[1].0
                )));
            }
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::InsufficientData(format!(
                "{} trajectory has non-finite samples",
                kind.as_str()
            )));
        }
        Ok(Self { kind, points })
    }

    /// Keeps the strictly increasing envelope of samples ordered by `x`.
    ///
    /// Samples whose time does not exceed the last kept time are dropped;
    /// on a first-order grid neighbouring cells occasionally tie.
    pub fn from_samples(kind: FrontKind, samples: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut points: Vec<(f64, f64)> = Vec::new();
        for (x, t) in samples {
            if !x.is_finite() || !t.is_finite() {
                continue;
            }
            match points.last() {
                Some(&(px, pt)) if x <= px || t <= pt => continue,
                _ => points.push((x, t)),
            }
        }
        Self { kind, points }
    }

    pub fn kind(&self) -> FrontKind {
        self.kind
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn ts(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// Linear interpolation of `t(x)`; `None` outside the sampled range.
    pub fn time_at(&self, x: f64) -> Option<f64> {
        interpolate(&self.points, x, |p| p.0, |p| p.1)
    }

    /// Linear interpolation of `x(t)`; `None` outside the sampled range.
    pub fn position_at(&self, t: f64) -> Option<f64> {
        interpolate(&self.points, t, |p| p.1, |p| p.0)
    }

    /// Points with `t < t_limit`.
    pub fn before(&self, t_limit: f64) -> Trajectory {
        Self {
            kind: self.kind,
            points: self.points.iter().copied().filter(|p| p.1 < t_limit).collect(),
        }
    }

    /// Points with `lo <= x <= hi`.
    pub fn x_range(&self, lo: f64, hi: f64) -> Trajectory {
        Self {
            kind: self.kind,
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| p.0 >= lo && p.0 <= hi)
                .collect(),
        }
    }
}

fn interpolate(
    pts: &[(f64, f64)],
    key: f64,
    k: impl Fn(&(f64, f64)) -> f64,
    v: impl Fn(&(f64, f64)) -> f64,
) -> Option<f64> {
    let first = pts.first()?;
    let last = pts.last()?;
    if key < k(first) || key > k(last) {
        return None;
    }
    let i = pts.partition_point(|p| k(p) < key);
    if i == 0 {
        return Some(v(first));
    }
    let (a, b) = (&pts[i - 1], &pts[i]);
    let w = (key - k(a)) / (k(b) - k(a));
    Some(v(a) + w * (v(b) - v(a)))
}

fn from_cell_times(record: &RunRecord, kind: FrontKind, times: &[Option<f64>]) -> Trajectory {
    let g = record.grid;
    Trajectory::from_samples(
        kind,
        times
            .iter()
            .enumerate()
            .filter_map(|(j, t)| t.map(|t| (g.x_center(j), t))),
    )
}

/// Lead shock `t_s(x)`: the first time each cell's density reached
/// [`SHOCK_THRESHOLD`], as recorded during the run.
pub fn shock_trajectory(record: &RunRecord) -> Trajectory {
    from_cell_times(record, FrontKind::Shock, &record.shock_arrival)
}

/// Lead shock located in each frame at the steepest density drop.
///
/// Cross-check for [`shock_trajectory`]; returns `(x, t)` per frame with a
/// shocked region. The position is the interface between the two cells.
pub fn shock_positions_max_gradient(record: &RunRecord) -> Vec<(f64, f64)> {
    let dx = record.grid.dx;
    record
        .frames
        .iter()
        .filter_map(|f| {
            let lead = lead_index(f)?;
            // the lead shock is the drop onto quiescent material
            let lo = lead.saturating_sub(64);
            let hi = (lead + 2).min(f.len());
            let mut best = (0.0, lead);
            for j in lo..hi {
                let next = if j + 1 < f.len() { f.rho[j + 1] } else { 0.0 };
                let drop = f.rho[j] - next;
                if drop > best.0 {
                    best = (drop, j);
                }
            }
            Some(((best.1 + 1) as f64 * dx, f.time))
        })
        .collect()
}

/// Fire locus `t*(x)` from the exact per-cell induction expiry times.
pub fn fire_trajectory(record: &RunRecord) -> Trajectory {
    from_cell_times(record, FrontKind::Fire, &record.fire_onset)
}

/// End-of-reaction locus: first time `lambda_r` reaches `threshold`.
///
/// Uses the exact in-run times when `threshold` matches the run's
/// configured level, otherwise interpolates linearly between frames.
pub fn reaction_end_trajectory(record: &RunRecord, threshold: f64) -> Trajectory {
    if threshold == record.config.reaction_end_threshold {
        return from_cell_times(record, FrontKind::ReactionEnd, &record.reaction_end);
    }
    let n = record.grid.n_cells;
    let mut times: Vec<Option<f64>> = vec![None; n];
    let mut prev: Option<&Frame> = None;
    for f in &record.frames {
        for (j, slot) in times.iter_mut().enumerate().take(f.len()) {
            if slot.is_some() || f.lambda_r[j] < threshold {
                continue;
            }
            *slot = Some(match prev {
                Some(p) => {
                    let before = p.cell(j).lambda_r;
                    let w = ((threshold - before) / (f.lambda_r[j] - before)).clamp(0.0, 1.0);
                    p.time + w * (f.time - p.time)
                }
                None => f.time,
            });
        }
        prev = Some(f);
    }
    from_cell_times(record, FrontKind::ReactionEnd, &times)
}

/// Index of the last shocked cell in a frame.
pub fn lead_index(frame: &Frame) -> Option<usize> {
    frame.rho.iter().rposition(|&r| r >= SHOCK_THRESHOLD)
}

/// Internal-shock detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// A jump `|rho[j+1] - rho[j]| > theta * max rho` flags a discontinuity.
    pub theta: f64,
    /// Cells behind the lead shock that belong to its smeared profile.
    pub lead_exclusion_cells: usize,
    /// A lost detection this close to the lead shock counts as a merge.
    pub merge_distance: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            theta: 0.02,
            lead_exclusion_cells: 8,
            merge_distance: 0.05,
        }
    }
}

/// Internal shock catching up with the lead shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeEvent {
    pub x: f64,
    pub t: f64,
    /// Internal-wave speed over the final tenth of its pre-merge path.
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternalShockEvents {
    /// First detection, `(x, t)`.
    pub formation: Option<(f64, f64)>,
    pub trajectory: Trajectory,
    pub merge: Option<MergeEvent>,
}

impl InternalShockEvents {
    pub fn is_empty(&self) -> bool {
        self.formation.is_none()
    }
}

/// Strongest interior jump of a frame above the detector threshold.
///
/// Only interfaces strictly between the piston cell and the lead-shock
/// profile are examined. Returns the interface position and the jump.
pub fn detect_internal_jump(frame: &Frame, dx: f64, cfg: &DetectorConfig) -> Option<(f64, f64)> {
    let lead = lead_index(frame)?;
    let max_rho = frame.rho[..=lead].iter().fold(0.0f64, |m, &r| m.max(r));
    if max_rho <= 0.0 {
        return None;
    }
    let stop = lead.checked_sub(cfg.lead_exclusion_cells)?;
    let limit = cfg.theta * max_rho;
    let mut best: Option<(usize, f64)> = None;
    for j in 1..stop {
        let jump = (frame.rho[j + 1] - frame.rho[j]).abs();
        if jump > limit && best.map_or(true, |b| jump > b.1) {
            best = Some((j, jump));
        }
    }
    best.map(|(j, jump)| ((j + 1) as f64 * dx, jump))
}

/// Scans the frames for a discontinuity forming between piston and lead shock.
///
/// Detections from the first one onward make up the trajectory. Losing the
/// detection while the last one sat within `merge_distance` of the lead shock
/// ends the scan as a merge; losses further back are treated as flicker.
pub fn internal_shock_events(record: &RunRecord, cfg: &DetectorConfig) -> InternalShockEvents {
    let g = record.grid;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut last_gap = f64::INFINITY;
    let mut merged = false;
    for f in &record.frames {
        match detect_internal_jump(f, g.dx, cfg) {
            Some((x, _)) => {
                samples.push((x, f.time));
                last_gap = lead_index(f).map_or(f64::INFINITY, |j| g.x_center(j) - x);
            }
            None if !samples.is_empty() && last_gap <= cfg.merge_distance => {
                merged = true;
                break;
            }
            None => {}
        }
    }
    let formation = samples.first().copied();
    let trajectory = Trajectory::from_samples(FrontKind::InternalShock, samples);
    let merge = if merged {
        trajectory.points().last().and_then(|&(x, t)| {
            terminal_speed(&trajectory, 0.1).map(|speed| MergeEvent { x, t, speed })
        })
    } else {
        None
    };
    InternalShockEvents {
        formation,
        trajectory,
        merge,
    }
}

/// Least-squares `dx/dt` over the final `fraction` of a trajectory's
/// duration, using at least three points.
pub fn terminal_speed(traj: &Trajectory, fraction: f64) -> Option<f64> {
    let pts = traj.points();
    if pts.len() < 3 {
        return None;
    }
    let (t0, t1) = (pts[0].1, pts[pts.len() - 1].1);
    let from = t1 - fraction * (t1 - t0);
    let mut start = pts.partition_point(|p| p.1 < from);
    start = start.min(pts.len() - 3);
    let (x, t): (Vec<f64>, Vec<f64>) = pts[start..].iter().copied().unzip();
    linear_fit(&t, &x).ok().map(|(_, slope)| slope)
}

/// Sampled speed profile `(t, dx/dt)` of a trajectory.
///
/// Each sample is the least-squares slope of `x(t)` over `window`
/// neighbouring points, centred where possible and one-sided at the ends.
pub fn front_speed(traj: &Trajectory, window: usize) -> Result<Vec<(f64, f64)>> {
    let pts = traj.points();
    if window < 2 || pts.len() < window + 1 {
        return Err(Error::InsufficientData(format!(
            "front_speed needs at least {} points, got {}",
            window.max(2) + 1,
            pts.len()
        )));
    }
    let half = window / 2;
    let mut out = Vec::with_capacity(pts.len());
    let (xs, ts): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    for i in 0..pts.len() {
        let start = i.saturating_sub(half).min(pts.len() - window);
        let end = start + window;
        let (_, slope) = linear_fit(&ts[start..end], &xs[start..end])?;
        out.push((ts[i], slope));
    }
    Ok(out)
}
