//! Early-time high-activation-energy solution.
//!
//! To leading order the shocked medium is the inert state `rho = 1` and
//! every particle fires at `t1*(x) = 1 + 2x`. At the next order the density
//! perturbation `rho2` is zero in the undisturbed region S, is carried along
//! `C+` lines from the fire locus into the disturbed induction region D, and
//! grows with the local reaction time in the reaction region R. Expiry of
//! induction, `int exp(rho2) dt = x` over region D, then gives an implicit
//! equation for the fire locus that is solved by fixed-point iteration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fronts::Trajectory;
use crate::model::SimParams;
use crate::numerics::integrate;

/// Hard upper limit of the sampled range; region S closes at `x = 1`.
pub const X_MAX_LIMIT: f64 = 0.95;
pub const DEFAULT_NODES: usize = 1024;
pub const DEFAULT_ITERATIONS: usize = 4;

const QUAD_TOL: f64 = 1e-11;
const ROOT_TOL: f64 = 1e-10;
const XREF_TOL: f64 = 1e-12;

/// Closed-form fire locus `1 + x + ln(1 + Q zeta x) / (Q zeta)`.
///
/// Valid while the lead shock is still `t = 2x`, i.e. `x < 1`. Small
/// `Q zeta x` uses the series of the log so the inert limit `1 + 2x` is
/// exact.
pub fn closed_form_fire(x: f64, q: f64, zeta: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            constraint: "x >= 0",
        });
    }
    let a = q * zeta;
    let u = a * x;
    let log_term = if u < 1e-8 {
        x * (1.0 - u / 2.0 + u * u / 3.0)
    } else {
        u.ln_1p() / a
    };
    Ok(1.0 + x + log_term)
}

/// Initial acceleration of the fire, `Q zeta / 8`.
pub fn origin_acceleration(params: &SimParams) -> f64 {
    params.q() * params.zeta() / 8.0
}

/// Monotone piecewise-linear fire map on uniform nodes over `[0, x_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FireMap {
    x_max: f64,
    values: Vec<f64>,
}

impl FireMap {
    pub fn from_fn(x_max: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..nodes).map(|i| f(node(x_max, nodes, i))).collect();
        Self { x_max, values }
    }

    pub fn from_values(x_max: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !(x_max > 0.0) {
            return Err(Error::InsufficientData("fire map needs two nodes".into()));
        }
        Ok(Self { x_max, values })
    }

    /// Leading-order map `1 + 2x`.
    pub fn inert(x_max: f64, nodes: usize) -> Self {
        Self::from_fn(x_max, nodes, |x| 1.0 + 2.0 * x)
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn nodes(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x_at(&self, i: usize) -> f64 {
        node(self.x_max, self.values.len(), i)
    }

    /// Linear interpolation, extended linearly past either end.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        let s = x / self.x_max * last as f64;
        let i = (s.floor().max(0.0) as usize).min(last - 1);
        let w = s - i as f64;
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }

    /// Largest nodal difference from another map on the same nodes.
    pub fn max_difference(&self, other: &FireMap) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

fn node(x_max: f64, nodes: usize, i: usize) -> f64 {
    if i + 1 == nodes {
        x_max
    } else {
        x_max * i as f64 / (nodes - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Shocked, not yet reached by any disturbance from the fire.
    Undisturbed,
    /// Still inducting, but crossed by `C+` lines from the fire locus.
    Disturbed,
    /// Past the fire.
    Reaction,
}

/// Region of `(x, t)` in the early-time diagram for the given fire map.
pub fn classify_point(x: f64, t: f64, fire_map: &FireMap) -> Result<Region> {
    if !(x >= 0.0) || t < 2.0 * x {
        return Err(Error::Region {
            x,
            t,
            reason: "ahead of the lead shock",
        });
    }
    let fire = fire_map.eval(x);
    Ok(if t >= fire {
        Region::Reaction
    } else if t <= 1.0 + x {
        Region::Undisturbed
    } else {
        Region::Disturbed
    })
}

/// Root of `x - s - t + F(s) = 0` on `[0, x]`: the fire-locus point whose
/// `C+` line (unit speed at this order) passes through `(x, t)`.
pub fn solve_xref(x: f64, t: f64, fire_map: &FireMap) -> Result<f64> {
    let g = |s: f64| x - s - t + fire_map.eval(s);
    let (g0, gx) = (g(0.0), g(x));
    // endpoint roots, allowing for rounding in t = 1 + x and t = F(x)
    if g0.abs() < XREF_TOL {
        return Ok(0.0);
    }
    if gx.abs() < XREF_TOL {
        return Ok(x);
    }
    if g0 > 0.0 || gx < 0.0 {
        return Err(Error::Region {
            x,
            t,
            reason: "outside the disturbed induction region",
        });
    }
    let (mut lo, mut hi) = (0.0, x);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() < XREF_TOL || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First-order density perturbation `rho2(x, t)`.
pub fn rho2_field(x: f64, t: f64, fire_map: &FireMap, params: &SimParams) -> Result<f64> {
    let amp = 0.5 * params.zeta() * params.q();
    Ok(match classify_point(x, t, fire_map)? {
        Region::Undisturbed => 0.0,
        Region::Disturbed => amp * (fire_map.eval(solve_xref(x, t, fire_map)?) - 1.0),
        Region::Reaction => amp * (fire_map.eval(x) - 1.0),
    })
}

/// First-order reaction progress: `zeta (t - t*(x))` past the fire, else 0.
pub fn lambda_r2(x: f64, t: f64, fire_map: &FireMap, params: &SimParams) -> Result<f64> {
    Ok(match classify_point(x, t, fire_map)? {
        Region::Reaction => params.zeta() * (t - fire_map.eval(x)),
        _ => 0.0,
    })
}

/// Leading-order fire map and its refinements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFire {
    pub params: SimParams,
    pub t1_star: FireMap,
    /// `iterates[k - 1]` is iterate `k`.
    pub iterates: Vec<FireMap>,
    pub a0: f64,
}

impl AsymptoticFire {
    /// Iterate `k`, with iterate 0 the leading-order map.
    pub fn iterate(&self, k: usize) -> Option<&FireMap> {
        if k == 0 {
            Some(&self.t1_star)
        } else {
            self.iterates.get(k - 1)
        }
    }

    pub fn last(&self) -> &FireMap {
        self.iterates.last().unwrap_or(&self.t1_star)
    }

    /// Largest nodal change between iterates `a` and `b`.
    pub fn cauchy_gap(&self, a: usize, b: usize) -> Option<f64> {
        Some(self.iterate(a)?.max_difference(self.iterate(b)?))
    }
}

/// Solves the induction-expiry condition for one `x`, with `rho2` taken from
/// the previous map.
fn refine_point(x: f64, prev: &FireMap, params: &SimParams) -> Result<f64> {
    let lo0 = 1.0 + x;
    let hi0 = prev.eval(x);
    if x == 0.0 || hi0 <= lo0 {
        return Ok(lo0);
    }
    let amp = 0.5 * params.zeta() * params.q();
    // a point outside region D surfaces as a non-finite quadrature error
    let integrand = |t: f64| match solve_xref(x, t, prev) {
        Ok(s) => (amp * (prev.eval(s) - 1.0)).exp(),
        Err(_) => f64::NAN,
    };
    // bisection on the upper bound, integrating only the newly covered piece
    let (mut lo, mut hi) = (lo0, hi0);
    let mut area_lo = 0.0;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let piece = integrate(integrand, lo, mid, QUAD_TOL)?;
        let area_mid = area_lo + piece;
        if area_mid < x {
            lo = mid;
            area_lo = area_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fixed-point iteration of the fire locus on `nodes` points of `[0, x_max]`.
pub fn iterate_fire_with(
    params: &SimParams,
    x_max: f64,
    n_iter: usize,
    nodes: usize,
) -> Result<AsymptoticFire> {
    if !(x_max > 0.0 && x_max <= X_MAX_LIMIT) {
        return Err(Error::InvalidParameter {
            name: "x_max",
            value: x_max,
            constraint: "0 < x_max <= 0.95",
        });
    }
    if n_iter == 0 {
        return Err(Error::Config("n_iter must be at least 1".into()));
    }
    if nodes < 2 {
        return Err(Error::Config("fire map needs at least 2 nodes".into()));
    }
    let t1_star = FireMap::inert(x_max, nodes);
    let mut iterates: Vec<FireMap> = Vec::with_capacity(n_iter);
    for _ in 0..n_iter {
        let prev = iterates.last().unwrap_or(&t1_star);
        let values = (0..nodes)
            .into_par_iter()
            .map(|i| {
                let x = prev.x_at(i);
                refine_point(x, prev, params).map_err(|e| Error::FireSolve {
                    x,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        iterates.push(FireMap::from_values(x_max, values)?);
    }
    Ok(AsymptoticFire {
        params: *params,
        t1_star,
        iterates,
        a0: origin_acceleration(params),
    })
}

/// [`iterate_fire_with`] on the default 1024 nodes.
pub fn iterate_fire(params: &SimParams, x_max: f64, n_iter: usize) -> Result<AsymptoticFire> {
    iterate_fire_with(params, x_max, n_iter, DEFAULT_NODES)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationPoint {
    pub x: f64,
    pub t_numeric: f64,
    pub t_closed_form: f64,
    pub rel_closed_form: f64,
    pub t_iterate: Option<f64>,
    pub rel_iterate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub points: Vec<DeviationPoint>,
    pub max_rel_closed_form: f64,
    pub max_rel_iterate: Option<f64>,
}

/// Relative deviation of a numerical fire locus from the closed form and,
/// optionally, from an iterated map, over `x_lo <= x <= x_hi`.
///
/// The caller restricts `fire` to the phase before any internal shock.
pub fn compare_to_numerics(
    fire: &Trajectory,
    params: &SimParams,
    iterate: Option<&FireMap>,
    x_lo: f64,
    x_hi: f64,
) -> Result<DeviationReport> {
    let mut points = Vec::new();
    for &(x, t) in fire.points() {
        if x < x_lo || x > x_hi {
            continue;
        }
        let tc = closed_form_fire(x, params.q(), params.zeta())?;
        let ti = iterate.filter(|m| x <= m.x_max()).map(|m| m.eval(x));
        points.push(DeviationPoint {
            x,
            t_numeric: t,
            t_closed_form: tc,
            rel_closed_form: (t - tc).abs() / tc,
            t_iterate: ti,
            rel_iterate: ti.map(|ti| (t - ti).abs() / ti),
        });
    }
    if points.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no fire samples in [{x_lo}, {x_hi}]"
        )));
    }
    let max_rel_closed_form = points.iter().fold(0.0f64, |m, p| m.max(p.rel_closed_form));
    let max_rel_iterate = points
        .iter()
        .filter_map(|p| p.rel_iterate)
        .reduce(f64::max);
    Ok(DeviationReport {
        points,
        max_rel_closed_form,
        max_rel_iterate,
    })
}

/// Fire times from the closed form sampled at `x` values, as `(x, t)`.
pub fn closed_form_samples(xs: &[f64], q: f64, zeta: f64) -> Result<Vec<(f64, f64)>> {
    xs.iter()
        .map(|&x| closed_form_fire(x, q, zeta).map(|t| (x, t)))
        .collect()
}
