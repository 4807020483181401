//! Model algebra: equation of state, two-step kinetic rates, and the
//! nondimensional parameter set.
//!
//! Everything here is a pure function of its arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_NU: f64 = 0.0;

/// Nondimensional model constants.
///
/// `zeta` and `chi` are the same number, `K / epsilon`; it is computed once
/// at construction and exposed under both names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    q: f64,
    k: f64,
    epsilon: f64,
    nu: f64,
    ratio: f64,
}

impl SimParams {
    pub fn new(q: f64, k: f64, epsilon: f64, nu: f64) -> Result<Self> {
        check("Q", q, q >= 0.0, "Q >= 0")?;
        check("K", k, k > 0.0, "K > 0")?;
        check("epsilon", epsilon, epsilon > 0.0, "epsilon > 0")?;
        check("nu", nu, nu >= 0.0, "nu >= 0")?;
        Ok(Self {
            q,
            k,
            epsilon,
            nu,
            ratio: k / epsilon,
        })
    }

    /// Defaults used throughout: `Q = 1`, `nu = 0` (constant-rate heat release).
    pub fn with_rates(k: f64, epsilon: f64) -> Result<Self> {
        Self::new(1.0, k, epsilon, DEFAULT_NU)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Rescaled heat-release rate used by the high-activation-energy analysis.
    pub fn zeta(&self) -> f64 {
        self.ratio
    }

    /// Induction-time sensitivity times induction-to-reaction time ratio.
    pub fn chi(&self) -> f64 {
        self.ratio
    }
}

fn check(name: &'static str, value: f64, ok: bool, constraint: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint,
        })
    }
}

/// Density and progress variables of one material cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellState {
    pub rho: f64,
    pub lambda_i: f64,
    pub lambda_r: f64,
}

impl CellState {
    /// Quiescent unshocked material.
    pub const QUIESCENT: CellState = CellState {
        rho: 0.0,
        lambda_i: 1.0,
        lambda_r: 0.0,
    };

    pub fn pressure(&self, q: f64) -> f64 {
        pressure(self.rho, self.lambda_r, q)
    }

    pub fn satisfies_invariants(&self) -> bool {
        (0.0..=1.0).contains(&self.lambda_r)
            && (0.0..=1.0).contains(&self.lambda_i)
            && (self.lambda_r == 0.0 || self.lambda_i == 0.0)
    }
}

/// Equation of state, `p = (rho^2 + lambda_r Q) / 2`.
#[inline]
pub fn pressure(rho: f64, lambda_r: f64, q: f64) -> f64 {
    0.5 * (rho * rho + lambda_r * q)
}

/// Heaviside step with `H(0) = 0`.
#[inline]
fn heaviside(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Induction rate `d lambda_i / dt`; zero once induction has expired.
#[inline]
pub fn induction_rate(rho: f64, lambda_i: f64, epsilon: f64) -> f64 {
    if heaviside(lambda_i) > 0.0 {
        -((rho - 1.0) / epsilon).exp()
    } else {
        0.0
    }
}

/// Exothermic rate `r = K (1 - H(lambda_i)) (1 - lambda_r)^nu`.
#[inline]
pub fn reaction_rate(lambda_i: f64, lambda_r: f64, k: f64, nu: f64) -> f64 {
    if heaviside(lambda_i) > 0.0 {
        return 0.0;
    }
    let fuel = (1.0 - lambda_r).max(0.0);
    if fuel == 0.0 {
        0.0
    } else {
        k * fuel.powf(nu)
    }
}

/// Chapman-Jouguet speed of a fully reacting wave running into `(rho0, lambda_r = 0)`.
///
/// Found by bisection on the jump excess `s(rho1) - rho1`, where
/// `s = [p]/[rho]` is the jump speed to the burnt state `rho1`. The excess is
/// positive for weak burnt states and negative for strong ones; its zero is
/// the sonic (tangency) point.
pub fn cj_speed(rho0: f64, q: f64) -> Result<f64> {
    if !(rho0 >= 0.0) || !rho0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rho0",
            value: rho0,
            constraint: "rho0 >= 0",
        });
    }
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter {
            name: "Q",
            value: q,
            constraint: "Q >= 0",
        });
    }
    if q == 0.0 {
        // inert limit: the jump degenerates to a sound wave
        return Ok(rho0);
    }
    let p0 = pressure(rho0, 0.0, q);
    // excess(jump) = [p]/[rho] - rho1 written in terms of jump = rho1 - rho0
    let excess = |jump: f64| {
        let rho1 = rho0 + jump;
        (pressure(rho1, 1.0, q) - p0) / jump - rho1
    };
    let mut hi = 1.0;
    while excess(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NotBracketed("cj_speed upper bound"));
        }
    }
    let mut lo = hi;
    while excess(lo) <= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NotBracketed("cj_speed lower bound"));
        }
    }
    let jump = crate::numerics::bisect(excess, lo, hi, 0.0, 200)?;
    let rho1 = rho0 + jump;
    Ok((pressure(rho1, 1.0, q) - p0) / jump)
}
