//! Run configuration document (TOML).
//!
//! Only `K` and `epsilon` are required. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{DEFAULT_ITERATIONS, DEFAULT_NODES, X_MAX_LIMIT};
use crate::error::{Error, Result};
use crate::fronts::DetectorConfig;
use crate::model::{SimParams, DEFAULT_NU};
use crate::solver::SolverConfig;

fn one() -> f64 {
    1.0
}
fn default_nu() -> f64 {
    DEFAULT_NU
}
fn default_cfl() -> f64 {
    0.5
}
fn default_t_end() -> f64 {
    6.0
}
fn default_ppu() -> usize {
    1600
}
fn default_interval() -> f64 {
    0.01
}
fn yes() -> bool {
    true
}
fn default_threshold() -> f64 {
    0.99
}
fn default_theta() -> f64 {
    DetectorConfig::default().theta
}
fn default_out() -> String {
    "out".into()
}
fn default_seed_spacing() -> f64 {
    0.1
}
fn default_x_max() -> f64 {
    X_MAX_LIMIT
}
fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}
fn default_nodes() -> usize {
    DEFAULT_NODES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitFlags {
    /// One file per stored frame.
    #[serde(default)]
    pub snapshots: bool,
    #[serde(default = "yes")]
    pub trajectories: bool,
    /// Characteristic fan and analytic fire locus.
    #[serde(default = "yes")]
    pub diagram: bool,
    #[serde(default)]
    pub svg: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            snapshots: false,
            trajectories: true,
            diagram: true,
            svg: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsConfig {
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        Self {
            x_max: default_x_max(),
            iterations: default_iterations(),
            nodes: default_nodes(),
        }
    }
}

/// Cartesian parameter grid for `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "K")]
    pub k: Vec<f64>,
    pub epsilon: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "K")]
    pub k: f64,
    pub epsilon: f64,
    #[serde(rename = "Q", default = "one")]
    pub q: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Defaults to `2 t_end + 1`, enough for any front in this model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_length: Option<f64>,
    #[serde(default = "default_ppu")]
    pub points_per_unit: usize,
    #[serde(default = "default_interval")]
    pub snapshot_interval: f64,
    #[serde(default = "yes")]
    pub fire_record: bool,
    #[serde(default = "yes")]
    pub kinetics: bool,
    #[serde(default = "default_threshold")]
    pub reaction_end_threshold: f64,
    /// Internal-shock detector threshold.
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_out")]
    pub out_dir: String,
    /// Explicit `C+` seeds as `[x, t]`; piston seeds when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_seed_spacing")]
    pub seed_spacing: f64,
    #[serde(default)]
    pub emit: EmitFlags,
    #[serde(default)]
    pub asymptotics: AsymptoticsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))
}

impl RunConfig {
    pub fn sim_params(&self) -> Result<SimParams> {
        SimParams::new(self.q, self.k, self.epsilon, self.nu)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            cfl: self.cfl,
            t_end: self.t_end,
            domain_length: self.domain_length.unwrap_or(2.0 * self.t_end + 1.0),
            points_per_unit: self.points_per_unit,
            snapshot_interval: self.snapshot_interval,
            fire_record: self.fire_record,
            kinetics: self.kinetics,
            reaction_end_threshold: self.reaction_end_threshold,
        }
    }

    pub fn detector(&self) -> DetectorConfig {
        DetectorConfig {
            theta: self.theta,
            ..DetectorConfig::default()
        }
    }

    /// `C+` seeds: the explicit list, or the piston every `seed_spacing`.
    pub fn seed_points(&self) -> Vec<(f64, f64)> {
        match &self.seeds {
            Some(s) => s.iter().map(|p| (p[0], p[1])).collect(),
            None => crate::characteristics::piston_seeds(
                self.seed_spacing,
                self.t_end - self.seed_spacing,
                self.seed_spacing,
            ),
        }
    }

    /// Parameter grid of the `[sweep]` table, `K` outermost.
    pub fn sweep_grid(&self) -> Result<Vec<SimParams>> {
        let s = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Config("missing [sweep] table".into()))?;
        let mut grid = Vec::with_capacity(s.k.len() * s.epsilon.len());
        for &k in &s.k {
            for &eps in &s.epsilon {
                grid.push(SimParams::new(self.q, k, eps, self.nu)?);
            }
        }
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim_params()?;
        self.solver_config().validate()?;
        if let Some(len) = self.domain_length {
            if !(len > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "domain_length",
                    value: len,
                    constraint: "domain_length > 0",
                });
            }
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: self.theta,
                constraint: "0 < theta < 1",
            });
        }
        if !(self.seed_spacing > 0.0) {
            return Err(Error::InvalidParameter {
                name: "seed_spacing",
                value: self.seed_spacing,
                constraint: "seed_spacing > 0",
            });
        }
        let a = &self.asymptotics;
        if !(a.x_max > 0.0 && a.x_max <= X_MAX_LIMIT) {
            return Err(Error::InvalidParameter {
                name: "asymptotics.x_max",
                value: a.x_max,
                constraint: "0 < x_max <= 0.95",
            });
        }
        if a.iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "asymptotics.iterations",
                value: 0.0,
                constraint: "iterations >= 1",
            });
        }
        if a.nodes < 2 {
            return Err(Error::InvalidParameter {
                name: "asymptotics.nodes",
                value: a.nodes as f64,
                constraint: "nodes >= 2",
            });
        }
        if self.sweep.is_some() {
            self.sweep_grid()?;
        }
        Ok(())
    }
}
