//! Shock-induced ignition in Fickett's reactive Burgers model with two-step
//! (induction, then exothermic reaction) chain-branching kinetics.

pub mod asymptotics;
pub mod characteristics;
pub mod config;
pub mod error;
pub mod fronts;
pub mod model;
pub mod numerics;
pub mod output;
pub mod regime;
pub mod solver;

pub use error::{Error, Result};
pub use model::{cj_speed, induction_rate, pressure, reaction_rate, CellState, SimParams};
pub use solver::{run, FieldState, Frame, Grid, RunRecord, Solver, SolverConfig};
