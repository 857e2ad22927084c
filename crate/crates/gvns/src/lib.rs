//! Pseudo-spectral simulator of the Vlasov-Navier-Stokes system on the
//! torus with a Gevrey-regularity diagnostics stack: weighted Sobolev and
//! Gevrey norms, the regularity-radius ODE lambda(t) and its closed form,
//! empirical radius estimation from spectral decay, an inequality lab for
//! the supporting functional inequalities, and a bounds verifier that fits
//! the implied constants of the a-priori estimates along computed
//! trajectories.
//!
//! The library surface is organized by capability; see the crate examples
//! for one runnable program per capability and `src/bin/gvns.rs` for the
//! `run` / `verify` / `lab` / `report` command-line entry points.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod lab;
pub mod norms;
pub mod radius;
pub mod report;
pub mod run;
pub mod snapshot;
pub mod solver;
pub mod transform;
pub mod verify;

pub use config::{parse_config, InitialCondition, RunConfig};
pub use diagnostics::{DiagnosticsRow, DiagnosticsSeries};
pub use error::{GvnsError, Result};
pub use field::{DistPhysical, DistSpectral, FluidSpectral, MomentFields};
pub use grid::PhaseGrid;
pub use norms::{EnergyRecord, GevreyParams};
pub use solver::{SimState, SolverOptions, Stepper};
pub use transform::SpectralWorkspace;
