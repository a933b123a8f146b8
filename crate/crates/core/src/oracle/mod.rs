//! Finite-difference reference solver for the full sixth-order problem,
//! independent of the asymptotic expansions.

pub mod banded;
pub mod diagnostics;
pub mod solver;
pub mod stencil;

pub use banded::{BandedLu, BandedMatrix};
pub use diagnostics::{chemical_potential, continuity_residual, energy, flux, mass, Energy, Scales};
pub use solver::{assemble_operator, solve, Grid, Profile, Snapshot, Solver, SolverConfig, SpatialOperator};
pub use stencil::fornberg_weights;
