//! Finite-difference laboratory on discs and balls: grids, an SOR solver, Picard
//! iteration for the semilinear reductions, the `t`-quadratic reduction on `ℝ × B_R`,
//! and checks of explicit radial solutions.

pub mod appendix;
pub mod donaldson;
pub mod grid;
pub mod picard;
pub mod solver;

pub use appendix::{appendix_residuals, distributional_pairing, AppendixReport, Bump, PairingField};
pub use donaldson::{donaldson_build, donaldson_build_with, donaldson_residual, DonaldsonTriple, HarmonicPart, HarmonicSeed};
pub use grid::{ComplexGrid, GridSpec, Lattice, PointKind, ScalarGrid};
pub use picard::{picard, picard_ma1, PicardBoundary, PicardOptions, PicardSolution};
pub use solver::{elliptic_solve, poisson_solve, SolveOptions, SolveReport};
