//! Explicit solutions of the complex Monge-Ampère equation `det(∂∂̄u) = 1`:
//! truncated series constructions, Kähler curvature, the radial catalog and
//! finite-difference checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod constructors;
pub mod curvature;
pub mod elliptic;
pub mod error;
pub mod jet;
pub mod potential;
pub mod radial;
pub mod series;
pub mod zpoly;

pub use constructors::{HoloSeed, SystemVariant};
pub use error::{ConstructError, CurvatureError, Error, FieldError, LabError, RadialError, SeriesError};
pub use potential::{HermitianMatrix2, PhiMode, SolutionCoeffs};
pub use radial::{RadialBranch, RadialEval, RadialParams};
pub use series::{BiSeries, Direction};
pub use zpoly::ZPolyField;
