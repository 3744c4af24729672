use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("|w| = {modulus} is outside the series radius {radius}")]
    OutOfRadius { modulus: f64, radius: f64 },
    #[error("series has a vanishing constant term")]
    VanishingConstant,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("point lies on the singular hypersurface 1 - 2 alpha z = 0")]
    OnSingularHypersurface,
    #[error("point is outside the declared domain: {0}")]
    OutOfDomain(String),
    #[error("invalid coefficient data: {0}")]
    InvalidCoeffs(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error("seed rejected: {0}")]
    SeedRejected(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error("metric determinant deviates from 1 by {deviation:e}")]
    NotUnimodular { deviation: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("t = {t} is outside the domain of validity")]
    OutOfValidity { t: f64 },
    #[error("invalid radial parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported parameter combination: {0}")]
    Unsupported(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("iteration did not converge after {iterations} steps (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },
    #[error("seed is not positive at a grid point (min value {min:e})")]
    SeedNotPositive { min: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Union of the module errors, for callers that drive several modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Lab(#[from] LabError),
}
