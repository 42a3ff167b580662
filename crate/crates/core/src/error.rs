use core::fmt;

/// Errors reported by the decomposition pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its domain (message names the offender).
    InvalidParameter(&'static str),
    /// A sampled series needs at least `min` points for the operation.
    SeriesTooShort { len: usize, min: usize },
    /// Sample times are not uniformly spaced.
    NonUniformSpacing,
    /// A sampling or quadrature step was zero or negative.
    NonpositiveStep,
    /// A model must contain at least one wave.
    EmptyModel,
    /// A scale or shift grid was empty, unsorted, or out of range.
    InvalidGrid(&'static str),
    /// The quadrature window does not cover the wavelet's effective support.
    InsufficientHalfWidth { half_width: f64 },
    /// The scale/shift grids do not bracket the wave parameters under test.
    GridDoesNotBracket,
    /// The series carries no usable structure (e.g. constant).
    DegenerateSeries,
    /// No extremum above the saturation floor was found.
    NoAdmissibleWaves,
    /// A scalogram extremum's implied wave is below the saturation floor.
    WaveTooWeak { y_sat: f64, floor: f64 },
    /// The series has not plateaued, so a tail gap is undefined.
    NotPlateaued,
    /// A curve value left the domain of the operation (e.g. log of 0).
    DomainError(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::SeriesTooShort { len, min } => {
                write!(f, "series too short: {len} samples, need at least {min}")
            }
            Error::NonUniformSpacing => write!(f, "sample times are not uniformly spaced"),
            Error::NonpositiveStep => write!(f, "step must be positive"),
            Error::EmptyModel => write!(f, "model contains no waves"),
            Error::InvalidGrid(what) => write!(f, "invalid grid: {what}"),
            Error::InsufficientHalfWidth { half_width } => write!(
                f,
                "quadrature half-width {half_width} does not cover the wavelet tails"
            ),
            Error::GridDoesNotBracket => {
                write!(f, "grids do not bracket the wave parameters")
            }
            Error::DegenerateSeries => write!(f, "series is degenerate (no admissible waves)"),
            Error::NoAdmissibleWaves => write!(f, "no admissible waves"),
            Error::WaveTooWeak { y_sat, floor } => {
                write!(f, "wave too weak: saturation {y_sat} below floor {floor}")
            }
            Error::NotPlateaued => write!(f, "series has not plateaued"),
            Error::DomainError(what) => write!(f, "domain error: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
