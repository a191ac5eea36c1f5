use thiserror::Error;

/// Errors raised by the simulation and analysis operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpdcError {
    #[error("field has no nonzero samples")]
    ZeroField,
    #[error("axis mismatch: {0}")]
    AxisMismatch(String),
    #[error("evanescent mode: |q| = {q:e} >= k = {k:e}")]
    EvanescentMode { q: f64, k: f64 },
    #[error("grid too coarse: phase advance {advance:.4} rad per step along {along} exceeds pi/4")]
    GridTooCoarse { along: String, advance: f64 },
    #[error("wavelength {wavelength_um} um outside validity range [{min_um}, {max_um}] um")]
    OutOfValidityRange {
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },
    #[error("wavelength {wavelength_um} um too close to Sellmeier pole C = {pole_um2} um^2")]
    PoleProximity { wavelength_um: f64, pole_um2: f64 },
    #[error("amplitude cannot be split into photon 1 and photon 2 parts: {0}")]
    NotTwoPartite(String),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(String),
}

impl SpdcError {
    /// Stable machine-readable code used by the CLI error line.
    pub fn code(&self) -> &'static str {
        match self {
            SpdcError::ZeroField => "ZERO_FIELD",
            SpdcError::AxisMismatch(_) => "AXIS_MISMATCH",
            SpdcError::EvanescentMode { .. } => "EVANESCENT_MODE",
            SpdcError::GridTooCoarse { .. } => "GRID_TOO_COARSE",
            SpdcError::OutOfValidityRange { .. } => "OUT_OF_VALIDITY_RANGE",
            SpdcError::PoleProximity { .. } => "POLE_PROXIMITY",
            SpdcError::NotTwoPartite(_) => "NOT_TWO_PARTITE",
            SpdcError::ModeMismatch(_) => "MODE_MISMATCH",
            SpdcError::InvalidInput(_) => "INVALID_INPUT",
            SpdcError::Parse { .. } => "PARSE_ERROR",
            SpdcError::Validation(_) => "VALIDATION_ERROR",
            SpdcError::Io(_) => "IO_ERROR",
        }
    }
}

impl From<std::io::Error> for SpdcError {
    fn from(e: std::io::Error) -> Self {
        SpdcError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SpdcError>;
