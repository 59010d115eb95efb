use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not defined: {0}")]
    NotDefined(String),
    #[error("insufficient horizon: need at least {need}, got {got}")]
    InsufficientHorizon { need: usize, got: usize },
    #[error("invalid schedule: {0}")]
    ScheduleInvalid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("grid too coarse: m = {0}, need m >= 3")]
    TooCoarse(usize),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("twist is trivial at level {0}")]
    TorsionLevel(String),
    #[error("not a cocycle: residual {0:e}")]
    NotACocycle(f64),
    #[error("torsion input: {0}")]
    TorsionInput(String),
    #[error("no levels found: {0}")]
    NoLevelsFound(String),
    #[error("insufficient levels: need {need}, got {got}")]
    InsufficientLevels { need: usize, got: usize },
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
