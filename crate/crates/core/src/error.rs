use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported matrix shape {rows}x{cols} (dimensions must be 2, 4, 8 or 16)")]
    InvalidShape { rows: usize, cols: usize },

    #[error("expected {expected} entries for the requested shape, got {got}")]
    EntryCount { expected: usize, got: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("kronecker product of {left:?} and {right:?} exceeds 16x16")]
    DimensionOverflow {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("incompatible shapes {left:?} and {right:?} for {op}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not Hermitian: max |m - m†| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge (off-diagonal norm {off_norm:e})")]
    NoConvergence { off_norm: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("entry ({row}, {col}) has magnitude {magnitude:e}, outside the expected pattern")]
    PatternViolation {
        row: usize,
        col: usize,
        magnitude: f64,
    },

    #[error("invalid conditional blocks: {0}")]
    InvalidBlocks(String),

    #[error("RK4 step {step:e} exceeds the stability bound {max:e}")]
    StepTooLarge { step: f64, max: f64 },

    #[error("measurement outcome {outcome} has probability {probability:e}")]
    ImpossibleOutcome { outcome: u8, probability: f64 },

    #[error("need at least {min} values, got {len}")]
    TooShort { len: usize, min: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("cannot parse state descriptor {0:?}")]
    UnknownState(String),
}
