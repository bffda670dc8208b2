use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max|H - H^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("time grid needs at least one step")]
    ZeroSteps,

    #[error("invalid time grid: t_end ({t_end}) must exceed t_start ({t_start})")]
    InvalidGrid { t_start: f64, t_end: f64 },

    #[error("non-finite Hamiltonian sampled at t = {t}")]
    NanHamiltonian { t: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time {t} lies outside the schedule [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("system mismatch: {0}")]
    SystemMismatch(String),

    #[error("invalid pulse schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid error model: {0}")]
    InvalidErrorModel(String),

    #[error("gate spec requires a detuned drive: {0}")]
    DetunedDrive(String),

    #[error("phase-jump solver did not converge for {family}: src residual {residual_src:.3e}, gate residual {residual_gate:.3e}")]
    SolverFailed {
        family: String,
        residual_src: f64,
        residual_gate: f64,
    },

    #[error("state norm/trace invariant violated: {0}")]
    InvariantViolation(String),

    #[error("quadrature grid too coarse: trapezoid estimates differ by {difference:.3e}")]
    GridTooCoarse { difference: f64 },

    #[error("schedule is not cyclic (frame overlap {overlap:.12})")]
    NonCyclic { overlap: f64 },

    #[error("invalid fit input: {0}")]
    InvalidFitInput(String),

    #[error("subspace dimension {m} exceeds operator dimension {dim}")]
    SubspaceTooLarge { m: usize, dim: usize },

    #[error("negative collapse rate {0}")]
    NegativeRate(f64),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SolverFailed { .. } => 2,
            Error::InvariantViolation(_)
            | Error::NanHamiltonian { .. }
            | Error::NotHermitian { .. }
            | Error::GridTooCoarse { .. }
            | Error::NonCyclic { .. } => 3,
            Error::Config(_)
            | Error::Parse { .. }
            | Error::InvalidErrorModel(_)
            | Error::DetunedDrive(_)
            | Error::InvalidGrid { .. }
            | Error::ZeroSteps => 4,
            _ => 1,
        }
    }
}
