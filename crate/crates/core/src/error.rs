use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("columns are not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("alpha = {alpha} is outside [0, inf)")]
    AlphaOutOfRange { alpha: f64 },
    #[error("beta = {beta} is outside [{min}, {max})")]
    BetaOutOfRange { beta: f64, min: f64, max: f64 },
    #[error("witness is not negative on the partial transpose (value {value:e})")]
    WitnessNotNegative { value: f64 },
    #[error("filtered state lost its negative partial transpose (value {value:e})")]
    FilterFailed { value: f64 },
    #[error("vector has Schmidt rank below 2")]
    ProductVector,
    #[error("resolvent <e1|R|e1> - lambda0 is singular")]
    SingularResolvent,
    #[error("{copies} copies require the long-run flag")]
    LongRunRequired { copies: usize },
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to
    /// inputs that violate an operation's contract.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::NotPositiveDefinite)
    }
}
