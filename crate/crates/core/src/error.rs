use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building a barrier or evaluating an observable.
#[derive(Debug, Error)]
pub enum Error {
    #[error("frequency must be positive, got {0} rad/s")]
    NonPositiveFrequency(f64),

    #[error("permittivity has negative imaginary part {0:e} (gain medium)")]
    GainMedium(f64),

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid layer stack: {0}")]
    InvalidStack(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("transfer denominator vanished at omega = {omega:e} rad/s")]
    SingularTransfer { omega: f64 },

    #[error("passivity violated at omega = {omega:e} rad/s: eigenvalue of I - TT^dagger is {eigenvalue:e}")]
    PassivityViolation { omega: f64, eigenvalue: f64 },

    #[error("spectral grid too narrow: boundary leakage {0:e} of peak power")]
    SpectralLeakage(f64),

    #[error("pulse amplitudes are all zero")]
    ZeroPulse,

    #[error("coincidence integral has residual imaginary fraction {0:e}")]
    ImaginaryResidual(f64),

    #[error("coincidence plateau not reached: outer-range mean deviates from 1 by {0:e}")]
    PlateauNotReached(f64),

    #[error("coincidence scan has no interior minimum")]
    NoInteriorMinimum,

    #[error("barrier extinguishes the whole pulse band")]
    TotalExtinction,

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the `tunnel` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) | Error::Csv(_) => 4,
            _ => 3,
        }
    }
}
