use std::io;

use thiserror::Error;

/// Every failure the laboratory can report.
#[derive(Debug, Error)]
pub enum KpError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("spectrum is not Hermitian: imaginary residue {residue:.3e} exceeds threshold")]
    SymmetryViolation { residue: f64 },
    #[error("dispersion symbol evaluated at zero x-frequency")]
    ZeroXFrequency,
    #[error("data does not have zero x-mean (largest xi=0 coefficient {max_coefficient:.3e})")]
    NotZeroXMean { max_coefficient: f64 },
    #[error("dyadic band 2^{exponent} outside the representable range [2^{min}, 2^{max}]")]
    BandOutOfRange { exponent: i32, min: i32, max: i32 },
    #[error("field is identically zero")]
    ZeroField,
    #[error("symbol magnitude {value:.3e} exceeds the cap {cap:.3e}")]
    UnboundedSymbol { value: f64, cap: f64 },
    #[error("commutator bands too close: N3 = 2^{n3} must be at most N/4 with N = 2^{n}")]
    BandsTooClose { n: i32, n3: i32 },
    #[error("non-finite or exploding coefficient at step {step} (t = {t})")]
    NonFinite { step: u64, t: f64 },
    #[error("domain too small: boundary amplitude {boundary:.3e} vs peak {peak:.3e}")]
    DomainTooSmall { boundary: f64, peak: f64 },
    #[error("parameter constraint violated: {0}")]
    ParamConstraintViolated(String),
    #[error("y-period {period} does not divide Ly = {ly}")]
    PeriodMismatch { period: f64, ly: f64 },
    #[error("denominator {min:.3e} on the lattice is below the singularity floor")]
    SingularDenominator { min: f64 },
    #[error("pair (q, r) = ({q}, {r}) is not admissible")]
    NotAdmissible { q: f64, r: f64 },
    #[error("time {t} beyond the recirculation window {window}")]
    RecirculationWindowExceeded { t: f64, window: f64 },
    #[error("degenerate frequencies: xi, xi1 and xi - xi1 must all be nonzero")]
    DegenerateFrequencies,
    #[error("the two data sets coincide")]
    IdenticalData,
    #[error("config error at line {line}, key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl KpError {
    pub(crate) fn config(line: usize, key: impl Into<String>, message: impl Into<String>) -> Self {
        KpError::Config {
            line,
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = KpError> = std::result::Result<T, E>;
