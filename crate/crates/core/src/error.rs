use thiserror::Error;

/// Errors raised while building a scenario or evaluating the rate pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero-forcing needs at least as many antennas as users (N = {antennas}, M = {users})")]
    TooFewAntennas { antennas: usize, users: usize },

    #[error("moving regions {first} and {second} overlap")]
    OverlappingRegions { first: usize, second: usize },

    #[error("{what} must be strictly positive (got {value})")]
    NonPositive { what: String, value: f64 },

    #[error("outage target must lie in (0, 1) (got {0})")]
    OutageTargetOutOfRange(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("LoS Gram matrix is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("ratio-moment approximation produced a non-positive variance ({0:.3e})")]
    NonPositiveVariance(f64),

    #[error("cannot fit a Gamma distribution to mean {mean:.3e}, variance {variance:.3e}")]
    DegenerateDistribution { mean: f64, variance: f64 },

    #[error("closed-form rate argument is non-positive ({0:.3e}) for user {1}")]
    NonPositiveRateArgument(f64, usize),

    #[error("exhaustive antenna selection over C({total}, {selected}) subsets exceeds the enumeration cap")]
    CombinatorialLimit { total: usize, selected: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse error class used for CLI exit codes and error rows in sweep output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Numerical,
    Io,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Numerical => "numerical",
            ErrorCategory::Io => "io",
        }
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::TooFewAntennas { .. }
            | Error::OverlappingRegions { .. }
            | Error::NonPositive { .. }
            | Error::OutageTargetOutOfRange(_)
            | Error::InvalidConfig(_)
            | Error::Json(_) => ErrorCategory::Config,
            Error::IllConditioned { .. }
            | Error::NonPositiveVariance(_)
            | Error::DegenerateDistribution { .. }
            | Error::NonPositiveRateArgument(..)
            | Error::CombinatorialLimit { .. } => ErrorCategory::Numerical,
            Error::Io(_) | Error::Csv(_) => ErrorCategory::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
