use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent p = {0} must exceed 1")]
    ExponentTooSmall(f64),
    #[error("interpolation weight theta = {0} outside [0, 1]")]
    ThetaOutOfRange(f64),
    #[error("distribution has no atoms")]
    EmptyDistribution,
    #[error("atom {index}: coordinate {value} is not finite")]
    NonFinite { index: usize, value: f64 },
    #[error("atom {index}: negative coordinate {value}")]
    NegativeCoordinate { index: usize, value: f64 },
    #[error("atom {index}: weight {value} is not positive")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("atom {index}: weight {value} below 1e-15")]
    WeightTooSmall { index: usize, value: f64 },
    #[error("weights sum to {0}, expected 1 within 1e-9")]
    WeightSum(f64),
    #[error("norm order r = {0} must be at least 1")]
    NormOrder(f64),
    #[error("negative radicand {value} beyond rounding tolerance (scale {scale})")]
    NegativeRadicand { value: f64, scale: f64 },
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid distribution file: {0}")]
    Format(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
