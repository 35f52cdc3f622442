use thiserror::Error;

/// Crate-wide error type. Validation failures carry enough context to
/// report the offending value back to the caller.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed interval: lo={lo}, hi={hi}")]
    MalformedInterval { lo: f64, hi: f64 },
    #[error("interval has zero length; sgpv requires positive length")]
    DegenerateInterval,
    #[error("interval has infinite length; sgpv requires a finite interval")]
    InfiniteInterval,
    #[error("region must have positive total length")]
    EmptyRegion,
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("invalid monitoring plan: {0}")]
    InvalidPlan(String),
    #[error("invalid outcome model: {0}")]
    InvalidModel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
