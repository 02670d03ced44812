use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole: evaluation point {0} coincides with an atom")]
    Pole(f64),
    #[error("pole proximity: distance {distance:e} to nearest point is below {cutoff:e}")]
    PoleProximity { distance: f64, cutoff: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point at infinity")]
    PointAtInfinity,
    #[error("accuracy error: {what} (achieved {achieved:e})")]
    Accuracy { what: String, achieved: f64 },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("insufficient data: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("fit error: {0}")]
    Fit(String),
    #[error("variant mismatch: {0}")]
    Variant(String),
    #[error("sampler quality: rejection rate {rate:e} exceeds {limit:e}")]
    SamplerQuality { rate: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
