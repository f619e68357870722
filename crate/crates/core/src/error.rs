use crate::euler::DensityEstimate;
use crate::pattern::PatternError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Pattern(#[from] PatternError),

    #[error("limit {requested} exceeds the configured budget of {budget}")]
    Resource { requested: u64, budget: u64 },

    #[error("{n} is outside the table range [2, {limit}]")]
    OutOfRange { n: u64, limit: u64 },

    #[error("target error {target:e} not reachable; best bracket [{}, {}] at truncation prime {}",
        best.lower, best.upper, best.truncation_prime)]
    TargetUnreachable {
        target: f64,
        best: Box<DensityEstimate>,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid exponent weight: {0}")]
    InvalidWeight(String),

    #[error("weight forbids exponent 1 at weight 0; d_0 vanishes and the series is not supported")]
    DivergentWeight,
}
