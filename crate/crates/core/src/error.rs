use thiserror::Error;

/// Errors raised by the fusion math and the decision engine.
///
/// `InvalidVariance` and `DegeneratePosterior` are kept apart so callers can
/// tell a misconfigured estimate from evidence that fuses into an improper
/// Beta distribution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrustError {
    #[error("{what} must lie in {range}, got {value}")]
    OutOfRange { what: &'static str, range: &'static str, value: f64 },

    #[error(
        "invalid variance {variance} for mean {mean}: moment inversion needs variance < mean*(1-mean) = {limit}",
        limit = mean * (1.0 - mean)
    )]
    InvalidVariance { mean: f64, variance: f64 },

    #[error("degenerate posterior Beta({alpha}, {beta}): both shapes must be positive")]
    DegeneratePosterior { alpha: f64, beta: f64 },

    #[error("update requires at least one new trust estimate")]
    EmptyUpdate,
}

impl TrustError {
    pub(crate) fn out_of_range(what: &'static str, range: &'static str, value: f64) -> Self {
        TrustError::OutOfRange { what, range, value }
    }
}
