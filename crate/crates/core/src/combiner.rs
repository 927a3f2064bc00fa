use serde::{Deserialize, Serialize};

use crate::beta_fusion::{combined_trust_with_prior, PriorSource, TrustEstimate, TrustValue};
use crate::error::TrustError;

/// Strategy for merging direct and indirect trust into a combined value.
pub trait TrustCombiner: Send + Sync {
    fn name(&self) -> &'static str;

    fn combine(&self, direct: &TrustEstimate, indirect: &TrustEstimate) -> Result<TrustValue, TrustError>;
}

/// Posterior mean of the Beta fusion. The default uses direct trust as prior.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BetaCombiner {
    pub prior: PriorSource,
}

impl TrustCombiner for BetaCombiner {
    fn name(&self) -> &'static str {
        "beta"
    }

    fn combine(&self, direct: &TrustEstimate, indirect: &TrustEstimate) -> Result<TrustValue, TrustError> {
        combined_trust_with_prior(direct, indirect, self.prior)
    }
}

/// Unweighted mean of the two trust levels, ignoring variances.
///
/// A simple baseline for side-by-side comparison with [`BetaCombiner`]. It is
/// not any particular published weighting scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AverageCombiner;

impl TrustCombiner for AverageCombiner {
    fn name(&self) -> &'static str {
        "average"
    }

    fn combine(&self, direct: &TrustEstimate, indirect: &TrustEstimate) -> Result<TrustValue, TrustError> {
        Ok(TrustValue::saturating((direct.mean().get() + indirect.mean().get()) / 2.0))
    }
}

/// Named combiner choice, for configuration surfaces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineMethod {
    #[default]
    Beta,
    Average,
}

impl CombineMethod {
    pub fn combiner(self) -> &'static dyn TrustCombiner {
        static BETA: BetaCombiner = BetaCombiner { prior: PriorSource::Direct };
        match self {
            CombineMethod::Beta => &BETA,
            CombineMethod::Average => &AverageCombiner,
        }
    }
}

impl std::str::FromStr for CombineMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "beta" => Ok(CombineMethod::Beta),
            "average" => Ok(CombineMethod::Average),
            other => Err(format!("unknown combine method `{other}` (expected beta or average)")),
        }
    }
}
