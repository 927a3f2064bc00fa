//! Per-edge trust records and the job acceptance decision.
//!
//! A job arrives with a required trust level `T`. The node checks its direct
//! trust `A` first, then its indirect trust `B`, and only if both fall short
//! does it fuse them into the combined trust `C`. Risk is the remaining
//! shortfall `max(0, T - C)`; the node accepts it if it is within its risk
//! appetite and declines otherwise.

use serde::{Deserialize, Serialize};

use crate::beta_fusion::{TrustEstimate, TrustValue, DEFAULT_VARIANCE};
use crate::combiner::{BetaCombiner, TrustCombiner};
use crate::error::TrustError;

/// The largest risk a node is willing to carry when accepting a job.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RiskAppetite(f64);

impl RiskAppetite {
    pub fn new(max_acceptable_risk: f64) -> Result<Self, TrustError> {
        if (0.0..=1.0).contains(&max_acceptable_risk) {
            Ok(RiskAppetite(max_acceptable_risk))
        } else {
            Err(TrustError::out_of_range("risk appetite", "[0, 1]", max_acceptable_risk))
        }
    }

    pub fn max_acceptable_risk(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RiskAppetite {
    type Error = TrustError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        RiskAppetite::new(value)
    }
}

impl From<RiskAppetite> for f64 {
    fn from(value: RiskAppetite) -> f64 {
        value.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DecisionOutcome {
    AcceptDirect,
    AcceptIndirect,
    AcceptCombined,
    AcceptWithRisk(f64),
    Decline(f64),
}

impl DecisionOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            DecisionOutcome::AcceptDirect => "AcceptDirect",
            DecisionOutcome::AcceptIndirect => "AcceptIndirect",
            DecisionOutcome::AcceptCombined => "AcceptCombined",
            DecisionOutcome::AcceptWithRisk(_) => "AcceptWithRisk",
            DecisionOutcome::Decline(_) => "Decline",
        }
    }

    pub fn is_accept(&self) -> bool {
        !matches!(self, DecisionOutcome::Decline(_))
    }

    pub fn risk(&self) -> f64 {
        match *self {
            DecisionOutcome::AcceptWithRisk(r) | DecisionOutcome::Decline(r) => r,
            _ => 0.0,
        }
    }
}

/// One directed edge's view of a job: required, direct, indirect and
/// combined trust, the resulting risk and the decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustRecord {
    pub required: TrustValue,
    pub direct: TrustEstimate,
    pub indirect: TrustEstimate,
    /// `None` when the decision was reached before fusion.
    pub combined: Option<TrustValue>,
    pub risk: f64,
    pub decision: DecisionOutcome,
}

impl TrustRecord {
    /// Combined trust as shown in tables, where a skipped fusion reads as 0.
    pub fn combined_or_zero(&self) -> f64 {
        self.combined.map_or(0.0, TrustValue::get)
    }
}

pub fn risk_value(required: TrustValue, achieved: TrustValue) -> f64 {
    (required.get() - achieved.get()).max(0.0)
}

/// Decides a job using the Beta posterior as combined trust.
pub fn evaluate_request(
    required: TrustValue,
    direct: TrustEstimate,
    indirect: TrustEstimate,
    appetite: RiskAppetite,
) -> Result<TrustRecord, TrustError> {
    evaluate_request_with(&BetaCombiner::default(), required, direct, indirect, appetite)
}

pub fn evaluate_request_with(
    combiner: &dyn TrustCombiner,
    required: TrustValue,
    direct: TrustEstimate,
    indirect: TrustEstimate,
    appetite: RiskAppetite,
) -> Result<TrustRecord, TrustError> {
    let short_circuit = |decision| TrustRecord { required, direct, indirect, combined: None, risk: 0.0, decision };
    if direct.mean() >= required {
        return Ok(short_circuit(DecisionOutcome::AcceptDirect));
    }
    if indirect.mean() >= required {
        return Ok(short_circuit(DecisionOutcome::AcceptIndirect));
    }

    let combined = combiner.combine(&direct, &indirect)?;
    let risk = risk_value(required, combined);
    let decision = if risk == 0.0 {
        DecisionOutcome::AcceptCombined
    } else if risk <= appetite.max_acceptable_risk() {
        DecisionOutcome::AcceptWithRisk(risk)
    } else {
        DecisionOutcome::Decline(risk)
    };
    Ok(TrustRecord { required, direct, indirect, combined: Some(combined), risk, decision })
}

/// A node's record about itself: nothing required, full trust, no risk.
pub fn self_record() -> TrustRecord {
    let full = TrustEstimate::new(1.0, DEFAULT_VARIANCE).expect("constant estimate is valid");
    TrustRecord {
        required: TrustValue::ZERO,
        direct: full,
        indirect: full,
        combined: Some(TrustValue::ONE),
        risk: 0.0,
        decision: DecisionOutcome::AcceptDirect,
    }
}

/// Replaces the supplied estimates and re-runs the decision from scratch.
pub fn update_record(
    old: &TrustRecord,
    new_direct: Option<TrustEstimate>,
    new_indirect: Option<TrustEstimate>,
    appetite: RiskAppetite,
) -> Result<TrustRecord, TrustError> {
    update_record_with(&BetaCombiner::default(), old, new_direct, new_indirect, appetite)
}

pub fn update_record_with(
    combiner: &dyn TrustCombiner,
    old: &TrustRecord,
    new_direct: Option<TrustEstimate>,
    new_indirect: Option<TrustEstimate>,
    appetite: RiskAppetite,
) -> Result<TrustRecord, TrustError> {
    if new_direct.is_none() && new_indirect.is_none() {
        return Err(TrustError::EmptyUpdate);
    }
    evaluate_request_with(
        combiner,
        old.required,
        new_direct.unwrap_or(old.direct),
        new_indirect.unwrap_or(old.indirect),
        appetite,
    )
}
