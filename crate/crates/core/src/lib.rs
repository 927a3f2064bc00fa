//! Trust fusion and risk assessment for networks of sensor nodes.
//!
//! - [`beta_fusion`]: Beta moment matching and posterior combination of
//!   direct and indirect trust.
//! - [`trust_table`]: per-edge records and the accept / decline decision.
//! - [`netsim`]: directed networks, seeded scenarios and batch assessment.
//! - [`io`]: network documents and matrix reports.

pub mod beta_fusion;
pub mod combiner;
pub mod error;
pub mod io;
pub mod netsim;
pub mod trust_table;

pub use beta_fusion::{
    beta_mean, beta_pdf, beta_variance, combined_trust, combined_trust_with_prior, fuse, fusion_weights,
    moments_to_beta, posterior_params, BetaParams, FusionReport, FusionWeights, PriorSource, TrustEstimate, TrustValue,
    CLAMP_EPSILON, DEFAULT_VARIANCE,
};
pub use combiner::{AverageCombiner, BetaCombiner, CombineMethod, TrustCombiner};
pub use error::TrustError;
pub use netsim::{
    fixture_three_node, fixture_three_node_with_variance, generate_network, risk_series, run_assessment,
    run_assessment_with, AssessmentResult, Edge, EdgeError, NetsimError, Network, ScenarioConfig, SquareMatrix,
};
pub use trust_table::{
    evaluate_request, evaluate_request_with, risk_value, self_record, update_record, update_record_with,
    DecisionOutcome, RiskAppetite, TrustRecord,
};
