//! Beta-distribution fusion of direct and indirect trust.
//!
//! Each trust estimate (a mean in `[0, 1]` plus a variance) is mapped onto a
//! Beta distribution by the method of moments. The direct estimate is then
//! treated as the prior and the indirect estimate as the likelihood; their
//! kernels multiply into the posterior
//! `Beta(alpha_a + alpha_b - 1, beta_a + beta_b - 1)`, whose mean is the
//! combined trust. That mean can be written as a weighted sum of the two input
//! means, which is how [`combined_trust`] evaluates it:
//!
//! ```text
//! K   = alpha_a + alpha_b + beta_a + beta_b - 2
//! w_a = (alpha_a + beta_a) / K
//! w_b = (alpha_b + beta_b) * (alpha_b - 1) / (alpha_b * K)
//! C   = mean_a * w_a + mean_b * w_b
//! ```
//!
//! Note on the kernel product: written out, it is
//! `p^(alpha_a + alpha_b - 2) (1 - p)^(beta_a + beta_b - 2)`. Some derivations
//! drop the `- 2` on the intermediate line; the resulting shape pair above is
//! the one implemented.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::TrustError;

/// Means are clamped into `[CLAMP_EPSILON, 1 - CLAMP_EPSILON]` before moment
/// inversion; at exactly 0 or 1 the shape recovery divides by zero.
pub const CLAMP_EPSILON: f64 = 1e-6;

/// Variance assumed for a trust estimate when none is configured.
pub const DEFAULT_VARIANCE: f64 = 0.01;

/// A probability-valued trust level in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TrustValue(f64);

impl TrustValue {
    pub const ZERO: TrustValue = TrustValue(0.0);
    pub const ONE: TrustValue = TrustValue(1.0);

    pub fn new(value: f64) -> Result<Self, TrustError> {
        if (0.0..=1.0).contains(&value) {
            Ok(TrustValue(value))
        } else {
            Err(TrustError::out_of_range("trust value", "[0, 1]", value))
        }
    }

    /// Clamps finite values into `[0, 1]`. NaN maps to 0.
    pub fn saturating(value: f64) -> Self {
        if value.is_nan() {
            TrustValue(0.0)
        } else {
            TrustValue(value.clamp(0.0, 1.0))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TrustValue {
    type Error = TrustError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        TrustValue::new(value)
    }
}

impl From<TrustValue> for f64 {
    fn from(value: TrustValue) -> f64 {
        value.0
    }
}

/// A trust level together with the variance expressing confidence in it.
///
/// Construction only checks that the mean is a probability and the variance
/// is positive and finite. Whether a Beta distribution with these moments
/// exists is checked by [`moments_to_beta`], so that a network can hold an
/// estimate that only becomes a problem if fusion is actually needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustEstimate {
    mean: TrustValue,
    variance: f64,
}

impl TrustEstimate {
    pub fn new(mean: f64, variance: f64) -> Result<Self, TrustError> {
        let mean = TrustValue::new(mean)?;
        if !(variance.is_finite() && variance > 0.0) {
            return Err(TrustError::out_of_range("variance", "(0, inf)", variance));
        }
        Ok(TrustEstimate { mean, variance })
    }

    /// Estimate with [`DEFAULT_VARIANCE`].
    pub fn with_default_variance(mean: f64) -> Result<Self, TrustError> {
        Self::new(mean, DEFAULT_VARIANCE)
    }

    pub fn mean(&self) -> TrustValue {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// The mean clamped away from 0 and 1, as used for moment inversion.
    pub fn clamped_mean(&self) -> f64 {
        self.mean.get().clamp(CLAMP_EPSILON, 1.0 - CLAMP_EPSILON)
    }
}

/// Shape parameters of a Beta distribution, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, TrustError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(TrustError::out_of_range("alpha", "(0, inf)", alpha));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(TrustError::out_of_range("beta", "(0, inf)", beta));
        }
        Ok(BetaParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Weights of the prior (`w_a`) and likelihood (`w_b`) means in the posterior
/// mean, and the normalizer `k` they share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionWeights {
    pub w_a: f64,
    /// Negative whenever the likelihood's alpha is below 1.
    pub w_b: f64,
    pub k: f64,
}

/// Which estimate plays the role of the prior in the posterior combination.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorSource {
    #[default]
    Direct,
    Indirect,
}

/// Beta density at `x`, evaluated in log space.
///
/// At `x = 0` with `alpha < 1` (or `x = 1` with `beta < 1`) the density is
/// unbounded and `f64::INFINITY` is returned.
pub fn beta_pdf(params: &BetaParams, x: f64) -> Result<f64, TrustError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(TrustError::out_of_range("density argument", "[0, 1]", x));
    }
    let (a, b) = (params.alpha, params.beta);
    let ln_norm = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    // 0 * ln(0) is NaN in IEEE arithmetic; an exponent of zero contributes 1.
    let ln_left = if a == 1.0 { 0.0 } else { (a - 1.0) * x.ln() };
    let ln_right = if b == 1.0 { 0.0 } else { (b - 1.0) * (-x).ln_1p() };
    Ok((ln_norm + ln_left + ln_right).exp())
}

pub fn beta_mean(params: &BetaParams) -> TrustValue {
    TrustValue::saturating(params.alpha / (params.alpha + params.beta))
}

pub fn beta_variance(params: &BetaParams) -> f64 {
    let s = params.alpha + params.beta;
    params.alpha * params.beta / ((s + 1.0) * s * s)
}

/// Recovers the Beta shapes whose mean and variance match `estimate`.
///
/// The mean is clamped first (see [`CLAMP_EPSILON`]). Fails with
/// [`TrustError::InvalidVariance`] when the variance is at least
/// `mean * (1 - mean)`, since no Beta distribution is that spread out.
pub fn moments_to_beta(estimate: &TrustEstimate) -> Result<BetaParams, TrustError> {
    let mean = estimate.clamped_mean();
    let variance = estimate.variance;
    let invalid = TrustError::InvalidVariance { mean, variance };
    if variance >= mean * (1.0 - mean) {
        return Err(invalid);
    }
    let alpha = mean * (mean * (1.0 - mean) / variance - 1.0);
    let beta = alpha * (1.0 - mean) / mean;
    BetaParams::new(alpha, beta).map_err(|_| invalid)
}

/// Posterior shapes from combining a Beta prior with a Beta-shaped likelihood.
pub fn posterior_params(prior: &BetaParams, likelihood: &BetaParams) -> Result<BetaParams, TrustError> {
    let alpha = prior.alpha + likelihood.alpha - 1.0;
    let beta = prior.beta + likelihood.beta - 1.0;
    if alpha > 0.0 && beta > 0.0 {
        BetaParams::new(alpha, beta)
    } else {
        Err(TrustError::DegeneratePosterior { alpha, beta })
    }
}

pub fn fusion_weights(prior: &BetaParams, likelihood: &BetaParams) -> Result<FusionWeights, TrustError> {
    let k = prior.alpha + likelihood.alpha + prior.beta + likelihood.beta - 2.0;
    if !(k > 0.0) {
        return Err(TrustError::DegeneratePosterior {
            alpha: prior.alpha + likelihood.alpha - 1.0,
            beta: prior.beta + likelihood.beta - 1.0,
        });
    }
    let w_a = (prior.alpha + prior.beta) / k;
    let w_b = (likelihood.alpha + likelihood.beta) * (likelihood.alpha - 1.0) / (likelihood.alpha * k);
    Ok(FusionWeights { w_a, w_b, k })
}

/// Every intermediate of one fusion, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FusionReport {
    pub prior: PriorSource,
    pub direct: BetaParams,
    pub indirect: BetaParams,
    /// `w_a` weights whichever estimate `prior` names.
    pub weights: FusionWeights,
    pub combined: TrustValue,
}

impl FusionReport {
    pub fn weight_direct(&self) -> f64 {
        match self.prior {
            PriorSource::Direct => self.weights.w_a,
            PriorSource::Indirect => self.weights.w_b,
        }
    }

    pub fn weight_indirect(&self) -> f64 {
        match self.prior {
            PriorSource::Direct => self.weights.w_b,
            PriorSource::Indirect => self.weights.w_a,
        }
    }
}

/// Runs the whole fusion pipeline and keeps the intermediates.
pub fn fuse(direct: &TrustEstimate, indirect: &TrustEstimate, prior: PriorSource) -> Result<FusionReport, TrustError> {
    let direct_params = moments_to_beta(direct)?;
    let indirect_params = moments_to_beta(indirect)?;
    let (prior_est, lik_est, prior_params, lik_params) = match prior {
        PriorSource::Direct => (direct, indirect, direct_params, indirect_params),
        PriorSource::Indirect => (indirect, direct, indirect_params, direct_params),
    };
    // Positive K alone does not rule out a non-positive posterior shape.
    posterior_params(&prior_params, &lik_params)?;
    let weights = fusion_weights(&prior_params, &lik_params)?;
    let combined = prior_est.clamped_mean() * weights.w_a + lik_est.clamped_mean() * weights.w_b;
    Ok(FusionReport {
        prior,
        direct: direct_params,
        indirect: indirect_params,
        weights,
        combined: TrustValue::saturating(combined),
    })
}

/// Combined trust with the direct estimate as prior.
pub fn combined_trust(direct: &TrustEstimate, indirect: &TrustEstimate) -> Result<TrustValue, TrustError> {
    combined_trust_with_prior(direct, indirect, PriorSource::Direct)
}

pub fn combined_trust_with_prior(
    direct: &TrustEstimate,
    indirect: &TrustEstimate,
    prior: PriorSource,
) -> Result<TrustValue, TrustError> {
    fuse(direct, indirect, prior).map(|report| report.combined)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64) -> BetaParams {
        BetaParams::new(a, b).unwrap()
    }

    fn est(mean: f64, var: f64) -> TrustEstimate {
        TrustEstimate::new(mean, var).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pdf_known_values() {
        assert!(close(beta_pdf(&params(1.0, 1.0), 0.3).unwrap(), 1.0, 1e-12));
        assert!(close(beta_pdf(&params(2.0, 2.0), 0.5).unwrap(), 1.5, 1e-12));
        assert!(close(beta_pdf(&params(2.0, 3.0), 0.5).unwrap(), 1.5, 1e-12));
    }

    #[test]
    fn pdf_endpoints() {
        assert_eq!(beta_pdf(&params(0.5, 2.0), 0.0).unwrap(), f64::INFINITY);
        assert_eq!(beta_pdf(&params(2.0, 0.5), 1.0).unwrap(), f64::INFINITY);
        assert_eq!(beta_pdf(&params(2.0, 2.0), 0.0).unwrap(), 0.0);
        assert!(close(beta_pdf(&params(1.0, 3.0), 0.0).unwrap(), 3.0, 1e-12));
        assert!(close(beta_pdf(&params(1.0, 1.0), 1.0).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn pdf_rejects_outside_unit_interval() {
        assert!(matches!(beta_pdf(&params(2.0, 2.0), 1.5), Err(TrustError::OutOfRange { .. })));
        assert!(beta_pdf(&params(2.0, 2.0), -0.1).is_err());
        assert!(beta_pdf(&params(2.0, 2.0), f64::NAN).is_err());
    }

    #[test]
    fn pdf_large_shapes_do_not_overflow() {
        let d = beta_pdf(&params(400.0, 600.0), 0.4).unwrap();
        assert!(d.is_finite() && d > 20.0);
    }

    #[test]
    fn moments() {
        assert_eq!(beta_mean(&params(1.0, 1.0)).get(), 0.5);
        assert!(close(beta_mean(&params(2.0, 3.0)).get(), 0.4, 1e-15));
        assert_eq!(beta_mean(&params(10.0, 10.0)).get(), 0.5);
        assert!(close(beta_variance(&params(1.0, 1.0)), 1.0 / 12.0, 1e-15));
        assert!(close(beta_variance(&params(2.0, 2.0)), 0.05, 1e-15));
        assert!(close(beta_variance(&params(2.0, 3.0)), 0.04, 1e-15));
    }

    #[test]
    fn inversion_examples() {
        let p = moments_to_beta(&est(0.5, 1.0 / 12.0)).unwrap();
        assert!(close(p.alpha(), 1.0, 1e-12) && close(p.beta(), 1.0, 1e-12));
        let p = moments_to_beta(&est(0.5, 0.05)).unwrap();
        assert!(close(p.alpha(), 2.0, 1e-12) && close(p.beta(), 2.0, 1e-12));
        // Reference shapes computed at 40 significant digits.
        let p = moments_to_beta(&est(0.6844, 0.01)).unwrap();
        assert!(close(p.alpha(), 14.098_410_041_6, 1e-9));
        assert!(close(p.beta(), 6.501_253_958_4, 1e-9));
        assert!(close(beta_mean(&p).get(), 0.6844, 1e-12));
        assert!(close(beta_variance(&p), 0.01, 1e-14));
    }

    #[test]
    fn inversion_rejects_unreachable_variance() {
        assert!(matches!(moments_to_beta(&est(0.5, 0.25)), Err(TrustError::InvalidVariance { .. })));
        assert!(matches!(moments_to_beta(&est(0.5, 0.3)), Err(TrustError::InvalidVariance { .. })));
        // smallest Table 1 value still inverts at the default variance
        assert!(moments_to_beta(&est(0.0445, DEFAULT_VARIANCE)).is_ok());
    }

    #[test]
    fn inversion_clamps_extreme_means() {
        let e = est(1.0, 1e-8);
        let p = moments_to_beta(&e).unwrap();
        assert!(close(beta_mean(&p).get(), 1.0 - CLAMP_EPSILON, 1e-12));
        let e = est(0.0, 1e-5);
        assert!(matches!(moments_to_beta(&e), Err(TrustError::InvalidVariance { .. })));
        let e = est(0.0, 1e-13);
        assert!(close(beta_mean(&moments_to_beta(&e).unwrap()).get(), CLAMP_EPSILON, 1e-15));
    }

    #[test]
    fn posterior_examples() {
        assert_eq!(posterior_params(&params(1.0, 1.0), &params(1.0, 1.0)).unwrap(), params(1.0, 1.0));
        assert_eq!(posterior_params(&params(2.0, 3.0), &params(4.0, 5.0)).unwrap(), params(5.0, 7.0));
        // two symmetric inputs keep the posterior symmetric: Beta(3, 3)
        let post = posterior_params(&params(2.0, 2.0), &params(2.0, 2.0)).unwrap();
        assert_eq!(post, params(3.0, 3.0));
        assert_eq!(beta_mean(&post).get(), 0.5);
    }

    #[test]
    fn posterior_degenerate() {
        let err = posterior_params(&params(0.3, 2.0), &params(0.5, 2.0)).unwrap_err();
        assert!(matches!(err, TrustError::DegeneratePosterior { .. }));
        assert!(posterior_params(&params(2.0, 0.5), &params(2.0, 0.5)).is_err());
    }

    #[test]
    fn weights_examples() {
        let w = fusion_weights(&params(2.0, 2.0), &params(2.0, 2.0)).unwrap();
        assert_eq!(w.k, 6.0);
        assert!(close(w.w_a, 2.0 / 3.0, 1e-15));
        assert!(close(w.w_b, 1.0 / 3.0, 1e-15));
        let w = fusion_weights(&params(2.0, 3.0), &params(4.0, 5.0)).unwrap();
        assert_eq!(w.k, 12.0);
        assert!(close(w.w_a, 5.0 / 12.0, 1e-15));
        assert!(close(w.w_b, 9.0 * 3.0 / (4.0 * 12.0), 1e-15));
        // weighted means reproduce the Beta(5, 7) posterior mean
        assert!(close(w.w_a * 0.4 + w.w_b * 4.0 / 9.0, 5.0 / 12.0, 1e-15));
    }

    #[test]
    fn weights_negative_for_small_likelihood_alpha() {
        let w = fusion_weights(&params(14.0, 6.5), &params(0.5, 3.0)).unwrap();
        assert!(w.w_a > 0.0 && w.w_b < 0.0);
    }

    #[test]
    fn weights_reject_nonpositive_k() {
        let err = fusion_weights(&params(0.25, 0.25), &params(0.25, 0.25)).unwrap_err();
        assert!(matches!(err, TrustError::DegeneratePosterior { .. }));
    }

    #[test]
    fn combined_examples() {
        let c = combined_trust(&est(0.5, 0.05), &est(0.5, 0.05)).unwrap();
        assert!(close(c.get(), 0.5, 1e-12));
        // Table 1 inputs for node 1 -> 3 at variance 0.01; reference from a 40-digit evaluation.
        let c = combined_trust(&est(0.6844, 0.01), &est(0.0445, 0.01)).unwrap();
        assert!(close(c.get(), 0.606_047_122_099_170_7, 1e-12));
    }

    #[test]
    fn combined_symmetric_inputs() {
        for &(m, v) in &[(0.3, 0.02), (0.7, 0.001), (0.5, 0.1)] {
            let e = est(m, v);
            let p = moments_to_beta(&e).unwrap();
            let expected = beta_mean(&params(2.0 * p.alpha() - 1.0, 2.0 * p.beta() - 1.0));
            let c = combined_trust(&e, &e).unwrap();
            assert!(close(c.get(), expected.get(), 1e-12));
        }
    }

    #[test]
    fn combined_propagates_errors() {
        assert!(matches!(combined_trust(&est(0.5, 0.3), &est(0.5, 0.01)), Err(TrustError::InvalidVariance { .. })));
        // alpha_a + alpha_b <= 1: two low-mean, high-variance estimates
        assert!(matches!(
            combined_trust(&est(0.1, 0.05), &est(0.1, 0.05)),
            Err(TrustError::DegeneratePosterior { .. })
        ));
    }

    #[test]
    fn swapping_prior_role() {
        let a = est(0.6844, 0.01);
        let b = est(0.0445, 0.01);
        let ab = fuse(&a, &b, PriorSource::Direct).unwrap();
        let ba = fuse(&a, &b, PriorSource::Indirect).unwrap();
        // the posterior is symmetric in its two inputs even though the weights are not
        assert!(close(ab.combined.get(), ba.combined.get(), 1e-12));
        assert!(close(ab.weight_direct(), ab.weights.w_a, 0.0));
        assert!(close(ba.weight_direct(), ba.weights.w_b, 0.0));
        assert!((ab.weight_direct() - ba.weight_direct()).abs() > 1e-3);
    }

    #[test]
    fn trust_value_bounds() {
        assert!(TrustValue::new(1.2).is_err());
        assert!(TrustValue::new(-0.01).is_err());
        assert!(TrustValue::new(f64::NAN).is_err());
        assert_eq!(TrustValue::saturating(1.5).get(), 1.0);
        assert!(TrustEstimate::new(0.5, 0.0).is_err());
        assert!(TrustEstimate::new(0.5, f64::INFINITY).is_err());
        assert!(BetaParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn trust_value_deserialization_validates() {
        assert!(serde_json::from_str::<TrustValue>("0.4").is_ok());
        assert!(serde_json::from_str::<TrustValue>("1.2").is_err());
    }
}
