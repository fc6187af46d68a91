//! Closed-form right-hand sides of the almost-sure upper bounds, all on a log scale.

use serde::{Deserialize, Serialize};

use super::weight::WeightFunction;
use crate::error::{Result, WvError};
use crate::series::summation::log_add_exp;
use crate::series::GrowthProfile;

fn domain(msg: String) -> WvError {
    WvError::Domain(msg)
}

/// `ln` of `μ √h ln^{1/4}(hμ) ln^{3/4+δ} h ln₂^{1+δ}(hμ)` from `ln μ` and `ln h`.
pub fn rhs_theorem1_log(log_mu: f64, log_h: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(WvError::BadParam(format!("delta must be positive, got {delta}")));
    }
    let l = log_h + log_mu;
    if !(log_h > 1.0) {
        return Err(domain(format!("ln h = {log_h} must exceed 1")));
    }
    if !(l > 1.0) {
        return Err(domain(format!("ln(h mu) = {l} must exceed 1")));
    }
    Ok(log_mu + 0.5 * log_h + 0.25 * l.ln() + (0.75 + delta) * log_h.ln() + (1.0 + delta) * l.ln().ln())
}

pub fn rhs_theorem1(profile: &GrowthProfile, h: &WeightFunction, delta: f64) -> Result<f64> {
    rhs_theorem1_log(profile.log_mu, h.log_eval(profile.r), delta)
}

/// `ln` of the generalised-gap bound with `v(x) = x^α` and `φ(x) = x^δ`:
///
/// `√(h ln h) μ ln^{1/4}(hμ) ln^{1+ε}(ln h · ln(hμ))
///   · ( v(8h² ln(hμ)) + φ^{1/2}( h^{3/2} ln^{5/4}(hμ) ln₂^{1+ε}(hμ) / v(h ln(hμ)) ) )`.
pub fn rhs_theorem2_log(log_mu: f64, log_h: f64, v_alpha: f64, phi_delta: f64, eps: f64) -> Result<f64> {
    if !(0.0..=0.25).contains(&v_alpha) {
        return Err(WvError::BadParam(format!(
            "v exponent must lie in [0, 1/4], got {v_alpha}"
        )));
    }
    if !(phi_delta >= 0.0) || !(eps > 0.0) {
        return Err(WvError::BadParam("phi exponent must be >= 0 and eps > 0".into()));
    }
    let l = log_h + log_mu;
    if !(log_h > 0.0) {
        return Err(domain(format!("ln h = {log_h} must be positive")));
    }
    if !(l > 1.0) {
        return Err(domain(format!("ln(h mu) = {l} must exceed 1")));
    }
    let inner = log_h.ln() + l.ln();
    if !(inner > 0.0) {
        return Err(domain(format!("ln h · ln(h mu) = {} must exceed 1", inner.exp())));
    }
    let ll = l.ln();
    let lead = 0.5 * (log_h + log_h.ln()) + log_mu + 0.25 * ll + (1.0 + eps) * inner.ln();
    let v_term = v_alpha * (8f64.ln() + 2.0 * log_h + ll);
    let phi_arg = 1.5 * log_h + 1.25 * ll + (1.0 + eps) * ll.ln() - v_alpha * (log_h + ll);
    let phi_term = 0.5 * phi_delta * phi_arg;
    Ok(lead + log_add_exp(v_term, phi_term))
}

pub fn rhs_theorem2(
    profile: &GrowthProfile,
    h: &WeightFunction,
    v_alpha: f64,
    phi_delta: f64,
    eps: f64,
) -> Result<f64> {
    rhs_theorem2_log(profile.log_mu, h.log_eval(profile.r), v_alpha, phi_delta, eps)
}

/// Limiting constants for a gap exponent `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryBounds {
    pub delta: f64,
    /// `(1+3δ)/(4+2δ)`, meaningful for `δ < 1/2`.
    pub c2_bound: f64,
    /// `(1+2δ)/(4+2δ)`, meaningful for `δ < 1` under the extra growth condition on `h`.
    pub c3_bound: f64,
    pub c2_alpha: f64,
    pub c3_alpha: f64,
    /// `(1+2δ)/(4+3δ)`, the alternative form of the first constant.
    pub alt_bound: f64,
    pub c2_valid: bool,
    pub c3_valid: bool,
}

pub fn corollary_bounds(delta: f64) -> Result<CorollaryBounds> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(WvError::BadParam(format!("delta must be >= 0, got {delta}")));
    }
    let d = delta;
    Ok(CorollaryBounds {
        delta: d,
        c2_bound: (1.0 + 3.0 * d) / (4.0 + 2.0 * d),
        c3_bound: (1.0 + 2.0 * d) / (4.0 + 2.0 * d),
        c2_alpha: 5.0 * d / (4.0 * (2.0 + d)),
        c3_alpha: 3.0 * d / (4.0 * (2.0 + d)),
        alt_bound: (1.0 + 2.0 * d) / (4.0 + 3.0 * d),
        c2_valid: d < 0.5,
        c3_valid: d < 1.0,
    })
}

/// Log-scale right-hand sides of the growth bounds for `A`, `B²` and `G`, at `ln μ`, `ln h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthBounds {
    /// `ln(h ln(hμ) ln₂^{1+ε}(hμ))`
    pub log_a: f64,
    /// `ln(h^{2+ε} ln(hμ) ln₂^{2+ε}(hμ))`
    pub log_b2_statement: f64,
    /// `ln(h^{2+ε} ln^{1+ε}(hμ))`
    pub log_b2_proof: f64,
    /// `ln(μ h ln^{1/2}(hμ) ln^{1/2+ε} h ln₂^{1+ε}(hμ))`
    pub log_g: f64,
}

/// Needs `ln(hμ) > e` so that every iterated logarithm is positive, and `ln h > 1`.
pub fn growth_bounds(log_mu: f64, log_h: f64, eps: f64) -> Result<GrowthBounds> {
    if !(eps > 0.0) {
        return Err(WvError::BadParam(format!("eps must be positive, got {eps}")));
    }
    let l = log_h + log_mu;
    if !(l > std::f64::consts::E) || !(log_h > 1.0) {
        return Err(domain(format!(
            "growth bounds need ln(h mu) > e and ln h > 1 (got {l}, {log_h})"
        )));
    }
    let ll = l.ln();
    let lll = ll.ln();
    Ok(GrowthBounds {
        log_a: log_h + ll + (1.0 + eps) * lll,
        log_b2_statement: (2.0 + eps) * log_h + ll + (2.0 + eps) * lll,
        log_b2_proof: (2.0 + eps) * log_h + (1.0 + eps) * ll,
        log_g: log_mu + log_h + 0.5 * ll + (0.5 + eps) * log_h.ln() + (1.0 + eps) * lll,
    })
}
