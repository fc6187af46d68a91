use super::weight::WeightFunction;
use crate::error::{Result, WvError};
use crate::series::{GrowthProfile, Radius};

/// Denominator `2 ln h + ln ln(hμ)` of the statistic.
///
/// Defined whenever `ln(hμ) > 0` and the denominator itself is positive. The
/// stricter `ln(hμ) > 1` would exclude e.g. `h = 2, μ = 1`, where the
/// statistic is still finite and positive.
pub fn delta_denominator(log_mu: f64, r: Radius, h: &WeightFunction) -> Result<f64> {
    let log_h = h.log_eval(r);
    let log_hmu = log_h + log_mu;
    if !(log_hmu > 0.0) {
        return Err(WvError::Domain(format!(
            "ln(h mu) = {log_hmu} must be positive at r = {}",
            r.r()
        )));
    }
    let denom = 2.0 * log_h + log_hmu.ln();
    if !(denom > 0.0) {
        return Err(WvError::Domain(format!(
            "2 ln h + ln ln(h mu) = {denom} must be positive at r = {}",
            r.r()
        )));
    }
    Ok(denom)
}

/// `Δ_h(r) = (ln M - ln μ) / (2 ln h(r) + ln ln(h(r) μ))`.
pub fn delta_h(log_m: f64, log_mu: f64, r: Radius, h: &WeightFunction) -> Result<f64> {
    Ok((log_m - log_mu) / delta_denominator(log_mu, r, h)?)
}

/// Whether `r` belongs to `E(η, f, h)` for this profile, i.e. `Δ_h(r) > η`.
pub fn exceptional_flag(profile: &GrowthProfile, eta: f64, h: &WeightFunction) -> Result<bool> {
    let log_m = profile
        .log_m
        .ok_or_else(|| WvError::BadParam("profile has no maximum modulus".into()))?;
    Ok(delta_h(log_m, profile.log_mu, profile.r, h)? > eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let h = WeightFunction::LogMeasure;
        let r = Radius::from_r(0.5).unwrap();
        let l2 = 2f64.ln();
        let d = delta_h(l2, 0.0, r, &h).unwrap();
        assert!((d - l2 / (2.0 * l2 + l2.ln())).abs() < 1e-15);
        assert!((d - 0.6797017017627934).abs() < 1e-15);
        assert_eq!(delta_h(3.0, 3.0, Radius::from_r(0.9).unwrap(), &h).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        let h = WeightFunction::LogMeasure;
        let r = Radius::from_r(0.5).unwrap();
        assert!(matches!(delta_h(1.0, -1.0, r, &h), Err(WvError::Domain(_))));
        // ln(hμ) tiny: ln ln(hμ) overwhelms 2 ln h
        let r = Radius::from_r(0.01).unwrap();
        assert!(matches!(delta_h(1.0, 0.0, r, &h), Err(WvError::Domain(_))));
    }
}
