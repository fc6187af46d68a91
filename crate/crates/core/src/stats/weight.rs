use serde::{Deserialize, Serialize};

use crate::error::{Result, WvError};
use crate::series::Radius;

/// A weight `h` on `(0, 1)`: positive, continuous, increasing, with `∫ h = ∞` near 1.
///
/// All forms are parameterised through the gap `s = 1 - r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFunction {
    /// `h(r) = 1/(1 - r)`; its h-measure is the logarithmic measure.
    LogMeasure,
    /// `h(r) = (1 - r)^{-p}` with `p ≥ 1`.
    Power { p: f64 },
    /// `ln h` tabulated against `x = ln(1/s)`, interpolated linearly in `x` and
    /// extended linearly past both ends.
    Tabulated { x: Vec<f64>, log_h: Vec<f64> },
}

impl WeightFunction {
    pub fn power(p: f64) -> Result<Self> {
        let w = WeightFunction::Power { p };
        w.validate()?;
        Ok(w)
    }

    pub fn tabulated(x: Vec<f64>, log_h: Vec<f64>) -> Result<Self> {
        let w = WeightFunction::Tabulated { x, log_h };
        w.validate()?;
        Ok(w)
    }

    pub fn label(&self) -> String {
        match self {
            WeightFunction::LogMeasure => "log_measure".into(),
            WeightFunction::Power { p } => format!("power({p})"),
            WeightFunction::Tabulated { x, .. } => format!("tabulated({} nodes)", x.len()),
        }
    }

    /// Checks positivity and monotonicity. Divergence of `∫ h` is certified for
    /// the closed forms; for tables it follows from a nondecreasing `ln h`
    /// extended linearly, which never decays faster than a constant.
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightFunction::LogMeasure => Ok(()),
            WeightFunction::Power { p } => {
                if p.is_finite() && *p >= 1.0 {
                    Ok(())
                } else {
                    Err(WvError::BadParam(format!("power weight needs p >= 1, got {p}")))
                }
            }
            WeightFunction::Tabulated { x, log_h } => {
                if x.len() < 2 || x.len() != log_h.len() {
                    return Err(WvError::BadParam("tabulated weight needs >= 2 matching nodes".into()));
                }
                if x.iter().chain(log_h).any(|v| !v.is_finite()) {
                    return Err(WvError::BadParam("tabulated weight has non-finite nodes".into()));
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(WvError::BadParam("tabulated x must be strictly increasing".into()));
                }
                if log_h.windows(2).any(|w| w[1] < w[0]) {
                    return Err(WvError::BadParam("tabulated weight must be nondecreasing".into()));
                }
                if x[0] > 0.0 {
                    return Err(WvError::BadParam(
                        "tabulated weight must start at x <= 0 (r = 0)".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// `ln h` at `x = ln(1/s)`.
    pub fn log_eval_x(&self, x: f64) -> f64 {
        match self {
            WeightFunction::LogMeasure => x,
            WeightFunction::Power { p } => p * x,
            WeightFunction::Tabulated { x: xs, log_h } => {
                let n = xs.len();
                let i = match xs.partition_point(|&v| v <= x) {
                    0 => 0,
                    k if k >= n => n - 2,
                    k => k - 1,
                };
                let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                log_h[i] + t * (log_h[i + 1] - log_h[i])
            }
        }
    }

    pub fn log_eval(&self, r: Radius) -> f64 {
        self.log_eval_x(r.log_inv_gap())
    }

    pub fn eval(&self, r: Radius) -> f64 {
        self.log_eval(r).exp()
    }

    /// Closed-form `H` with `H' = h`, when one exists.
    pub fn antiderivative(&self, r: Radius) -> Option<f64> {
        match self {
            WeightFunction::LogMeasure => Some(r.log_inv_gap()),
            WeightFunction::Power { p } if *p == 1.0 => Some(r.log_inv_gap()),
            WeightFunction::Power { p } => Some(r.gap().powf(1.0 - p) / (p - 1.0)),
            WeightFunction::Tabulated { .. } => None,
        }
    }

    /// `∫_a^b h(r) dr` for `a ≤ b`, given as radii.
    pub fn integral(&self, a: Radius, b: Radius) -> Result<f64> {
        if a.gap() < b.gap() {
            return Err(WvError::BadParam("integral bounds out of order".into()));
        }
        if a.gap() == b.gap() {
            return Ok(0.0);
        }
        match self {
            WeightFunction::LogMeasure => Ok((a.gap() / b.gap()).ln()),
            WeightFunction::Power { p } if *p == 1.0 => Ok((a.gap() / b.gap()).ln()),
            WeightFunction::Power { .. } => {
                let ha = self.antiderivative(a).unwrap_or(0.0);
                let hb = self.antiderivative(b).unwrap_or(0.0);
                Ok(hb - ha)
            }
            WeightFunction::Tabulated { .. } => {
                // dr = e^{-x} dx with x = ln(1/s)
                let f = |x: f64| (self.log_eval_x(x) - x).exp();
                adaptive(&f, a.log_inv_gap(), b.log_inv_gap(), QUAD_RTOL, 0)
            }
        }
    }
}

pub(crate) const QUAD_RTOL: f64 = 1e-8;
const QUAD_MAX_DEPTH: u32 = 30;

/// Double-exponential quadrature with interval bisection until the error
/// estimate meets `rtol` relative to the local integral.
fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rtol: f64, depth: u32) -> Result<f64> {
    let rough = quadrature::double_exponential::integrate(f, a, b, 1e-6 * (b - a));
    let target = (rtol * rough.integral.abs()).max(f64::MIN_POSITIVE);
    let out = quadrature::double_exponential::integrate(f, a, b, target * 0.1);
    if out.integral.is_finite() && out.error_estimate <= target {
        return Ok(out.integral);
    }
    if depth >= QUAD_MAX_DEPTH {
        return Err(WvError::Numeric(format!(
            "h-measure quadrature did not converge on [{a}, {b}] in x = ln(1/s)"
        )));
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive(f, a, mid, rtol, depth + 1)? + adaptive(f, mid, b, rtol, depth + 1)?)
}
