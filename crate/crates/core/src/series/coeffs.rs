use serde::{Deserialize, Serialize};

use crate::error::{Result, WvError};
use crate::series::Radius;

/// Coefficient model of `f(z) = Σ a_n z^n`, described through `ln|a_n|` and `arg a_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoeffKind {
    /// `a_n = 1`, i.e. `f(z) = 1/(1 - z)`.
    Geometric,
    /// `ln a_n = √n`.
    SqrtExp,
    /// `ln a_n = n^ε` with `ε ∈ (0, 1)`.
    PowerExp { epsilon: f64 },
    /// Finite list; `a_n = 0` beyond it. `-∞` entries encode zero coefficients.
    Table { log_abs: Vec<f64>, args: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    kind: CoeffKind,
    label: String,
}

impl CoefficientSequence {
    pub fn geometric() -> Self {
        CoefficientSequence {
            kind: CoeffKind::Geometric,
            label: "GEOMETRIC".into(),
        }
    }

    pub fn sqrt_exp() -> Self {
        CoefficientSequence {
            kind: CoeffKind::SqrtExp,
            label: "SQRT_EXP".into(),
        }
    }

    pub fn power_exp(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(WvError::BadParam(format!("POWER_EXP exponent {epsilon} not in (0, 1)")));
        }
        Ok(CoefficientSequence {
            kind: CoeffKind::PowerExp { epsilon },
            label: format!("POWER_EXP({epsilon})"),
        })
    }

    /// Finite table of magnitudes `|a_n|` with zero arguments.
    pub fn table(values: &[f64]) -> Result<Self> {
        Self::table_with_args(values, &vec![0.0; values.len()])
    }

    pub fn table_with_args(values: &[f64], args: &[f64]) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(WvError::BadParam(format!(
                "table magnitude {v} is not a finite nonnegative number"
            )));
        }
        Self::table_from_logs(values.iter().map(|v| v.ln()).collect(), args.to_vec())
    }

    /// Table given directly by `ln|a_n|` (`-∞` allowed) and `arg a_n`.
    pub fn table_from_logs(log_abs: Vec<f64>, args: Vec<f64>) -> Result<Self> {
        if log_abs.is_empty() {
            return Err(WvError::BadParam("empty coefficient table".into()));
        }
        if args.len() != log_abs.len() {
            return Err(WvError::BadParam(format!(
                "table has {} magnitudes but {} arguments",
                log_abs.len(),
                args.len()
            )));
        }
        if log_abs.iter().any(|x| x.is_nan() || *x == f64::INFINITY) || args.iter().any(|a| !a.is_finite()) {
            return Err(WvError::BadParam(
                "table entries must be finite (or -inf magnitudes)".into(),
            ));
        }
        if log_abs.iter().all(|x| *x == f64::NEG_INFINITY) {
            return Err(WvError::BadParam("table has no nonzero coefficient".into()));
        }
        Ok(CoefficientSequence {
            label: format!("TABLE[{}]", log_abs.len()),
            kind: CoeffKind::Table { log_abs, args },
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> &CoeffKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `ln|a_n|`.
    #[inline]
    pub fn log_coeff(&self, n: u64) -> f64 {
        match &self.kind {
            CoeffKind::Geometric => 0.0,
            CoeffKind::SqrtExp => (n as f64).sqrt(),
            CoeffKind::PowerExp { epsilon } => {
                if n == 0 {
                    0.0
                } else {
                    (n as f64).powf(*epsilon)
                }
            }
            CoeffKind::Table { log_abs, .. } => log_abs.get(n as usize).copied().unwrap_or(f64::NEG_INFINITY),
        }
    }

    /// `arg a_n` in radians.
    #[inline]
    pub fn arg(&self, n: u64) -> f64 {
        match &self.kind {
            CoeffKind::Table { args, .. } => args.get(n as usize).copied().unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// Number of stored terms for finite tables.
    pub fn table_len(&self) -> Option<u64> {
        match &self.kind {
            CoeffKind::Table { log_abs, .. } => Some(log_abs.len() as u64),
            _ => None,
        }
    }

    /// True when every coefficient is a nonnegative real.
    pub fn has_zero_args(&self) -> bool {
        match &self.kind {
            CoeffKind::Table { args, .. } => args.iter().all(|a| *a == 0.0),
            _ => true,
        }
    }

    /// Samples `n = 0, 1, 2, 4, …, n_cap` and checks that the last sampled
    /// term sits well below the largest sampled one.
    pub fn validate_analytic(&self, r: Radius, n_cap: u64) -> Result<()> {
        r.require_interior()?;
        if self.table_len().is_some() {
            return Ok(());
        }
        let x = r.ln_r();
        let term = |n: u64| self.log_coeff(n) + n as f64 * x;
        let mut best = term(0);
        let mut n = 1u64;
        while n < n_cap {
            best = best.max(term(n));
            n = n.saturating_mul(2);
        }
        if term(n_cap) < best - 1.0 {
            Ok(())
        } else {
            Err(WvError::NonAnalytic { n_cap })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_log_coefficients() {
        assert_eq!(CoefficientSequence::geometric().log_coeff(17), 0.0);
        assert_eq!(CoefficientSequence::sqrt_exp().log_coeff(2500), 50.0);
        let p = CoefficientSequence::power_exp(0.5).unwrap();
        assert_eq!(p.log_coeff(0), 0.0);
        assert!((p.log_coeff(49) - 7.0).abs() < 1e-14);
    }

    #[test]
    fn table_is_zero_beyond_its_length() {
        let t = CoefficientSequence::table(&[1.0, 2.0]).unwrap();
        assert_eq!(t.log_coeff(0), 0.0);
        assert_eq!(t.log_coeff(1), 2f64.ln());
        assert_eq!(t.log_coeff(2), f64::NEG_INFINITY);
        assert_eq!(t.table_len(), Some(2));
    }

    #[test]
    fn rejects_bad_tables_and_exponents() {
        assert!(CoefficientSequence::table(&[]).is_err());
        assert!(CoefficientSequence::table(&[0.0, 0.0]).is_err());
        assert!(CoefficientSequence::table(&[-1.0]).is_err());
        assert!(CoefficientSequence::table_with_args(&[1.0], &[0.0, 1.0]).is_err());
        assert!(CoefficientSequence::power_exp(1.0).is_err());
        assert!(CoefficientSequence::power_exp(0.0).is_err());
    }

    #[test]
    fn log_coeff_is_deterministic() {
        let p = CoefficientSequence::power_exp(0.3).unwrap();
        for n in [0u64, 1, 10, 12345, 9_999_999] {
            assert_eq!(p.log_coeff(n).to_bits(), p.log_coeff(n).to_bits());
        }
    }

    #[test]
    fn analytic_validator() {
        let r = Radius::from_gap(1e-3).unwrap();
        assert!(CoefficientSequence::sqrt_exp().validate_analytic(r, 10_000_000).is_ok());
        // the scan cap is too small for the peak at n = 2.5e5
        assert!(CoefficientSequence::sqrt_exp().validate_analytic(r, 1000).is_err());
    }
}
