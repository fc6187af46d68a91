use serde::{Deserialize, Serialize};

use crate::error::{Result, WvError};

/// A radius `r = 1 - s` in the unit disk, stored through its gap `s`.
///
/// Storing `s` keeps full relative precision for radii such as `1 - 1e-12`,
/// where `r` itself would round to a handful of significant bits of `1 - r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Radius {
    s: f64,
}

impl Radius {
    /// Builds a radius from its gap `s = 1 - r`, `s ∈ (0, 1]`.
    pub fn from_gap(s: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(WvError::BadParam(format!("radius gap s = {s} not in (0, 1]")));
        }
        Ok(Radius { s })
    }

    pub fn from_r(r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(WvError::BadParam(format!("radius r = {r} not in [0, 1)")));
        }
        Self::from_gap(1.0 - r)
    }

    /// Builds the radius with `ln r = x` for `x < 0`.
    pub fn from_log_r(x: f64) -> Result<Self> {
        if !(x < 0.0) {
            return Err(WvError::BadParam(format!("ln r = {x} must be negative")));
        }
        Self::from_gap(-x.exp_m1())
    }

    #[inline]
    pub fn gap(&self) -> f64 {
        self.s
    }

    #[inline]
    pub fn r(&self) -> f64 {
        1.0 - self.s
    }

    /// `ln r`, computed as `ln(1 - s)` without forming `1 - s`.
    #[inline]
    pub fn ln_r(&self) -> f64 {
        (-self.s).ln_1p()
    }

    /// `ln(1/s) = -ln(1 - r)`, the natural abscissa for plots near the boundary.
    #[inline]
    pub fn log_inv_gap(&self) -> f64 {
        -self.s.ln()
    }

    /// True for `r ∈ (0, 1)`, where growth quantities are defined.
    #[inline]
    pub fn is_interior(&self) -> bool {
        self.s < 1.0
    }

    pub(crate) fn require_interior(&self) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(WvError::BadParam("radius must lie in (0, 1)".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_r_is_accurate_near_one() {
        let r = Radius::from_gap(1e-12).unwrap();
        let expected = -1e-12 - 0.5e-24;
        assert!((r.ln_r() - expected).abs() <= 1e-27);
    }

    #[test]
    fn from_log_r_round_trips() {
        let r = Radius::from_log_r(-0.01).unwrap();
        assert!((r.ln_r() + 0.01).abs() < 1e-17);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Radius::from_gap(0.0).is_err());
        assert!(Radius::from_gap(1.5).is_err());
        assert!(Radius::from_gap(f64::NAN).is_err());
        assert!(Radius::from_r(1.0).is_err());
        assert!(Radius::from_log_r(0.0).is_err());
    }
}
