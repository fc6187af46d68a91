use serde::{Deserialize, Serialize};

use super::weight::WeightFunction;
use crate::error::{Result, WvError};
use crate::series::Radius;

/// An open interval `(lo, hi)` of radii with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusInterval {
    pub lo: Radius,
    pub hi: Radius,
}

impl RadiusInterval {
    pub fn new(lo: Radius, hi: Radius) -> Result<Self> {
        if lo.gap() <= hi.gap() {
            return Err(WvError::BadParam(format!("interval ({}, {}) is empty", lo.r(), hi.r())));
        }
        Ok(RadiusInterval { lo, hi })
    }

    pub fn from_r(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Radius::from_r(lo)?, Radius::from_r(hi)?)
    }

    /// Strict containment, compared through the gaps.
    pub fn contains(&self, r: Radius) -> bool {
        self.lo.gap() > r.gap() && r.gap() > self.hi.gap()
    }
}

/// Total h-measure of a family of disjoint intervals.
pub fn h_measure(intervals: &[RadiusInterval], h: &WeightFunction) -> Result<f64> {
    intervals.iter().map(|iv| h.integral(iv.lo, iv.hi)).sum()
}

/// Flagged radii as disjoint open intervals together with their h-measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    intervals: Vec<RadiusInterval>,
    h_mass: f64,
}

impl ExceptionalSet {
    pub fn empty() -> Self {
        ExceptionalSet {
            intervals: Vec::new(),
            h_mass: 0.0,
        }
    }

    /// Sorts the intervals by position and rejects overlaps.
    pub fn from_intervals(mut intervals: Vec<RadiusInterval>, h: &WeightFunction) -> Result<Self> {
        intervals.sort_by(|a, b| b.lo.gap().total_cmp(&a.lo.gap()));
        if intervals.windows(2).any(|w| w[0].hi.gap() < w[1].lo.gap()) {
            return Err(WvError::BadParam("exceptional intervals overlap".into()));
        }
        let h_mass = h_measure(&intervals, h)?;
        Ok(ExceptionalSet { intervals, h_mass })
    }

    /// Grid-resolved set: each flagged grid radius contributes its cell, bounded by
    /// the geometric midpoints in `s` with its neighbours. Adjacent cells merge.
    /// The grid must be strictly increasing in `r`.
    pub fn from_grid_flags(grid: &[Radius], flags: &[bool], h: &WeightFunction) -> Result<Self> {
        if grid.len() != flags.len() {
            return Err(WvError::BadParam("grid and flags differ in length".into()));
        }
        if grid.windows(2).any(|w| w[1].gap() >= w[0].gap()) {
            return Err(WvError::BadParam("grid must be strictly increasing in r".into()));
        }
        let cells = grid_cells(grid)?;
        let mut intervals: Vec<RadiusInterval> = Vec::new();
        for (cell, _) in cells.iter().zip(flags).filter(|(_, &f)| f) {
            match intervals.last_mut() {
                Some(last) if last.hi == cell.lo => last.hi = cell.hi,
                _ => intervals.push(*cell),
            }
        }
        Self::from_intervals(intervals, h)
    }

    pub fn intervals(&self) -> &[RadiusInterval] {
        &self.intervals
    }

    pub fn h_mass(&self) -> f64 {
        self.h_mass
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, r: Radius) -> bool {
        self.intervals.iter().any(|iv| iv.contains(r))
    }

    /// True when the open interval between the two radii lies inside one
    /// component (an empty interval counts as covered).
    pub fn covers(&self, a: Radius, b: Radius) -> bool {
        let (lo, hi) = if a.gap() >= b.gap() { (a, b) } else { (b, a) };
        if lo.gap() == hi.gap() {
            return true;
        }
        self.intervals
            .iter()
            .any(|iv| iv.lo.gap() >= lo.gap() && hi.gap() >= iv.hi.gap())
    }

    /// The first component whose closure reaches `r` from above, i.e. with `r ∈ (lo, hi)`.
    pub(crate) fn component_of(&self, r: Radius) -> Option<&RadiusInterval> {
        self.intervals.iter().find(|iv| iv.contains(r))
    }
}

/// Cells `(√(s_{j-1}s_j), √(s_j s_{j+1}))` around each grid radius; the end cells
/// extend half a step outward using the neighbouring ratio and the outer edge is clipped to `s ≤ 1`.
pub fn grid_cells(grid: &[Radius]) -> Result<Vec<RadiusInterval>> {
    let n = grid.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let s: Vec<f64> = grid.iter().map(|r| r.gap()).collect();
    let edge = |i: usize| -> f64 { (s[i] * s[i + 1]).sqrt() };
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let lo = if j > 0 {
            edge(j - 1)
        } else if n > 1 {
            (s[0] * (s[0] / s[1]).sqrt()).min(1.0)
        } else {
            s[0]
        };
        let hi = if j + 1 < n {
            edge(j)
        } else if n > 1 {
            s[n - 1] * (s[n - 1] / s[n - 2]).sqrt()
        } else {
            s[0]
        };
        if lo <= hi {
            return Err(WvError::BadParam("grid too coarse to form cells".into()));
        }
        out.push(RadiusInterval::new(Radius::from_gap(lo)?, Radius::from_gap(hi)?)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_examples() {
        let h = WeightFunction::LogMeasure;
        let iv = RadiusInterval::from_r(0.5, 0.75).unwrap();
        assert!((h_measure(&[iv], &h).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(h_measure(&[], &h).unwrap(), 0.0);
        let iv = RadiusInterval::from_r(0.0, 0.999).unwrap();
        assert!((h_measure(&[iv], &h).unwrap() - 6.907755278982137).abs() < 1e-12);
    }

    #[test]
    fn grid_cells_tile_the_range() {
        let grid: Vec<Radius> = (1..=12)
            .map(|j| Radius::from_gap(10f64.powf(-(j as f64) / 4.0)).unwrap())
            .collect();
        let cells = grid_cells(&grid).unwrap();
        for w in cells.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
        }
        for (c, r) in cells.iter().zip(&grid) {
            assert!(c.contains(*r));
        }
        let h = WeightFunction::LogMeasure;
        // each interior cell has logarithmic measure ln(10)/4
        let m = h_measure(&cells[3..4], &h).unwrap();
        assert!((m - 10f64.ln() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn flagged_cells_merge() {
        let grid: Vec<Radius> = (1..=8)
            .map(|j| Radius::from_gap(10f64.powf(-(j as f64) / 2.0)).unwrap())
            .collect();
        let flags = [false, true, true, false, false, true, false, true];
        let h = WeightFunction::LogMeasure;
        let e = ExceptionalSet::from_grid_flags(&grid, &flags, &h).unwrap();
        assert_eq!(e.intervals().len(), 3);
        assert!((e.h_mass() - 4.0 * 10f64.ln() / 2.0).abs() < 1e-12, "{:?}", e);
        assert!(e.contains(grid[1]) && e.contains(grid[2]) && !e.contains(grid[0]));
        assert!(e.covers(grid[1], grid[2]));
        assert!(!e.covers(grid[2], grid[5]));
    }

    #[test]
    fn overlaps_rejected() {
        let h = WeightFunction::LogMeasure;
        let a = RadiusInterval::from_r(0.1, 0.5).unwrap();
        let b = RadiusInterval::from_r(0.4, 0.6).unwrap();
        assert!(ExceptionalSet::from_intervals(vec![a, b], &h).is_err());
        let c = RadiusInterval::from_r(0.5, 0.6).unwrap();
        assert!(ExceptionalSet::from_intervals(vec![c, a], &h).is_ok());
    }
}
