//! Search for a point where a positive-coefficient trigonometric sum has a large real part.

use std::f64::consts::TAU;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Result, WvError};
use crate::maxmod::frac_mul;
use crate::phases::{PhaseFraction, PhaseSequence};

const REFINE: usize = 5;
const T_TOL: f64 = 1e-13;
/// Frequencies up to this size are reduced with a single exact product in doubles.
const EXACT_F64: u64 = 1 << 53;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KahaneResult {
    pub t0: f64,
    pub re_q: f64,
    pub coeff_sum: f64,
    /// `Re Q(t0) / Σ c_n`.
    pub ratio: f64,
    pub grid_n: usize,
    pub terms: usize,
}

enum Freq {
    Small(u64),
    Big(num_bigint::BigUint),
}

/// `Re Σ c_n e^{iθ_n t}` with `θ_n t` reduced through `v = t/2π`.
struct Sum<'a> {
    coeffs: &'a [f64],
    freqs: Vec<Freq>,
}

impl Sum<'_> {
    fn eval(&self, t: f64) -> f64 {
        let v = t / TAU;
        let v = v - v.floor();
        let mut big_u = None;
        let mut acc = 0.0;
        for (c, f) in self.coeffs.iter().zip(&self.freqs) {
            let turns = match f {
                Freq::Small(n) => frac_mul(*n, v),
                Freq::Big(n) => {
                    let u = big_u.get_or_insert_with(|| {
                        PhaseFraction::from_f64(if v >= 1.0 { 0.0 } else { v }, 1100).expect("dyadic double fits")
                    });
                    u.turns(n)
                }
            };
            acc += c * (TAU * turns).cos();
        }
        acc
    }
}

/// Grid search over `grid_n` equally spaced points of `[t_lo, t_hi]`, then
/// golden-section refinement around the best few; ties go to the smaller `t`.
pub fn kahane_search(
    theta: &PhaseSequence,
    coeffs: &[f64],
    t_lo: f64,
    t_hi: f64,
    grid_n: usize,
) -> Result<KahaneResult> {
    if !(t_lo.is_finite() && t_hi.is_finite() && t_lo < t_hi) {
        return Err(WvError::BadParam(format!("empty interval [{t_lo}, {t_hi}]")));
    }
    if coeffs.is_empty() || coeffs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(WvError::BadParam(
            "coefficients must be nonnegative and nonempty".into(),
        ));
    }
    if grid_n < 2 {
        return Err(WvError::BadParam("grid needs at least 2 points".into()));
    }
    if theta.len() < coeffs.len() {
        return Err(WvError::PhasesTooShort {
            required: coeffs.len(),
            available: theta.len(),
        });
    }
    let freqs = (0..coeffs.len())
        .map(|n| {
            let th = theta.theta(n).into_owned();
            match th.to_u64() {
                Some(x) if x < EXACT_F64 => Freq::Small(x),
                _ => Freq::Big(th),
            }
        })
        .collect();
    let sum = Sum { coeffs, freqs };
    let step = (t_hi - t_lo) / (grid_n - 1) as f64;
    let at = |i: usize| if i + 1 == grid_n { t_hi } else { t_lo + step * i as f64 };

    let mut grid: Vec<(f64, usize)> = (0..grid_n).map(|i| (sum.eval(at(i)), i)).collect();
    grid.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = (grid[0].0, at(grid[0].1));
    let mut taken: Vec<usize> = Vec::new();
    for &(_, i) in &grid {
        if taken.len() == REFINE {
            break;
        }
        if taken.iter().any(|&j| i.abs_diff(j) <= 1) {
            continue;
        }
        taken.push(i);
        let lo = at(i.saturating_sub(1));
        let hi = at((i + 1).min(grid_n - 1));
        let cand = golden(&sum, lo, hi);
        if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
            best = cand;
        }
    }
    let coeff_sum: f64 = coeffs.iter().sum();
    Ok(KahaneResult {
        t0: best.1,
        re_q: best.0,
        coeff_sum,
        ratio: best.0 / coeff_sum,
        grid_n,
        terms: coeffs.len(),
    })
}

fn golden(sum: &Sum<'_>, lo: f64, hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (sum.eval(c), sum.eval(d));
    let tol = T_TOL * (1.0 + lo.abs().max(hi.abs()));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = sum.eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = sum.eval(d);
        }
    }
    if fc >= fd {
        (fc, c)
    } else {
        (fd, d)
    }
}

/// Uses the `[kahane]` table of the config with the configured phases as frequencies.
pub fn run_kahane_search(cfg: &ExperimentConfig) -> Result<KahaneResult> {
    let k = cfg
        .kahane
        .as_ref()
        .ok_or_else(|| WvError::Config("missing [kahane] table".into()))?;
    let theta = cfg.phases.build(k.coeffs.len())?;
    kahane_search(&theta, &k.coeffs, k.t_lo, k.t_hi, k.grid_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phases::gen_geometric;
    use num_bigint::BigUint;

    fn seq(v: &[u64]) -> PhaseSequence {
        PhaseSequence::from_values(v.iter().map(|&x| BigUint::from(x)).collect(), "t").unwrap()
    }

    #[test]
    fn single_term_peaks_at_zero() {
        let r = kahane_search(&seq(&[1]), &[1.0], 0.0, TAU, 1001).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-15);
        assert!(r.t0.abs() < 1e-12 || (r.t0 - TAU).abs() < 1e-12);
    }

    #[test]
    fn aligned_pair() {
        let r = kahane_search(&seq(&[1, 2]), &[1.0, 1.0], 0.0, TAU, 1001).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-15);
        assert_eq!(r.t0, 0.0);
    }

    #[test]
    fn lacunary_sum_against_dense_grid() {
        let theta = gen_geometric(2.0, 20).unwrap();
        let th: Vec<f64> = (0..20).map(|n| theta.theta(n).to_f64().unwrap()).collect();
        let (lo, hi) = (0.1, 0.1 + TAU / th[0] / 64.0);
        let c = vec![1.0; 20];
        let r = kahane_search(&theta, &c, lo, hi, 1 << 18).unwrap();
        let dense = (0..1_000_000)
            .map(|i| {
                let t = lo + (hi - lo) * i as f64 / 999_999.0;
                th.iter().map(|&x| (x * t).cos()).sum::<f64>()
            })
            .fold(f64::MIN, f64::max)
            / 20.0;
        assert!(r.ratio > 0.0);
        assert!(r.ratio >= dense - 1e-9, "{} < {}", r.ratio, dense);
        assert!(r.ratio <= 1.0);
        assert!(r.t0 >= lo && r.t0 <= hi);
    }

    #[test]
    fn huge_frequencies_use_exact_reduction() {
        let big = (BigUint::from(1u32) << 200u32) + 1u32;
        let theta = PhaseSequence::from_values(vec![BigUint::from(1u32), big], "big").unwrap();
        let r = kahane_search(&theta, &[1.0, 1.0], 0.0, 1.0, 257).unwrap();
        assert!(r.ratio > 0.5 && r.ratio <= 1.0);
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(matches!(
            kahane_search(&seq(&[1]), &[1.0], 1.0, 1.0, 10),
            Err(WvError::BadParam(_))
        ));
    }
}
