//! Radius sequences `r_1 ≤ r_2 ≤ …` avoiding an exceptional set with
//! `ln k(r_n) ≥ n/2` and `k(r_{n+1}) ≤ e·k(r_n)` across every gap not inside the set.

use super::measure::ExceptionalSet;
use crate::error::{Result, WvError};
use crate::series::Radius;

/// Smallest gap searched; below it `1 - s` is indistinguishable from 1 anyway.
const MIN_GAP: f64 = 1e-300;
const GAP_TOL: f64 = 1e-15;

/// Largest `s` (smallest `r`) with `ln k(1 - s) ≥ target`, by bisection in `ln s`.
fn threshold_gap<K: Fn(Radius) -> f64>(log_k: &K, target: f64) -> Result<Radius> {
    let top = Radius::from_gap(1.0)?;
    if log_k(top) >= target {
        return Ok(top);
    }
    let bottom = Radius::from_gap(MIN_GAP)?;
    if !(log_k(bottom) >= target) {
        return Err(WvError::Exhausted(format!(
            "ln k stays below {target} for s >= {MIN_GAP}"
        )));
    }
    // ok: satisfies, bad: does not; ln s of ok < ln s of bad
    let (mut ok, mut bad) = (MIN_GAP.ln(), 0.0f64);
    for _ in 0..400 {
        let (s_ok, s_bad) = (ok.exp(), bad.exp());
        if s_bad - s_ok <= GAP_TOL * s_bad.max(f64::MIN_POSITIVE) || s_bad - s_ok <= GAP_TOL {
            break;
        }
        let mid = 0.5 * (ok + bad);
        if mid == ok || mid == bad {
            break;
        }
        if log_k(Radius::from_gap(mid.exp())?) >= target {
            ok = mid;
        } else {
            bad = mid;
        }
    }
    Radius::from_gap(ok.exp())
}

/// Builds `r_1, …, r_{n_max}` for the increasing function with logarithm `log_k`.
///
/// Each `r_{n+1}` is the first radius with `ln k ≥ (n+1)/2`, kept at `r_n` when that
/// would move backwards. A candidate inside a component `(a, b)` of `E` is pushed
/// to `b`; if `r_n` lies below `a` it is first raised to `a`, so the jump from
/// `r_n` to `r_{n+1}` happens entirely inside `E`. Raising is safe for the pair
/// `(r_{n-1}, r_n)`: `ln k(a) < (n+1)/2 ≤ ln k(r_{n-1}) + 1`.
pub fn lemma2_sequence<K: Fn(Radius) -> f64>(log_k: K, e: &ExceptionalSet, n_max: usize) -> Result<Vec<Radius>> {
    let mut out: Vec<Radius> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut c = threshold_gap(&log_k, n as f64 / 2.0)?;
        if let Some(prev) = out.last() {
            if c.gap() >= prev.gap() {
                c = *prev;
            }
        }
        if let Some(iv) = e.component_of(c) {
            let (a, b) = (iv.lo, iv.hi);
            if b.gap() <= MIN_GAP {
                return Err(WvError::Exhausted(format!(
                    "exceptional set reaches the boundary at n = {n}"
                )));
            }
            if let Some(prev) = out.last_mut() {
                if prev.gap() > a.gap() {
                    *prev = a;
                }
            }
            c = b;
        }
        if e.contains(c) {
            return Err(WvError::Exhausted(format!("no admissible radius for n = {n}")));
        }
        if !c.is_interior() {
            c = Radius::from_gap(1.0 - f64::EPSILON)?;
        }
        out.push(c);
    }
    if let Err(msg) = check_lemma2(&log_k, e, &out) {
        return Err(WvError::Numeric(format!(
            "constructed sequence fails re-verification: {msg}"
        )));
    }
    Ok(out)
}

/// Verifies the three properties on an explicit sequence `r_1, r_2, …`.
pub fn check_lemma2<K: Fn(Radius) -> f64>(
    log_k: &K,
    e: &ExceptionalSet,
    seq: &[Radius],
) -> std::result::Result<(), String> {
    for (i, r) in seq.iter().enumerate() {
        let n = i + 1;
        if e.contains(*r) {
            return Err(format!("r_{n} = {} lies in E", r.r()));
        }
        if !(log_k(*r) >= n as f64 / 2.0) {
            return Err(format!("ln k(r_{n}) = {} < {}", log_k(*r), n as f64 / 2.0));
        }
    }
    for (i, w) in seq.windows(2).enumerate() {
        let n = i + 1;
        if w[1].gap() > w[0].gap() {
            return Err(format!("r_{} < r_{n}", n + 1));
        }
        if !e.covers(w[0], w[1]) && !(log_k(w[1]) <= 1.0 + log_k(w[0])) {
            return Err(format!("k(r_{}) > e·k(r_{n}) across a gap outside E", n + 1));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{RadiusInterval, WeightFunction};

    fn log_k(r: Radius) -> f64 {
        r.log_inv_gap()
    }

    #[test]
    fn canonical_sequence_without_exceptions() {
        let seq = lemma2_sequence(log_k, &ExceptionalSet::empty(), 5).unwrap();
        for (i, r) in seq.iter().enumerate() {
            let want = (-(i as f64 + 1.0) / 2.0).exp();
            assert!((r.gap() - want).abs() <= 2e-15, "{} vs {}", r.gap(), want);
        }
    }

    #[test]
    fn avoids_initial_interval() {
        let h = WeightFunction::LogMeasure;
        let e = ExceptionalSet::from_intervals(vec![RadiusInterval::from_r(0.0, 0.5).unwrap()], &h).unwrap();
        let seq = lemma2_sequence(log_k, &e, 3).unwrap();
        assert!(seq.iter().all(|r| r.r() >= 0.5));
        check_lemma2(&log_k, &e, &seq).unwrap();
    }

    #[test]
    fn jumps_across_wide_components() {
        let h = WeightFunction::LogMeasure;
        let e = ExceptionalSet::from_intervals(
            vec![
                RadiusInterval::from_r(0.7, 0.99).unwrap(),
                RadiusInterval::from_r(0.995, 0.999).unwrap(),
                RadiusInterval::from_r(0.9999, 0.999999).unwrap(),
            ],
            &h,
        )
        .unwrap();
        let seq = lemma2_sequence(log_k, &e, 30).unwrap();
        check_lemma2(&log_k, &e, &seq).unwrap();
        assert!(seq.windows(2).all(|w| w[1].gap() <= w[0].gap()));
    }

    #[test]
    fn checker_rejects_bad_sequences() {
        let e = ExceptionalSet::empty();
        let r = |s: f64| Radius::from_gap(s).unwrap();
        assert!(check_lemma2(&log_k, &e, &[r(0.9)]).is_err());
        assert!(check_lemma2(&log_k, &e, &[r(0.5), r(0.01)]).is_err());
    }

    #[test]
    fn exhausted_when_set_reaches_boundary() {
        let h = WeightFunction::LogMeasure;
        let e = ExceptionalSet::from_intervals(
            vec![RadiusInterval::new(Radius::from_r(0.9).unwrap(), Radius::from_gap(MIN_GAP).unwrap()).unwrap()],
            &h,
        )
        .unwrap();
        assert!(matches!(lemma2_sequence(log_k, &e, 10), Err(WvError::Exhausted(_))));
    }
}
