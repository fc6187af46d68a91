use serde::{Deserialize, Serialize};

use crate::error::{Result, WvError};
use crate::phases::PhaseSequence;

/// Empirical gap exponent of a phase sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaStat {
    /// `max_{n_min ≤ n ≤ N-1} ln(θ_n/(θ_{n+1}-θ_n)) / ln n`
    pub max: f64,
    /// The same expression at `n = N - 1`.
    pub tail: f64,
}

/// Tail maximum of `ln(θ_n/(θ_{n+1}-θ_n)) / ln n`, a finite-window proxy for its limsup.
pub fn gamma_stat(theta: &PhaseSequence, n_min: usize) -> Result<GammaStat> {
    if n_min < 2 {
        return Err(WvError::BadParam(format!("n_min = {n_min} must be at least 2")));
    }
    if theta.len() < n_min + 2 {
        return Err(WvError::BadParam(format!(
            "need at least {} phases, have {}",
            n_min + 2,
            theta.len()
        )));
    }
    let last = theta.len() - 2;
    let mut max = f64::NEG_INFINITY;
    let mut tail = 0.0;
    for n in n_min..=last {
        let v = theta.log_gap_ratio(n)? / (n as f64).ln();
        max = max.max(v);
        tail = v;
    }
    Ok(GammaStat { max, tail })
}
