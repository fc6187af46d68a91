//! Log-domain evaluation of the radial growth quantities of a power series.
//!
//! Every term `|a_n| r^n` is handled as `ln|a_n| + n ln r`. Sums are formed
//! after factoring out the maximal term, so all exponentiated values lie in
//! `(0, 1]`, and accumulated with compensated summation.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WvError};
use crate::series::summation::Neumaier;
use crate::series::{CoeffKind, CoefficientSequence, Radius};

pub const DEFAULT_MARGIN_NATS: f64 = 46.0;
pub const DEFAULT_N_CAP: u64 = 10_000_000;
/// Negative variances closer to zero than this are rounding noise.
pub const VARIANCE_CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesOptions {
    /// Dropped terms lie below `μ_f(r)·e^{-margin_nats}`.
    pub margin_nats: f64,
    /// Largest index the scan may reach before reporting a non-analytic series.
    pub n_cap: u64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            margin_nats: DEFAULT_MARGIN_NATS,
            n_cap: DEFAULT_N_CAP,
        }
    }
}

impl SeriesOptions {
    fn validate(&self) -> Result<()> {
        if !(self.margin_nats > 0.0 && self.margin_nats.is_finite()) {
            return Err(WvError::BadParam(format!(
                "margin {} must be positive",
                self.margin_nats
            )));
        }
        Ok(())
    }
}

/// Result of the maximal-term scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub log_mu: f64,
    pub nu: u64,
    /// Last index included in every sum.
    pub trunc_n: u64,
    /// `ln` of a certified bound on `Σ_{n > trunc_n} |a_n| r^n / μ_f(r)`.
    pub log_tail_bound: f64,
}

#[inline]
fn term(seq: &CoefficientSequence, x: f64, n: u64) -> f64 {
    let c = seq.log_coeff(n);
    if c == f64::NEG_INFINITY {
        c
    } else {
        c + n as f64 * x
    }
}

/// Scans the terms once: maximal term, central index and truncation index.
pub fn scan(seq: &CoefficientSequence, r: Radius, opts: &SeriesOptions) -> Result<Truncation> {
    r.require_interior()?;
    opts.validate()?;
    let x = r.ln_r();
    if let CoeffKind::Table { log_abs, .. } = seq.kind() {
        return Ok(scan_table(log_abs, x, opts.margin_nats));
    }
    // Builtin log-coefficients are concave in n, so terms are unimodal and the
    // ratio of consecutive terms is nonincreasing once past the peak.
    let mut best = f64::NEG_INFINITY;
    let mut nu = 0u64;
    let mut prev = f64::NEG_INFINITY;
    let mut n = 0u64;
    while n <= opts.n_cap {
        let t = term(seq, x, n);
        if t > best {
            best = t;
            nu = n;
        } else if t < best - opts.margin_nats && t < prev {
            let t1 = term(seq, x, n + 1);
            let t2 = term(seq, x, n + 2);
            let ratio = (t2 - t1).exp();
            if !(ratio < 1.0) {
                return Err(WvError::Numeric(format!("terms not decaying past n = {n}")));
            }
            let log_tail_bound = (t1 - best) - (-ratio).ln_1p();
            return Ok(Truncation {
                log_mu: best,
                nu,
                trunc_n: n,
                log_tail_bound,
            });
        }
        prev = t;
        n += 1;
    }
    Err(WvError::NonAnalytic { n_cap: opts.n_cap })
}

fn scan_table(log_abs: &[f64], x: f64, margin: f64) -> Truncation {
    let terms: Vec<f64> = log_abs
        .iter()
        .enumerate()
        .map(|(n, &c)| if c == f64::NEG_INFINITY { c } else { c + n as f64 * x })
        .collect();
    let (mut best, mut nu) = (f64::NEG_INFINITY, 0usize);
    for (n, &t) in terms.iter().enumerate() {
        if t > best {
            best = t;
            nu = n;
        }
    }
    let threshold = best - margin;
    let last_big = terms.iter().rposition(|&t| t >= threshold).unwrap_or(nu);
    let trunc = if last_big + 1 >= terms.len() {
        terms.len() - 1
    } else {
        last_big + 1
    };
    let log_tail_bound = crate::series::summation::log_sum_exp(terms[trunc + 1..].iter().map(|t| t - best));
    Truncation {
        log_mu: best,
        nu: nu as u64,
        trunc_n: trunc as u64,
        log_tail_bound,
    }
}

/// Maximal term `ln μ_f(r)` and the smallest index attaining it.
pub fn max_term(seq: &CoefficientSequence, r: Radius, opts: &SeriesOptions) -> Result<(f64, u64)> {
    let t = scan(seq, r, opts)?;
    Ok((t.log_mu, t.nu))
}

/// Truncation index for the given margin with the default scan cap.
pub fn truncation_index(seq: &CoefficientSequence, r: Radius, margin_nats: f64) -> Result<u64> {
    let opts = SeriesOptions {
        margin_nats,
        ..SeriesOptions::default()
    };
    Ok(scan(seq, r, &opts)?.trunc_n)
}

/// Smallest index whose term is within `margin + ln(trunc_n + 1)` nats of the
/// maximal term. Dropping the terms below it changes any sum by less than
/// `μ_f(r)·e^{-margin}`.
pub fn window_start(seq: &CoefficientSequence, r: Radius, tr: &Truncation, margin: f64) -> u64 {
    let x = r.ln_r();
    let threshold = tr.log_mu - margin - ((tr.trunc_n + 1) as f64).ln();
    if seq.table_len().is_some() {
        return (0..=tr.nu).find(|&n| term(seq, x, n) >= threshold).unwrap_or(tr.nu);
    }
    // terms increase on [0, nu]
    let (mut lo, mut hi) = (0u64, tr.nu);
    if term(seq, x, 0) >= threshold {
        return 0;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if term(seq, x, mid) >= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Normalised sums over `n ≤ trunc_n` with weights `|a_n| r^n / μ`.
#[derive(Clone, Copy, Debug)]
struct Sums {
    w: f64,
    w2: f64,
    /// first and second moments of `n - ν`
    m1: f64,
    m2: f64,
}

fn sums(seq: &CoefficientSequence, r: Radius, tr: &Truncation) -> Sums {
    let x = r.ln_r();
    let (mut w, mut w2, mut m1, mut m2) = (Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new());
    let nu = tr.nu as f64;
    for n in 0..=tr.trunc_n {
        let d = term(seq, x, n) - tr.log_mu;
        if d < -745.0 {
            continue;
        }
        let e = d.exp();
        let k = n as f64 - nu;
        w.add(e);
        w2.add(e * e);
        m1.add(k * e);
        m2.add(k * k * e);
    }
    Sums {
        w: w.value(),
        w2: w2.value(),
        m1: m1.value(),
        m2: m2.value(),
    }
}

/// `ln G_f(r) = ln Σ |a_n| r^n`.
pub fn log_g(seq: &CoefficientSequence, r: Radius, opts: &SeriesOptions) -> Result<f64> {
    let tr = scan(seq, r, opts)?;
    Ok(tr.log_mu + sums(seq, r, &tr).w.ln())
}

/// `ln S_f(r) = ½ ln Σ |a_n|² r^{2n}`.
pub fn log_s(seq: &CoefficientSequence, r: Radius, opts: &SeriesOptions) -> Result<f64> {
    let tr = scan(seq, r, opts)?;
    Ok(tr.log_mu + 0.5 * sums(seq, r, &tr).w2.ln())
}

fn moments_from(tr: &Truncation, s: &Sums) -> Result<(f64, f64)> {
    let mean = s.m1 / s.w;
    let a = tr.nu as f64 + mean;
    let mut b2 = s.m2 / s.w - mean * mean;
    if b2 < 0.0 {
        if b2 >= -VARIANCE_CLAMP {
            b2 = 0.0;
        } else {
            return Err(WvError::Numeric(format!("negative variance {b2}")));
        }
    }
    Ok((a.max(0.0), b2))
}

/// `A(r) = d ln G_f / d ln r` and `B²(r) = d² ln G_f / d(ln r)²`, the mean and
/// variance of the index distribution `P(n) = |a_n| r^n / G_f(r)`.
pub fn moments_ab(seq: &CoefficientSequence, r: Radius, opts: &SeriesOptions) -> Result<(f64, f64)> {
    let tr = scan(seq, r, opts)?;
    moments_from(&tr, &sums(seq, r, &tr))
}

/// Per-radius record of the growth quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub r: Radius,
    pub log_mu: f64,
    pub nu: u64,
    pub log_g: f64,
    pub log_s: f64,
    pub a: f64,
    pub b2: f64,
    pub log_m: Option<f64>,
    pub delta_h: Option<f64>,
    pub trunc_n: u64,
    pub log_tail_bound: f64,
}

impl GrowthProfile {
    /// All `t`-independent quantities at `r`; `log_m` and `delta_h` are left empty.
    pub fn compute(seq: &CoefficientSequence, r: Radius, opts: &SeriesOptions) -> Result<Self> {
        let tr = scan(seq, r, opts)?;
        let s = sums(seq, r, &tr);
        let (a, b2) = moments_from(&tr, &s)?;
        Ok(GrowthProfile {
            r,
            log_mu: tr.log_mu,
            nu: tr.nu,
            log_g: tr.log_mu + s.w.ln(),
            log_s: tr.log_mu + 0.5 * s.w2.ln(),
            a,
            b2,
            log_m: None,
            delta_h: None,
            trunc_n: tr.trunc_n,
            log_tail_bound: tr.log_tail_bound,
        })
    }

    pub fn truncation(&self) -> Truncation {
        Truncation {
            log_mu: self.log_mu,
            nu: self.nu,
            trunc_n: self.trunc_n,
            log_tail_bound: self.log_tail_bound,
        }
    }
}
