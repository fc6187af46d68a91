//! Unrotated radius sweeps: growth profile, sharpness ratio, the lower ratio for
//! `exp(n^ε)` coefficients, and the growth-bound audit.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::output::{fmt_opt, fmt_real, PROFILE_COLUMNS};
use crate::error::{Result, WvError};
use crate::maxmod::{max_modulus_with, MaxModOptions, Rotation};
use crate::series::{CoefficientSequence, GrowthProfile, Radius};
use crate::stats::{delta_denominator, delta_h, growth_bounds, ExceptionalSet};

pub(crate) fn maxmod_options(cfg: &ExperimentConfig) -> MaxModOptions {
    MaxModOptions {
        series: cfg.series,
        ..MaxModOptions::default()
    }
}

/// Profile at `r` with `log_m` from the unrotated series, errors tagged with the radius.
pub(crate) fn unrotated_profile(seq: &CoefficientSequence, r: Radius, cfg: &ExperimentConfig) -> Result<GrowthProfile> {
    let at = |e: WvError| e.at_radius(r.gap());
    let mut p = GrowthProfile::compute(seq, r, &cfg.series).map_err(at)?;
    let m = max_modulus_with(seq, Rotation::Identity, &p, &maxmod_options(cfg)).map_err(at)?;
    p.log_m = Some(m.log_m);
    p.delta_h = delta_h(m.log_m, p.log_mu, r, &cfg.weight).ok();
    Ok(p)
}

pub(crate) fn profile_fields(p: &GrowthProfile, log_m: f64, delta: Option<f64>) -> [String; 10] {
    [
        fmt_real(p.r.r()),
        fmt_real(p.r.gap()),
        fmt_real(p.log_mu),
        p.nu.to_string(),
        fmt_real(p.log_g),
        fmt_real(p.log_s),
        fmt_real(p.a),
        fmt_real(p.b2),
        fmt_real(log_m),
        fmt_opt(delta),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRun {
    pub label: String,
    pub rows: Vec<GrowthProfile>,
}

impl ProfileRun {
    pub fn to_csv(&self) -> String {
        let mut out = PROFILE_COLUMNS.join(",");
        out.push('\n');
        for p in &self.rows {
            let log_m = p.log_m.unwrap_or(f64::NAN);
            let _ = writeln!(out, "{}", profile_fields(p, log_m, p.delta_h).join(","));
        }
        out
    }
}

/// One unrotated profile per grid radius (`t = 0`).
pub fn run_profile(cfg: &ExperimentConfig) -> Result<ProfileRun> {
    let seq = cfg.sequence.build()?;
    let rows = cfg
        .grid
        .radii()?
        .into_iter()
        .map(|r| unrotated_profile(&seq, r, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileRun {
        label: seq.label().to_string(),
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub r: f64,
    pub s: f64,
    pub log_ratio: f64,
    pub ratio: f64,
    /// Minimum of the ratio over this and all smaller grid radii.
    pub running_min: f64,
    /// Minimum of the ratio over this and all larger grid radii.
    pub tail_min: f64,
}

/// Behaviour across the last decade of `s`, from `s_start = 10·s_end` (or the
/// first valid radius after it) to the last grid radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecadeDrift {
    pub s_start: f64,
    pub s_end: f64,
    pub ratio_start: f64,
    pub ratio_end: f64,
    pub running_min_start: f64,
    pub running_min_end: f64,
    /// `|ratio_end - ratio_start| / ratio_end`
    pub ratio_drift: f64,
    /// `|running_min_end - running_min_start| / running_min_end`
    pub running_min_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSweep {
    pub points: Vec<RatioPoint>,
    /// Gaps `s` of radii outside the domain of the ratio.
    pub skipped: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub final_decade: Option<DecadeDrift>,
}

fn rel(a: f64, b: f64) -> f64 {
    (b - a).abs() / b.abs()
}

impl RatioSweep {
    fn build(values: Vec<(Radius, Option<f64>)>) -> Self {
        let mut skipped = Vec::new();
        let mut points: Vec<RatioPoint> = Vec::new();
        let mut run = f64::INFINITY;
        for (r, lr) in values {
            match lr.filter(|v| v.is_finite()) {
                Some(lr) => {
                    let ratio = lr.exp();
                    run = run.min(ratio);
                    points.push(RatioPoint {
                        r: r.r(),
                        s: r.gap(),
                        log_ratio: lr,
                        ratio,
                        running_min: run,
                        tail_min: ratio,
                    });
                }
                None => skipped.push(r.gap()),
            }
        }
        let mut tail = f64::INFINITY;
        for p in points.iter_mut().rev() {
            tail = tail.min(p.ratio);
            p.tail_min = tail;
        }
        let min = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
        let max = points.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max);
        let final_decade = points.last().and_then(|last| {
            let cut = 10.0 * last.s * (1.0 + 1e-9);
            let first = points.iter().find(|p| p.s <= cut)?;
            if first.s == last.s {
                return None;
            }
            Some(DecadeDrift {
                s_start: first.s,
                s_end: last.s,
                ratio_start: first.ratio,
                ratio_end: last.ratio,
                running_min_start: first.running_min,
                running_min_end: last.running_min,
                ratio_drift: rel(first.ratio, last.ratio),
                running_min_drift: rel(first.running_min, last.running_min),
            })
        });
        RatioSweep {
            points,
            skipped,
            min,
            max,
            final_decade,
        }
    }
}

/// `ln(M / (h μ ln^{1/2}(hμ)))`, defined where the statistic's denominator is.
fn sharpness_log_ratio(p: &GrowthProfile, cfg: &ExperimentConfig) -> Option<f64> {
    delta_denominator(p.log_mu, p.r, &cfg.weight).ok()?;
    let log_h = cfg.weight.log_eval(p.r);
    Some(p.log_m? - log_h - p.log_mu - 0.5 * (log_h + p.log_mu).ln())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRun {
    pub label: String,
    pub weight: String,
    pub sweep: RatioSweep,
}

/// The ratio `M(r) / (h(r) μ(r) ln^{1/2}(h(r)μ(r)))` over the grid.
pub fn run_sharpness(cfg: &ExperimentConfig) -> Result<SharpnessRun> {
    let prof = run_profile(cfg)?;
    let values = prof.rows.iter().map(|p| (p.r, sharpness_log_ratio(p, cfg))).collect();
    Ok(SharpnessRun {
        label: prof.label,
        weight: cfg.weight.label(),
        sweep: RatioSweep::build(values),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaireRun {
    pub label: String,
    /// `M (1-r) / (μ ln^{1/2}(μ/(1-r)))`
    pub lower: RatioSweep,
    /// `(M / ln^{1/2} M) (1-r) / μ`, expected to stay between two positive constants.
    pub sandwich_min: f64,
    pub sandwich_max: f64,
}

/// Lower and two-sided ratios for `exp(n^ε)` coefficients at `t = 0`.
pub fn run_baire_example(cfg: &ExperimentConfig) -> Result<BaireRun> {
    let prof = run_profile(cfg)?;
    let mut lower = Vec::new();
    let (mut smin, mut smax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &prof.rows {
        let log_m = p.log_m.unwrap_or(f64::NAN);
        let ls = p.r.gap().ln();
        let l = p.log_mu - ls;
        let lr = (l > 0.0).then(|| log_m + ls - p.log_mu - 0.5 * l.ln());
        lower.push((p.r, lr));
        if log_m > 0.0 {
            let sw = (log_m - 0.5 * log_m.ln() + ls - p.log_mu).exp();
            smin = smin.min(sw);
            smax = smax.max(sw);
        }
    }
    Ok(BaireRun {
        label: prof.label,
        lower: RatioSweep::build(lower),
        sandwich_min: smin,
        sandwich_max: smax,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violations {
    pub count: usize,
    /// Gaps `s` of the violating radii.
    pub radii: Vec<f64>,
    /// h-measure of the union of their grid cells.
    pub h_measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsAudit {
    pub eps: f64,
    pub a: Violations,
    pub b2_statement: Violations,
    pub b2_proof: Violations,
    pub g: Violations,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRun {
    pub label: String,
    /// Gaps of radii where every bound is defined (`ln(hμ) > e`, `ln h > 1`).
    pub evaluated: Vec<f64>,
    pub skipped: Vec<f64>,
    pub per_eps: Vec<EpsAudit>,
}

/// Checks `A`, both forms of the `B²` bound and the `G` bound at every grid radius.
pub fn run_bound_audit(cfg: &ExperimentConfig) -> Result<AuditRun> {
    let prof = run_profile(cfg)?;
    let grid: Vec<Radius> = prof.rows.iter().map(|p| p.r).collect();
    let mut evaluated = Vec::new();
    let mut skipped = Vec::new();
    for p in &prof.rows {
        let log_h = cfg.weight.log_eval(p.r);
        match growth_bounds(p.log_mu, log_h, 1.0) {
            Ok(_) => evaluated.push(p.r.gap()),
            Err(_) => skipped.push(p.r.gap()),
        }
    }
    let mut per_eps = Vec::new();
    for &eps in &cfg.audit_eps {
        let mut flags = [
            vec![false; grid.len()],
            vec![false; grid.len()],
            vec![false; grid.len()],
            vec![false; grid.len()],
        ];
        for (i, p) in prof.rows.iter().enumerate() {
            let log_h = cfg.weight.log_eval(p.r);
            let Ok(b) = growth_bounds(p.log_mu, log_h, eps) else {
                continue;
            };
            flags[0][i] = p.a.ln() > b.log_a;
            flags[1][i] = p.b2.ln() > b.log_b2_statement;
            flags[2][i] = p.b2.ln() > b.log_b2_proof;
            flags[3][i] = p.log_g > b.log_g;
        }
        let summarize = |f: &[bool]| -> Result<Violations> {
            let set = ExceptionalSet::from_grid_flags(&grid, f, &cfg.weight)?;
            Ok(Violations {
                count: f.iter().filter(|&&x| x).count(),
                radii: grid.iter().zip(f).filter(|(_, &x)| x).map(|(r, _)| r.gap()).collect(),
                h_measure: set.h_mass(),
            })
        };
        per_eps.push(EpsAudit {
            eps,
            a: summarize(&flags[0])?,
            b2_statement: summarize(&flags[1])?,
            b2_proof: summarize(&flags[2])?,
            g: summarize(&flags[3])?,
        });
    }
    Ok(AuditRun {
        label: prof.label,
        evaluated,
        skipped,
        per_eps,
    })
}
