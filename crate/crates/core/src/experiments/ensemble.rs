//! Monte Carlo over the rotation parameter `u = t/2π`.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::output::{eta_column, quantile_sorted, PROFILE_COLUMNS};
use super::sweeps::{maxmod_options, profile_fields};
use crate::error::{Result, WvError};
use crate::maxmod::{max_modulus_with, Rotation};
use crate::phases::{sample_u, PhaseFraction, MIN_FRACTION_BITS};
use crate::series::{GrowthProfile, Radius};
use crate::stats::{
    corollary_bounds, delta_h, grid_cells, rhs_theorem1, rhs_theorem2, CorollaryBounds, ExceptionalSet,
};

/// Hex digits of `u` written to the CSV; longer fractions are cut with a trailing `..`.
pub const U_HEX_DIGITS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub u_hex: String,
    pub log_m: Vec<f64>,
    pub delta_h: Vec<Option<f64>>,
    /// `flags[k][j]`: `Δ_h > eta[k]` at radius `j`, `None` outside the statistic's domain.
    pub flags: Vec<Vec<Option<bool>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    /// Largest `Δ_h` over the final decade outside the trial's own exceptional set.
    pub tail_sup: Option<f64>,
    /// Cells excluded as the trial's exceptional set, with their h-measure.
    pub excluded_s: Vec<f64>,
    pub excluded_h_measure: f64,
    /// h-measure of `{Δ_h > η}` on the grid, per configured `η`.
    pub eta_h_measure: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusAggregate {
    pub r: f64,
    pub s: f64,
    pub n_valid: usize,
    pub min: Option<f64>,
    pub median: Option<f64>,
    pub p90: Option<f64>,
    pub max: Option<f64>,
    pub median_log_m: f64,
    pub log_mu: f64,
    /// Log of the almost-sure bound with `δ` from the config.
    pub rhs_theorem1: Option<f64>,
    /// Log of the generalised bound with `v(x) = x^α`, `α` the first corollary exponent.
    pub rhs_theorem2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaSummary {
    pub eta: f64,
    pub mean_h_measure: f64,
    pub max_h_measure: f64,
    /// Share of (trial, radius) pairs in the final decade flagged at this level.
    pub final_decade_flag_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleChecks {
    /// Indices of grid radii in the last decade of `s`.
    pub final_decade: Vec<usize>,
    /// Medians at the three largest radii.
    pub top_medians: Vec<Option<f64>>,
    pub median_threshold: f64,
    pub top_medians_below_threshold: bool,
    /// Median at the largest radius is below the median at the smallest radius of the final decade.
    pub median_decreasing: bool,
    pub max_tail_sup: Option<f64>,
    pub tail_ceiling: f64,
    pub tail_sups_below_ceiling: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
/// Constants the ensemble statistics are compared against.
pub struct ReferenceBounds {
    pub quarter: f64,
    pub deterministic: f64,
    #[serde(flatten)]
    pub corollary: CorollaryBounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRun {
    pub label: String,
    pub phases: String,
    pub seed: u64,
    pub fraction_bits: u64,
    pub eta: Vec<f64>,
    pub profiles: Vec<GrowthProfile>,
    pub trials: Vec<TrialRecord>,
    pub trial_summaries: Vec<TrialSummary>,
    pub aggregates: Vec<RadiusAggregate>,
    pub eta_summaries: Vec<EtaSummary>,
    pub bounds: ReferenceBounds,
    pub checks: EnsembleChecks,
}

/// Trial `i` draws from stream `i` of the seeded generator, so adding trials
/// never changes earlier ones.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn u_hex(u: &PhaseFraction) -> String {
    let h = u.to_hex();
    if h.len() > U_HEX_DIGITS {
        format!("{}..", &h[..U_HEX_DIGITS])
    } else {
        h
    }
}

fn final_decade(radii: &[Radius]) -> Vec<usize> {
    let Some(last) = radii.last() else { return Vec::new() };
    let cut = 10.0 * last.gap() * (1.0 + 1e-9);
    (0..radii.len()).filter(|&j| radii[j].gap() <= cut).collect()
}

/// Runs every trial over the grid and aggregates.
pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<EnsembleRun> {
    cfg.validate()?;
    let seq = cfg.sequence.build()?;
    let radii = cfg.grid.radii()?;
    let profiles = radii
        .iter()
        .map(|&r| GrowthProfile::compute(&seq, r, &cfg.series).map_err(|e| e.at_radius(r.gap())))
        .collect::<Result<Vec<_>>>()?;
    let need = profiles.iter().map(|p| p.trunc_n).max().unwrap_or(0) as usize + 1;
    let theta = cfg.phases.build(need)?;
    let bits = MIN_FRACTION_BITS.max(theta.max_bits() + MIN_FRACTION_BITS);
    let opts = maxmod_options(cfg);

    let run_trial = |trial: usize| -> Result<TrialRecord> {
        let u = if cfg.ensemble.force_u_zero {
            PhaseFraction::zero(bits)?
        } else {
            sample_u(&mut trial_rng(cfg.seed, trial), bits)?
        };
        let rot = Rotation::Phases { theta: &theta, u: &u };
        let mut log_m = Vec::with_capacity(profiles.len());
        let mut deltas = Vec::with_capacity(profiles.len());
        for p in &profiles {
            let m = max_modulus_with(&seq, rot, p, &opts).map_err(|e| e.at_radius(p.r.gap()))?;
            log_m.push(m.log_m);
            deltas.push(delta_h(m.log_m, p.log_mu, p.r, &cfg.weight).ok());
        }
        let flags = cfg
            .eta
            .iter()
            .map(|&eta| deltas.iter().map(|d| d.map(|d| d > eta)).collect())
            .collect();
        Ok(TrialRecord {
            trial,
            u_hex: u_hex(&u),
            log_m,
            delta_h: deltas,
            flags,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| WvError::Config(e.to_string()))?;
    let trials: Vec<TrialRecord> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(run_trial)
            .collect::<Result<Vec<_>>>()
    })?;

    let decade = final_decade(&radii);
    let trial_summaries = trials
        .iter()
        .map(|t| summarize_trial(t, &radii, &decade, cfg))
        .collect::<Result<Vec<_>>>()?;
    let aggregates = aggregate(&profiles, &trials, cfg);
    let eta_summaries = eta_summary(&trials, &trial_summaries, &decade, cfg);
    let checks = checks(&aggregates, &trial_summaries, &decade, cfg);
    Ok(EnsembleRun {
        label: seq.label().to_string(),
        phases: theta.label().to_string(),
        seed: cfg.seed,
        fraction_bits: bits,
        eta: cfg.eta.clone(),
        profiles,
        trials,
        trial_summaries,
        aggregates,
        eta_summaries,
        bounds: ReferenceBounds {
            quarter: 0.25,
            deterministic: 0.5,
            corollary: corollary_bounds(cfg.delta)?,
        },
        checks,
    })
}

/// Greedy exceptional set: cells above the reference level, largest statistic
/// first, while the accumulated h-measure stays within the budget.
fn summarize_trial(
    t: &TrialRecord,
    radii: &[Radius],
    decade: &[usize],
    cfg: &ExperimentConfig,
) -> Result<TrialSummary> {
    let cells = grid_cells(radii)?;
    let mut order: Vec<usize> = (0..radii.len())
        .filter(|&j| t.delta_h[j].is_some_and(|d| d > cfg.ensemble.reference_eta))
        .collect();
    order.sort_by(|&a, &b| {
        let (da, db) = (t.delta_h[a].unwrap_or(0.0), t.delta_h[b].unwrap_or(0.0));
        db.total_cmp(&da).then(a.cmp(&b))
    });
    let mut excluded = vec![false; radii.len()];
    let mut used = 0.0;
    for j in order {
        let m = cfg.weight.integral(cells[j].lo, cells[j].hi)?;
        if used + m > cfg.ensemble.exception_budget {
            break;
        }
        used += m;
        excluded[j] = true;
    }
    let set = ExceptionalSet::from_grid_flags(radii, &excluded, &cfg.weight)?;
    let tail_sup = decade
        .iter()
        .filter(|&&j| !excluded[j])
        .filter_map(|&j| t.delta_h[j])
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    let eta_h_measure = t
        .flags
        .iter()
        .map(|f| {
            let b: Vec<bool> = f.iter().map(|x| x.unwrap_or(false)).collect();
            ExceptionalSet::from_grid_flags(radii, &b, &cfg.weight).map(|e| e.h_mass())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialSummary {
        trial: t.trial,
        tail_sup,
        excluded_s: radii
            .iter()
            .zip(&excluded)
            .filter(|(_, &x)| x)
            .map(|(r, _)| r.gap())
            .collect(),
        excluded_h_measure: set.h_mass(),
        eta_h_measure,
    })
}

fn aggregate(profiles: &[GrowthProfile], trials: &[TrialRecord], cfg: &ExperimentConfig) -> Vec<RadiusAggregate> {
    let bounds = corollary_bounds(cfg.delta).ok();
    profiles
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let mut d: Vec<f64> = trials.iter().filter_map(|t| t.delta_h[j]).collect();
            d.sort_by(f64::total_cmp);
            let mut lm: Vec<f64> = trials.iter().map(|t| t.log_m[j]).collect();
            lm.sort_by(f64::total_cmp);
            let delta = if cfg.delta > 0.0 { cfg.delta } else { cfg.eps };
            let alpha = bounds.map(|b| b.c2_alpha).unwrap_or(0.0);
            RadiusAggregate {
                r: p.r.r(),
                s: p.r.gap(),
                n_valid: d.len(),
                min: d.first().copied(),
                median: quantile_sorted(&d, 0.5),
                p90: quantile_sorted(&d, 0.9),
                max: d.last().copied(),
                median_log_m: quantile_sorted(&lm, 0.5).unwrap_or(f64::NAN),
                log_mu: p.log_mu,
                rhs_theorem1: rhs_theorem1(p, &cfg.weight, delta).ok(),
                rhs_theorem2: rhs_theorem2(p, &cfg.weight, alpha, cfg.delta, cfg.eps).ok(),
            }
        })
        .collect()
}

fn eta_summary(
    trials: &[TrialRecord],
    sums: &[TrialSummary],
    decade: &[usize],
    cfg: &ExperimentConfig,
) -> Vec<EtaSummary> {
    cfg.eta
        .iter()
        .enumerate()
        .map(|(k, &eta)| {
            let hm: Vec<f64> = sums.iter().map(|s| s.eta_h_measure[k]).collect();
            let flagged = trials
                .iter()
                .flat_map(|t| decade.iter().map(move |&j| t.flags[k][j]))
                .filter(|f| *f == Some(true))
                .count();
            let total = (trials.len() * decade.len()).max(1);
            EtaSummary {
                eta,
                mean_h_measure: hm.iter().sum::<f64>() / hm.len().max(1) as f64,
                max_h_measure: hm.iter().copied().fold(0.0, f64::max),
                final_decade_flag_rate: flagged as f64 / total as f64,
            }
        })
        .collect()
}

fn checks(agg: &[RadiusAggregate], sums: &[TrialSummary], decade: &[usize], cfg: &ExperimentConfig) -> EnsembleChecks {
    let n = agg.len();
    let top_medians: Vec<Option<f64>> = agg[n.saturating_sub(3)..].iter().map(|a| a.median).collect();
    let thr = cfg.ensemble.median_threshold;
    let median_decreasing = match (decade.first(), decade.last()) {
        (Some(&a), Some(&b)) if a != b => matches!((agg[a].median, agg[b].median), (Some(x), Some(y)) if y < x),
        _ => false,
    };
    let max_tail_sup = sums
        .iter()
        .filter_map(|s| s.tail_sup)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    EnsembleChecks {
        final_decade: decade.to_vec(),
        top_medians_below_threshold: !top_medians.is_empty() && top_medians.iter().all(|m| m.is_some_and(|m| m <= thr)),
        top_medians,
        median_threshold: thr,
        median_decreasing,
        max_tail_sup,
        tail_ceiling: cfg.ensemble.tail_ceiling,
        tail_sups_below_ceiling: max_tail_sup.is_some_and(|m| m <= cfg.ensemble.tail_ceiling),
    }
}

impl EnsembleRun {
    /// One row per (trial, radius), trials outermost.
    pub fn to_csv(&self) -> String {
        let mut out = PROFILE_COLUMNS.join(",");
        out.push_str(",trial,u_hex");
        for &eta in &self.eta {
            out.push(',');
            out.push_str(&eta_column(eta));
        }
        out.push('\n');
        for t in &self.trials {
            for (j, p) in self.profiles.iter().enumerate() {
                let mut row = profile_fields(p, t.log_m[j], t.delta_h[j]).join(",");
                let _ = write!(row, ",{},{}", t.trial, t.u_hex);
                for f in &t.flags {
                    row.push(',');
                    row.push_str(match f[j] {
                        Some(true) => "1",
                        Some(false) => "0",
                        None => "",
                    });
                }
                out.push_str(&row);
                out.push('\n');
            }
        }
        out
    }

    /// Median statistic against `ln(1/s)`.
    pub fn plotdata(&self) -> String {
        super::output::plotdata(self.aggregates.iter().map(|a| (-a.s.ln(), a.median)))
    }
}
