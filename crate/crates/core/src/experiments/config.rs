use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WvError};
use crate::phases::{gen_geometric, gen_phi, PhaseSequence};
use crate::series::{CoefficientSequence, Radius, SeriesOptions};
use crate::stats::WeightFunction;

/// Coefficient model as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    Geometric,
    SqrtExp,
    PowerExp {
        epsilon: f64,
    },
    Table {
        values: Vec<f64>,
        #[serde(default)]
        args: Vec<f64>,
    },
}

impl SequenceSpec {
    pub fn build(&self) -> Result<CoefficientSequence> {
        match self {
            SequenceSpec::Geometric => Ok(CoefficientSequence::geometric()),
            SequenceSpec::SqrtExp => Ok(CoefficientSequence::sqrt_exp()),
            SequenceSpec::PowerExp { epsilon } => CoefficientSequence::power_exp(*epsilon),
            SequenceSpec::Table { values, args } if args.is_empty() => CoefficientSequence::table(values),
            SequenceSpec::Table { values, args } => CoefficientSequence::table_with_args(values, args),
        }
    }
}

/// Frequency sequence `θ_n` as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseSpec {
    /// `θ_{n+1} = ⌈q θ_n⌉`.
    Geometric { q: f64 },
    /// `θ_{n+1} = ⌈θ_n (1 + 1/φ(n))⌉` with `φ(n) = (n+1)^δ`.
    PhiPower { delta: f64 },
    /// `θ_n = n + 1`.
    Consecutive,
}

impl Default for PhaseSpec {
    fn default() -> Self {
        PhaseSpec::Geometric { q: 2.0 }
    }
}

impl PhaseSpec {
    /// A sequence with at least `len` terms.
    pub fn build(&self, len: usize) -> Result<PhaseSequence> {
        let n_max = len.saturating_sub(1);
        match self {
            PhaseSpec::Geometric { q } => gen_geometric(*q, n_max),
            PhaseSpec::PhiPower { delta } => {
                let d = *delta;
                if !(d >= 0.0) {
                    return Err(WvError::BadParam(format!("phi exponent must be >= 0, got {d}")));
                }
                Ok(gen_phi(move |n| (n as f64 + 1.0).powf(d), n_max)?.with_label(format!("phi(n) = (n+1)^{d}")))
            }
            PhaseSpec::Consecutive => PhaseSequence::consecutive(n_max + 1),
        }
    }
}

/// Radii `r_j = 1 - 10^{-j/m}` for `j = j_min, …, m·k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_per_decade")]
    pub per_decade: u32,
    pub k_max: u32,
    #[serde(default = "default_j_min")]
    pub j_min: u32,
}

fn default_per_decade() -> u32 {
    8
}

fn default_j_min() -> u32 {
    1
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            per_decade: default_per_decade(),
            k_max: 3,
            j_min: default_j_min(),
        }
    }
}

impl GridSpec {
    pub fn radii(&self) -> Result<Vec<Radius>> {
        if self.per_decade == 0 || self.k_max == 0 {
            return Err(WvError::Config("grid needs per_decade >= 1 and k_max >= 1".into()));
        }
        let last = self.per_decade * self.k_max;
        if self.j_min == 0 || self.j_min > last {
            return Err(WvError::Config(format!("grid j_min must lie in 1..={last}")));
        }
        (self.j_min..=last)
            .map(|j| Radius::from_gap(10f64.powf(-(j as f64) / self.per_decade as f64)))
            .collect()
    }
}

/// Settings specific to the Monte Carlo ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    /// Cells with `Δ_h` above this level are candidates for a trial's own exceptional set.
    #[serde(default = "default_reference_eta")]
    pub reference_eta: f64,
    /// Largest h-measure a trial's own exceptional set may take.
    #[serde(default = "default_budget")]
    pub exception_budget: f64,
    /// Soft ceiling for the median statistic at the largest radii.
    #[serde(default = "default_median_threshold")]
    pub median_threshold: f64,
    /// Soft ceiling for per-trial tail suprema.
    #[serde(default = "default_ceiling")]
    pub tail_ceiling: f64,
    /// Replace every sampled `u` by zero (reproduces the unrotated profile).
    #[serde(default)]
    pub force_u_zero: bool,
}

fn default_reference_eta() -> f64 {
    0.5
}
fn default_budget() -> f64 {
    1.0
}
fn default_median_threshold() -> f64 {
    0.45
}
fn default_ceiling() -> f64 {
    0.55
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            reference_eta: default_reference_eta(),
            exception_budget: default_budget(),
            median_threshold: default_median_threshold(),
            tail_ceiling: default_ceiling(),
            force_u_zero: false,
        }
    }
}

/// Input of the trigonometric search for a large real part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KahaneSpec {
    /// Nonnegative coefficients `c_1, …, c_N`; the frequencies are the first `N` terms of `phases`.
    pub coeffs: Vec<f64>,
    pub t_lo: f64,
    pub t_hi: f64,
    #[serde(default = "default_kahane_grid")]
    pub grid_n: usize,
}

fn default_kahane_grid() -> usize {
    1 << 16
}

/// Everything an experiment needs; every field has a config-file spelling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sequence: SequenceSpec,
    #[serde(default)]
    pub phases: PhaseSpec,
    #[serde(default = "default_weight")]
    pub weight: WeightFunction,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eta")]
    pub eta: Vec<f64>,
    /// Gap exponent used for the corollary constants and the generalised bound.
    #[serde(default)]
    pub delta: f64,
    /// `ε` of the generalised bound.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// `ε` values for the growth-bound audit.
    #[serde(default = "default_audit_eps")]
    pub audit_eps: Vec<f64>,
    #[serde(default)]
    pub series: SeriesOptions,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub kahane: Option<KahaneSpec>,
    /// Worker threads for the ensemble; 0 uses the rayon default.
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

fn default_weight() -> WeightFunction {
    WeightFunction::LogMeasure
}
fn default_trials() -> usize {
    1
}
fn default_eta() -> Vec<f64> {
    vec![0.25, 0.5]
}
fn default_eps() -> f64 {
    0.1
}
fn default_audit_eps() -> Vec<f64> {
    vec![0.25, 0.5, 1.0]
}
fn default_threads() -> usize {
    1
}
fn default_output_dir() -> String {
    "out".into()
}

impl ExperimentConfig {
    /// A config with defaults everywhere except the sequence.
    pub fn new(sequence: SequenceSpec) -> Self {
        ExperimentConfig {
            sequence,
            phases: PhaseSpec::default(),
            weight: default_weight(),
            grid: GridSpec::default(),
            trials: default_trials(),
            seed: 0,
            eta: default_eta(),
            delta: 0.0,
            eps: default_eps(),
            audit_eps: default_audit_eps(),
            series: SeriesOptions::default(),
            ensemble: EnsembleSpec::default(),
            kahane: None,
            threads: default_threads(),
            output_dir: default_output_dir(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| WvError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)?;
        Ok((Self::from_toml(&text)?, text))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| WvError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(WvError::Config(m));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        self.grid.radii()?;
        self.sequence.build()?;
        self.weight.validate()?;
        if self.eta.iter().any(|e| !e.is_finite()) {
            return bad("eta values must be finite".into());
        }
        if !(self.delta >= 0.0) || !(self.eps > 0.0) || self.audit_eps.iter().any(|e| !(*e > 0.0)) {
            return bad("delta must be >= 0 and every eps > 0".into());
        }
        if !(self.series.margin_nats > 0.0) || self.series.n_cap == 0 {
            return bad("series margin must be positive and n_cap >= 1".into());
        }
        match self.phases {
            PhaseSpec::Geometric { q } if !(q > 1.0) => return bad(format!("phase ratio q = {q} must exceed 1")),
            PhaseSpec::PhiPower { delta } if !(delta >= 0.0) => {
                return bad(format!("phi exponent {delta} must be >= 0"))
            }
            _ => {}
        }
        let e = &self.ensemble;
        if !(e.exception_budget >= 0.0) || !e.reference_eta.is_finite() {
            return bad("ensemble budget must be >= 0 and reference eta finite".into());
        }
        if let Some(k) = &self.kahane {
            if k.coeffs.is_empty() || k.coeffs.iter().any(|c| !(*c >= 0.0)) {
                return bad("kahane coefficients must be nonnegative and nonempty".into());
            }
            if k.grid_n < 2 {
                return bad("kahane grid needs at least 2 points".into());
            }
        }
        Ok(())
    }
}
