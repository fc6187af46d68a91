//! Config-driven experiment drivers and their CSV/JSON writers.

pub mod config;
mod ensemble;
mod kahane;
pub mod output;
mod report;
mod sweeps;

pub use config::{EnsembleSpec, ExperimentConfig, GridSpec, KahaneSpec, PhaseSpec, SequenceSpec};
pub use ensemble::{
    run_ensemble, trial_rng, EnsembleChecks, EnsembleRun, EtaSummary, RadiusAggregate, ReferenceBounds, TrialRecord,
    TrialSummary,
};
pub use kahane::{kahane_search, run_kahane_search, KahaneResult};
pub use report::{run_experiment, Experiment};
pub use sweeps::{
    run_baire_example, run_bound_audit, run_profile, run_sharpness, AuditRun, BaireRun, DecadeDrift, EpsAudit,
    ProfileRun, RatioPoint, RatioSweep, SharpnessRun, Violations,
};
