//! Numerical laboratory for Wiman–Valiron type inequalities of analytic
//! functions in the unit disk.
//!
//! The crate evaluates the radial growth quantities of a power series
//! `f(z) = Σ a_n z^n` (maximal term, central index, `G_f`, `S_f` and the
//! moments of the associated index distribution), the maximum modulus of the
//! randomly rotated series `f_t(z) = Σ a_n e^{iθ_n t} z^n`, and the
//! normalised log-gap statistic `Δ_h` together with exceptional sets measured
//! against a weight `h`.
//!
//! Module map:
//! - [`series`]: coefficient models, radii stored as `s = 1 - r`, log-domain sums.
//! - [`phases`]: integer frequency sequences, exact angle reduction, the γ statistic.
//! - [`maxmod`]: maximum modulus of the rotated series on `|z| = r`.
//! - [`stats`]: weights, h-measure, `Δ_h`, exceptional sets, radius sequences, bounds.
//! - [`experiments`]: config-driven sweeps and Monte Carlo ensembles with CSV/JSON output.

// `!(x > 0.0)` is the NaN-rejecting form used throughout for parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod maxmod;
pub mod phases;
pub mod series;
pub mod stats;

pub use error::{Result, WvError};
pub use maxmod::{eval_rotated, max_modulus, max_modulus_with, MaxModOptions, MaxModulus, Rotation};
pub use phases::{gamma_stat, gen_geometric, gen_phi, phase_angle, sample_u, PhaseFraction, PhaseSequence};
pub use series::{
    log_g, log_s, max_term, moments_ab, truncation_index, CoefficientSequence, GrowthProfile, Radius, SeriesOptions,
};
pub use stats::{
    corollary_bounds, delta_h, exceptional_flag, h_measure, lemma2_sequence, rhs_theorem1, rhs_theorem2,
    CorollaryBounds, ExceptionalSet, WeightFunction,
};
