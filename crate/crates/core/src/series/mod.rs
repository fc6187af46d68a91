//! Power-series coefficient models and their radial growth quantities.

mod coeffs;
mod growth;
mod radius;
pub mod summation;

pub use coeffs::{CoeffKind, CoefficientSequence};
pub use growth::{
    log_g, log_s, max_term, moments_ab, scan, truncation_index, window_start, GrowthProfile, SeriesOptions, Truncation,
    DEFAULT_MARGIN_NATS, DEFAULT_N_CAP, VARIANCE_CLAMP,
};
pub use radius::Radius;
