mod bounds;
mod delta;
mod lemma2;
mod measure;
mod weight;

pub use bounds::{
    corollary_bounds, growth_bounds, rhs_theorem1, rhs_theorem1_log, rhs_theorem2, rhs_theorem2_log, CorollaryBounds,
    GrowthBounds,
};
pub use delta::{delta_denominator, delta_h, exceptional_flag};
pub use lemma2::{check_lemma2, lemma2_sequence};
pub use measure::{grid_cells, h_measure, ExceptionalSet, RadiusInterval};
pub use weight::WeightFunction;
