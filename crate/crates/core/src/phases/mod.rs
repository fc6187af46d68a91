//! Integer frequency sequences `θ_n`, exact reduction of `θ_n t mod 2π`, and
//! the empirical gap exponent γ.

mod fraction;
mod gamma;
mod sequence;

pub(crate) use fraction::angle_from_turns;
pub use fraction::{phase_angle, sample_u, PhaseFraction, MIN_FRACTION_BITS};
pub use gamma::{gamma_stat, GammaStat};
pub use sequence::{gen_geometric, gen_phi, PhaseSequence};
