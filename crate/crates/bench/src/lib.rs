//! Fixtures shared by the benchmarks.

use wvlab_core::{
    gen_geometric, sample_u, CoefficientSequence, GrowthProfile, PhaseFraction, PhaseSequence, Radius, SeriesOptions,
};

/// `exp(√n)` coefficients at `r = 1 - s` with θ = 2^n and a fixed random `u`.
pub struct Fixture {
    pub seq: CoefficientSequence,
    pub profile: GrowthProfile,
    pub theta: PhaseSequence,
    pub u: PhaseFraction,
}

pub fn sqrt_exp_fixture(s: f64) -> Fixture {
    use rand::SeedableRng;
    let seq = CoefficientSequence::sqrt_exp();
    let profile = GrowthProfile::compute(&seq, Radius::from_gap(s).unwrap(), &SeriesOptions::default()).unwrap();
    let theta = gen_geometric(2.0, profile.trunc_n as usize + 1).unwrap();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
    let u = sample_u(&mut rng, theta.max_bits() + 128).unwrap();
    Fixture { seq, profile, theta, u }
}
