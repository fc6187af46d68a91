//! Acceptance gate. Each test writes one `PASS`/`FAIL` line straight to stdout
//! (bypassing the harness capture) and then asserts.

use std::f64::consts::{PI, TAU};
use std::io::Write as _;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use wvlab_core::experiments::{
    run_baire_example, run_ensemble, run_experiment, run_sharpness, EnsembleRun, Experiment, ExperimentConfig,
    GridSpec, PhaseSpec, SequenceSpec,
};
use wvlab_core::stats::{check_lemma2, lemma2_sequence, RadiusInterval};
use wvlab_core::{
    corollary_bounds, gamma_stat, gen_geometric, gen_phi, log_g, log_s, max_modulus, max_term, moments_ab, phase_angle,
    sample_u, CoefficientSequence, ExceptionalSet, MaxModOptions, PhaseFraction, PhaseSequence, Radius, Rotation,
    SeriesOptions, WeightFunction,
};

const MU_TOL: f64 = 1e-12;
const CLOSED_FORM_RTOL: f64 = 1e-8;
const FD_STEP: f64 = 1e-5;
const FD_A_RTOL: f64 = 1e-5;
const FD_B2_RTOL: f64 = 1e-3;
const SANDWICH_SLACK: f64 = 1e-9;
const SHARPNESS_FLOOR: f64 = 0.01;
const DRIFT_MAX: f64 = 0.10;
const MEDIAN_CEILING: f64 = 0.45;
const TAIL_CEILING: f64 = 0.55;
const COROLLARY_TOL: f64 = 1e-15;
const GAMMA_TOL: f64 = 0.05;
const PHASE_TOL: f64 = 1e-12;

const ENSEMBLE_SEED: u64 = 20_240_601;
const ENSEMBLE_TRIALS: usize = 50;
/// Terms needed at `s = 1e-4` for `exp(√n)` coefficients are about `3.2e7`.
const DEEP_N_CAP: u64 = 200_000_000;

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "\n[acceptance {id:>2}] {} {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    let _ = out.flush();
}

fn deep_grid(seq: SequenceSpec) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(seq);
    c.grid = GridSpec {
        per_decade: 4,
        k_max: 4,
        j_min: 1,
    };
    c.series.n_cap = DEEP_N_CAP;
    c
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn c01_max_term_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut worst_mu = 0.0f64;
    let mut nu_mismatch = 0;
    for _ in 0..100 {
        let len = rng.random_range(1..=1000usize);
        let values: Vec<f64> = (0..len).map(|_| rng.random_range(-30.0..30.0f64).exp()).collect();
        let args: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..TAU)).collect();
        let seq = CoefficientSequence::table_with_args(&values, &args).unwrap();
        for _ in 0..20 {
            let r = Radius::from_r(rng.random_range(0.01..0.9999f64)).unwrap();
            let (log_mu, nu) = max_term(&seq, r, &SeriesOptions::default()).unwrap();
            let lnr = (-r.gap()).ln_1p();
            let (mut best, mut arg) = (f64::NEG_INFINITY, 0u64);
            for (n, v) in values.iter().enumerate() {
                let t = v.abs().ln() + n as f64 * lnr;
                if t > best {
                    best = t;
                    arg = n as u64;
                }
            }
            worst_mu = worst_mu.max((log_mu - best).abs());
            nu_mismatch += usize::from(nu != arg);
        }
    }
    let el = start.elapsed();
    let ok = nu_mismatch == 0 && worst_mu <= MU_TOL && el < Duration::from_secs(5);
    report(
        1,
        "maximal term oracle",
        ok,
        &format!("nu mismatches {nu_mismatch}, max |d log_mu| {worst_mu:.2e}, {el:.2?}"),
    );
    assert!(ok);
}

#[test]
fn c02_geometric_closed_forms() {
    let start = Instant::now();
    let seq = CoefficientSequence::geometric();
    let o = SeriesOptions::default();
    let mut worst = 0.0f64;
    for r in [0.5f64, 0.9, 0.99] {
        let rad = Radius::from_r(r).unwrap();
        let (a, b2) = moments_ab(&seq, rad, &o).unwrap();
        worst = worst
            .max(rel(log_g(&seq, rad, &o).unwrap(), -(1.0 - r).ln()))
            .max(rel(log_s(&seq, rad, &o).unwrap(), 0.5 * (1.0 / (1.0 - r * r)).ln()))
            .max(rel(a, r / (1.0 - r)))
            .max(rel(b2, r / (1.0 - r).powi(2)));
    }
    let el = start.elapsed();
    let ok = worst <= CLOSED_FORM_RTOL && el < Duration::from_secs(1);
    report(
        2,
        "geometric closed forms",
        ok,
        &format!("max rel err {worst:.2e}, {el:.2?}"),
    );
    assert!(ok);
}

#[test]
fn c03_moments_match_finite_differences() {
    let o = SeriesOptions::default();
    let (mut wa, mut wb) = (0.0f64, 0.0f64);
    for seq in [CoefficientSequence::geometric(), CoefficientSequence::sqrt_exp()] {
        for r in [0.5f64, 0.9, 0.99] {
            let x = r.ln();
            let g = |x: f64| log_g(&seq, Radius::from_log_r(x).unwrap(), &o).unwrap();
            let (gm, g0, gp) = (g(x - FD_STEP), g(x), g(x + FD_STEP));
            let (a, b2) = moments_ab(&seq, Radius::from_r(r).unwrap(), &o).unwrap();
            wa = wa.max(rel((gp - gm) / (2.0 * FD_STEP), a));
            wb = wb.max(rel((gp - 2.0 * g0 + gm) / (FD_STEP * FD_STEP), b2));
        }
    }
    let ok = wa <= FD_A_RTOL && wb <= FD_B2_RTOL;
    report(
        3,
        "finite-difference moments",
        ok,
        &format!("A rel {wa:.2e}, B2 rel {wb:.2e}"),
    );
    assert!(ok);
}

#[test]
fn c04_parseval_sandwich() {
    let start = Instant::now();
    let seqs = [
        CoefficientSequence::geometric(),
        CoefficientSequence::sqrt_exp(),
        CoefficientSequence::power_exp(0.25).unwrap(),
    ];
    let o = MaxModOptions::default();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let (mut checked, mut bad, mut worst) = (0, 0, f64::NEG_INFINITY);
    for seq in &seqs {
        let radii: Vec<Radius> = (0..20)
            .map(|j| Radius::from_gap(10f64.powf(-0.3 - 2.2 * j as f64 / 19.0)).unwrap())
            .collect();
        let n = radii
            .iter()
            .map(|&r| wvlab_core::GrowthProfile::compute(seq, r, &o.series).unwrap().trunc_n)
            .max()
            .unwrap() as usize
            + 1;
        let theta = gen_geometric(2.0, n).unwrap();
        let bits = theta.max_bits() + 128;
        for _ in 0..20 {
            let u = sample_u(&mut rng, bits).unwrap();
            for &r in &radii {
                let m = max_modulus(seq, Rotation::Phases { theta: &theta, u: &u }, r, &o).unwrap();
                let ls = log_s(seq, r, &o.series).unwrap();
                let lg = log_g(seq, r, &o.series).unwrap();
                let v = (ls - SANDWICH_SLACK - m.log_m).max(m.log_m - lg - SANDWICH_SLACK);
                worst = worst.max(v);
                bad += usize::from(v > 0.0);
                checked += 1;
            }
        }
    }
    let ok = bad == 0;
    report(
        4,
        "Parseval sandwich",
        ok,
        &format!(
            "{checked} cases, {bad} outside, worst excess {worst:.2e}, {:.2?}",
            start.elapsed()
        ),
    );
    assert!(ok);
}

#[test]
fn c05_sharpness_of_one_half() {
    let start = Instant::now();
    let c = deep_grid(SequenceSpec::SqrtExp);
    let run = run_sharpness(&c).unwrap();
    let d = run.sweep.final_decade.unwrap();
    let el = start.elapsed();
    let ok = d.running_min_end > SHARPNESS_FLOOR
        && d.ratio_drift < DRIFT_MAX
        && d.running_min_drift < DRIFT_MAX
        && el < Duration::from_secs(120);
    report(
        5,
        "sharpness ratio",
        ok,
        &format!(
            "running min {:.4}, ratio {:.4} -> {:.4} (drift {:.2}%), running-min drift {:.2}%, {el:.2?}",
            d.running_min_end,
            d.ratio_start,
            d.ratio_end,
            100.0 * d.ratio_drift,
            100.0 * d.running_min_drift
        ),
    );
    assert!(ok);
}

fn ensemble() -> &'static EnsembleRun {
    static RUN: OnceLock<EnsembleRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let mut c = deep_grid(SequenceSpec::SqrtExp);
        c.phases = PhaseSpec::Geometric { q: 2.0 };
        c.trials = ENSEMBLE_TRIALS;
        c.seed = ENSEMBLE_SEED;
        c.ensemble.median_threshold = MEDIAN_CEILING;
        c.ensemble.tail_ceiling = TAIL_CEILING;
        run_ensemble(&c).unwrap()
    })
}

#[test]
fn c06_ensemble_median_trend() {
    let start = Instant::now();
    let run = ensemble();
    let ch = &run.checks;
    let first = run.aggregates[ch.final_decade[0]].median;
    let last = run.aggregates.last().unwrap().median;
    let ok = ch.top_medians_below_threshold && ch.median_decreasing;
    let meds: Vec<String> = ch
        .top_medians
        .iter()
        .map(|m| format!("{:.4}", m.unwrap_or(f64::NAN)))
        .collect();
    report(
        6,
        "ensemble medians",
        ok,
        &format!(
            "top medians [{}] <= {MEDIAN_CEILING}, final decade {:.4} -> {:.4} (limit 1/4 is asymptotic), {:.2?}",
            meds.join(", "),
            first.unwrap_or(f64::NAN),
            last.unwrap_or(f64::NAN),
            start.elapsed()
        ),
    );
    assert!(ok);
}

#[test]
fn c07_ensemble_tail_ceiling() {
    let run = ensemble();
    let ch = &run.checks;
    let missing = run.trial_summaries.iter().filter(|s| s.tail_sup.is_none()).count();
    let ok = ch.tail_sups_below_ceiling && missing == 0;
    report(
        7,
        "deterministic ceiling",
        ok,
        &format!(
            "max tail-sup {:.4} <= {TAIL_CEILING} over {} trials",
            ch.max_tail_sup.unwrap_or(f64::NAN),
            run.trials.len()
        ),
    );
    assert!(ok);
}

#[test]
fn c08_lemma2_constructor() {
    let h = WeightFunction::LogMeasure;
    let log_k = |r: Radius| r.log_inv_gap();
    let sets = [
        ExceptionalSet::empty(),
        ExceptionalSet::from_intervals(vec![RadiusInterval::from_r(0.0, 0.5).unwrap()], &h).unwrap(),
        ExceptionalSet::from_intervals(
            vec![
                RadiusInterval::from_r(0.6, 0.9).unwrap(),
                RadiusInterval::from_r(0.99, 0.999).unwrap(),
                RadiusInterval::from_r(0.9999, 0.99999).unwrap(),
            ],
            &h,
        )
        .unwrap(),
    ];
    let mut msgs = Vec::new();
    for (i, e) in sets.iter().enumerate() {
        let seq = lemma2_sequence(log_k, e, 40).unwrap();
        if let Err(m) = check_lemma2(&log_k, e, &seq) {
            msgs.push(format!("set {i}: {m}"));
        }
    }
    let ok = msgs.is_empty();
    report(
        8,
        "radius sequence construction",
        ok,
        &if ok {
            "3 sets x 40 radii verified".into()
        } else {
            msgs.join("; ")
        },
    );
    assert!(ok);
}

#[test]
fn c09_corollary_constants() {
    let b0 = corollary_bounds(0.0).unwrap();
    let mut err = (b0.c2_bound - 0.25).abs().max((b0.c3_bound - 0.25).abs());
    err = err.max((corollary_bounds(0.5).unwrap().c2_bound - 0.5).abs());
    err = err.max((corollary_bounds(1.0).unwrap().c3_bound - 0.5).abs());
    let sweep: Vec<_> = (0..100).map(|i| corollary_bounds(i as f64 / 99.0).unwrap()).collect();
    let monotone = sweep
        .windows(2)
        .all(|w| w[1].c2_bound >= w[0].c2_bound && w[1].c3_bound >= w[0].c3_bound);
    let ok = err <= COROLLARY_TOL && monotone;
    report(
        9,
        "corollary constants",
        ok,
        &format!("max abs err {err:.1e}, monotone on 100 points: {monotone}"),
    );
    assert!(ok);
}

#[test]
fn c10_gamma_statistic() {
    let g2 = gamma_stat(&gen_geometric(2.0, 10_000).unwrap(), 100).unwrap().max;
    let gphi = gamma_stat(&gen_phi(|n| (n as f64 + 1.0).powf(0.25), 10_000).unwrap(), 100)
        .unwrap()
        .max;
    let gc = gamma_stat(&PhaseSequence::consecutive(10_001).unwrap(), 100)
        .unwrap()
        .max;
    let ok = g2 == 0.0 && (gphi - 0.25).abs() <= GAMMA_TOL && (gc - 1.0).abs() <= GAMMA_TOL;
    report(
        10,
        "gamma statistic",
        ok,
        &format!(
            "2^n {:.4}, n^(1/4) gaps {gphi:.4}, consecutive {gc:.4} (n >= 100)",
            g2.abs()
        ),
    );
    assert!(ok);
}

#[test]
fn c11_baire_lower_ratio() {
    let c = deep_grid(SequenceSpec::PowerExp { epsilon: 0.5 });
    let run = run_baire_example(&c).unwrap();
    let d = run.lower.final_decade.unwrap();
    let ok = d.running_min_end > 0.0 && d.ratio_drift < DRIFT_MAX && d.running_min_drift < DRIFT_MAX;
    report(
        11,
        "exp(n^eps) lower ratio",
        ok,
        &format!(
            "running min {:.4}, ratio {:.4} -> {:.4} (drift {:.2}%), running-min drift {:.2}%",
            d.running_min_end,
            d.ratio_start,
            d.ratio_end,
            100.0 * d.ratio_drift,
            100.0 * d.running_min_drift
        ),
    );
    assert!(ok);
}

/// `2π frac(θ U / 2^bits)` with big rationals.
fn rational_angle(theta: &BigUint, u: &BigUint, bits: u64) -> f64 {
    let q = BigRational::new(BigInt::from(theta * u), BigInt::from(BigUint::one() << bits));
    let f = &q - q.floor();
    // 2^-60 resolution is ample for a 1e-12 comparison
    let scaled = (f * BigRational::from_integer(BigInt::one() << 60u32))
        .floor()
        .to_integer();
    scaled.to_f64().unwrap() * (-60f64).exp2() * TAU
}

#[test]
fn c12_exact_phase_reduction() {
    let theta = (BigUint::one() << 200u32) + 1u32;
    let half = PhaseFraction::from_f64(0.5, 128).unwrap();
    let e1 = (phase_angle(&theta, &half) - PI).abs();

    let mut rng = ChaCha20Rng::seed_from_u64(12);
    let mut e2 = 0.0f64;
    for _ in 0..20 {
        let mut t = vec![0u8; 64];
        rng.fill_bytes(&mut t);
        t[63] |= 0x80;
        let theta = BigUint::from_bytes_le(&t);
        let mut ub = vec![0u8; 16];
        rng.fill_bytes(&mut ub);
        let u_int = BigUint::from_bytes_le(&ub);
        let u = PhaseFraction::from_integer(&u_int, 128).unwrap();
        let got = phase_angle(&theta, &u);
        let want = rational_angle(&theta, &u_int, 128);
        let d = (got - want).abs();
        e2 = e2.max(d.min(TAU - d));
    }
    let ok = e1 <= 4.0 * f64::EPSILON && e2 <= PHASE_TOL;
    report(
        12,
        "exact phase reduction",
        ok,
        &format!("|angle - pi| {e1:.1e}, 512-bit regression max err {e2:.1e}"),
    );
    assert!(ok);
}

#[test]
fn c13_ensemble_determinism() {
    let text = "seed = 99\ntrials = 4\neta = [0.25, 0.4]\n[sequence]\nkind = \"sqrt_exp\"\n[grid]\nper_decade = 4\nk_max = 2\n";
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        run_experiment(Experiment::Ensemble, &cfg, text, d.path()).unwrap();
    }
    let mut same = true;
    for f in ["ensemble.csv", "ensemble.json", "plotdata_ensemble.csv"] {
        same &= std::fs::read(dirs[0].path().join(f)).unwrap() == std::fs::read(dirs[1].path().join(f)).unwrap();
    }
    report(
        13,
        "determinism",
        same,
        "ensemble CSV, JSON and plot data byte-identical across two runs",
    );
    assert!(same);
}
