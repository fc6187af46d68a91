//! Maximum modulus of the rotated series `f_t(z) = Σ a_n e^{iθ_n t} z^n` on `|z| = r`.
//!
//! After factoring out the maximal term the restriction to the circle is a
//! trigonometric polynomial `p(ψ) = Σ c_n e^{inψ}`. Its modulus is sampled on a
//! uniform grid of `16·P` points (`P` the smallest power of two above the number
//! of retained terms) through `16` twisted FFTs of size `P`; the best grid
//! points are then refined by golden-section search with direct evaluation.
//!
//! Angles are handled in turns (`ψ = 2π v`) so that `n·v mod 1` can be formed
//! exactly with a fused multiply-add even for `n` in the tens of millions.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WvError};
use crate::phases::{PhaseFraction, PhaseSequence};
use crate::series::summation::Neumaier;
use crate::series::{window_start, CoefficientSequence, GrowthProfile, Radius, SeriesOptions};

pub const DEFAULT_OVERSAMPLE: usize = 16;
pub const DEFAULT_TOP_K: usize = 5;
pub const DEFAULT_PSI_TOL: f64 = 1e-12;
/// Recurrence length between exact re-evaluations of `e^{2πi n v}`.
const RESYNC: usize = 64;
const CANDIDATE_POOL: usize = 64;

/// Rotation applied to the coefficients.
#[derive(Clone, Copy, Debug)]
pub enum Rotation<'a> {
    /// `t = 0`: the series itself.
    Identity,
    /// `a_n ↦ a_n e^{2πi θ_n u}`.
    Phases {
        theta: &'a PhaseSequence,
        u: &'a PhaseFraction,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxModOptions {
    pub series: SeriesOptions,
    pub oversample: usize,
    pub top_k: usize,
    /// Golden-section stopping width in radians.
    pub psi_tol: f64,
}

impl Default for MaxModOptions {
    fn default() -> Self {
        MaxModOptions {
            series: SeriesOptions::default(),
            oversample: DEFAULT_OVERSAMPLE,
            top_k: DEFAULT_TOP_K,
            psi_tol: DEFAULT_PSI_TOL,
        }
    }
}

/// Result of [`max_modulus`] with its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxModulus {
    pub log_m: f64,
    pub psi_star: f64,
    /// Number of grid points `N_ψ` (0 when all phases vanish and no grid was needed).
    pub grid_size: usize,
    /// Degree of the retained trigonometric polynomial.
    pub degree: u64,
    pub window_start: u64,
    pub trunc_n: u64,
    /// `ln` of the largest grid value, on the same scale as `log_m`.
    pub grid_log_max: f64,
    /// Upper bound on `ln M - grid_log_max` implied by the grid density.
    pub resolution_bound: f64,
    /// `ln` of the bound on the dropped terms relative to `μ_f(r)`.
    pub log_tail_bound: f64,
}

/// `e^{2πi·x}` for `x` in turns.
#[inline]
fn cis_turns(x: f64) -> Complex64 {
    let (s, c) = (TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// `frac(n·v)` with the product formed exactly.
#[inline]
pub(crate) fn frac_mul(n: u64, v: f64) -> f64 {
    let nf = n as f64;
    let p = nf * v;
    let e = nf.mul_add(v, -p);
    let f = (p - p.floor()) + e;
    f - f.floor()
}

/// `Σ c_m e^{2πi m v}`.
pub(crate) fn eval_turns(coeffs: &[Complex64], v: f64) -> Complex64 {
    let step = cis_turns(v - v.floor());
    let mut total = Complex64::new(0.0, 0.0);
    for (b, block) in coeffs.chunks(RESYNC).enumerate() {
        let mut z = cis_turns(frac_mul((b * RESYNC) as u64, v));
        let mut acc = Complex64::new(0.0, 0.0);
        for c in block {
            acc += c * z;
            z *= step;
        }
        total += acc;
    }
    total
}

/// Normalised coefficients `c_n = |a_n| r^n / μ · e^{i(arg a_n + 2π θ_n u)}` for `n ∈ [lo, hi]`.
/// Returns `None` when every phase is exactly zero.
fn window_coeffs(
    seq: &CoefficientSequence,
    rotation: Rotation<'_>,
    r: Radius,
    log_mu: f64,
    lo: u64,
    hi: u64,
) -> Result<Option<Vec<Complex64>>> {
    if let Rotation::Phases { theta, .. } = rotation {
        if (theta.len() as u64) <= hi {
            return Err(WvError::PhasesTooShort {
                required: hi as usize + 1,
                available: theta.len(),
            });
        }
    }
    if matches!(rotation, Rotation::Identity) && seq.has_zero_args() {
        return Ok(None);
    }
    let x = r.ln_r();
    let mut any_phase = false;
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        let lc = seq.log_coeff(n);
        let mag = if lc == f64::NEG_INFINITY {
            0.0
        } else {
            (lc + n as f64 * x - log_mu).exp()
        };
        let turns = match rotation {
            Rotation::Identity => 0.0,
            Rotation::Phases { theta, u } => theta.turns(n as usize, u),
        };
        let arg = seq.arg(n);
        if turns != 0.0 || arg != 0.0 {
            any_phase = true;
        }
        let angle = arg + TAU * turns;
        let (s, c) = angle.sin_cos();
        out.push(Complex64::new(mag * c, mag * s));
    }
    Ok(if any_phase { Some(out) } else { None })
}

/// `ln |f_t(r e^{iψ})|`, summing all terms up to the truncation index.
pub fn eval_rotated(
    seq: &CoefficientSequence,
    rotation: Rotation<'_>,
    r: Radius,
    psi: f64,
    opts: &SeriesOptions,
) -> Result<f64> {
    let tr = crate::series::scan(seq, r, opts)?;
    let x = r.ln_r();
    if let Rotation::Phases { theta, .. } = rotation {
        if (theta.len() as u64) <= tr.trunc_n {
            return Err(WvError::PhasesTooShort {
                required: tr.trunc_n as usize + 1,
                available: theta.len(),
            });
        }
    }
    let mut coeffs = Vec::with_capacity(tr.trunc_n as usize + 1);
    for n in 0..=tr.trunc_n {
        let lc = seq.log_coeff(n);
        let mag = if lc == f64::NEG_INFINITY {
            0.0
        } else {
            (lc + n as f64 * x - tr.log_mu).exp()
        };
        let turns = match rotation {
            Rotation::Identity => 0.0,
            Rotation::Phases { theta, u } => theta.turns(n as usize, u),
        };
        let (s, c) = (seq.arg(n) + TAU * turns).sin_cos();
        coeffs.push(Complex64::new(mag * c, mag * s));
    }
    Ok(tr.log_mu + eval_turns(&coeffs, psi / TAU).norm().ln())
}

/// Candidate pool keeping the best `(value, grid index)` pairs; ties favour the smaller index.
struct TopPool {
    items: Vec<(f64, usize)>,
    cap: usize,
    /// Smallest retained value once the pool is full.
    floor: f64,
}

impl TopPool {
    fn better(a: (f64, usize), b: (f64, usize)) -> bool {
        a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
    }

    fn push(&mut self, item: (f64, usize)) {
        if self.items.len() < self.cap {
            self.items.push(item);
            if self.items.len() == self.cap {
                self.floor = self.items.iter().map(|it| it.0).fold(f64::INFINITY, f64::min);
            }
            return;
        }
        if item.0 < self.floor {
            return;
        }
        let (wi, worst) = self
            .items
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, self.items[0]),
                |acc, (i, it)| if Self::better(acc.1, it) { (i, it) } else { acc },
            );
        if Self::better(item, worst) {
            self.items[wi] = item;
            self.floor = self.items.iter().map(|it| it.0).fold(f64::INFINITY, f64::min);
        }
    }

    fn sorted(mut self) -> Vec<(f64, usize)> {
        self.items.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        self.items
    }
}

/// `|p|²` on the grid `v_j = j / (oversample·P)` via `oversample` FFTs of size `P`.
fn grid_candidates(coeffs: &[Complex64], oversample: usize, fft: &Arc<dyn Fft<f64>>, p: usize) -> (TopPool, f64) {
    let n_psi = oversample * p;
    let mut pool = TopPool {
        items: Vec::with_capacity(CANDIDATE_POOL),
        cap: CANDIDATE_POOL,
        floor: f64::NEG_INFINITY,
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); p];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut best = 0.0f64;
    for a in 0..oversample {
        // twist by e^{2πi m a / N_ψ}, resynchronised exactly from (m·a mod N_ψ)
        let step = cis_turns(a as f64 / n_psi as f64);
        for (b, block) in coeffs.chunks(RESYNC).enumerate() {
            let m0 = b * RESYNC;
            let mut z = cis_turns(((m0 * a) % n_psi) as f64 / n_psi as f64);
            for (i, c) in block.iter().enumerate() {
                buf[m0 + i] = c * z;
                z *= step;
            }
        }
        for slot in buf[coeffs.len()..].iter_mut() {
            *slot = Complex64::new(0.0, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (k, val) in buf.iter().enumerate() {
            let v = val.norm_sqr();
            best = best.max(v);
            pool.push((v, a + oversample * k));
        }
    }
    (pool, best)
}

/// Golden-section maximisation of `|p(v)|²` on `[lo, hi]` (turns).
fn golden_max(coeffs: &[Complex64], lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let f = |v: f64| eval_turns(coeffs, v).norm_sqr();
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (fc, c)
    } else {
        (fd, d)
    }
}

fn wrap_turns(v: f64) -> f64 {
    let w = v - v.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// `cos(πD/N_ψ)`, or 0 when the grid is too coarse for the bound to say anything.
///
/// For a nonnegative trigonometric polynomial `T = |p|²` of degree `D` with maximum
/// `M` at `ψ*`, Szegő's inequality `T'² + D²T² ≤ D²M²` gives
/// `T(ψ* + x) ≥ M cos(Dx)` for `|Dx| ≤ π`; grid points are at most `π/N_ψ` away.
fn resolution_cos(degree: f64, n_psi: usize) -> f64 {
    let x = std::f64::consts::PI * degree / n_psi as f64;
    if x < std::f64::consts::FRAC_PI_2 {
        x.cos()
    } else {
        0.0
    }
}

/// Maximum over `ψ` of `|Σ c_m e^{imψ}|²` and the maximising `ψ` in turns,
/// plus the grid size and the largest grid value.
pub(crate) fn maximize_poly(coeffs: &[Complex64], opts: &MaxModOptions) -> (f64, f64, usize, f64) {
    let p = coeffs.len().next_power_of_two();
    let n_psi = opts.oversample * p;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(p);
    let (pool, grid_best) = grid_candidates(coeffs, opts.oversample, &fft, p);
    let candidates = pool.sorted();

    let spacing = 1.0 / n_psi as f64;
    // the global maximum M lies within half a step of a grid point whose value is
    // at least M·cos(πD/N_ψ); anything below grid_best·cos(πD/N_ψ) cannot be that point
    let degree = coeffs.len().saturating_sub(1) as f64;
    let keep = grid_best * resolution_cos(degree, n_psi);
    let mut chosen: Vec<usize> = Vec::new();
    for &(val, j) in &candidates {
        if chosen.len() >= opts.top_k || val < keep {
            break;
        }
        let near = chosen.iter().any(|&k| {
            let d = j.abs_diff(k);
            d.min(n_psi - d) <= 2
        });
        if !near {
            chosen.push(j);
        }
    }

    let tol = opts.psi_tol / TAU;
    let mut best = (f64::NEG_INFINITY, 0.0f64);
    for j in chosen {
        let v0 = j as f64 * spacing;
        let mut local = (eval_turns(coeffs, v0).norm_sqr(), v0);
        let (val, v) = golden_max(coeffs, v0 - spacing, v0 + spacing, tol);
        if val > local.0 {
            local = (val, v);
        }
        let v = wrap_turns(local.1);
        if local.0 > best.0 || (local.0 == best.0 && v < best.1) {
            best = (local.0, v);
        }
    }
    (best.0, best.1, n_psi, grid_best)
}

/// Maximum modulus of the rotated series at `r`, computing the growth profile first.
pub fn max_modulus(
    seq: &CoefficientSequence,
    rotation: Rotation<'_>,
    r: Radius,
    opts: &MaxModOptions,
) -> Result<MaxModulus> {
    let profile = GrowthProfile::compute(seq, r, &opts.series)?;
    max_modulus_with(seq, rotation, &profile, opts)
}

/// Maximum modulus reusing an already computed profile at the same radius.
pub fn max_modulus_with(
    seq: &CoefficientSequence,
    rotation: Rotation<'_>,
    profile: &GrowthProfile,
    opts: &MaxModOptions,
) -> Result<MaxModulus> {
    if opts.oversample < 2 || opts.top_k == 0 || !(opts.psi_tol > 0.0) {
        return Err(WvError::BadParam("invalid max-modulus options".into()));
    }
    let tr = profile.truncation();
    let margin = opts.series.margin_nats;
    let lo = window_start(seq, profile.r, &tr, margin);
    let log_tail_bound = crate::series::summation::log_add_exp(tr.log_tail_bound, -margin);
    let coeffs = window_coeffs(seq, rotation, profile.r, tr.log_mu, lo, tr.trunc_n)?;
    let Some(coeffs) = coeffs else {
        // every term is a nonnegative real: the maximum is G_f(r), attained at ψ = 0
        return Ok(MaxModulus {
            log_m: profile.log_g,
            psi_star: 0.0,
            grid_size: 0,
            degree: tr.trunc_n - lo,
            window_start: lo,
            trunc_n: tr.trunc_n,
            grid_log_max: profile.log_g,
            resolution_bound: 0.0,
            log_tail_bound,
        });
    };
    let degree = (coeffs.len() - 1) as u64;
    let (best, v, n_psi, grid_best) = maximize_poly(&coeffs, opts);
    Ok(MaxModulus {
        log_m: tr.log_mu + 0.5 * best.ln(),
        psi_star: crate::phases::angle_from_turns(v),
        grid_size: n_psi,
        degree,
        window_start: lo,
        trunc_n: tr.trunc_n,
        grid_log_max: tr.log_mu + 0.5 * grid_best.ln(),
        resolution_bound: -0.5 * resolution_cos(degree as f64, n_psi).ln(),
        log_tail_bound,
    })
}

/// `ln Σ |c_m|`, the triangle-inequality ceiling of a coefficient window.
#[allow(dead_code)]
pub(crate) fn log_abs_sum(coeffs: &[Complex64]) -> f64 {
    let mut acc = Neumaier::new();
    for c in coeffs {
        acc.add(c.norm());
    }
    acc.value().ln()
}
