use std::borrow::Cow;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Result, WvError};
use crate::phases::fraction::{turns_from_bits, PhaseFraction};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Explicit(Vec<BigUint>),
    /// `θ_n = 2^{step·n}`; kept symbolic so very long sequences stay cheap.
    PowersOfTwo {
        step: u64,
        len: usize,
    },
}

/// Strictly increasing positive integer frequencies `θ_0 < θ_1 < … < θ_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSequence {
    repr: Repr,
    label: String,
}

/// `x` as an exact ratio `num / 2^exp` of integers (finite positive `x`).
pub(crate) fn dyadic(x: f64) -> (BigUint, u64) {
    debug_assert!(x.is_finite() && x > 0.0);
    let raw = x.to_bits();
    let biased = ((raw >> 52) & 0x7ff) as i64;
    let (mant, e) = if biased == 0 {
        (raw & ((1 << 52) - 1), -1074)
    } else {
        ((raw & ((1 << 52) - 1)) | (1 << 52), biased - 1075)
    };
    if e >= 0 {
        (BigUint::from(mant) << e as u64, 0)
    } else {
        let tz = (mant.trailing_zeros() as i64).min(-e);
        (BigUint::from(mant >> tz), (-e - tz) as u64)
    }
}

impl PhaseSequence {
    pub fn from_values(theta: Vec<BigUint>, label: impl Into<String>) -> Result<Self> {
        if theta.is_empty() {
            return Err(WvError::BadParam("empty phase sequence".into()));
        }
        if theta[0].is_zero() {
            return Err(WvError::BadParam("θ_0 must be at least 1".into()));
        }
        if let Some(i) = theta.windows(2).position(|w| w[1] <= w[0]) {
            return Err(WvError::BadParam(format!(
                "θ not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(PhaseSequence {
            repr: Repr::Explicit(theta),
            label: label.into(),
        })
    }

    /// `θ_n = 2^{step·n}` for `n < len`.
    pub fn powers_of_two(step: u64, len: usize) -> Result<Self> {
        if step == 0 || len == 0 {
            return Err(WvError::BadParam("powers of two need step ≥ 1 and len ≥ 1".into()));
        }
        Ok(PhaseSequence {
            repr: Repr::PowersOfTwo { step, len },
            label: format!("POW2(step={step})"),
        })
    }

    /// Consecutive integers `θ_n = n + 1`.
    pub fn consecutive(len: usize) -> Result<Self> {
        Self::from_values((1..=len as u64).map(BigUint::from).collect(), "CONSECUTIVE")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Explicit(v) => v.len(),
            Repr::PowersOfTwo { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self, n: usize) -> Cow<'_, BigUint> {
        match &self.repr {
            Repr::Explicit(v) => Cow::Borrowed(&v[n]),
            Repr::PowersOfTwo { step, .. } => Cow::Owned(BigUint::one() << (step * n as u64)),
        }
    }

    /// Bit length of the largest element.
    pub fn max_bits(&self) -> u64 {
        match &self.repr {
            Repr::Explicit(v) => v.last().map_or(0, |t| t.bits()),
            Repr::PowersOfTwo { step, len } => step * (*len as u64 - 1) + 1,
        }
    }

    /// `frac(θ_n u)` in turns.
    pub fn turns(&self, n: usize, u: &PhaseFraction) -> f64 {
        match &self.repr {
            Repr::Explicit(v) => u.turns(&v[n]),
            Repr::PowersOfTwo { step, .. } => turns_from_bits(u.frac_pow2(step * n as u64)),
        }
    }

    /// `ln(θ_n / (θ_{n+1} - θ_n))`.
    pub(crate) fn log_gap_ratio(&self, n: usize) -> Result<f64> {
        match &self.repr {
            Repr::PowersOfTwo { step, .. } => Ok(-(((*step as f64) * std::f64::consts::LN_2).exp_m1()).ln()),
            Repr::Explicit(v) => {
                let (a, b) = (&v[n], &v[n + 1]);
                if b <= a {
                    return Err(WvError::BadParam(format!("θ_{} ≤ θ_{n}", n + 1)));
                }
                Ok(ln_big(a) - ln_big(&(b - a)))
            }
        }
    }

    /// Exact check of `θ_{n+1} ≥ q θ_n` for all consecutive pairs.
    pub fn satisfies_ratio(&self, q: f64) -> bool {
        if !(q.is_finite() && q > 0.0) {
            return false;
        }
        if let Repr::PowersOfTwo { step, .. } = &self.repr {
            return q <= 2f64.powi((*step).min(1023) as i32);
        }
        let (num, k) = dyadic(q);
        (0..self.len().saturating_sub(1))
            .all(|n| (self.theta(n + 1).into_owned() << k) >= &num * self.theta(n).as_ref())
    }

    /// Exact check of `θ_{n+1} ≥ θ_n (1 + 1/φ(n))` for all consecutive pairs.
    pub fn satisfies_gap<F: Fn(usize) -> f64>(&self, phi: F) -> bool {
        (0..self.len().saturating_sub(1)).all(|n| {
            let p = phi(n);
            if !(p.is_finite() && p > 0.0) {
                return false;
            }
            let (num, k) = dyadic(p);
            // θ_{n+1}·num ≥ θ_n·(num + 2^k)
            self.theta(n + 1).as_ref() * &num >= self.theta(n).as_ref() * (&num + (BigUint::one() << k))
        })
    }

    /// One decimal integer per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in 0..self.len() {
            out.push_str(&self.theta(n).to_str_radix(10));
            out.push('\n');
        }
        out
    }

    /// Parses the one-integer-per-line format; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut v = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let t = BigUint::parse_bytes(line.as_bytes(), 10)
                .ok_or_else(|| WvError::BadParam(format!("line {}: not a decimal integer", i + 1)))?;
            v.push(t);
        }
        Self::from_values(v, label)
    }
}

/// Natural log of a positive big integer from its leading 64 bits.
pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64_digits().first().copied().unwrap_or(0) as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64_digits()[0] as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `θ_0 = 1`, `θ_{n+1} = ⌈q θ_n⌉` in exact rational arithmetic.
pub fn gen_geometric(q: f64, n_max: usize) -> Result<PhaseSequence> {
    if !(q.is_finite() && q > 1.0) {
        return Err(WvError::BadParam(format!("ratio q = {q} must exceed 1")));
    }
    let label = format!("GEOMETRIC(q={q})");
    if q.fract() == 0.0 && (q as u64).is_power_of_two() {
        let step = (q as u64).trailing_zeros() as u64;
        return Ok(PhaseSequence::powers_of_two(step, n_max + 1)?.with_label(label));
    }
    let (num, k) = dyadic(q);
    let den = BigUint::one() << k;
    let mut v = Vec::with_capacity(n_max + 1);
    let mut t = BigUint::one();
    v.push(t.clone());
    for _ in 0..n_max {
        t = (&t * &num).div_ceil(&den);
        v.push(t.clone());
    }
    PhaseSequence::from_values(v, label)
}

/// `θ_0 = 1`, `θ_{n+1} = ⌈θ_n (1 + 1/φ(n))⌉` with `φ(n)` taken exactly as a double.
pub fn gen_phi<F: Fn(usize) -> f64>(phi: F, n_max: usize) -> Result<PhaseSequence> {
    let mut v = Vec::with_capacity(n_max + 1);
    let mut t = BigUint::one();
    v.push(t.clone());
    let mut prev = f64::NEG_INFINITY;
    for n in 0..n_max {
        let p = phi(n);
        if !(p.is_finite() && p > 0.0) {
            return Err(WvError::BadParam(format!("φ({n}) = {p} is not positive")));
        }
        if p < prev {
            return Err(WvError::BadParam(format!("φ decreases at n = {n}")));
        }
        prev = p;
        let (num, k) = dyadic(p);
        // θ·(1 + 2^k/num) = θ·(num + 2^k)/num
        t = (&t * (&num + (BigUint::one() << k))).div_ceil(&num);
        v.push(t.clone());
    }
    PhaseSequence::from_values(v, "GAP(φ)")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(seq: &PhaseSequence) -> Vec<u64> {
        (0..seq.len())
            .map(|n| seq.theta(n).to_u64_digits().first().copied().unwrap_or(0))
            .collect()
    }

    #[test]
    fn geometric_examples() {
        assert_eq!(ints(&gen_geometric(2.0, 5).unwrap()), vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(ints(&gen_geometric(3.0, 3).unwrap()), vec![1, 3, 9, 27]);
        assert_eq!(ints(&gen_geometric(1.5, 4).unwrap()), vec![1, 2, 3, 5, 8]);
        assert!(gen_geometric(1.0, 3).is_err());
        assert!(gen_geometric(0.5, 3).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(ints(&gen_phi(|_| 1.0, 4).unwrap()), vec![1, 2, 4, 8, 16]);
        assert_eq!(ints(&gen_phi(|n| n as f64 + 1.0, 3).unwrap()), vec![1, 2, 3, 4]);
        assert_eq!(ints(&gen_phi(|n| (n as f64 + 1.0).sqrt(), 2).unwrap()), vec![1, 2, 4]);
        assert!(gen_phi(|n| n as f64, 3).is_err());
    }

    #[test]
    fn generated_sequences_pass_validators() {
        for q in [1.01, 1.5, 2.0, 2.5, 3.0, 4.0] {
            let s = gen_geometric(q, 60).unwrap();
            assert!(s.satisfies_ratio(q), "q = {q}");
        }
        let phi = |n: usize| (n as f64 + 1.0).powf(0.3);
        assert!(gen_phi(phi, 500).unwrap().satisfies_gap(phi));
        assert!(!PhaseSequence::consecutive(10).unwrap().satisfies_ratio(1.5));
    }

    #[test]
    fn powers_of_two_agree_with_explicit() {
        let sym = gen_geometric(2.0, 70).unwrap();
        let explicit = PhaseSequence::from_values((0..=70u32).map(|k| BigUint::one() << k).collect(), "x").unwrap();
        assert_eq!(sym.to_text(), explicit.to_text());
        assert_eq!(sym.max_bits(), explicit.max_bits());
        assert!(explicit.satisfies_ratio(2.0) && sym.satisfies_ratio(2.0));
    }

    #[test]
    fn rejects_non_increasing() {
        let v = vec![BigUint::from(1u32), BigUint::from(1u32)];
        assert!(PhaseSequence::from_values(v, "x").is_err());
        assert!(PhaseSequence::from_values(vec![BigUint::zero()], "x").is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let s = gen_geometric(1.5, 30).unwrap();
        let text = s.to_text();
        assert!(text.starts_with("1\n2\n3\n5\n8\n"));
        let back = PhaseSequence::from_text(&text, "x").unwrap();
        assert_eq!(back.to_text(), text);
        assert!(PhaseSequence::from_text("1\nabc\n", "x").is_err());
    }

    #[test]
    fn ln_big_matches_f64() {
        let x = BigUint::from(3u32).pow(100);
        assert!((ln_big(&x) - 100.0 * 3f64.ln()).abs() < 1e-12);
    }
}
