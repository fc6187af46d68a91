//! Fixed-point representation of the rotation parameter and exact angle reduction.
//!
//! The rotation parameter `t` enters only through `θ_n t mod 2π`. It is
//! carried as `u = t/(2π) mod 1 = U / 2^F` with an `F`-bit integer `U`, and
//! `frac(θ_n u)` is formed in integer arithmetic, so huge `θ_n` lose nothing.

use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WvError};

pub const MIN_FRACTION_BITS: u64 = 128;

/// `u ∈ [0, 1)` with `bits` fractional bits, stored as little-endian limbs of `U = u·2^bits`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseFraction {
    limbs: Vec<u64>,
    bits: u64,
}

fn limbs_for(bits: u64) -> usize {
    bits.div_ceil(64) as usize
}

impl PhaseFraction {
    pub fn zero(bits: u64) -> Result<Self> {
        check_bits(bits)?;
        Ok(PhaseFraction {
            limbs: vec![0; limbs_for(bits)],
            bits,
        })
    }

    /// `u = numer / 2^bits` for an integer `numer < 2^bits`.
    pub fn from_integer(numer: &BigUint, bits: u64) -> Result<Self> {
        check_bits(bits)?;
        if numer.bits() > bits {
            return Err(WvError::BadParam(format!("numerator has more than {bits} bits")));
        }
        let mut limbs = numer.to_u64_digits();
        limbs.resize(limbs_for(bits), 0);
        Ok(PhaseFraction { limbs, bits })
    }

    /// Exact conversion of a dyadic `x ∈ [0, 1)`; fails if `x` needs more than `bits` bits.
    pub fn from_f64(x: f64, bits: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&x) {
            return Err(WvError::BadParam(format!("u = {x} not in [0, 1)")));
        }
        if x == 0.0 {
            return Self::zero(bits);
        }
        let raw = x.to_bits();
        let exp = ((raw >> 52) & 0x7ff) as i64;
        let (mant, e) = if exp == 0 {
            (raw & ((1 << 52) - 1), -1074)
        } else {
            ((raw & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
        };
        // x = mant · 2^e with e < 0
        let tz = mant.trailing_zeros() as i64;
        let (mant, e) = (mant >> tz, e + tz);
        let need = (-e) as u64;
        if need > bits {
            return Err(WvError::BadParam(format!(
                "{x} needs {need} fractional bits, have {bits}"
            )));
        }
        Self::from_integer(&(BigUint::from(mant) << (bits - need)), bits)
    }

    /// `frac(t / 2π)` for a real rotation parameter, rounded once to a double before conversion.
    pub fn from_t(t: f64, bits: u64) -> Result<Self> {
        let turns = t / TAU;
        let frac = turns - turns.floor();
        Self::from_f64(if frac >= 1.0 { 0.0 } else { frac }, bits.max(1100))
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn numerator(&self) -> BigUint {
        let mut digits = Vec::with_capacity(self.limbs.len() * 2);
        for l in &self.limbs {
            digits.push(*l as u32);
            digits.push((*l >> 32) as u32);
        }
        BigUint::new(digits)
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|l| *l == 0)
    }

    /// `(1 - u) mod 1`.
    pub fn complement(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let full = BigUint::one() << self.bits;
        Self::from_integer(&(full - self.numerator()), self.bits).expect("complement fits")
    }

    /// Approximate value as a double.
    pub fn to_f64(&self) -> f64 {
        (self.top_bits(self.bits) as f64) * (-128f64).exp2()
    }

    /// Hexadecimal fraction digits, most significant first, `⌈bits/4⌉` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.bits.div_ceil(4) as usize;
        // left-align so the hex digits read as a fraction
        let pad = digits as u64 * 4 - self.bits;
        let s = (self.numerator() << pad).to_str_radix(16);
        format!("{}{}", "0".repeat(digits.saturating_sub(s.len())), s)
    }

    /// Bits `[lo, lo + width)` of `U`, `width ≤ 128`.
    fn extract_u128(&self, lo: u64, width: u64) -> u128 {
        debug_assert!(width <= 128);
        if width == 0 {
            return 0;
        }
        let word = (lo / 64) as usize;
        let off = lo % 64;
        let get = |i: usize| self.limbs.get(i).copied().unwrap_or(0) as u128;
        let mut v = get(word) >> off;
        v |= get(word + 1) << (64 - off);
        if off > 0 {
            v |= get(word + 2) << (128 - off);
        }
        if width < 128 {
            v &= (1u128 << width) - 1;
        }
        v
    }

    /// Bits `[lo, hi)` of `U` as an integer.
    fn extract_big(&self, lo: u64, hi: u64) -> BigUint {
        let first = (lo / 64) as usize;
        let last = (hi.div_ceil(64) as usize).min(self.limbs.len());
        let mut digits = Vec::with_capacity((last - first) * 2);
        for l in &self.limbs[first..last] {
            digits.push(*l as u32);
            digits.push((*l >> 32) as u32);
        }
        let v = BigUint::new(digits) >> (lo % 64);
        let width = hi - lo;
        v & ((BigUint::one() << width) - 1u32)
    }

    /// Leading 128 bits of `frac(2^{-(bits - avail)}·…)`, i.e. of the fraction
    /// formed by the low `avail` bits of `U`.
    fn top_bits(&self, avail: u64) -> u128 {
        if avail >= 128 {
            self.extract_u128(avail - 128, 128)
        } else {
            self.extract_u128(0, avail) << (128 - avail)
        }
    }

    /// Leading 128 bits of `frac(m·2^shift·u)` for odd `m`.
    ///
    /// Exact whenever `m = 1` or `bits - shift ≤ bitlen(m) + 128`; otherwise the
    /// multiplicand is cut to `bitlen(m) + 128` bits and the result is within
    /// one unit of the last place (`2^-128`).
    pub fn frac_times(&self, odd: &BigUint, shift: u64) -> u128 {
        if shift >= self.bits || odd.is_zero() {
            return 0;
        }
        let avail = self.bits - shift;
        let mb = odd.bits();
        if odd.is_one() {
            return self.top_bits(avail);
        }
        let w = avail.min(mb + 128);
        let x = self.extract_big(avail - w, avail);
        let prod = (odd * x) & ((BigUint::one() << w) - 1u32);
        let top = if w >= 128 { prod >> (w - 128) } else { prod << (128 - w) };
        let d = top.to_u64_digits();
        (d.first().copied().unwrap_or(0) as u128) | ((d.get(1).copied().unwrap_or(0) as u128) << 64)
    }

    /// Leading 128 bits of `frac(2^shift·u)`.
    pub(crate) fn frac_pow2(&self, shift: u64) -> u128 {
        if shift >= self.bits {
            0
        } else {
            self.top_bits(self.bits - shift)
        }
    }

    /// `frac(θ u)` in turns, `[0, 1)`.
    pub fn turns(&self, theta: &BigUint) -> f64 {
        if theta.is_zero() {
            return 0.0;
        }
        let shift = theta.trailing_zeros().unwrap_or(0);
        turns_from_bits(self.frac_times(&(theta >> shift), shift))
    }
}

pub(crate) fn turns_from_bits(bits: u128) -> f64 {
    let v = bits as f64 * (-128f64).exp2();
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

pub(crate) fn angle_from_turns(turns: f64) -> f64 {
    let a = turns * TAU;
    if a >= TAU {
        0.0
    } else {
        a
    }
}

fn check_bits(bits: u64) -> Result<()> {
    if bits < MIN_FRACTION_BITS {
        return Err(WvError::BadParam(format!(
            "fraction needs at least {MIN_FRACTION_BITS} bits, got {bits}"
        )));
    }
    Ok(())
}

/// `2π·frac(θ u) ∈ [0, 2π)`.
pub fn phase_angle(theta: &BigUint, u: &PhaseFraction) -> f64 {
    angle_from_turns(u.turns(theta))
}

/// Uniform `u` on `[0, 1)` at full `bits` resolution.
pub fn sample_u<R: RngCore + ?Sized>(rng: &mut R, bits: u64) -> Result<PhaseFraction> {
    check_bits(bits)?;
    let n = limbs_for(bits);
    let mut limbs: Vec<u64> = (0..n).map(|_| rng.next_u64()).collect();
    let extra = n as u64 * 64 - bits;
    if extra > 0 {
        let last = limbs.last_mut().expect("at least two limbs");
        *last &= u64::MAX >> extra;
    }
    Ok(PhaseFraction { limbs, bits })
}
