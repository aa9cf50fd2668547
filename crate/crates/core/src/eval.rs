//! Exact evaluation of the Takagi function `τ(x) = Σ ⟪2^n x⟫ / 2^n`.
//!
//! Rationals have eventually periodic expansions, and `τ` of a purely
//! periodic point solves a linear equation obtained from self-affinity over
//! one period. Unwinding the preperiod with one more application gives `τ(x)`
//! in `O(s + r)` bit operations plus a few big-integer shifts.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numbers::{bits_to_biguint, check_unit, pow2, BinExp, Fraction, Rat, Tail};

/// `2^n τ(0.w)` for a finite word `w` of length `n`, which is an integer.
///
/// Uses the digit formula `τ(x) = Σ ℓ_m / 2^m` with `ℓ_m = N¹_{m-1}` when
/// `b_m = 0` and `(m-1) - N¹_{m-1}` when `b_m = 1`; past the word every
/// digit is 0 and the tail contributes `N¹_n / 2^n`. The weighted sum is
/// accumulated limb by limb so long words cost linear time.
fn scaled_dyadic_tau(word: &[bool]) -> BigInt {
    let n = word.len();
    let mut acc = vec![0u64; n / 32 + 3];
    let mut ones = 0u64;
    for (i, &b) in word.iter().enumerate() {
        // ℓ = ones, or i - ones when b is set; kept branch-free.
        let mask = (b as u64).wrapping_neg();
        let l = ones ^ ((ones ^ (i as u64).wrapping_sub(ones)) & mask);
        let pos = n - 1 - i;
        let shifted = (l as u128) << (pos % 32);
        acc[pos / 32] += (shifted as u64) & 0xffff_ffff;
        acc[pos / 32 + 1] += (shifted >> 32) as u64;
        ones += b as u64;
    }
    acc[0] += ones;
    let mut limbs = Vec::with_capacity(acc.len() + 2);
    let mut carry = 0u128;
    for a in acc {
        let v = a as u128 + carry;
        limbs.push(v as u32);
        carry = v >> 32;
    }
    while carry > 0 {
        limbs.push(carry as u32);
        carry >>= 32;
    }
    BigInt::from(BigUint::new(limbs))
}

fn deficient(word: &[bool]) -> i64 {
    word.iter().map(|&b| if b { -1 } else { 1 }).sum()
}

/// Exact `τ` of an expansion, unreduced, over the denominator
/// `2^s (2^r - 1)^2` where `s`, `r` are its preperiod and period lengths.
///
/// With `M = 2^r - 1`, `P` the period word read as an integer and `T`,
/// `T₀` the scaled `τ` of the period and preperiod words,
/// `τ(x) · 2^s M² = T₀ M² + T M + D_r(P) P + D_s(x) P M`.
pub fn takagi_fraction_of(b: &BinExp) -> Fraction {
    let s = b.preperiod_len();
    let r = b.period_len();
    let t0 = scaled_dyadic_tau(b.pre());
    let t = scaled_dyadic_tau(b.period());
    let p = BigInt::from(bits_to_biguint(b.period()));
    let d_s = deficient(b.pre());
    let d_r = deficient(b.period());

    let m2 = pow2(2 * r) - pow2(r + 1) + BigInt::one();
    let t0_m2 = if t0.is_zero() { BigInt::zero() } else { (&t0 << (2 * r)) - (&t0 << (r + 1)) + &t0 };
    let t_m = (&t << r) - &t;
    let p_m = (&p << r) - &p;
    let numer = t0_m2 + t_m + &p * d_r + p_m * d_s;
    Fraction::new(numer, m2 << s)
}

/// Exact `τ(x)`, unreduced; see [`takagi_fraction_of`].
pub fn takagi_fraction(x: &Rat) -> Result<Fraction> {
    Ok(takagi_fraction_of(&BinExp::from_rational(x, Tail::Low)?))
}

/// Exact `τ(x)` in lowest terms.
pub fn takagi_exact(x: &Rat) -> Result<Rat> {
    Ok(takagi_fraction(x)?.reduce())
}

/// Exact `τ` of an expansion in lowest terms. Both expansions of a dyadic
/// rational give the same value.
pub fn takagi_of(b: &BinExp) -> Rat {
    takagi_fraction_of(b).reduce()
}

/// Partial approximant `τ_n(x) = Σ_{j<n} ⟪2^j x⟫ / 2^j`.
pub fn takagi_partial(x: &Rat, n: usize) -> Result<Rat> {
    check_unit(x)?;
    if n == 0 {
        return Ok(Rat::zero());
    }
    let p = x.numer().magnitude().clone();
    let q = x.denom().magnitude().clone();
    // Horner over the integer distances min(2^j p mod q, q - ...).
    let mut acc = BigUint::zero();
    let mut rem = &p % &q;
    for _ in 0..n {
        let other = &q - &rem;
        acc = (acc << 1u32) + if rem < other { &rem } else { &other };
        rem = (rem << 1u32) % &q;
    }
    let denom = BigInt::from(q) << (n - 1);
    Ok(Rat::new(BigInt::from(acc), denom))
}

/// Which series [`takagi_series`] sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// `1/2 - (1/4) Σ_{m≥0} (-1)^{b_{m+1}} D_m / 2^m`.
    DeficientDigit,
    /// `Σ_{m≥1} ℓ_m / 2^m` with `ℓ_m` as in the digit formula.
    DigitCount,
}

/// Partial sum of `terms` terms of a digit series for `τ`.
///
/// Either series is within `4 (terms + 2) / 2^terms` of `τ(x)`.
pub fn takagi_series(b: &BinExp, terms: usize, kind: SeriesKind) -> Result<Rat> {
    if terms == 0 {
        return Err(Error::domain("series needs at least one term"));
    }
    let mut acc = BigInt::zero();
    match kind {
        SeriesKind::DeficientDigit => {
            let mut d = 0i64;
            for m in 0..terms {
                let bit = b.bit(m + 1);
                let term = if bit { -d } else { d };
                acc = (acc << 1) + term;
                d += if bit { -1 } else { 1 };
            }
            // acc / 2^(terms-1) is the truncated sum.
            let sum = Rat::new(acc, pow2(terms - 1));
            Ok(Rat::new(BigInt::one(), BigInt::from(2)) - sum / Rat::from_integer(BigInt::from(4)))
        }
        SeriesKind::DigitCount => {
            let mut ones = 0i64;
            for m in 1..=terms {
                let bit = b.bit(m);
                let l = if bit { (m as i64 - 1) - ones } else { ones };
                acc = (acc << 1) + l;
                ones += bit as i64;
            }
            Ok(Rat::new(acc, pow2(terms)))
        }
    }
}

/// Truncation bound `4 (terms + 2) / 2^terms` for [`takagi_series`].
pub fn series_error_bound(terms: usize) -> Rat {
    Rat::new(BigInt::from(4 * (terms as u64 + 2)), pow2(terms))
}

/// The affine copy of `τ` over `[x0, x0 + 2^{-n}]`:
/// `τ(x0 + w/2^n) = τ(x0) + 2^{-n} (τ(w) + D_n(x0) w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfAffineFrame {
    pub x0: Rat,
    pub depth: usize,
    pub slope: i64,
    pub tau_x0: Rat,
}

impl SelfAffineFrame {
    /// Frame anchored at the dyadic `x0 = k/2^n` with `0 ≤ x0 < 1`.
    pub fn new(x0: &Rat, n: usize) -> Result<Self> {
        check_unit(x0)?;
        let scaled = x0 * Rat::from_integer(pow2(n));
        if !scaled.is_integer() || scaled >= Rat::from_integer(pow2(n)) {
            return Err(Error::domain(format!("{x0} is not of the form k/2^{n} with k < 2^{n}")));
        }
        let b = BinExp::from_rational(x0, Tail::Low)?;
        Ok(SelfAffineFrame {
            x0: x0.clone(),
            depth: n,
            slope: b.deficient_digit(n),
            tau_x0: takagi_of(&b),
        })
    }

    /// `τ(x0 + w/2^n)` through the frame, for `0 ≤ w ≤ 1`.
    pub fn eval(&self, w: &Rat) -> Result<Rat> {
        let tau_w = takagi_exact(w)?;
        let inner = tau_w + w * Rat::from_integer(BigInt::from(self.slope));
        Ok(&self.tau_x0 + inner / Rat::from_integer(pow2(self.depth)))
    }

    /// The point `x0 + w/2^n`.
    pub fn point(&self, w: &Rat) -> Rat {
        &self.x0 + w / Rat::from_integer(pow2(self.depth))
    }
}
