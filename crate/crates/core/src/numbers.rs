//! Exact rationals, eventually periodic binary expansions, and the digit
//! statistics (digit sums, deficient digits, balance points) built on them.
//!
//! A dyadic rational `k/2^n` has two binary expansions, one ending in `0^∞`
//! and one ending in `1^∞`. Level-set machinery works on expansions, not on
//! values, so [`BinExp`] is the identity of a point throughout the crate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms.
pub type Rat = BigRational;

/// Shorthand for a small rational constant.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer = BigInt::from_str(numer).map_err(|_| Error::parse(format!("bad rational {text:?}")))?;
    let denom = BigInt::from_str(denom).map_err(|_| Error::parse(format!("bad rational {text:?}")))?;
    if denom.is_zero() {
        return Err(Error::parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rat::new(numer, denom))
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rat(x: &Rat) -> String {
    x.to_string()
}

/// Renders a rational as a truncated decimal with `digits` fractional digits.
pub fn format_decimal(x: &Rat, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (x * Rat::from_integer(scale.clone())).round().to_integer();
    let neg = scaled.is_negative();
    let (int_part, frac_part) = scaled.abs().div_rem(&scale);
    let frac = format!("{:0>width$}", frac_part.to_string(), width = digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// Rejects values outside `[0, 1]`.
pub fn check_unit(x: &Rat) -> Result<()> {
    if x.is_negative() || *x > Rat::one() {
        Err(Error::domain(format!("{x} is outside [0, 1]")))
    } else {
        Ok(())
    }
}

pub(crate) fn pow2(n: usize) -> BigInt {
    BigInt::one() << n
}

/// Big integer whose binary digits, most significant first, are `bits`.
pub(crate) fn bits_to_biguint(bits: &[bool]) -> BigUint {
    let limbs = bits
        .rchunks(32)
        .map(|chunk| chunk.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32))
        .collect();
    BigUint::new(limbs)
}

/// A fraction kept over a caller-chosen denominator, never reduced.
///
/// Exact values of the Takagi function at rationals with long binary periods
/// have denominators of hundreds of thousands of bits; reducing them costs a
/// big gcd while comparing them costs one multiplication. Equality and
/// ordering are by cross-multiplication, so two `Fraction`s over different
/// denominators compare correctly.
#[derive(Clone, Debug)]
pub struct Fraction {
    pub numer: BigInt,
    pub denom: BigInt,
}

impl Fraction {
    pub fn new(numer: BigInt, denom: BigInt) -> Self {
        assert!(denom.is_positive(), "fraction denominator must be positive");
        Fraction { numer, denom }
    }

    pub fn from_rat(x: &Rat) -> Self {
        Fraction::new(x.numer().clone(), x.denom().clone())
    }

    /// Lowest-terms value.
    pub fn reduce(&self) -> Rat {
        Rat::new(self.numer.clone(), self.denom.clone())
    }

    pub fn abs(&self) -> Fraction {
        Fraction::new(self.numer.abs(), self.denom.clone())
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        if self.denom == other.denom {
            return self.numer == other.numer;
        }
        &self.numer * &other.denom == &other.numer * &self.denom
    }
}

impl Eq for Fraction {}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.denom == other.denom {
            return self.numer.cmp(&other.numer);
        }
        (&self.numer * &other.denom).cmp(&(&other.numer * &self.denom))
    }
}

impl Add for &Fraction {
    type Output = Fraction;
    fn add(self, rhs: &Fraction) -> Fraction {
        if self.denom == rhs.denom {
            return Fraction::new(&self.numer + &rhs.numer, self.denom.clone());
        }
        Fraction::new(
            &self.numer * &rhs.denom + &rhs.numer * &self.denom,
            &self.denom * &rhs.denom,
        )
    }
}

impl Sub for &Fraction {
    type Output = Fraction;
    fn sub(self, rhs: &Fraction) -> Fraction {
        if self.denom == rhs.denom {
            return Fraction::new(&self.numer - &rhs.numer, self.denom.clone());
        }
        Fraction::new(
            &self.numer * &rhs.denom - &rhs.numer * &self.denom,
            &self.denom * &rhs.denom,
        )
    }
}

impl Mul for &Fraction {
    type Output = Fraction;
    fn mul(self, rhs: &Fraction) -> Fraction {
        Fraction::new(&self.numer * &rhs.numer, &self.denom * &rhs.denom)
    }
}

/// Which expansion of a dyadic rational to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    /// Ends in `0^∞` (the only expansion of a non-dyadic rational).
    Low,
    /// Ends in `1^∞`; defined for dyadic rationals only.
    High,
}

/// Eventually periodic binary expansion `0.<pre>(<period>)`.
///
/// Always canonical: the period is primitive and the preperiod is as short
/// as possible. Terminating expansions carry the period `0`. Structural
/// equality is therefore equality of digit sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinExp {
    pre: Vec<bool>,
    period: Vec<bool>,
}

/// Length of the primitive root of `word` (KMP failure function).
fn primitive_len(word: &[bool]) -> usize {
    let n = word.len();
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && word[i] != word[k] {
            k = fail[k - 1];
        }
        if word[i] == word[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let d = n - fail[n - 1];
    if n.is_multiple_of(d) {
        d
    } else {
        n
    }
}

fn complement(bits: &[bool]) -> Vec<bool> {
    bits.iter().map(|b| !b).collect()
}

impl BinExp {
    /// Builds the canonical form of `0.<pre>(<period>)`.
    pub fn new(mut pre: Vec<bool>, mut period: Vec<bool>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::parse("binary expansion needs a nonempty period"));
        }
        period.truncate(primitive_len(&period));
        let r = period.len();
        // Trailing preperiod digits that already agree with the period read
        // backwards can be absorbed into it.
        let mut absorbed = 0;
        while absorbed < pre.len() && pre[pre.len() - 1 - absorbed] == period[(r - 1 - absorbed % r) % r] {
            absorbed += 1;
        }
        if absorbed > 0 {
            pre.truncate(pre.len() - absorbed);
            period.rotate_right(absorbed % r);
        }
        Ok(BinExp { pre, period })
    }

    /// Terminating expansion `0.<bits>(0)`.
    pub fn terminating(bits: Vec<bool>) -> Self {
        BinExp::new(bits, vec![false]).expect("nonempty period")
    }

    /// Expansion of a rational in `[0, 1]`.
    ///
    /// `0` and `1` have a single expansion (`0.(0)` and `0.(1)`) and return it
    /// for either tail. Other dyadic rationals honor `tail`; a non-dyadic
    /// rational only has the low tail.
    pub fn from_rational(x: &Rat, tail: Tail) -> Result<Self> {
        check_unit(x)?;
        if x.is_zero() {
            return Ok(BinExp { pre: vec![], period: vec![false] });
        }
        if x.is_one() {
            return Ok(BinExp { pre: vec![], period: vec![true] });
        }
        let p = x.numer().magnitude().clone();
        let q = x.denom().magnitude().clone();
        let v = q.trailing_zeros().unwrap_or(0) as usize;
        let odd = &q >> v;
        if odd.is_one() {
            let mut bits: Vec<bool> = (0..v).map(|i| p.bit((v - 1 - i) as u64)).collect();
            return match tail {
                Tail::Low => BinExp::new(bits, vec![false]),
                Tail::High => {
                    // p is odd, so the last digit is 1; borrow it into 1^∞.
                    let last = bits.len() - 1;
                    bits[last] = false;
                    BinExp::new(bits, vec![true])
                }
            };
        }
        if tail == Tail::High {
            return Err(Error::NoTerminatingExpansion(x.to_string()));
        }
        let (pre, period) = match (p.to_u64(), q.to_u64()) {
            (Some(p), Some(q)) if q < (1 << 62) => long_division_u64(p, q, v),
            _ => long_division_big(&p, &q, v),
        };
        // Long division in lowest terms already yields the shortest
        // preperiod (v digits) and a primitive period (the order of 2).
        Ok(BinExp { pre, period })
    }

    /// Parses `0.<pre>(<period>)`; a missing `(<period>)` means `(0)`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let body = text
            .strip_prefix("0.")
            .ok_or_else(|| Error::parse(format!("expansion must start with \"0.\": {text:?}")))?;
        let (pre, period) = match body.find('(') {
            Some(open) => {
                let close = body
                    .strip_suffix(')')
                    .ok_or_else(|| Error::parse(format!("unterminated period in {text:?}")))?;
                (&body[..open], &close[open + 1..])
            }
            None => (body, "0"),
        };
        let bits = |s: &str| -> Result<Vec<bool>> {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::parse(format!("invalid binary digit {c:?} in {text:?}"))),
                })
                .collect()
        };
        BinExp::new(bits(pre)?, bits(period)?)
    }

    pub fn pre(&self) -> &[bool] {
        &self.pre
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn preperiod_len(&self) -> usize {
        self.pre.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Digit `b_j`, 1-indexed.
    pub fn bit(&self, j: usize) -> bool {
        assert!(j >= 1, "digits are 1-indexed");
        let s = self.pre.len();
        if j <= s {
            self.pre[j - 1]
        } else {
            self.period[(j - s - 1) % self.period.len()]
        }
    }

    /// Digits `b_1 .. b_n`.
    pub fn bits(&self, n: usize) -> Vec<bool> {
        (1..=n).map(|j| self.bit(j)).collect()
    }

    /// Ends in `0^∞`.
    pub fn terminates(&self) -> bool {
        self.period == [false]
    }

    /// Ends in `0^∞` or `1^∞`.
    pub fn is_dyadic(&self) -> bool {
        self.period.len() == 1
    }

    /// Ends in `(01)^∞` (equivalently `(10)^∞`).
    pub fn ends_in_01(&self) -> bool {
        self.period.len() == 2 && self.period[0] != self.period[1]
    }

    /// The expansion of `1 - x`: every digit flipped.
    pub fn complement(&self) -> BinExp {
        BinExp { pre: complement(&self.pre), period: complement(&self.period) }
    }

    /// Exact value `Σ b_j 2^{-j}`.
    pub fn to_rational(&self) -> Rat {
        self.to_fraction().reduce()
    }

    /// Exact value over the denominator `2^s (2^r - 1)`.
    pub fn to_fraction(&self) -> Fraction {
        let s = self.pre.len();
        let r = self.period.len();
        let pre = BigInt::from(bits_to_biguint(&self.pre));
        let per = BigInt::from(bits_to_biguint(&self.period));
        let m = pow2(r) - BigInt::one();
        Fraction::new((&pre << r) - pre + per, m << s)
    }

    /// Digits after position `n`: the expansion of `frac(2^n x)`.
    pub fn shift(&self, n: usize) -> BinExp {
        let s = self.pre.len();
        if n <= s {
            return BinExp::new(self.pre[n..].to_vec(), self.period.clone()).expect("nonempty period");
        }
        let mut period = self.period.clone();
        let r = period.len();
        period.rotate_left((n - s) % r);
        BinExp::new(vec![], period).expect("nonempty period")
    }

    /// Replaces digits `b_1..b_L` with `prefix` (`L = prefix.len()`).
    pub fn splice(&self, prefix: &[bool]) -> BinExp {
        let rest = self.shift(prefix.len());
        let mut pre = prefix.to_vec();
        pre.extend_from_slice(&rest.pre);
        BinExp::new(pre, rest.period).expect("nonempty period")
    }

    /// `0.<prefix>` followed by the digits of `tail`.
    pub fn concat(prefix: &[bool], tail: &BinExp) -> BinExp {
        let mut pre = prefix.to_vec();
        pre.extend_from_slice(&tail.pre);
        BinExp::new(pre, tail.period.clone()).expect("nonempty period")
    }

    /// Flips digits `start+1 ..= end`, or every digit after `start` when
    /// `end` is `None`.
    pub fn flip_range(&self, start: usize, end: Option<usize>) -> BinExp {
        let s = self.pre.len();
        let reach = end.unwrap_or(start).max(s);
        let mut bits = self.bits(reach);
        let mut period = self.period.clone();
        let r = period.len();
        period.rotate_left((reach - s) % r);
        match end {
            Some(e) => bits[start..e].iter_mut().for_each(|b| *b = !*b),
            None => {
                bits[start..].iter_mut().for_each(|b| *b = !*b);
                period = complement(&period);
            }
        }
        BinExp::new(bits, period).expect("nonempty period")
    }

    /// `N¹_j`: number of ones among `b_1..b_j`.
    pub fn digit_sum(&self, j: usize) -> u64 {
        let s = self.pre.len();
        let ones = |bits: &[bool]| bits.iter().filter(|&&b| b).count() as u64;
        if j <= s {
            return ones(&self.pre[..j]);
        }
        let r = self.period.len();
        let (full, part) = ((j - s) / r, (j - s) % r);
        ones(&self.pre) + full as u64 * ones(&self.period) + ones(&self.period[..part])
    }

    /// Deficient digit `D_j = j - 2 N¹_j`; `D_0 = 0`.
    pub fn deficient_digit(&self, j: usize) -> i64 {
        j as i64 - 2 * self.digit_sum(j) as i64
    }

    pub fn digit_profile(&self) -> DigitProfile {
        DigitProfile::of(self)
    }

    pub fn balance_set(&self) -> BalanceSet {
        BalanceSet::of(self)
    }
}

fn long_division_u64(p: u64, q: u64, v: usize) -> (Vec<bool>, Vec<bool>) {
    let mut rem = p;
    // Branch-free: the digits of a long period are close to random.
    let step = |rem: &mut u64| {
        *rem <<= 1;
        let digit = *rem >= q;
        *rem -= q & (digit as u64).wrapping_neg();
        digit
    };
    let pre: Vec<bool> = (0..v).map(|_| step(&mut rem)).collect();
    let start = rem;
    let mut period = vec![step(&mut rem)];
    while rem != start {
        period.push(step(&mut rem));
    }
    (pre, period)
}

fn long_division_big(p: &BigUint, q: &BigUint, v: usize) -> (Vec<bool>, Vec<bool>) {
    let mut rem = p.clone();
    let step = |rem: &mut BigUint| {
        *rem <<= 1;
        if &*rem >= q {
            *rem -= q;
            true
        } else {
            false
        }
    };
    let pre: Vec<bool> = (0..v).map(|_| step(&mut rem)).collect();
    let start = rem.clone();
    let mut period = vec![step(&mut rem)];
    while rem != start {
        period.push(step(&mut rem));
    }
    (pre, period)
}

impl fmt::Display for BinExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = |bits: &[bool]| bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        write!(f, "0.{}({})", digits(&self.pre), digits(&self.period))
    }
}

impl FromStr for BinExp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BinExp::parse(s)
    }
}

/// Lexicographic order of digit sequences. This is numeric order, except
/// that of the two expansions of a dyadic rational the `1^∞` one comes first.
impl Ord for BinExp {
    fn cmp(&self, other: &Self) -> Ordering {
        // Two periodic tails with primitive periods r1, r2 that agree on
        // r1 + r2 digits are identical (Fine and Wilf).
        let horizon = self.pre.len().max(other.pre.len()) + self.period.len() + other.period.len();
        (1..=horizon)
            .map(|j| self.bit(j).cmp(&other.bit(j)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for BinExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Deficient digits `D_j` of an expansion, summarized by its preperiod and
/// one period window.
///
/// With `s` the preperiod length, `r` the period length and `Δ` the drift,
/// `D_{s+tr+i} = D_{s+i} + tΔ` for `1 ≤ i ≤ r` and `t ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitProfile {
    /// `D_1 ..= D_{s+r}`.
    pub prefix: Vec<i64>,
    pub preperiod: usize,
    pub period: usize,
    /// Zeros minus ones per period.
    pub drift: i64,
    /// Minimum of `D_j` over the first tail window `s < j ≤ s + r`.
    pub window_min: i64,
    /// Positions `s < j ≤ s + r` with `D_j = 0`.
    pub window_zero_positions: Vec<usize>,
}

impl DigitProfile {
    pub fn of(b: &BinExp) -> Self {
        let s = b.preperiod_len();
        let r = b.period_len();
        let mut prefix = Vec::with_capacity(s + r);
        let mut d = 0i64;
        for j in 1..=s + r {
            d += if b.bit(j) { -1 } else { 1 };
            prefix.push(d);
        }
        let d_s = if s == 0 { 0 } else { prefix[s - 1] };
        let drift = d - d_s;
        let window = &prefix[s..];
        let window_min = *window.iter().min().expect("nonempty period");
        let window_zero_positions = window
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0)
            .map(|(i, _)| s + i + 1)
            .collect();
        DigitProfile { prefix, preperiod: s, period: r, drift, window_min, window_zero_positions }
    }

    /// `D_j` for any `j ≥ 0`.
    pub fn at(&self, j: usize) -> i64 {
        if j == 0 {
            return 0;
        }
        let (s, r) = (self.preperiod, self.period);
        if j <= s + r {
            return self.prefix[j - 1];
        }
        let t = (j - s - 1) / r;
        let i = (j - s - 1) % r;
        self.prefix[s + i] + t as i64 * self.drift
    }

    pub fn window_max(&self) -> i64 {
        *self.prefix[self.preperiod..].iter().max().expect("nonempty period")
    }

    /// Minimum of `D_j` over all `j ≥ 1`, or `None` when unbounded below.
    pub fn global_min(&self) -> Option<i64> {
        if self.drift < 0 {
            return None;
        }
        let head = self.prefix[..self.preperiod].iter().copied().min();
        Some(head.map_or(self.window_min, |h| h.min(self.window_min)))
    }

    /// `min { D_j : j ≥ m }`, or `None` when unbounded below.
    pub fn future_min(&self, m: usize) -> Option<i64> {
        if self.drift < 0 {
            return None;
        }
        // Past max(m, s) + r every value is at least the value one period earlier.
        let last = m.max(self.preperiod) + self.period;
        (m..=last).map(|j| self.at(j)).min()
    }
}

/// Whether the balance points run out or recur forever.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BalanceKind {
    Finite,
    EventuallyPeriodic,
}

/// The recurring part of an infinite balance set: the points
/// `anchor + t·period + o` for `t ≥ 0` and `o` in `offsets`.
///
/// `anchor` is itself a balance point and the last offset equals `period`,
/// so every window `(anchor + t·period, anchor + (t+1)·period]` is a whole
/// number of blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceCycle {
    pub anchor: usize,
    pub offsets: Vec<usize>,
    pub period: usize,
}

/// Balance set `Z(x) = {0} ∪ { j ≥ 1 : D_j(x) = 0 }`.
#[derive(Clone, Debug)]
pub struct BalanceSet {
    points: Vec<usize>,
    cycle: Option<BalanceCycle>,
}

impl BalanceSet {
    pub fn of(b: &BinExp) -> Self {
        let profile = b.digit_profile();
        let (s, r) = (profile.preperiod, profile.period);
        let head_zeros = profile.prefix[..s].iter().enumerate().filter(|(_, &v)| v == 0).map(|(i, _)| i + 1);
        let mut points: Vec<usize> = std::iter::once(0).chain(head_zeros).collect();

        if profile.drift == 0 {
            // The anchor is the first balance point at or past s; D is
            // r-periodic from s on, so the zeros after it repeat with period r.
            let anchor = if profile.at(s) == 0 {
                Some(s)
            } else {
                profile.window_zero_positions.first().copied()
            };
            if let Some(anchor) = anchor {
                if anchor > s {
                    points.push(anchor);
                }
                let offsets = (1..=r).filter(|&o| profile.at(anchor + o) == 0).collect();
                return BalanceSet { points, cycle: Some(BalanceCycle { anchor, offsets, period: r }) };
            }
            return BalanceSet { points, cycle: None };
        }
        // Nonzero drift: each window offset is hit by D = 0 at most once.
        let delta = profile.drift;
        for i in 1..=r {
            let base = profile.prefix[s + i - 1];
            if base == 0 {
                points.push(s + i);
            } else if (-base) % delta == 0 && (-base) / delta >= 1 {
                let t = ((-base) / delta) as usize;
                points.push(s + t * r + i);
            }
        }
        points.sort_unstable();
        BalanceSet { points, cycle: None }
    }

    pub fn kind(&self) -> BalanceKind {
        if self.cycle.is_some() {
            BalanceKind::EventuallyPeriodic
        } else {
            BalanceKind::Finite
        }
    }

    /// `c_0 = 0` and every balance point up to the cycle anchor (all of
    /// them, for a finite set).
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn cycle(&self) -> Option<&BalanceCycle> {
        self.cycle.as_ref()
    }

    /// `#Z(x)` including `c_0 = 0`, or `None` when infinite.
    pub fn count(&self) -> Option<usize> {
        match self.cycle {
            None => Some(self.points.len()),
            Some(_) => None,
        }
    }

    pub fn contains(&self, j: usize) -> bool {
        if self.points.binary_search(&j).is_ok() {
            return true;
        }
        match &self.cycle {
            Some(c) if j > c.anchor => c.offsets.contains(&((j - c.anchor - 1) % c.period + 1)),
            _ => false,
        }
    }

    /// Balance points `≤ n`, in increasing order.
    pub fn points_up_to(&self, n: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.points.iter().copied().filter(|&p| p <= n).collect();
        if let Some(c) = &self.cycle {
            let mut base = c.anchor;
            'outer: loop {
                for &o in &c.offsets {
                    if base + o > n {
                        break 'outer;
                    }
                    out.push(base + o);
                }
                base += c.period;
            }
        }
        out
    }

    /// The `k`-th balance point `c_k`, or `None` past the end of a finite set.
    pub fn nth(&self, k: usize) -> Option<usize> {
        if let Some(&p) = self.points.get(k) {
            return Some(p);
        }
        let c = self.cycle.as_ref()?;
        let idx = k - self.points.len();
        let per_window = c.offsets.len();
        Some(c.anchor + (idx / per_window) * c.period + c.offsets[idx % per_window])
    }

    /// Largest index up to which membership must be checked to compare two
    /// balance sets.
    fn horizon(&self, other: &Self) -> usize {
        let tail = |b: &BalanceSet| b.points.last().copied().unwrap_or(0);
        let period = |b: &BalanceSet| b.cycle.as_ref().map_or(1, |c| c.period);
        tail(self).max(tail(other)) + period(self).lcm(&period(other)) + 1
    }
}

/// Equality of the underlying sets of indices, whatever the period chosen.
impl PartialEq for BalanceSet {
    fn eq(&self, other: &Self) -> bool {
        if self.kind() != other.kind() {
            return false;
        }
        match self.kind() {
            BalanceKind::Finite => self.points == other.points,
            BalanceKind::EventuallyPeriodic => {
                let n = self.horizon(other);
                self.points_up_to(n) == other.points_up_to(n)
            }
        }
    }
}

impl Eq for BalanceSet {}
