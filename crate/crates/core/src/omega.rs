//! The deficient digit set `Ω^L = { x : D_j(x) ≥ 0 for all j }`.
//!
//! `Ω^L` is the set of left endpoints of local level sets. It sits inside
//! `[0, 1/3]` and is what remains of `[0, 1)` after removing one open gap
//! interval per small breakpoint, plus `(1/3, 1)`.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::takagi_exact;
use crate::numbers::{format_rat, pow2, rat, BinExp, Rat, Tail};

/// Default cap on `m` for breakpoint and gap enumeration (`2m ≤ 24`).
pub const DEFAULT_HALF_DEPTH_CAP: usize = 12;

/// Whether every `D_j(b)`, `j ≥ 1`, is nonnegative.
pub fn in_omega_l(b: &BinExp) -> bool {
    b.digit_profile().global_min().is_some_and(|m| m >= 0)
}

/// Which expansion of `x`, if any, lies in `Ω^L`. The `0^∞` expansion is
/// tried first; the `1^∞` expansion of a dyadic never qualifies but is
/// checked all the same.
pub fn in_omega_l_rat(x: &Rat) -> Result<Option<Tail>> {
    for tail in [Tail::Low, Tail::High] {
        match BinExp::from_rational(x, tail) {
            Ok(b) if in_omega_l(&b) => return Ok(Some(tail)),
            Ok(_) | Err(Error::NoTerminatingExpansion(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Whether every `D_j(b)`, `j ≥ 1`, is strictly positive, i.e. `2x ∈ Ω^L`.
pub fn in_half_omega_l(b: &BinExp) -> bool {
    b.digit_profile().global_min().is_some_and(|m| m > 0)
}

/// First index `j ≥ 1` with `D_j < 0`, if any.
fn first_negative(b: &BinExp) -> Option<usize> {
    let p = b.digit_profile();
    if let Some(i) = p.prefix.iter().position(|&d| d < 0) {
        return Some(i + 1);
    }
    if p.drift >= 0 {
        return None;
    }
    // Every window value is still ≥ 0 and falls by |Δ| per period.
    let fall = -p.drift;
    (1..=p.period)
        .map(|i| {
            let d = p.prefix[p.preperiod + i - 1];
            p.preperiod + (d / fall + 1) as usize * p.period + i
        })
        .min()
}

/// `P^L(b)`: the largest point of `Ω^L` not exceeding `b`.
///
/// With `D_{n+1}` the first negative deficient digit this is
/// `0.b_1…b_n(01)^∞`; points of `Ω^L` map to themselves.
pub fn project_omega_l(b: &BinExp) -> BinExp {
    match first_negative(b) {
        None => b.clone(),
        Some(j) => BinExp::new(b.bits(j - 1), vec![false, true]).expect("nonempty period"),
    }
}

/// `P^L(x)` on values, through the `0^∞` expansion.
pub fn project_omega_l_rat(x: &Rat) -> Result<Rat> {
    Ok(project_omega_l(&BinExp::from_rational(x, Tail::Low)?).to_rational())
}

/// A balanced dyadic rational in `Ω^L`: a `2m`-digit word with `D_j ≥ 0`
/// throughout and `D_{2m} = 0` (a Dyck word).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Breakpoint {
    pub value: Rat,
    pub bits: Vec<bool>,
    pub half_m: usize,
}

impl Breakpoint {
    fn from_bits(bits: Vec<bool>) -> Self {
        let value = BinExp::terminating(bits.clone()).to_rational();
        Breakpoint { value, half_m: bits.len() / 2, bits }
    }

    /// Validates `x` as a breakpoint; its length is fixed by its last 1-digit.
    pub fn try_from_rat(x: &Rat) -> Result<Self> {
        let b = BinExp::from_rational(x, Tail::Low)?;
        if !b.terminates() {
            return Err(Error::domain(format!("{x} is not a dyadic rational")));
        }
        let bits = b.pre().to_vec();
        let mut d = 0i64;
        for &bit in &bits {
            d += if bit { -1 } else { 1 };
            if d < 0 {
                return Err(Error::domain(format!("{x} is not in the deficient digit set")));
            }
        }
        if d != 0 {
            return Err(Error::domain(format!("{x} is not balanced (D = {d} after its last digit)")));
        }
        Ok(Breakpoint::from_bits(bits))
    }

    /// Small breakpoints end in two 1-digits.
    pub fn is_small(&self) -> bool {
        self.bits.len() >= 4 && self.bits[self.bits.len() - 2..] == [true, true]
    }

    pub fn two_m(&self) -> usize {
        2 * self.half_m
    }

    pub fn expansion(&self) -> BinExp {
        BinExp::terminating(self.bits.clone())
    }
}

/// `C_m = binom(2m, m) / (m + 1)`.
pub fn catalan(m: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..m {
        c = c * (2 * (2 * i as u64) + 2) / (i as u64 + 2);
    }
    c
}

fn cap_check(m: usize, cap: usize) -> Result<()> {
    if m > cap {
        return Err(Error::Resource { what: "breakpoint enumeration", requested: format!("m = {m}"), cap: cap.to_string() });
    }
    Ok(())
}

/// All breakpoints with `2m` digits, in increasing order. There are `C_m`.
pub fn enumerate_breakpoints(m: usize, cap: usize) -> Result<Vec<Breakpoint>> {
    cap_check(m, cap)?;
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(2 * m);
    // Depth-first with 0 before 1 yields numeric order.
    fn walk(word: &mut Vec<bool>, d: usize, len: usize, out: &mut Vec<Breakpoint>) {
        let left = len - word.len();
        if left == 0 {
            out.push(Breakpoint::from_bits(word.clone()));
            return;
        }
        if d < left {
            word.push(false);
            walk(word, d + 1, len, out);
            word.pop();
        }
        if d > 0 {
            word.push(true);
            walk(word, d - 1, len, out);
            word.pop();
        }
    }
    walk(&mut word, 0, 2 * m, &mut out);
    Ok(out)
}

/// An open interval `(x⁻, x⁺)` removed from `[0, 1)` to form `Ω^L`.
///
/// For a small breakpoint `B = 0.b_1…b_ℓ 0 1^k` (`k ≥ 2`),
/// `x⁻ = 0.b_1…b_ℓ 0 1^k (01)^∞` and `x⁺ = 0.b_1…b_ℓ 1 0^k`. The empty
/// breakpoint (value 0) labels `(1/3, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapInterval {
    pub breakpoint: Breakpoint,
    pub x_minus: Rat,
    pub x_plus: Rat,
}

impl GapInterval {
    fn empty() -> Self {
        GapInterval { breakpoint: Breakpoint::from_bits(vec![]), x_minus: rat(1, 3), x_plus: rat(1, 1) }
    }

    /// The gap labeled by a small breakpoint.
    pub fn of(bp: &Breakpoint) -> Result<Self> {
        if !bp.is_small() {
            return Err(Error::domain(format!("{} is not a small breakpoint", bp.value)));
        }
        let last_zero = bp.bits.iter().rposition(|&b| !b).expect("a Dyck word starts with 0");
        let k = bp.bits.len() - 1 - last_zero;
        let minus = BinExp::new(bp.bits.clone(), vec![false, true]).expect("nonempty period");
        let mut plus = bp.bits[..last_zero].to_vec();
        plus.push(true);
        plus.extend(std::iter::repeat_n(false, k));
        Ok(GapInterval {
            breakpoint: bp.clone(),
            x_minus: minus.to_rational(),
            x_plus: BinExp::terminating(plus).to_rational(),
        })
    }

    pub fn length(&self) -> Rat {
        &self.x_plus - &self.x_minus
    }

    pub fn tau_minus(&self) -> Rat {
        takagi_exact(&self.x_minus).expect("gap endpoints lie in [0, 1]")
    }

    pub fn tau_plus(&self) -> Rat {
        takagi_exact(&self.x_plus).expect("gap endpoints lie in [0, 1]")
    }

    /// Whether `x` lies strictly inside the gap.
    pub fn contains(&self, x: &Rat) -> bool {
        &self.x_minus < x && x < &self.x_plus
    }

    /// One CSV/JSON row: `two_m,B,x_minus,x_plus,tau_x_minus,tau_x_plus`.
    pub fn row(&self) -> GapRow {
        GapRow {
            two_m: self.breakpoint.two_m(),
            b: format_rat(&self.breakpoint.value),
            x_minus: format_rat(&self.x_minus),
            x_plus: format_rat(&self.x_plus),
            tau_x_minus: format_rat(&self.tau_minus()),
            tau_x_plus: format_rat(&self.tau_plus()),
        }
    }
}

/// Serialized gap interval, rationals as `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapRow {
    pub two_m: usize,
    #[serde(rename = "B")]
    pub b: String,
    pub x_minus: String,
    pub x_plus: String,
    pub tau_x_minus: String,
    pub tau_x_plus: String,
}

/// All gap intervals whose breakpoints have at most `max_2m` digits: the
/// `(1/3, 1)` gap first, then by length of breakpoint and numerically.
pub fn enumerate_gap_intervals(max_2m: usize, cap: usize) -> Result<Vec<GapInterval>> {
    if !max_2m.is_multiple_of(2) {
        return Err(Error::domain(format!("max 2m must be even, got {max_2m}")));
    }
    cap_check(max_2m / 2, cap)?;
    let mut out = vec![GapInterval::empty()];
    for m in 2..=max_2m / 2 {
        for bp in enumerate_breakpoints(m, cap)?.into_iter().filter(Breakpoint::is_small) {
            out.push(GapInterval::of(&bp)?);
        }
    }
    Ok(out)
}

/// Writes gap intervals as CSV with header
/// `two_m,B,x_minus,x_plus,tau_x_minus,tau_x_plus`.
pub fn write_gap_csv<W: Write>(gaps: &[GapInterval], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for g in gaps {
        w.serialize(g.row()).map_err(|e| Error::domain(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::domain(e.to_string()))?;
    Ok(())
}

/// `C_m / 4^m`, the measure of the `2m`-digit dyadic boxes covering `Ω^L`.
pub fn cover_measure_bound(m: usize) -> Result<Rat> {
    if m == 0 {
        return Err(Error::domain("cover bound needs m ≥ 1"));
    }
    Ok(Rat::new(catalan(m), pow2(2 * m)))
}

/// Direction of [`monotone_approximants`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Strictly monotone sequences in `Ω^L` converging to `b ∈ Ω^L`.
///
/// Increasing: truncations `0.b_1…b_m` at indices with `D_m > 0`, each with
/// `τ` strictly below `τ(b)`. Decreasing: `0.b_1…b_m(01)^∞` at indices where
/// `D_m` is a running minimum of the remaining digits, each with `τ`
/// strictly above `τ(b)`. The first needs `b` not to end in `0^∞`, the
/// second not to end in `(01)^∞`.
pub fn monotone_approximants(b: &BinExp, direction: Direction, count: usize) -> Result<Vec<BinExp>> {
    if !in_omega_l(b) {
        return Err(Error::NoSuchSequence(format!("{b} is not in the deficient digit set")));
    }
    let profile = b.digit_profile();
    let limit = profile.preperiod + (4 * count + 8) * profile.period + 2 * count + 8;
    let mut out: Vec<BinExp> = Vec::with_capacity(count);
    match direction {
        Direction::Increasing => {
            if b.terminates() {
                return Err(Error::NoSuchSequence(format!("{b} ends in 0^∞")));
            }
            let mut prev = Rat::zero();
            for m in 1..=limit {
                if out.len() == count {
                    break;
                }
                if profile.at(m) > 0 {
                    let t = BinExp::terminating(b.bits(m));
                    let v = t.to_rational();
                    if v > prev {
                        prev = v;
                        out.push(t);
                    }
                }
            }
        }
        Direction::Decreasing => {
            if b.ends_in_01() {
                return Err(Error::NoSuchSequence(format!("{b} ends in (01)^∞")));
            }
            let mut prev: Option<Rat> = None;
            for m in 1..=limit {
                if out.len() == count {
                    break;
                }
                if Some(profile.at(m)) == profile.future_min(m) {
                    let t = BinExp::new(b.bits(m), vec![false, true]).expect("nonempty period");
                    let v = t.to_rational();
                    if prev.as_ref().is_none_or(|p| &v < p) && t > *b {
                        prev = Some(v);
                        out.push(t);
                    }
                }
            }
        }
    }
    if out.len() < count {
        return Err(Error::NoSuchSequence(format!("found only {} approximants of {b}", out.len())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::takagi_of;
    use proptest::prelude::*;

    fn e(s: &str) -> BinExp {
        BinExp::parse(s).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(in_omega_l(&e("0.(01)")));
        assert!(in_omega_l(&e("0.0011(01)")));
        assert!(!in_omega_l(&e("0.10(0)")));
        assert!(!in_omega_l(&e("0.00(1)")));
        assert!(in_omega_l(&e("0.(0)")));
        assert_eq!(in_omega_l_rat(&rat(1, 4)).unwrap(), Some(Tail::Low));
        assert_eq!(in_omega_l_rat(&rat(1, 2)).unwrap(), None);
        assert!(in_half_omega_l(&e("0.0(01)")));
        assert!(!in_half_omega_l(&e("0.(01)")));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_omega_l(&e("0.0111")), e("0.(01)"));
        assert_eq!(project_omega_l(&e("0.1(0)")).to_rational(), rat(1, 3));
        assert_eq!(project_omega_l(&e("0.0011(01)")), e("0.0011(01)"));
        // Drift -1 tail: D runs 1, 2, 1, 0, 1, 0, -1 and then keeps falling.
        assert_eq!(project_omega_l(&e("0.0(011)")), e("0.001101(01)"));
        assert_eq!(project_omega_l_rat(&rat(7, 16)).unwrap(), rat(1, 3));
        assert_eq!(project_omega_l_rat(&rat(1, 1)).unwrap(), rat(1, 3));
    }

    #[test]
    fn projection_is_exhaustive_supremum() {
        // Oracle: the largest Ω^L dyadic with 10 digits below x, compared to
        // the projection of x up to the 2^-10 resolution.
        let members: Vec<Rat> = (0..1024).map(|k| rat(k, 1024)).filter(|x| in_omega_l_rat(x).unwrap().is_some()).collect();
        for k in 0..=1024 {
            let x = rat(k, 1024);
            let p = project_omega_l_rat(&x).unwrap();
            assert!(p <= x && in_omega_l_rat(&p).unwrap().is_some());
            let best = members.iter().filter(|m| **m <= x).max().unwrap();
            assert!(best <= &p && &p - best < rat(1, 512), "x = {x}");
        }
    }

    #[test]
    fn catalan_counts() {
        let expected = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
        for (m, &c) in expected.iter().enumerate() {
            assert_eq!(catalan(m), BigInt::from(c));
            assert_eq!(enumerate_breakpoints(m, DEFAULT_HALF_DEPTH_CAP).unwrap().len() as u64, c);
        }
        assert!(matches!(enumerate_breakpoints(13, DEFAULT_HALF_DEPTH_CAP), Err(Error::Resource { .. })));
    }

    #[test]
    fn breakpoint_examples() {
        let one = enumerate_breakpoints(1, 12).unwrap();
        assert_eq!(one[0].bits, vec![false, true]);
        let two: Vec<Rat> = enumerate_breakpoints(2, 12).unwrap().into_iter().map(|b| b.value).collect();
        assert_eq!(two, vec![rat(3, 16), rat(5, 16)]);
        assert!(Breakpoint::try_from_rat(&rat(3, 16)).unwrap().is_small());
        assert!(!Breakpoint::try_from_rat(&rat(5, 16)).unwrap().is_small());
        assert!(Breakpoint::try_from_rat(&rat(1, 8)).is_err());
        assert!(Breakpoint::try_from_rat(&rat(1, 2)).is_err());
        assert!(Breakpoint::try_from_rat(&rat(1, 3)).is_err());
        assert_eq!(Breakpoint::try_from_rat(&rat(0, 1)).unwrap().half_m, 0);
    }

    #[test]
    fn gap_examples() {
        let gaps = enumerate_gap_intervals(6, 12).unwrap();
        let rows: Vec<(Rat, Rat, Rat)> = gaps.iter().map(|g| (g.breakpoint.value.clone(), g.x_minus.clone(), g.x_plus.clone())).collect();
        assert_eq!(
            rows,
            vec![
                (rat(0, 1), rat(1, 3), rat(1, 1)),
                (rat(3, 16), rat(5, 24), rat(1, 4)),
                (rat(7, 64), rat(11, 96), rat(1, 8)),
                (rat(11, 64), rat(17, 96), rat(3, 16)),
                (rat(19, 64), rat(29, 96), rat(5, 16)),
            ]
        );
        for g in &gaps[1..] {
            let len = Rat::new(BigInt::one(), pow2(g.breakpoint.two_m() - 1) * 3);
            assert_eq!(g.length(), len);
            assert_eq!(g.tau_minus() - g.tau_plus(), len);
        }
        assert_eq!(enumerate_gap_intervals(2, 12).unwrap().len(), 1);
        assert!(enumerate_gap_intervals(5, 12).is_err());
        assert!(matches!(enumerate_gap_intervals(26, 12), Err(Error::Resource { .. })));
    }

    #[test]
    fn gap_csv() {
        let mut buf = Vec::new();
        write_gap_csv(&enumerate_gap_intervals(4, 12).unwrap(), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "two_m,B,x_minus,x_plus,tau_x_minus,tau_x_plus\n0,0,1/3,1,2/3,0\n4,3/16,5/24,1/4,13/24,1/2\n"
        );
    }

    #[test]
    fn cover_bound_examples() {
        assert_eq!(cover_measure_bound(1).unwrap(), rat(1, 4));
        assert_eq!(cover_measure_bound(2).unwrap(), rat(1, 8));
        assert_eq!(cover_measure_bound(5).unwrap(), rat(21, 512));
        for m in 1..20 {
            assert!(cover_measure_bound(m + 1).unwrap() < cover_measure_bound(m).unwrap());
        }
        assert!(cover_measure_bound(0).is_err());
    }

    #[test]
    fn approximant_examples() {
        let third = e("0.(01)");
        let inc = monotone_approximants(&third, Direction::Increasing, 3).unwrap();
        assert_eq!(inc, vec![e("0.01"), e("0.0101"), e("0.010101")]);
        assert!(inc.iter().all(|x| takagi_of(x) < rat(2, 3)));
        assert!(matches!(monotone_approximants(&third, Direction::Decreasing, 1), Err(Error::NoSuchSequence(_))));

        let b = e("0.0011(01)");
        let inc = monotone_approximants(&b, Direction::Increasing, 2).unwrap();
        assert!(inc.iter().all(|x| takagi_of(x) < rat(13, 24) && x.to_rational() < rat(5, 24)));

        assert!(matches!(monotone_approximants(&e("0.01"), Direction::Increasing, 1), Err(Error::NoSuchSequence(_))));
        assert!(matches!(monotone_approximants(&e("0.1"), Direction::Increasing, 1), Err(Error::NoSuchSequence(_))));
    }

    fn omega_member() -> impl Strategy<Value = BinExp> {
        (prop::collection::vec(any::<bool>(), 0..14), prop::collection::vec(any::<bool>(), 1..8))
            .prop_map(|(pre, per)| project_omega_l(&BinExp::new(pre, per).unwrap()))
    }

    fn expansion() -> impl Strategy<Value = BinExp> {
        (prop::collection::vec(any::<bool>(), 0..14), prop::collection::vec(any::<bool>(), 1..8))
            .prop_map(|(pre, per)| BinExp::new(pre, per).unwrap())
    }

    proptest! {
        #[test]
        fn omega_lies_below_a_third(b in omega_member()) {
            prop_assert!(in_omega_l(&b));
            prop_assert!(b.to_rational() <= rat(1, 3));
        }

        #[test]
        fn projection_properties(a in expansion(), b in expansion()) {
            let pa = project_omega_l(&a);
            prop_assert!(in_omega_l(&pa));
            prop_assert_eq!(project_omega_l(&pa), pa.clone());
            prop_assert_eq!(pa == a, in_omega_l(&a));
            prop_assert!(pa.to_rational() <= a.to_rational());
            let pb = project_omega_l(&b);
            if a.to_rational() <= b.to_rational() {
                prop_assert!(pa.to_rational() <= pb.to_rational());
            }
            if a.to_rational() >= rat(1, 3) {
                prop_assert_eq!(pa.to_rational(), rat(1, 3));
            }
        }

        #[test]
        fn approximants_converge_monotonically(b in omega_member(), count in 1usize..6) {
            let t = takagi_of(&b);
            let x = b.to_rational();
            if let Ok(inc) = monotone_approximants(&b, Direction::Increasing, count) {
                prop_assert_eq!(inc.len(), count);
                for w in inc.windows(2) { prop_assert!(w[0].to_rational() < w[1].to_rational()); }
                for a in &inc {
                    prop_assert!(in_omega_l(a) && a.to_rational() < x && takagi_of(a) < t);
                }
            } else {
                prop_assert!(b.terminates());
            }
            if let Ok(dec) = monotone_approximants(&b, Direction::Decreasing, count) {
                for w in dec.windows(2) { prop_assert!(w[0].to_rational() > w[1].to_rational()); }
                for a in &dec {
                    prop_assert!(in_omega_l(a) && a.to_rational() > x && takagi_of(a) > t);
                }
            } else {
                prop_assert!(b.ends_in_01());
            }
        }

        #[test]
        fn half_omega_monotonicity(a in omega_member(), b in omega_member(), c in omega_member()) {
            // x ∈ ½Ω^L iff x = 0.0w with w ∈ Ω^L.
            let mut xs: Vec<BinExp> = [a, b, c].iter().map(|w| BinExp::concat(&[false], w)).collect();
            xs.sort_by_key(|x| x.to_rational());
            xs.dedup_by_key(|x| x.to_rational());
            for x in &xs { prop_assert!(in_half_omega_l(x)); }
            let ts: Vec<Rat> = xs.iter().map(takagi_of).collect();
            for w in ts.windows(2) { prop_assert!(w[0] <= w[1]); }
            if ts.len() == 3 { prop_assert!(ts[2] > ts[0]); }
        }
    }
}
