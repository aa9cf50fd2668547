//! Blocks, block flips, the equivalence `x ~ x'`, and local level sets.
//!
//! The digits of `x` between consecutive balance points form its blocks.
//! Complementing any block leaves `τ` unchanged, and the local level set of
//! `x` is everything reachable that way: `2^{#Z(x)}` expansions when the
//! balance set is finite, a Cantor set otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::eval::takagi_of;
use crate::numbers::{pow2, rat, BalanceKind, BalanceSet, BinExp, Rat};
use crate::omega::Breakpoint;

/// Default cap on the number of members [`enumerate_members`] may return.
pub const DEFAULT_MEMBER_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockWord {
    Finite(Vec<bool>),
    /// The unbounded last block of a finite balance set: every digit after
    /// `start`.
    Tail(BinExp),
}

/// Digits `start+1 ..= end` of an expansion; `end = None` for the tail block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub end: Option<usize>,
    pub word: BlockWord,
}

/// All blocks of an expansion: `head` in order, then, for an infinite
/// balance set, `cycle` repeated forever with its positions shifted by
/// `cycle_period` each time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub head: Vec<Block>,
    pub cycle: Vec<Block>,
    pub cycle_period: usize,
}

impl BlockDecomposition {
    /// Number of blocks, or `None` when there are infinitely many.
    pub fn count(&self) -> Option<usize> {
        self.cycle.is_empty().then_some(self.head.len())
    }

    /// Block `k` (0-indexed).
    pub fn block(&self, k: usize) -> Result<Block> {
        if let Some(b) = self.head.get(k) {
            return Ok(b.clone());
        }
        if self.cycle.is_empty() {
            return Err(Error::IndexOutOfRange { index: k, len: self.head.len() });
        }
        let idx = k - self.head.len();
        let shift = (idx / self.cycle.len()) * self.cycle_period;
        let b = &self.cycle[idx % self.cycle.len()];
        Ok(Block { start: b.start + shift, end: b.end.map(|e| e + shift), word: b.word.clone() })
    }

    /// The first `n` blocks.
    pub fn take(&self, n: usize) -> Result<Vec<Block>> {
        (0..n).map(|k| self.block(k)).collect()
    }
}

/// The block decomposition of `b`.
pub fn blocks(b: &BinExp) -> BlockDecomposition {
    let z = b.balance_set();
    let points = z.points();
    let finite = |lo: usize, hi: usize| Block {
        start: lo,
        end: Some(hi),
        word: BlockWord::Finite((lo + 1..=hi).map(|j| b.bit(j)).collect()),
    };
    let mut head: Vec<Block> = points.windows(2).map(|w| finite(w[0], w[1])).collect();
    match z.cycle() {
        None => {
            let last = *points.last().expect("c_0 is always present");
            head.push(Block { start: last, end: None, word: BlockWord::Tail(b.shift(last)) });
            BlockDecomposition { head, cycle: vec![], cycle_period: 0 }
        }
        Some(c) => {
            let mut prev = c.anchor;
            let cycle = c
                .offsets
                .iter()
                .map(|&o| {
                    let blk = finite(prev, c.anchor + o);
                    prev = c.anchor + o;
                    blk
                })
                .collect();
            BlockDecomposition { head, cycle, cycle_period: c.period }
        }
    }
}

/// `b` with block `k` complemented. `τ` and the balance set are unchanged.
pub fn flip_block(b: &BinExp, k: usize) -> Result<BinExp> {
    let blk = blocks(b).block(k)?;
    Ok(b.flip_range(blk.start, blk.end))
}

/// Whether `b1` and `b2` have the same balance set and blockwise equal or
/// complementary digits.
///
/// The digitwise xor of the two expansions must be constant on each block.
/// Everything is eventually periodic with period dividing the lcm of the two
/// period lengths, so checking one joint period past all preperiods decides
/// the question.
pub fn equivalent(b1: &BinExp, b2: &BinExp) -> bool {
    let z = b1.balance_set();
    if z != b2.balance_set() {
        return false;
    }
    let head = z.points().last().copied().unwrap_or(0);
    let horizon = b1.preperiod_len().max(b2.preperiod_len()).max(head)
        + b1.period_len().lcm(&b2.period_len())
        + 2;
    let u = |j: usize| b1.bit(j) != b2.bit(j);
    (2..=horizon).all(|j| z.contains(j - 1) || u(j) == u(j - 1))
}

/// Size of a local level set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cardinality {
    /// `2^exponent` expansions.
    Finite { exponent: usize },
    Uncountable,
}

/// A local level set, described by its leftmost member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalLevelSetDesc {
    /// The member with every block starting in 0; all its `D_j` are `≥ 0`.
    pub left_endpoint: BinExp,
    pub balance: BalanceSet,
    pub cardinality: Cardinality,
    /// Common value of `τ` on the set.
    pub level: Rat,
    /// `k/r` for a Cantor set with `k` balance points per period `r`; 0 for
    /// a finite set.
    pub hausdorff_dim: Rat,
}

fn orient(word: &[bool]) -> Vec<bool> {
    if word.first() == Some(&true) {
        word.iter().map(|b| !b).collect()
    } else {
        word.to_vec()
    }
}

/// The local level set containing `b`.
pub fn local_level_set(b: &BinExp) -> LocalLevelSetDesc {
    let decomposition = blocks(b);
    let balance = b.balance_set();
    let mut pre = Vec::new();
    let mut tail = None;
    for blk in &decomposition.head {
        match &blk.word {
            BlockWord::Finite(w) => pre.extend(orient(w)),
            BlockWord::Tail(t) => tail = Some(if t.bit(1) { t.complement() } else { t.clone() }),
        }
    }
    let left_endpoint = match tail {
        Some(t) => BinExp::concat(&pre, &t),
        None => {
            let period = decomposition
                .cycle
                .iter()
                .flat_map(|blk| match &blk.word {
                    BlockWord::Finite(w) => orient(w),
                    BlockWord::Tail(_) => unreachable!("cycles hold finite blocks"),
                })
                .collect();
            BinExp::new(pre, period).expect("nonempty period")
        }
    };
    let (cardinality, hausdorff_dim) = match balance.cycle() {
        None => (Cardinality::Finite { exponent: balance.points().len() }, Rat::zero()),
        Some(c) => (Cardinality::Uncountable, rat(c.offsets.len() as i64, c.period as i64)),
    };
    LocalLevelSetDesc { level: takagi_of(&left_endpoint), left_endpoint, balance, cardinality, hausdorff_dim }
}

/// Members of a local level set, in lexicographic order of expansions.
///
/// A finite set is listed in full. For a Cantor set, the first `depth`
/// blocks take both orientations and every later block keeps the
/// left-endpoint orientation, giving `2^depth` representatives.
pub fn enumerate_members(desc: &LocalLevelSetDesc, depth: usize, cap: usize) -> Result<Vec<BinExp>> {
    let n = match desc.cardinality {
        Cardinality::Finite { exponent } => exponent,
        Cardinality::Uncountable => depth,
    };
    if n >= usize::BITS as usize || (1usize << n) > cap {
        return Err(Error::Resource {
            what: "local level set enumeration",
            requested: format!("2^{n} members"),
            cap: cap.to_string(),
        });
    }
    let decomposition = blocks(&desc.left_endpoint);
    let chosen = decomposition.take(n)?;
    // The finite case's last block is the tail; flipping it complements
    // everything after its start.
    let reach = chosen.iter().map(|b| b.end.unwrap_or(b.start)).max().unwrap_or(0);
    let prefix = desc.left_endpoint.bits(reach);
    let rest = desc.left_endpoint.shift(reach);
    let rest_flipped = rest.complement();

    let mut out: Vec<BinExp> = (0..1usize << n)
        .map(|mask| {
            let mut bits = prefix.clone();
            let mut tail = &rest;
            for (_, blk) in chosen.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1) {
                match blk.end {
                    Some(e) => bits[blk.start..e].iter_mut().for_each(|b| *b = !*b),
                    None => tail = &rest_flipped,
                }
            }
            BinExp::concat(&bits, tail)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// `x_k = 1/2 - Σ_{j=1}^k 4^{-j}`, or its limit `1/6` for `k = None`.
/// Every `x_k` and `1 - x_k` has `τ = 1/2`.
pub fn level_half_family(k: Option<u64>) -> Rat {
    match k {
        None => rat(1, 6),
        // 1/2 - (1 - 4^{-k})/3 = 1/6 + 4^{-k}/3
        Some(k) => rat(1, 6) + Rat::new(BigInt::from(1), pow2(2 * k as usize) * 3),
    }
}

/// The `k`-th member `B' + x_k / 4^m` of the level set at
/// `y = τ(B') + 2^{-(2m+1)}`, together with `y`.
pub fn infinite_level_family(bp: &Breakpoint, k: u64) -> (Rat, Rat) {
    let m = bp.half_m;
    let scale = Rat::from_integer(pow2(2 * m));
    let x = &bp.value + level_half_family(Some(k)) / &scale;
    let y = takagi_of(&BinExp::terminating(bp.bits.clone())) + Rat::new(BigInt::from(1), pow2(2 * m + 1));
    (x, y)
}

impl LocalLevelSetDesc {
    pub fn is_finite(&self) -> bool {
        self.balance.kind() == BalanceKind::Finite
    }
}
