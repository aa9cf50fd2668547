//! The flattened Takagi function `τ^L`, the singular function `τ^S`, and
//! exact variation and coarea computations on piecewise-linear samples.
//!
//! `τ^L` agrees with `τ` on `Ω^L` and runs with slope `-1` across each gap;
//! `τ^S = τ^L + x` is continuous, nondecreasing, and constant on every gap.
//! Sampling either one on a dyadic grid gives a [`PlFunction`], on which the
//! coarea integral of upper-set perimeters can be evaluated exactly.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{takagi_of, takagi_partial};
use crate::numbers::{check_unit, format_rat, pow2, rat, BinExp, Rat, Tail};
use crate::omega::project_omega_l;

/// Default cap on sampling depth (`2^20 + 1` grid points).
pub const DEFAULT_SAMPLE_DEPTH_CAP: usize = 20;

/// `x_b = P^L(x)` and `τ(x_b)`.
fn projected(x: &Rat) -> Result<(Rat, Rat)> {
    check_unit(x)?;
    let xb = project_omega_l(&BinExp::from_rational(x, Tail::Low)?);
    Ok((xb.to_rational(), takagi_of(&xb)))
}

/// `τ^L(x) = τ(x_b) - (x - x_b)` with `x_b = P^L(x)`.
pub fn flattened_takagi(x: &Rat) -> Result<Rat> {
    let (xb, t) = projected(x)?;
    Ok(t + xb - x)
}

/// `τ^S(x) = τ^L(x) + x = τ(x_b) + x_b`.
pub fn takagi_singular(x: &Rat) -> Result<Rat> {
    let (xb, t) = projected(x)?;
    Ok(t + xb)
}

/// Linear interpolation of `values` over the strictly increasing `grid`,
/// which runs from 0 to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlFunction {
    grid: Vec<Rat>,
    values: Vec<Rat>,
}

impl PlFunction {
    pub fn new(grid: Vec<Rat>, values: Vec<Rat>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::domain(format!("{} abscissas but {} values", grid.len(), values.len())));
        }
        if grid.len() < 2 || !grid[0].is_zero() || grid[grid.len() - 1] != rat(1, 1) {
            return Err(Error::domain("grid must start at 0 and end at 1"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("grid must be strictly increasing"));
        }
        Ok(PlFunction { grid, values })
    }

    pub fn grid(&self) -> &[Rat] {
        &self.grid
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// `f(x)` for `x ∈ [0, 1]`.
    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        check_unit(x)?;
        let i = match self.grid.binary_search(x) {
            Ok(i) => return Ok(self.values[i].clone()),
            Err(i) => i,
        };
        let (x0, x1) = (&self.grid[i - 1], &self.grid[i]);
        let (y0, y1) = (&self.values[i - 1], &self.values[i]);
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }
}

/// Which function [`sample_pl`] samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionTag {
    TauL,
    TauS,
    /// `τ_n`, which is itself linear between multiples of `2^{-n}`.
    TauPartial(usize),
}

/// Exact samples of `f` at `k/2^depth`, `0 ≤ k ≤ 2^depth`.
pub fn sample_pl(f: FunctionTag, depth: usize, cap: usize) -> Result<PlFunction> {
    if depth > cap {
        return Err(Error::Resource { what: "PL sampling", requested: format!("depth {depth}"), cap: cap.to_string() });
    }
    let n = 1u64 << depth;
    let grid: Vec<Rat> = (0..=n).map(|k| Rat::new(BigInt::from(k), pow2(depth))).collect();
    let values = grid
        .par_iter()
        .map(|x| match f {
            FunctionTag::TauL => flattened_takagi(x),
            FunctionTag::TauS => takagi_singular(x),
            FunctionTag::TauPartial(m) => takagi_partial(x, m),
        })
        .collect::<Result<Vec<_>>>()?;
    PlFunction::new(grid, values)
}

/// `Σ |f(x_{i+1}) - f(x_i)|`, the variation of a PL function.
pub fn total_variation(f: &PlFunction) -> Rat {
    f.values.windows(2).map(|w| (&w[1] - &w[0]).abs()).sum()
}

fn check_level(sorted: &[Rat], t: &Rat) -> Result<()> {
    if sorted.binary_search(t).is_ok() {
        return Err(Error::DegenerateLevel(format_rat(t)));
    }
    Ok(())
}

/// Number of boundary points in `(0, 1)` of `{ f > t }`: the segments
/// along which `f - t` changes sign. `t` must avoid every sampled value.
pub fn upper_set_perimeter(f: &PlFunction, t: &Rat) -> Result<usize> {
    if f.values.contains(t) {
        return Err(Error::DegenerateLevel(format_rat(t)));
    }
    Ok(f.values.windows(2).filter(|w| (&w[0] > t) != (&w[1] > t)).count())
}

/// `∫ |∂{f > t}| dt`, exactly.
///
/// The perimeter is constant between consecutive distinct sampled values, so
/// the integral is a finite sum of count times width.
pub fn coarea_integral(f: &PlFunction) -> Rat {
    let mut levels = f.values.clone();
    levels.sort();
    levels.dedup();
    let mut diff = vec![0i64; levels.len() + 1];
    let index = |v: &Rat| levels.binary_search(v).expect("value is a level");
    for w in f.values.windows(2) {
        let (a, b) = (index(&w[0]), index(&w[1]));
        diff[a.min(b)] += 1;
        diff[a.max(b)] -= 1;
    }
    let mut count = 0i64;
    let mut acc = Rat::zero();
    for (i, pair) in levels.windows(2).enumerate() {
        count += diff[i];
        if count != 0 {
            acc += (&pair[1] - &pair[0]) * Rat::from_integer(BigInt::from(count));
        }
    }
    acc
}

/// Answers perimeter queries against one PL function in logarithmic time.
#[derive(Clone, Debug)]
pub struct LevelCounter {
    values: Vec<Rat>,
    lows: Vec<Rat>,
    highs: Vec<Rat>,
}

impl LevelCounter {
    pub fn new(f: &PlFunction) -> Self {
        let mut values = f.values.clone();
        values.sort();
        values.dedup();
        let (mut lows, mut highs): (Vec<Rat>, Vec<Rat>) = f
            .values
            .windows(2)
            .filter(|w| w[0] != w[1])
            .map(|w| if w[0] < w[1] { (w[0].clone(), w[1].clone()) } else { (w[1].clone(), w[0].clone()) })
            .unzip();
        lows.sort();
        highs.sort();
        LevelCounter { values, lows, highs }
    }

    /// Same as [`upper_set_perimeter`].
    pub fn perimeter(&self, t: &Rat) -> Result<usize> {
        check_level(&self.values, t)?;
        // Away from sampled values a segment is crossed iff low < t < high,
        // and high < t implies low < t.
        Ok(self.lows.partition_point(|v| v < t) - self.highs.partition_point(|v| v < t))
    }

    /// Whether `t` equals a sampled value.
    pub fn collides(&self, t: &Rat) -> bool {
        self.values.binary_search(t).is_ok()
    }
}

/// Grid estimate of the number of local level sets at level `t`: half the
/// perimeter of `{τ^L > t}` for `τ^L` sampled at depth `depth`.
///
/// This is an estimate. Gaps finer than the grid are invisible to it.
pub fn local_level_count_estimate(t: &Rat, depth: usize) -> Result<usize> {
    let f = sample_pl(FunctionTag::TauL, depth, DEFAULT_SAMPLE_DEPTH_CAP)?;
    Ok(upper_set_perimeter(&f, t)? / 2)
}

/// Result of [`mean_local_level_count`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoareaReport {
    pub depth: usize,
    pub seed: u64,
    pub samples: usize,
    pub total_variation: Rat,
    pub coarea_integral: Rat,
    /// Average of the estimate over `samples` random levels in `(0, 2/3)`.
    pub mean_estimate: Rat,
    /// The exact average over all levels, `(3/4)` times the coarea integral.
    pub mean_exact: Rat,
    pub levels: Vec<(Rat, usize)>,
}

/// Random levels `t ∈ (0, 2/3)` from a seeded generator, each nudged by
/// `2^{-(depth+5)}` until it avoids every sampled value.
pub fn random_levels(counter: &LevelCounter, depth: usize, samples: usize, seed: u64) -> Vec<Rat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nudge = Rat::new(BigInt::from(1), pow2(depth + 5));
    (0..samples)
        .map(|_| {
            let u: u64 = rng.random_range(0..1u64 << 53);
            let mut t = Rat::new(BigInt::from(2 * (2 * u + 1)), pow2(54) * 3);
            while counter.collides(&t) {
                t += &nudge;
            }
            t
        })
        .collect()
}

/// Variation, exact coarea integral, and the Monte Carlo mean of the local
/// level count estimate for `τ^L` at depth `depth`.
pub fn mean_local_level_count(depth: usize, samples: usize, seed: u64) -> Result<CoareaReport> {
    let f = sample_pl(FunctionTag::TauL, depth, DEFAULT_SAMPLE_DEPTH_CAP)?;
    let counter = LevelCounter::new(&f);
    let levels: Vec<(Rat, usize)> = random_levels(&counter, depth, samples, seed)
        .into_iter()
        .map(|t| {
            let n = counter.perimeter(&t).expect("level avoids samples") / 2;
            (t, n)
        })
        .collect();
    let total: usize = levels.iter().map(|(_, n)| n).sum();
    let coarea = coarea_integral(&f);
    Ok(CoareaReport {
        depth,
        seed,
        samples,
        total_variation: total_variation(&f),
        mean_estimate: if samples == 0 { Rat::zero() } else { rat(total as i64, samples as i64) },
        mean_exact: &coarea * rat(3, 4),
        coarea_integral: coarea,
        levels,
    })
}

/// `(x, τ(x), τ^L(x), τ^S(x))` at `k/2^depth`.
pub fn sweep(depth: usize, cap: usize) -> Result<Vec<[Rat; 4]>> {
    if depth > cap {
        return Err(Error::Resource { what: "sweep", requested: format!("depth {depth}"), cap: cap.to_string() });
    }
    (0..=1u64 << depth)
        .into_par_iter()
        .map(|k| {
            let x = Rat::new(BigInt::from(k), pow2(depth));
            let (xb, t) = projected(&x)?;
            let tau = takagi_of(&BinExp::from_rational(&x, Tail::Low)?);
            Ok([x.clone(), tau, &t + &xb - &x, t + xb])
        })
        .collect()
}
