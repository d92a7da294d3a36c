//! Random affine amplification: map a structured point set `X` into `𝔽_p`
//! with `f_b(x) = b₀ + Σ bᵢxᵢ`, keep the points landing in `S`, find a
//! solution among them and push it forward to a solution inside `S`.

mod fibercount;
mod helpful;
mod params;
mod pipeline;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fibercount::{affine_fiber_count, fiber_count_by_enumeration, FiberCount};
pub use helpful::{
    count_helpful_tuples, find_helpful_tuple, find_helpful_tuple_by, find_helpful_tuple_encoded,
    HelpfulTuple,
};
pub use params::{choose_parameters, AmplifierParams, ParameterChecks};
pub use pipeline::{run_amplifier4, run_varnavides3, AmplifierReport, FoundSolution};

use crate::counting::GroundSet;
use crate::error::{Error, Result};
use crate::geometry::LatticePoint;
use crate::modular::Prime;
use crate::scalar::Density;

/// Largest number of samples accepted for exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

const CHUNK: u64 = 1 << 15;

/// `b = (b₀, …, b_d)` over `𝔽_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineSample {
    pub b: Vec<u64>,
    pub p: Prime,
}

impl AffineSample {
    pub fn new(b: Vec<u64>, p: Prime) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::input("affine sample needs at least b₀"));
        }
        if let Some(&x) = b.iter().find(|&&x| x >= p.get()) {
            return Err(Error::input(format!(
                "entry {x} is not a residue mod {}",
                p.get()
            )));
        }
        Ok(AffineSample { b, p })
    }

    pub fn dim(&self) -> usize {
        self.b.len() - 1
    }

    /// `f_b(x) mod p`.
    pub fn apply(&self, x: &[i64]) -> u64 {
        let p = self.p.get() as i128;
        let sum = self.b[1..]
            .iter()
            .zip(x)
            .fold(self.b[0] as i128, |acc, (&bi, &xi)| {
                (acc + bi as i128 * xi.rem_euclid(p as i64) as i128) % p
            });
        sum as u64
    }

    /// Whether `f_b` is constant (`b₁ = … = b_d = 0`).
    pub fn is_constant(&self) -> bool {
        self.b[1..].iter().all(|&x| x == 0)
    }
}

/// How samples are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Sampling {
    /// Independent uniform samples; trial `i` uses ChaCha stream `i` of `seed`.
    Random { trials: u64, seed: u64 },
    /// Every `b ∈ 𝔽_p^{d+1}` exactly once.
    Exhaustive,
}

impl Sampling {
    pub(crate) fn count(&self, p: Prime, len: usize) -> Result<u64> {
        match *self {
            Sampling::Random { trials: 0, .. } => Err(Error::input("trials must be at least 1")),
            Sampling::Random { trials, .. } => Ok(trials),
            Sampling::Exhaustive => p
                .get()
                .checked_pow(len as u32)
                .filter(|&total| total <= EXHAUSTIVE_LIMIT)
                .ok_or_else(|| {
                    Error::Budget(format!(
                        "{}^{len} samples exceed the exhaustive limit {EXHAUSTIVE_LIMIT}",
                        p.get()
                    ))
                }),
        }
    }

    pub(crate) fn seed(&self) -> Option<u64> {
        match *self {
            Sampling::Random { seed, .. } => Some(seed),
            Sampling::Exhaustive => None,
        }
    }

    /// Sample number `index`, of length `len`.
    pub(crate) fn sample(&self, p: Prime, len: usize, index: u64) -> AffineSample {
        let b = match *self {
            Sampling::Random { seed, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(index);
                (0..len).map(|_| rng.gen_range(0..p.get())).collect()
            }
            Sampling::Exhaustive => {
                let mut rest = index;
                (0..len)
                    .map(|_| {
                        let digit = rest % p.get();
                        rest /= p.get();
                        digit
                    })
                    .collect()
            }
        };
        AffineSample { b, p }
    }
}

/// Evaluates `per` on every sample index in parallel and folds the results
/// in index order, so the outcome does not depend on the thread count.
pub(crate) fn drive<O: Send, A>(
    total: u64,
    per: impl Fn(u64) -> O + Sync,
    mut acc: A,
    mut fold: impl FnMut(&mut A, u64, O),
) -> A {
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let outcomes: Vec<O> = (start..end).into_par_iter().map(&per).collect();
        for (i, o) in outcomes.into_iter().enumerate() {
            fold(&mut acc, start + i as u64, o);
        }
        start = end;
    }
    acc
}

pub(crate) fn field_of(set: &GroundSet) -> Result<Prime> {
    set.universe()
        .modulus()
        .ok_or_else(|| Error::input("the target set must live in 𝔽_p"))
}

/// `[R]` as one-dimensional points.
pub fn interval_points(r: u64) -> Vec<LatticePoint> {
    (1..=r as i64).map(|x| vec![x]).collect()
}

/// Indices of the points of `X` mapped into `S` by `f_b`.
pub(crate) fn fiber_indices(
    points: &[LatticePoint],
    b: &AffineSample,
    set: &GroundSet,
) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| set.contains(b.apply(&points[i])))
        .collect()
}

/// `{x ∈ X : f_b(x) ∈ S}`.
pub fn fiber(
    points: &[LatticePoint],
    b: &AffineSample,
    set: &GroundSet,
) -> Result<Vec<LatticePoint>> {
    check_sample(points, b, set)?;
    Ok(fiber_indices(points, b, set)
        .into_iter()
        .map(|i| points[i].clone())
        .collect())
}

fn check_sample(points: &[LatticePoint], b: &AffineSample, set: &GroundSet) -> Result<()> {
    if field_of(set)? != b.p {
        return Err(Error::input("sample and target set use different primes"));
    }
    if let Some(x) = points.iter().find(|x| x.len() != b.dim()) {
        return Err(Error::input(format!(
            "point {x:?} does not have dimension {}",
            b.dim()
        )));
    }
    Ok(())
}

/// `b` is good when `|f_b(X)| ≥ ε|X|/2` with `ε = |S|/p`.
pub(crate) fn is_good(fiber: usize, set: usize, p: Prime, cap: usize) -> bool {
    2 * fiber as u128 * p.get() as u128 >= set as u128 * cap as u128
}

/// Fiber statistics over a batch of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessStats<T> {
    pub samples: u64,
    pub good: u64,
    pub good_fraction: T,
    pub mean_fiber: T,
    /// `ε|X|`, the exact expectation of `|f_b(X)|`.
    pub expected_fiber: T,
    /// Sample standard deviation of the fiber size divided by `√samples`.
    pub standard_error: f64,
    pub min_fiber: u64,
    pub max_fiber: u64,
}

pub fn goodness_stats<T: Density>(
    points: &[LatticePoint],
    set: &GroundSet,
    sampling: Sampling,
) -> Result<GoodnessStats<T>> {
    let p = field_of(set)?;
    let d = points.first().map_or(0, Vec::len);
    let total = sampling.count(p, d + 1)?;
    if let Some(x) = points.iter().find(|x| x.len() != d) {
        return Err(Error::input(format!(
            "point {x:?} does not have dimension {d}"
        )));
    }
    let sizes = |i: u64| fiber_indices(points, &sampling.sample(p, d + 1, i), set).len() as u64;
    let (good, sum, sq, lo, hi) = drive(
        total,
        sizes,
        (0u64, 0u64, 0u128, u64::MAX, 0u64),
        |acc, _, f| {
            acc.0 += is_good(f as usize, set.len(), p, points.len()) as u64;
            acc.1 += f;
            acc.2 += f as u128 * f as u128;
            acc.3 = acc.3.min(f);
            acc.4 = acc.4.max(f);
        },
    );
    let n = total as f64;
    let mean = sum as f64 / n;
    let variance = if total > 1 {
        (sq as f64 - n * mean * mean).max(0.0) / (n - 1.0)
    } else {
        0.0
    };
    Ok(GoodnessStats {
        samples: total,
        good,
        good_fraction: T::from_ratio(good, total),
        mean_fiber: T::from_ratio(sum, total),
        expected_fiber: T::from_ratio(set.len() as u64 * points.len() as u64, p.get()),
        standard_error: (variance / n).sqrt(),
        min_fiber: lo,
        max_fiber: hi,
    })
}
