//! Finite-horizon oracles for the extremal quantities of an equation:
//! the largest solution-free subset of `[n]`, the threshold beyond which
//! every `⌈εn⌉`-subset has a solution, and the fewest solutions an `m`-subset
//! can have.

mod anneal;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{enumerate_solutions, GroundSet, Universe};
use crate::equation::InvariantEquation;
use crate::error::{Error, Result};
use crate::scalar::Density;

pub use search::HARD_MAX_N;

/// Enumeration limits for the exact searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Largest `n` accepted by the exact searches (at most [`HARD_MAX_N`]).
    pub max_n: u64,
    /// Abort branch and bound after this many nodes.
    pub node_budget: Option<u64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_n: 64,
            node_budget: None,
        }
    }
}

impl SearchLimits {
    fn admit(&self, n: u64) -> Result<()> {
        let cap = self.max_n.min(HARD_MAX_N);
        if n > cap {
            return Err(Error::Budget(format!(
                "n = {n} is beyond the exhaustion limit {cap}"
            )));
        }
        Ok(())
    }
}

/// Largest solution-free subset of `[n]` with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalRecord {
    pub n: u64,
    pub max_free_size: u64,
    /// Lexicographically smallest optimum.
    pub witness: Vec<u64>,
    pub nodes: u64,
}

pub fn max_free_subset(eq: &InvariantEquation, n: u64) -> Result<ExtremalRecord> {
    max_free_subset_with(eq, n, &SearchLimits::default())
}

pub fn max_free_subset_with(
    eq: &InvariantEquation,
    n: u64,
    limits: &SearchLimits,
) -> Result<ExtremalRecord> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    limits.admit(n)?;
    let out = search::branch_and_bound(eq.coeffs(), n, limits.node_budget)?;
    Ok(ExtremalRecord {
        n,
        max_free_size: out.size as u64,
        witness: out.witness,
        nodes: out.nodes,
    })
}

/// Finite-horizon estimate of the Turán threshold at density `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate<T> {
    pub epsilon: T,
    pub horizon: u64,
    /// Smallest `n₀` with `max_free_size(n) < ⌈εn⌉` for all `n ∈ [n₀, horizon]`;
    /// `None` when even `n = horizon` fails.
    pub r_hat: Option<u64>,
    pub certified: bool,
    /// `max_free_size(n)` for `n = 1..=horizon`.
    pub max_free_sizes: Vec<u64>,
}

pub fn turan_threshold<T: Density>(
    eq: &InvariantEquation,
    epsilon: T,
    horizon: u64,
    limits: &SearchLimits,
) -> Result<ThresholdEstimate<T>> {
    if !epsilon.is_unit_density() {
        return Err(Error::input(format!("density {epsilon:?} outside (0, 1]")));
    }
    if horizon == 0 {
        return Err(Error::input("horizon must be positive"));
    }
    limits.admit(horizon)?;
    let max_free_sizes = (1..=horizon)
        .into_par_iter()
        .map(|n| max_free_subset_with(eq, n, limits).map(|r| r.max_free_size))
        .collect::<Result<Vec<_>>>()?;
    Ok(threshold_from_table(epsilon, &max_free_sizes))
}

/// Threshold from a precomputed table of `max_free_size(1..=horizon)`.
pub fn threshold_from_table<T: Density>(
    epsilon: T,
    max_free_sizes: &[u64],
) -> ThresholdEstimate<T> {
    let horizon = max_free_sizes.len() as u64;
    let mut r_hat = None;
    for n in (1..=horizon).rev() {
        if max_free_sizes[n as usize - 1] < epsilon.ceil_mul(n) {
            r_hat = Some(n);
        } else {
            break;
        }
    }
    ThresholdEstimate {
        epsilon,
        horizon,
        r_hat,
        certified: r_hat.is_some(),
        max_free_sizes: max_free_sizes.to_vec(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Anneal,
}

/// Fewest distinct solutions over `m`-subsets of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinCountEstimate {
    pub n: u64,
    pub m: u64,
    pub min_count: u64,
    /// `false` for annealing, whose result is only an upper bound.
    pub exact: bool,
    pub witness: Vec<u64>,
    /// Subsets enumerated (exact) or moves proposed (anneal).
    pub evaluated: u64,
}

/// Ordered distinct solutions in `[n]`, indexed by element.
pub(crate) struct SolutionIndex {
    pub k: usize,
    pub tuples: Vec<Vec<u64>>,
    pub by_element: Vec<Vec<u32>>,
}

/// Limit on the size of the explicit solution index.
const INDEX_LIMIT: usize = 20_000_000;

impl SolutionIndex {
    pub fn build(eq: &InvariantEquation, n: u64) -> Result<Self> {
        let full = GroundSet::full(Universe::interval(n))?;
        let estimate = (n as f64).powi(eq.k() as i32 - 1);
        if estimate > 50.0 * INDEX_LIMIT as f64 {
            return Err(Error::Budget(format!(
                "solution index for n = {n} is too large"
            )));
        }
        let tuples: Vec<Vec<u64>> = enumerate_solutions(eq, &full, true)?
            .into_iter()
            .map(|s| s.entries)
            .collect();
        if tuples.len() > INDEX_LIMIT {
            return Err(Error::Budget(format!(
                "{} solutions exceed the index limit",
                tuples.len()
            )));
        }
        let mut by_element = vec![Vec::new(); n as usize + 1];
        for (i, t) in tuples.iter().enumerate() {
            for &x in t {
                by_element[x as usize].push(i as u32);
            }
        }
        Ok(SolutionIndex {
            k: eq.k(),
            tuples,
            by_element,
        })
    }

    fn masks(&self) -> Vec<u128> {
        self.tuples
            .iter()
            .map(|t| t.iter().fold(0u128, |m, &x| m | 1u128 << x))
            .collect()
    }
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Smallest number of ordered distinct solutions in an `m`-subset of `[n]`.
///
/// `budget` bounds the number of subsets in exact mode and is the number of
/// proposed moves in anneal mode.
pub fn min_solution_count(
    eq: &InvariantEquation,
    n: u64,
    m: u64,
    mode: SearchMode,
    budget: u64,
    seed: u64,
) -> Result<MinCountEstimate> {
    if n == 0 || m > n {
        return Err(Error::input(format!(
            "need 0 < n and m <= n, got n = {n}, m = {m}"
        )));
    }
    match mode {
        SearchMode::Exact => exact_min(eq, n, m, budget),
        SearchMode::Anneal => {
            let index = SolutionIndex::build(eq, n)?;
            Ok(anneal::anneal(&index, n, m, budget, seed))
        }
    }
}

fn exact_min(eq: &InvariantEquation, n: u64, m: u64, budget: u64) -> Result<MinCountEstimate> {
    if n > HARD_MAX_N {
        return Err(Error::Budget(format!(
            "exact enumeration supports n <= {HARD_MAX_N}"
        )));
    }
    let subsets = binomial(n, m).filter(|&c| c <= budget).ok_or_else(|| {
        Error::Budget(format!(
            "C({n}, {m}) subsets exceed the enumeration budget {budget}"
        ))
    })?;
    let masks = SolutionIndex::build(eq, n)?.masks();

    // Lexicographic enumeration of m-combinations; the first minimum seen is
    // the lexicographically smallest.
    let mut combo: Vec<u64> = (1..=m).collect();
    let mut best: Option<(u64, Vec<u64>)> = None;
    loop {
        let set = combo.iter().fold(0u128, |acc, &x| acc | 1u128 << x);
        let count = masks.iter().filter(|&&s| s & !set == 0).count() as u64;
        if best.as_ref().is_none_or(|(c, _)| count < *c) {
            best = Some((count, combo.clone()));
        }
        // advance
        let mut i = m as usize;
        loop {
            if i == 0 {
                let (min_count, witness) = best.expect("at least one subset");
                return Ok(MinCountEstimate {
                    n,
                    m,
                    min_count,
                    exact: true,
                    witness,
                    evaluated: subsets,
                });
            }
            i -= 1;
            if combo[i] < n - (m - 1 - i as u64) {
                combo[i] += 1;
                for j in i + 1..m as usize {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_distinct;
    use crate::scalar::Rational;

    #[test]
    fn max_free_examples() {
        let ap = InvariantEquation::three_ap();
        let rec = max_free_subset(&ap, 9).unwrap();
        assert_eq!(rec.max_free_size, 5);
        assert_eq!(rec.witness, vec![1, 2, 4, 8, 9]);
        assert_eq!(max_free_subset(&ap, 4).unwrap().witness, vec![1, 2, 4]);
        let sidon = max_free_subset(&InvariantEquation::sidon(), 7).unwrap();
        assert_eq!(sidon.max_free_size, 4);
        assert_eq!(sidon.witness, vec![1, 2, 3, 5]);
        let set = GroundSet::new(Universe::interval(7), sidon.witness.clone()).unwrap();
        assert_eq!(
            count_distinct(&InvariantEquation::sidon(), &set).unwrap(),
            0
        );
    }

    #[test]
    fn limits_refuse() {
        let ap = InvariantEquation::three_ap();
        let limits = SearchLimits {
            max_n: 10,
            node_budget: None,
        };
        assert!(matches!(
            max_free_subset_with(&ap, 11, &limits),
            Err(Error::Budget(_))
        ));
        assert!(matches!(max_free_subset(&ap, 200), Err(Error::Budget(_))));
    }

    #[test]
    fn threshold_examples() {
        let ap = InvariantEquation::three_ap();
        let limits = SearchLimits::default();
        let full = turan_threshold(&ap, Rational::from_integer(1), 12, &limits).unwrap();
        assert_eq!(full.r_hat, Some(3));
        assert!(full.certified);
        let est = turan_threshold(&ap, Rational::new(9, 10), 20, &limits).unwrap();
        assert_eq!(est.r_hat, Some(3));
        let half = turan_threshold(&ap, Rational::new(9, 20), 30, &limits).unwrap();
        assert_eq!(half.r_hat, Some(21));
        // ⌈εn⌉ ≤ k - 1 everywhere: a 2-element set can never hold a distinct triple
        let tiny = turan_threshold(&ap, Rational::new(1, 10), 20, &limits).unwrap();
        assert!(!tiny.certified);
        assert_eq!(tiny.r_hat, None);
        assert!(turan_threshold(&ap, Rational::from_integer(0), 5, &limits).is_err());
    }

    #[test]
    fn min_count_examples() {
        let ap = InvariantEquation::three_ap();
        let five = min_solution_count(&ap, 9, 5, SearchMode::Exact, 1000, 0).unwrap();
        assert_eq!(five.min_count, 0);
        let six = min_solution_count(&ap, 9, 6, SearchMode::Exact, 1000, 0).unwrap();
        assert_eq!((six.min_count, six.evaluated), (4, 84));
        let set = GroundSet::new(Universe::interval(9), six.witness.clone()).unwrap();
        assert_eq!(count_distinct(&ap, &set).unwrap(), 4);
        let all = min_solution_count(&ap, 9, 9, SearchMode::Exact, 1000, 0).unwrap();
        let full = GroundSet::full(Universe::interval(9)).unwrap();
        assert_eq!(all.min_count, count_distinct(&ap, &full).unwrap());
        assert!(matches!(
            min_solution_count(&ap, 40, 20, SearchMode::Exact, 1000, 0),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn anneal_is_an_upper_bound_and_reproducible() {
        let ap = InvariantEquation::three_ap();
        let exact = min_solution_count(&ap, 12, 7, SearchMode::Exact, 10_000, 0).unwrap();
        let a = min_solution_count(&ap, 12, 7, SearchMode::Anneal, 5_000, 3).unwrap();
        let b = min_solution_count(&ap, 12, 7, SearchMode::Anneal, 5_000, 3).unwrap();
        assert_eq!(a, b);
        assert!(!a.exact);
        assert!(a.min_count >= exact.min_count);
        let set = GroundSet::new(Universe::interval(12), a.witness.clone()).unwrap();
        assert_eq!(count_distinct(&ap, &set).unwrap(), a.min_count);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 6), Some(84));
        assert_eq!(binomial(5, 0), Some(1));
        assert_eq!(binomial(200, 100), None);
    }
}
