//! Exact solution counts inside a set.
//!
//! All counts are of *ordered* tuples. `count_all_*` allows repeated entries;
//! [`count_distinct`] counts tuples with pairwise distinct entries by Möbius
//! inversion over the equality patterns of the equation.

mod ground;
pub mod ntt;

use serde::{Deserialize, Serialize};

pub use ground::{GroundSet, SetFile, Universe};

use crate::equation::InvariantEquation;
use crate::error::{Error, Result};
use crate::modular::Prime;

/// How an all-tuples count is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Enumerate all but one variable, solve for the last.
    Naive,
    /// Convolve the indicator functions of the dilates `aᵢ·S`.
    Convolution,
}

/// A solution with its entries in variable order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SolutionTuple {
    pub entries: Vec<u64>,
    pub distinct: bool,
}

impl SolutionTuple {
    pub fn new(entries: Vec<u64>) -> Self {
        let distinct = all_distinct(&entries);
        SolutionTuple { entries, distinct }
    }
}

pub(crate) fn all_distinct(xs: &[u64]) -> bool {
    xs.iter().enumerate().all(|(i, x)| !xs[..i].contains(x))
}

fn check_arity(eq: &InvariantEquation) -> Result<()> {
    match eq.k() {
        3 | 4 => Ok(()),
        k => Err(Error::UnsupportedArity { k }),
    }
}

/// Ordered `k`-tuples from `S` (repeats allowed) solving the equation, by
/// direct enumeration of `|S|^{k-1}` prefixes.
pub fn count_all_naive(eq: &InvariantEquation, set: &GroundSet) -> Result<u64> {
    check_arity(eq)?;
    count_form(eq.coeffs(), set, Method::Naive)
}

/// Same count as [`count_all_naive`], through exact convolution of the
/// dilated indicator functions (cyclic over `𝔽_p`, linear over the integers).
pub fn count_all_convolution(eq: &InvariantEquation, set: &GroundSet) -> Result<u64> {
    check_arity(eq)?;
    count_form(eq.coeffs(), set, Method::Convolution)
}

/// Ordered tuples with pairwise distinct entries.
pub fn count_distinct(eq: &InvariantEquation, set: &GroundSet) -> Result<u64> {
    count_distinct_with(eq, set, Method::Convolution)
}

pub fn count_distinct_with(eq: &InvariantEquation, set: &GroundSet, method: Method) -> Result<u64> {
    check_arity(eq)?;
    let mut total: i128 = 0;
    for pattern in eq.equality_patterns() {
        let n = count_form(pattern.reduced_coeffs(), set, method)?;
        total += pattern.mobius() as i128 * n as i128;
    }
    u64::try_from(total).map_err(|_| Error::Invariant(format!("Möbius inversion produced {total}")))
}

/// Count of ordered tuples solving `Σ cᵢxᵢ = 0` for an arbitrary coefficient
/// vector of length 1 to 4. Zero coefficients (in the ambient ring) make
/// their variable free.
pub fn count_form(coeffs: &[i64], set: &GroundSet, method: Method) -> Result<u64> {
    if coeffs.is_empty() || coeffs.len() > 4 {
        return Err(Error::UnsupportedArity { k: coeffs.len() });
    }
    if set.is_empty() {
        return Ok(0);
    }
    match method {
        Method::Naive => naive(coeffs, set),
        Method::Convolution => match set.universe().modulus() {
            Some(p) => cyclic(coeffs, set, p),
            None => linear(coeffs, set),
        },
    }
}

/// Every ordered solution inside `S`, in lexicographic order.
pub fn enumerate_solutions(
    eq: &InvariantEquation,
    set: &GroundSet,
    distinct_only: bool,
) -> Result<Vec<SolutionTuple>> {
    let mut out = Vec::new();
    for_each_solution(eq.coeffs(), set, |tuple| {
        if !distinct_only || all_distinct(tuple) {
            out.push(SolutionTuple::new(tuple.to_vec()));
        }
    })?;
    out.sort();
    Ok(out)
}

fn naive(coeffs: &[i64], set: &GroundSet) -> Result<u64> {
    let mut count: u64 = 0;
    let free = for_each_solution(coeffs, set, |_| count += 1)?;
    if let Some(free_vars) = free {
        // all coefficients vanish: every tuple is a solution
        return (set.len() as u64)
            .checked_pow(free_vars as u32)
            .ok_or_else(|| Error::Overflow(format!("|S|^{free_vars} exceeds 64 bits")));
    }
    Ok(count)
}

/// Calls `visit` on every solution. Returns `Some(arity)` without visiting
/// anything when every coefficient vanishes.
fn for_each_solution(
    coeffs: &[i64],
    set: &GroundSet,
    mut visit: impl FnMut(&[u64]),
) -> Result<Option<usize>> {
    let modulus = set.universe().modulus();
    let is_zero = |a: i64| match modulus {
        Some(p) => p.reduce(a as i128) == 0,
        None => a == 0,
    };
    let Some(solved) = (0..coeffs.len()).rev().find(|&i| !is_zero(coeffs[i])) else {
        return Ok(Some(coeffs.len()));
    };
    let others: Vec<usize> = (0..coeffs.len()).filter(|&i| i != solved).collect();
    let elements = set.elements();
    if elements.is_empty() {
        return Ok(None);
    }
    let mut tuple = vec![0u64; coeffs.len()];

    let solve = |partial: i128| -> Option<u64> {
        let a = coeffs[solved] as i128;
        match modulus {
            Some(p) => {
                let inv = p.inv(p.reduce(a))?;
                Some(p.mul(p.reduce(-partial), inv))
            }
            None => {
                if partial % a != 0 {
                    return None;
                }
                u64::try_from(-partial / a).ok()
            }
        }
    };

    // Odometer over the non-solved positions.
    let mut idx = vec![0usize; others.len()];
    loop {
        let mut partial: i128 = 0;
        for (slot, &pos) in others.iter().enumerate() {
            let x = elements[idx[slot]];
            tuple[pos] = x;
            partial += coeffs[pos] as i128 * x as i128;
        }
        if let Some(x) = solve(partial) {
            if set.contains(x) {
                tuple[solved] = x;
                visit(&tuple);
            }
        }
        let mut slot = others.len();
        loop {
            if slot == 0 {
                return Ok(None);
            }
            slot -= 1;
            idx[slot] += 1;
            if idx[slot] < elements.len() {
                break;
            }
            idx[slot] = 0;
        }
    }
}

/// A polynomial in one variable with an integer offset: `coeffs[j]` is the
/// mass at value `offset + j`.
#[derive(Debug, Clone)]
struct ShiftedPoly {
    offset: i64,
    coeffs: Vec<u64>,
}

impl ShiftedPoly {
    fn unit() -> Self {
        ShiftedPoly {
            offset: 0,
            coeffs: vec![1],
        }
    }

    /// Indicator of the dilate `a·S` (with multiplicity).
    fn dilate(a: i64, set: &GroundSet) -> Self {
        let values = set.elements().iter().map(|&x| a * x as i64);
        let lo = values.clone().min().unwrap_or(0);
        let hi = values.clone().max().unwrap_or(0);
        let mut coeffs = vec![0u64; (hi - lo) as usize + 1];
        for v in values {
            coeffs[(v - lo) as usize] += 1;
        }
        ShiftedPoly { offset: lo, coeffs }
    }

    fn mul(&self, other: &ShiftedPoly) -> Result<ShiftedPoly> {
        let coeffs = ntt::convolve(&self.coeffs, &other.coeffs)?
            .into_iter()
            .map(|c| {
                u64::try_from(c).map_err(|_| Error::Overflow("pair count exceeds 64 bits".into()))
            })
            .collect::<Result<_>>()?;
        Ok(ShiftedPoly {
            offset: self.offset + other.offset,
            coeffs,
        })
    }

    fn at(&self, value: i64) -> u64 {
        let j = value - self.offset;
        if j < 0 {
            return 0;
        }
        self.coeffs.get(j as usize).copied().unwrap_or(0)
    }
}

fn product<I: Iterator<Item = ShiftedPoly>>(mut polys: I) -> Result<ShiftedPoly> {
    let first = polys.next().unwrap_or_else(ShiftedPoly::unit);
    polys.try_fold(first, |acc, p| acc.mul(&p))
}

/// Splits the variables into two halves, convolves each half, and pairs
/// value `z` on the left with `-z` on the right.
fn linear(coeffs: &[i64], set: &GroundSet) -> Result<u64> {
    let half = coeffs.len().div_ceil(2);
    let left = product(coeffs[..half].iter().map(|&a| ShiftedPoly::dilate(a, set)))?;
    let right = product(coeffs[half..].iter().map(|&a| ShiftedPoly::dilate(a, set)))?;
    let mut total: u128 = 0;
    for (j, &mass) in left.coeffs.iter().enumerate() {
        if mass == 0 {
            continue;
        }
        let z = left.offset + j as i64;
        let term = mass as u128 * right.at(-z) as u128;
        total = total
            .checked_add(term)
            .ok_or_else(|| Error::Overflow("solution count exceeds 128 bits".into()))?;
    }
    u64::try_from(total)
        .map_err(|_| Error::Overflow(format!("solution count {total} exceeds 64 bits")))
}

fn residue_histogram(a: i64, set: &GroundSet, p: Prime) -> Vec<u64> {
    let mut hist = vec![0u64; p.get() as usize];
    let a = p.reduce(a as i128);
    for &x in set.elements() {
        hist[p.mul(a, x) as usize] += 1;
    }
    hist
}

fn cyclic_mul(a: &[u64], b: &[u64], p: Prime) -> Result<Vec<u64>> {
    let p = p.get() as usize;
    let mut folded = vec![0u64; p];
    for (j, c) in ntt::convolve(a, b)?.into_iter().enumerate() {
        let c =
            u64::try_from(c).map_err(|_| Error::Overflow("pair count exceeds 64 bits".into()))?;
        folded[j % p] += c;
    }
    Ok(folded)
}

fn cyclic(coeffs: &[i64], set: &GroundSet, p: Prime) -> Result<u64> {
    let half = coeffs.len().div_ceil(2);
    let side = |range: &[i64]| -> Result<Vec<u64>> {
        let mut hists = range.iter().map(|&a| residue_histogram(a, set, p));
        let first = hists.next().unwrap_or_else(|| {
            let mut unit = vec![0u64; p.get() as usize];
            unit[0] = 1;
            unit
        });
        hists.try_fold(first, |acc, h| cyclic_mul(&acc, &h, p))
    };
    let left = side(&coeffs[..half])?;
    let right = side(&coeffs[half..])?;
    let modulus = p.get() as usize;
    let mut total: u128 = 0;
    for (j, &mass) in left.iter().enumerate() {
        if mass == 0 {
            continue;
        }
        let term = mass as u128 * right[(modulus - j) % modulus] as u128;
        total = total
            .checked_add(term)
            .ok_or_else(|| Error::Overflow("solution count exceeds 128 bits".into()))?;
    }
    u64::try_from(total)
        .map_err(|_| Error::Overflow(format!("solution count {total} exceeds 64 bits")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn interval(n: u64) -> GroundSet {
        GroundSet::full(Universe::interval(n)).unwrap()
    }

    #[test]
    fn small_examples() {
        let ap = InvariantEquation::three_ap();
        let sidon = InvariantEquation::sidon();
        assert_eq!(count_all_naive(&ap, &interval(3)).unwrap(), 5);
        assert_eq!(count_all_convolution(&ap, &interval(3)).unwrap(), 5);
        assert_eq!(count_all_naive(&sidon, &interval(3)).unwrap(), 19);
        assert_eq!(count_all_convolution(&sidon, &interval(3)).unwrap(), 19);
        let empty = GroundSet::empty(Universe::interval(5)).unwrap();
        assert_eq!(count_all_naive(&ap, &empty).unwrap(), 0);
        assert_eq!(count_all_convolution(&sidon, &empty).unwrap(), 0);
        assert_eq!(count_distinct(&sidon, &empty).unwrap(), 0);
    }

    #[test]
    fn full_field() {
        let ap = InvariantEquation::three_ap();
        let f13 = GroundSet::full(Universe::field(Prime::new(13).unwrap())).unwrap();
        assert_eq!(count_all_convolution(&ap, &f13).unwrap(), 169);
        assert_eq!(count_all_naive(&ap, &f13).unwrap(), 169);
    }

    #[test]
    fn distinct_examples() {
        let ap = InvariantEquation::three_ap();
        assert_eq!(count_distinct(&ap, &interval(5)).unwrap(), 8);
        let free = GroundSet::new(Universe::interval(5), [1, 2, 4, 5]).unwrap();
        assert_eq!(count_distinct(&ap, &free).unwrap(), 0);
        let sidon = InvariantEquation::sidon();
        assert_eq!(count_distinct(&sidon, &interval(3)).unwrap(), 0);
        assert_eq!(count_distinct(&sidon, &interval(4)).unwrap(), 8);
    }

    #[test]
    fn unsupported_arity() {
        let five = InvariantEquation::new(vec![1, 1, 1, -1, -2]).unwrap();
        assert!(matches!(
            count_all_naive(&five, &interval(3)),
            Err(Error::UnsupportedArity { k: 5 })
        ));
        assert!(count_form(&[], &interval(3), Method::Naive).is_err());
    }

    #[test]
    fn degenerate_forms() {
        let set = interval(6);
        assert_eq!(count_form(&[0, 0], &set, Method::Naive).unwrap(), 36);
        assert_eq!(count_form(&[0, 0], &set, Method::Convolution).unwrap(), 36);
        assert_eq!(count_form(&[3], &set, Method::Convolution).unwrap(), 0);
        let f7 = GroundSet::full(Universe::field(Prime::new(7).unwrap())).unwrap();
        // 7 ≡ 0 mod 7, so both variables are free
        assert_eq!(count_form(&[7, -7], &f7, Method::Naive).unwrap(), 49);
        assert_eq!(count_form(&[7, -7], &f7, Method::Convolution).unwrap(), 49);
        assert_eq!(count_form(&[2], &f7, Method::Naive).unwrap(), 1);
    }

    #[test]
    fn enumerated_solutions() {
        let ap = InvariantEquation::three_ap();
        let sols = enumerate_solutions(&ap, &interval(3), false).unwrap();
        assert_eq!(sols.len(), 5);
        assert!(sols.contains(&SolutionTuple::new(vec![1, 3, 2])));
        let distinct = enumerate_solutions(&ap, &interval(5), true).unwrap();
        assert_eq!(distinct.len(), 8);
        assert!(distinct.iter().all(|s| s.distinct));
    }

    #[test]
    fn density_of_interval() {
        let set = GroundSet::new(Universe::interval(8), [1, 2]).unwrap();
        assert_eq!(set.density::<Rational>(), Rational::new(1, 4));
        assert_eq!(set.density::<f64>(), 0.25);
    }
}
