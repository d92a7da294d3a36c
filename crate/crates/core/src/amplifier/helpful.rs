//! Tuples of distinct points solving the equation in every coordinate.
//!
//! Search is meet in the middle: the right half of the variables is hashed
//! by its partial coordinatewise sum, and left halves are scanned in
//! lexicographic order, so the first hit is the smallest tuple in the order
//! of encoded values.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::encoding::{check_no_carry, Encoder};
use crate::equation::InvariantEquation;
use crate::error::{Error, Result};
use crate::geometry::LatticePoint;

/// Cap on the number of hashed half-tuples.
const TABLE_LIMIT: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelpfulTuple {
    /// Positions in the input slice.
    pub indices: Vec<usize>,
    pub points: Vec<LatticePoint>,
}

/// Order of the encoded integers: most significant coordinate last.
fn encoded_cmp(x: &[i64], y: &[i64]) -> Ordering {
    x.iter().rev().cmp(y.iter().rev())
}

/// Input positions sorted by encoded value, with duplicate points dropped.
fn encoded_order(points: &[LatticePoint]) -> Result<Vec<usize>> {
    if let Some(d) = points.first().map(Vec::len) {
        if let Some(x) = points.iter().find(|x| x.len() != d) {
            return Err(Error::input(format!(
                "point {x:?} does not have dimension {d}"
            )));
        }
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| encoded_cmp(&points[i], &points[j]).then(i.cmp(&j)));
    order.dedup_by(|a, b| points[*a] == points[*b]);
    Ok(order)
}

/// Calls `f` on every tuple of `len` distinct values below `m` in
/// lexicographic order until it returns `true`.
fn each_tuple(m: usize, len: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn go(
        m: usize,
        len: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == len {
            return f(cur);
        }
        for v in 0..m {
            if cur.contains(&v) {
                continue;
            }
            cur.push(v);
            let stop = go(m, len, cur, f);
            cur.pop();
            if stop {
                return true;
            }
        }
        false
    }
    go(m, len, &mut Vec::with_capacity(len), f)
}

fn table_size(m: usize, len: usize) -> Result<()> {
    let size = (m as u64)
        .checked_pow(len as u32)
        .filter(|&s| s <= TABLE_LIMIT);
    size.map(|_| ())
        .ok_or_else(|| Error::Budget(format!("{m}^{len} half-tuples exceed the table limit")))
}

/// Meet in the middle over `m` ordered items whose weighted sums are
/// produced by `key`. Calls `visit` on full tuples (in item positions) in
/// lexicographic order until it returns `true`.
fn meet<K: Hash + Eq>(
    coeffs: &[i64],
    m: usize,
    key: impl Fn(&[(i64, usize)], bool) -> K,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> Result<()> {
    let k = coeffs.len();
    let h = k / 2;
    if m < k {
        return Ok(());
    }
    table_size(m, k - h)?;
    let mut table: HashMap<K, Vec<Vec<usize>>> = HashMap::new();
    each_tuple(m, k - h, &mut |right| {
        let terms: Vec<(i64, usize)> = coeffs[h..]
            .iter()
            .copied()
            .zip(right.iter().copied())
            .collect();
        table
            .entry(key(&terms, false))
            .or_default()
            .push(right.to_vec());
        false
    });
    let mut full = vec![0usize; k];
    each_tuple(m, h, &mut |left| {
        let terms: Vec<(i64, usize)> = coeffs[..h]
            .iter()
            .copied()
            .zip(left.iter().copied())
            .collect();
        let Some(rights) = table.get(&key(&terms, true)) else {
            return false;
        };
        full[..h].copy_from_slice(left);
        for right in rights {
            if right.iter().any(|r| left.contains(r)) {
                continue;
            }
            full[h..].copy_from_slice(right);
            if visit(&full) {
                return true;
            }
        }
        false
    });
    Ok(())
}

/// Coordinatewise `±Σ aⱼ xʲ` over a half tuple.
fn vector_key<'a>(
    points: &'a [LatticePoint],
    order: &'a [usize],
) -> impl Fn(&[(i64, usize)], bool) -> Vec<i64> + 'a {
    move |terms, negate| {
        let d = points[order[0]].len();
        let mut acc = vec![0i64; d];
        for &(a, pos) in terms {
            for (slot, &c) in acc.iter_mut().zip(&points[order[pos]]) {
                *slot += a * c;
            }
        }
        if negate {
            acc.iter_mut().for_each(|v| *v = -*v);
        }
        acc
    }
}

fn check_arity(eq: &InvariantEquation) -> Result<()> {
    if eq.k() > 6 {
        return Err(Error::UnsupportedArity { k: eq.k() });
    }
    Ok(())
}

fn verified(
    eq: &InvariantEquation,
    points: &[LatticePoint],
    indices: Vec<usize>,
) -> Result<HelpfulTuple> {
    let tuple: Vec<LatticePoint> = indices.iter().map(|&i| points[i].clone()).collect();
    let d = tuple[0].len();
    let solves = (0..d).all(|c| eq.evaluate(&tuple.iter().map(|x| x[c]).collect::<Vec<_>>()) == 0);
    let distinct = (0..tuple.len()).all(|i| (i + 1..tuple.len()).all(|j| tuple[i] != tuple[j]));
    if !solves || !distinct {
        return Err(Error::Invariant(format!(
            "search returned a non-helpful tuple {tuple:?}"
        )));
    }
    Ok(HelpfulTuple {
        indices,
        points: tuple,
    })
}

/// The smallest helpful tuple, in the order of encoded values, among points
/// of the input slice.
pub fn find_helpful_tuple(
    eq: &InvariantEquation,
    points: &[LatticePoint],
) -> Result<Option<HelpfulTuple>> {
    find_helpful_tuple_by(eq, points, |_| true)
}

/// Like [`find_helpful_tuple`], skipping tuples (given as input positions)
/// rejected by `accept`.
pub fn find_helpful_tuple_by(
    eq: &InvariantEquation,
    points: &[LatticePoint],
    mut accept: impl FnMut(&[usize]) -> bool,
) -> Result<Option<HelpfulTuple>> {
    check_arity(eq)?;
    let order = encoded_order(points)?;
    let mut found = None;
    let mut original = Vec::with_capacity(eq.k());
    meet(
        eq.coeffs(),
        order.len(),
        vector_key(points, &order),
        |tuple| {
            original.clear();
            original.extend(tuple.iter().map(|&pos| order[pos]));
            if accept(&original) {
                found = Some(original.clone());
                return true;
            }
            false
        },
    )?;
    found
        .map(|indices| verified(eq, points, indices))
        .transpose()
}

/// The same search run on encoded integers in base `a·t`, with every hit
/// checked against the coordinatewise equation.
pub fn find_helpful_tuple_encoded(
    eq: &InvariantEquation,
    points: &[LatticePoint],
    t: u64,
) -> Result<Option<HelpfulTuple>> {
    check_arity(eq)?;
    let order = encoded_order(points)?;
    let Some(&first) = order.first() else {
        return Ok(None);
    };
    let encoder = Encoder::for_equation(eq, t, points[first].len())?;
    let values = order
        .iter()
        .map(|&i| encoder.encode(&points[i]).map(|e| e.value as i128))
        .collect::<Result<Vec<_>>>()?;
    let key = |terms: &[(i64, usize)], negate: bool| {
        let s: i128 = terms.iter().map(|&(a, pos)| a as i128 * values[pos]).sum();
        if negate {
            -s
        } else {
            s
        }
    };
    let mut found = None;
    let mut failure = None;
    meet(eq.coeffs(), order.len(), key, |tuple| {
        let pts: Vec<LatticePoint> = tuple
            .iter()
            .map(|&pos| points[order[pos]].clone())
            .collect();
        match check_no_carry(eq, &pts, t) {
            Ok(true) => found = Some(tuple.iter().map(|&pos| order[pos]).collect::<Vec<_>>()),
            Ok(false) => {
                failure = Some(Error::Invariant(format!(
                    "encoded solution {pts:?} is not coordinatewise"
                )))
            }
            Err(e) => failure = Some(e),
        }
        true
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    found
        .map(|indices| verified(eq, points, indices))
        .transpose()
}

/// Number of ordered helpful tuples among the points.
pub fn count_helpful_tuples(eq: &InvariantEquation, points: &[LatticePoint]) -> Result<u64> {
    check_arity(eq)?;
    let order = encoded_order(points)?;
    let mut count = 0u64;
    meet(eq.coeffs(), order.len(), vector_key(points, &order), |_| {
        count += 1;
        false
    })?;
    Ok(count)
}
