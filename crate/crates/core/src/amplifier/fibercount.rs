use serde::{Deserialize, Serialize};

use super::{Sampling, EXHAUSTIVE_LIMIT};
use crate::error::{Error, Result};
use crate::geometry::LatticePoint;
use crate::modular::Prime;

/// Number of samples `b ∈ 𝔽_p^{d+1}` with `f_b(xⁱ) = sᵢ` for all `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberCount {
    pub count: u128,
    /// Rank of the rows `(1, xⁱ)` mod `p`.
    pub rank: usize,
    pub consistent: bool,
    /// The points are affinely dependent mod `p`.
    pub degenerate: bool,
}

/// Row-reduces `rows` in place mod `p` over the first `cols` columns and
/// returns the rank.
fn reduce(rows: &mut [Vec<u64>], cols: usize, p: Prime) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = p.inv(rows[rank][col]).expect("nonzero pivot");
        for v in rows[rank].iter_mut() {
            *v = p.mul(*v, inv);
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col] == 0 {
                continue;
            }
            let factor = rows[r][col];
            for c in 0..rows[r].len() {
                let sub = p.mul(factor, rows[rank][c]);
                rows[r][c] = p.add(rows[r][c], p.get() - sub);
            }
        }
        rank += 1;
    }
    rank
}

pub fn affine_fiber_count(
    points: &[LatticePoint],
    targets: &[u64],
    p: Prime,
    d: usize,
) -> Result<FiberCount> {
    if points.len() != targets.len() || points.is_empty() {
        return Err(Error::input("need one target per point"));
    }
    if let Some(x) = points.iter().find(|x| x.len() != d) {
        return Err(Error::input(format!(
            "point {x:?} does not have dimension {d}"
        )));
    }
    if let Some(&s) = targets.iter().find(|&&s| s >= p.get()) {
        return Err(Error::input(format!(
            "target {s} is not a residue mod {}",
            p.get()
        )));
    }
    let mut rows: Vec<Vec<u64>> = points
        .iter()
        .zip(targets)
        .map(|(x, &s)| {
            let mut row = Vec::with_capacity(d + 2);
            row.push(1);
            row.extend(x.iter().map(|&c| p.reduce(c as i128)));
            row.push(s);
            row
        })
        .collect();
    let rank = reduce(&mut rows, d + 1, p);
    let consistent = rows[rank..].iter().all(|row| row[d + 1] == 0);
    let free = (d + 1 - rank) as u32;
    let count = if consistent {
        (p.get() as u128)
            .checked_pow(free)
            .ok_or_else(|| Error::Overflow(format!("{}^{free} exceeds 128 bits", p.get())))?
    } else {
        0
    };
    Ok(FiberCount {
        count,
        rank,
        consistent,
        degenerate: rank < points.len(),
    })
}

/// The same count by trying every `b ∈ 𝔽_p^{d+1}`.
pub fn fiber_count_by_enumeration(
    points: &[LatticePoint],
    targets: &[u64],
    p: Prime,
    d: usize,
) -> Result<u128> {
    let total = Sampling::Exhaustive.count(p, d + 1)?;
    if points.len() != targets.len() || points.iter().any(|x| x.len() != d) {
        return Err(Error::input(
            "need one target per point, each point of dimension d",
        ));
    }
    debug_assert!(total <= EXHAUSTIVE_LIMIT);
    Ok((0..total)
        .filter(|&i| {
            let b = Sampling::Exhaustive.sample(p, d + 1, i);
            points.iter().zip(targets).all(|(x, &s)| b.apply(x) == s)
        })
        .count() as u128)
}
