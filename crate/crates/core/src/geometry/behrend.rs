//! Behrend's 3-AP-free sets: a sphere slice of `[t]^d` written in base `2t`.
//!
//! For digits in `[1, t]` the digitwise sums `xᵢ + yᵢ` and `2zᵢ` lie in
//! `[2, 2t]`, so their differences are smaller than the base and `x + y = 2z`
//! on encoded integers forces it in every coordinate. Three points of a
//! sphere are never collinear, so the image contains no 3-term progression.
//! Encodings are translated so that the all-ones point maps to 1.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::LatticePoint;
use crate::counting::{count_distinct, GroundSet, Universe};
use crate::equation::InvariantEquation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehrendParams {
    pub t: u64,
    pub d: usize,
    pub r: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehrendSet {
    pub n: u64,
    /// `None` when `n ≤ 2` and the whole interval is returned.
    pub params: Option<BehrendParams>,
    pub points: Vec<LatticePoint>,
    pub set: GroundSet,
}

/// The textbook choice `d = ⌈√(log₂ n)⌉`, `t = max(2, ⌊n^{1/d}/2⌋)`.
pub fn classical_parameters(n: u64) -> (u64, usize) {
    let d = ((n.max(2) as f64).log2().sqrt().ceil() as usize).max(1);
    let t = (((n as f64).powf(1.0 / d as f64) / 2.0).floor() as u64).max(2);
    (t, d)
}

/// Points of `[t]^d` whose translated encoding fits in `[1, n]`, each with its
/// integer image, enumerated from the top digit down so only fitting points
/// are visited.
fn fitting_points(n: u64, t: u64, d: usize) -> Vec<(LatticePoint, u64)> {
    let base = 2 * t as u128;
    let weights: Vec<u128> = (0..d).map(|i| base.pow(i as u32)).collect();
    let mut out = Vec::new();
    let mut x = vec![1i64; d];
    fn descend(
        level: usize,
        used: u128,
        n: u64,
        t: u64,
        weights: &[u128],
        x: &mut Vec<i64>,
        out: &mut Vec<(LatticePoint, u64)>,
    ) {
        if level == 0 {
            out.push((x.clone(), used as u64 + 1));
            return;
        }
        let i = level - 1;
        for digit in 1..=t {
            let value = used + (digit as u128 - 1) * weights[i];
            if value + 1 > n as u128 {
                break;
            }
            x[i] = digit as i64;
            descend(i, value, n, t, weights, x, out);
        }
        x[i] = 1;
    }
    descend(d, 0, n, t, &weights, &mut x, &mut out);
    out
}

/// Behrend set for explicit `(t, d)`: the fullest slice among the fitting points.
pub fn behrend_with(n: u64, t: u64, d: usize) -> Result<BehrendSet> {
    if n < 1 || t < 2 || d < 1 {
        return Err(Error::input(format!(
            "invalid Behrend parameters n = {n}, t = {t}, d = {d}"
        )));
    }
    if (t as u128).checked_pow(d as u32).is_none()
        || (2 * t as u128).checked_pow(d as u32).is_none()
    {
        return Err(Error::Overflow(format!("(2·{t})^{d} exceeds 128 bits")));
    }
    let mut slices: BTreeMap<u64, Vec<(LatticePoint, u64)>> = BTreeMap::new();
    for (x, value) in fitting_points(n, t, d) {
        let r = x.iter().map(|&c| (c * c) as u64).sum();
        slices.entry(r).or_default().push((x, value));
    }
    let (r, members) = slices
        .into_iter()
        .fold(None::<(u64, Vec<_>)>, |best, cur| match best {
            Some(b) if b.1.len() >= cur.1.len() => Some(b),
            _ => Some(cur),
        })
        .ok_or_else(|| Error::input(format!("no point of [{t}]^{d} fits in [1, {n}]")))?;
    let (points, values): (Vec<_>, Vec<_>) = members.into_iter().unzip();
    let set = GroundSet::new(Universe::interval(n), values)?;
    let out = BehrendSet {
        n,
        params: Some(BehrendParams { t, d, r }),
        points,
        set,
    };
    certify(&out)?;
    Ok(out)
}

/// The largest Behrend set over all `(t, d)` with `t` up to twice `n^{1/d}`;
/// ties go to smaller `d`, then smaller `t`.
pub fn behrend_set(n: u64) -> Result<BehrendSet> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    if n <= 2 {
        let set = GroundSet::full(Universe::interval(n))?;
        let points = set.elements().iter().map(|&x| vec![x as i64]).collect();
        return Ok(BehrendSet {
            n,
            params: None,
            points,
            set,
        });
    }
    let max_d = (64 - n.leading_zeros()) as usize;
    let mut best: Option<BehrendSet> = None;
    for d in 2..=max_d.max(2) {
        let t_max = (2.0 * (n as f64).powf(1.0 / d as f64)).ceil() as u64 + 1;
        for t in 2..=t_max.max(2) {
            let Ok(candidate) = behrend_with(n, t, d) else {
                continue;
            };
            if best
                .as_ref()
                .is_none_or(|b| candidate.set.len() > b.set.len())
            {
                best = Some(candidate);
            }
        }
    }
    best.ok_or_else(|| Error::Invariant(format!("no Behrend construction fits in [1, {n}]")))
}

fn certify(b: &BehrendSet) -> Result<()> {
    let aps = count_distinct(&InvariantEquation::three_ap(), &b.set)?;
    if aps != 0 {
        return Err(Error::Invariant(format!(
            "Behrend set for n = {} contains {aps} progressions",
            b.n
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::verify_no_three_collinear;

    // Direct check: no x < y < z in S with x + z = 2y.
    fn ap_free(elements: &[u64]) -> bool {
        let set: std::collections::HashSet<u64> = elements.iter().copied().collect();
        elements.iter().enumerate().all(|(i, &x)| {
            elements[i + 1..]
                .iter()
                .all(|&z| (x + z) % 2 == 1 || !set.contains(&((x + z) / 2)))
        })
    }

    #[test]
    fn tiny_inputs() {
        assert_eq!(behrend_set(2).unwrap().set.elements(), &[1, 2]);
        assert_eq!(behrend_set(1).unwrap().set.elements(), &[1]);
        assert!(behrend_set(0).is_err());
    }

    #[test]
    fn sets_are_ap_free() {
        for n in 3..=300 {
            let b = behrend_set(n).unwrap();
            assert!(ap_free(b.set.elements()), "n = {n}");
            assert!(!b.set.is_empty());
        }
    }

    #[test]
    fn sizes_for_reference_inputs() {
        // Frozen from an independent sweep over every (t, d) and slice.
        let expected = [(10, 2), (100, 6), (1000, 12), (10_000, 48)];
        for (n, size) in expected {
            let b = behrend_set(n).unwrap();
            assert_eq!(b.set.len(), size, "n = {n}");
        }
    }

    #[test]
    fn points_lie_on_one_sphere() {
        let b = behrend_set(1000).unwrap();
        let params = b.params.unwrap();
        assert!(b
            .points
            .iter()
            .all(|x| x.iter().map(|&c| (c * c) as u64).sum::<u64>() == params.r));
        assert!(verify_no_three_collinear(&b.points));
    }

    #[test]
    fn classical_choice() {
        assert_eq!(classical_parameters(1000), (2, 4));
        assert_eq!(classical_parameters(10_000), (5, 4));
        let b = behrend_with(10_000, 5, 4).unwrap();
        assert!(ap_free(b.set.elements()));
    }
}
