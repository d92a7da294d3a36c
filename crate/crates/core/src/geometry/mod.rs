//! Lattice points on sphere slices of `[t]^d`.
//!
//! `B_r = {x ∈ [t]^d : Σ xᵢ² = r}` lies on a sphere, so no three of its points
//! are collinear. Every point of `[t]^d` lies on some `B_r` with
//! `d ≤ r ≤ d·t²`, so by pigeonhole the largest slice holds at least
//! `t^d / (d·t²) = t^{d-2}/d` points.

mod behrend;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use behrend::{behrend_set, behrend_with, classical_parameters, BehrendParams, BehrendSet};

use crate::error::{Error, Result};

/// A point with 1-based integer coordinates.
pub type LatticePoint = Vec<i64>;

/// Default cap on `t^d` for full enumeration of the box.
pub const DEFAULT_BOX_BUDGET: u64 = 1 << 24;

/// The largest sphere slice of `[t]^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereCap {
    pub t: u64,
    pub d: usize,
    /// Squared radius.
    pub r: u64,
    /// Lexicographically sorted.
    pub points: Vec<LatticePoint>,
}

impl SphereCap {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `⌈t^{d-2}/d⌉`, the guaranteed size.
    pub fn size_floor(&self) -> u64 {
        size_floor(self.t, self.d)
    }
}

/// `⌈t^{d-2}/d⌉` (`1` when `d < 2`).
pub fn size_floor(t: u64, d: usize) -> u64 {
    if d < 2 {
        return 1;
    }
    t.saturating_pow(d as u32 - 2).div_ceil(d as u64)
}

fn box_size(t: u64, d: usize, budget: u64) -> Result<u64> {
    match t.checked_pow(d as u32) {
        Some(size) if size <= budget => Ok(size),
        _ => Err(Error::Budget(format!(
            "[{t}]^{d} exceeds the enumeration budget of {budget} points"
        ))),
    }
}

/// Calls `f` on every point of `[t]^d` in lexicographic order.
pub(crate) fn for_each_box_point(t: u64, d: usize, mut f: impl FnMut(&[i64])) {
    let mut x = vec![1i64; d];
    loop {
        f(&x);
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if (x[i] as u64) < t {
                x[i] += 1;
                break;
            }
            x[i] = 1;
        }
    }
}

/// Number of points of `[t]^d` on each slice `B_r`.
pub fn slice_sizes(t: u64, d: usize) -> Result<BTreeMap<u64, usize>> {
    box_size(t, d, DEFAULT_BOX_BUDGET)?;
    let mut sizes = BTreeMap::new();
    for_each_box_point(t, d, |x| {
        *sizes.entry(squared_norm(x)).or_insert(0) += 1;
    });
    Ok(sizes)
}

fn squared_norm(x: &[i64]) -> u64 {
    x.iter().map(|&c| (c * c) as u64).sum()
}

pub fn sphere_cap(t: u64, d: usize) -> Result<SphereCap> {
    sphere_cap_with_budget(t, d, DEFAULT_BOX_BUDGET)
}

/// The largest slice `B_r` over `r ∈ [d, d·t²]`, ties going to the smallest `r`.
pub fn sphere_cap_with_budget(t: u64, d: usize, budget: u64) -> Result<SphereCap> {
    if t < 2 || d < 2 {
        return Err(Error::input(format!(
            "sphere caps need t >= 2 and d >= 2, got t = {t}, d = {d}"
        )));
    }
    box_size(t, d, budget)?;
    let sizes = slice_sizes(t, d)?;
    let (&r, _) = sizes
        .iter()
        .fold(None::<(&u64, &usize)>, |best, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
        .expect("box is non-empty");
    let mut points = Vec::with_capacity(sizes[&r]);
    for_each_box_point(t, d, |x| {
        if squared_norm(x) == r {
            points.push(x.to_vec());
        }
    });
    let cap = SphereCap { t, d, r, points };
    if (cap.len() as u64) < cap.size_floor() {
        return Err(Error::Invariant(format!(
            "largest slice of [{t}]^{d} has {} points, below ⌈t^(d-2)/d⌉ = {}",
            cap.len(),
            cap.size_floor()
        )));
    }
    Ok(cap)
}

/// Whether `x, y, z` lie on one line: `y - x` and `z - x` are parallel,
/// i.e. every 2×2 minor of the pair vanishes.
pub fn collinear(x: &[i64], y: &[i64], z: &[i64]) -> bool {
    let u: Vec<i128> = y.iter().zip(x).map(|(&a, &b)| (a - b) as i128).collect();
    let v: Vec<i128> = z.iter().zip(x).map(|(&a, &b)| (a - b) as i128).collect();
    (0..u.len()).all(|i| (i + 1..u.len()).all(|j| u[i] * v[j] == u[j] * v[i]))
}

/// True iff no three distinct points are collinear.
pub fn verify_no_three_collinear(points: &[LatticePoint]) -> bool {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                continue;
            }
            for k in j + 1..n {
                if points[k] == points[i] || points[k] == points[j] {
                    continue;
                }
                if collinear(&points[i], &points[j], &points[k]) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    #[test]
    fn small_caps() {
        let cap = sphere_cap(3, 2).unwrap();
        assert_eq!(cap.r, 5);
        assert_eq!(cap.points, vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(cap.size_floor(), 1);

        let cap = sphere_cap(2, 3).unwrap();
        assert_eq!(cap.r, 6);
        assert_eq!(
            cap.points,
            vec![vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]]
        );

        let sizes = slice_sizes(2, 2).unwrap();
        assert!(sizes.values().all(|&s| s <= 2));
        assert!(verify_no_three_collinear(&sphere_cap(2, 2).unwrap().points));
    }

    #[test]
    fn cap_4_3_has_no_collinear_triple() {
        let cap = sphere_cap(4, 3).unwrap();
        assert!(cap.len() >= 3);
        assert!(verify_no_three_collinear(&cap.points));
    }

    #[test]
    fn collinearity_examples() {
        assert!(!verify_no_three_collinear(&[
            vec![1, 1],
            vec![2, 2],
            vec![3, 3]
        ]));
        assert!(verify_no_three_collinear(&[vec![1, 1], vec![2, 2]]));
        assert!(verify_no_three_collinear(&[]));
        assert!(!verify_no_three_collinear(&[
            vec![1, 1, 1],
            vec![3, 2, 1],
            vec![5, 3, 1]
        ]));
    }

    #[test]
    fn budget_and_range_errors() {
        assert!(matches!(
            sphere_cap_with_budget(10, 8, 1000),
            Err(Error::Budget(_))
        ));
        assert!(sphere_cap(1, 3).is_err());
        assert!(sphere_cap(3, 1).is_err());
    }

    #[test]
    fn pigeonhole_bound() {
        for t in 2..=6u64 {
            for d in 2..=4usize {
                let sizes = slice_sizes(t, d).unwrap();
                let best = *sizes.values().max().unwrap() as u64;
                assert!(best * d as u64 * t * t >= t.pow(d as u32), "t={t} d={d}");
                assert!(sizes
                    .keys()
                    .all(|&r| r >= d as u64 && r <= d as u64 * t * t));
            }
        }
    }

    // Slope comparison with rationals, independent of the minor test.
    fn collinear_by_slopes(x: &[i64], y: &[i64], z: &[i64]) -> bool {
        let u: Vec<i64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let v: Vec<i64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
        if u.iter().all(|&c| c == 0) || v.iter().all(|&c| c == 0) {
            return true;
        }
        let pivot = u.iter().position(|&c| c != 0).unwrap();
        if v[pivot] == 0 {
            return false;
        }
        let ratio = Ratio::new(v[pivot], u[pivot]);
        u.iter()
            .zip(&v)
            .all(|(&a, &b)| Ratio::from_integer(b) == ratio * a)
    }

    proptest! {
        #[test]
        fn collinear_matches_slopes(pts in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 3)) {
            prop_assert_eq!(collinear(&pts[0], &pts[1], &pts[2]), collinear_by_slopes(&pts[0], &pts[1], &pts[2]));
        }
    }
}
