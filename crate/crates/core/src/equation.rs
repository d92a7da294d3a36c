//! Invariant homogeneous linear equations `Σ aᵢxᵢ = 0` with `Σ aᵢ = 0`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `Σ|aᵢ|`. Together with [`crate::MAX_GROUND`] it keeps every
/// evaluation `Σ aᵢxᵢ` inside 64-bit range.
pub const MAX_COEFF_SUM: u64 = 1 << 24;

/// An invariant equation. Coefficients are kept exactly as given.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawEquation", into = "RawEquation")]
pub struct InvariantEquation {
    coeffs: Vec<i64>,
    a_sum: u64,
}

#[derive(Serialize, Deserialize)]
struct RawEquation {
    coeffs: Vec<i64>,
}

impl TryFrom<RawEquation> for InvariantEquation {
    type Error = Error;

    fn try_from(raw: RawEquation) -> Result<Self> {
        InvariantEquation::new(raw.coeffs)
    }
}

impl From<InvariantEquation> for RawEquation {
    fn from(eq: InvariantEquation) -> Self {
        RawEquation { coeffs: eq.coeffs }
    }
}

impl InvariantEquation {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::TooFewVariables { k: coeffs.len() });
        }
        if let Some(index) = coeffs.iter().position(|&a| a == 0) {
            return Err(Error::ZeroCoefficient { index });
        }
        let mut a_sum: u64 = 0;
        for &a in &coeffs {
            a_sum = a_sum.saturating_add(a.unsigned_abs());
        }
        if a_sum > MAX_COEFF_SUM {
            return Err(Error::CoefficientRange {
                limit: MAX_COEFF_SUM,
            });
        }
        let sum: i64 = coeffs.iter().sum();
        if sum != 0 {
            return Err(Error::NotInvariant { sum });
        }
        Ok(InvariantEquation { coeffs, a_sum })
    }

    /// `a + b = 2c`.
    pub fn three_ap() -> Self {
        Self::new(vec![1, 1, -2]).unwrap()
    }

    /// `a + b = c + d`.
    pub fn sidon() -> Self {
        Self::new(vec![1, 1, -1, -1]).unwrap()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Number of variables.
    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    /// `Σ|aᵢ|`.
    pub fn a_sum(&self) -> u64 {
        self.a_sum
    }

    /// Integer value of `Σ aᵢxᵢ`.
    pub fn evaluate(&self, tuple: &[i64]) -> i128 {
        debug_assert_eq!(tuple.len(), self.k());
        self.coeffs
            .iter()
            .zip(tuple)
            .map(|(&a, &x)| a as i128 * x as i128)
            .sum()
    }

    /// Divides out the gcd and makes the first coefficient positive. Counting
    /// never does this implicitly.
    pub fn canonicalize(&self) -> InvariantEquation {
        let g = self.coeffs.iter().fold(0i64, |g, &a| g.gcd(&a));
        let sign = if self.coeffs[0] < 0 { -1 } else { 1 };
        let coeffs = self.coeffs.iter().map(|&a| sign * a / g).collect();
        InvariantEquation::new(coeffs).expect("scaling preserves invariance")
    }

    /// Every partition of the variables into equality blocks.
    pub fn equality_patterns(&self) -> Vec<EqualityPattern> {
        set_partitions(self.k())
            .into_iter()
            .map(|labels| EqualityPattern::from_labels(&labels, &self.coeffs))
            .collect()
    }
}

impl fmt::Display for InvariantEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for InvariantEquation {
    type Err = Error;

    /// Accepts `"1,1,-2"` or the JSON form `{"coeffs":[1,1,-2]}`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        let coeffs = s
            .split(',')
            .map(|part| {
                part.trim().parse::<i64>().map_err(|_| {
                    Error::Parse(format!("bad coefficient {:?} in {s:?}", part.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        InvariantEquation::new(coeffs)
    }
}

/// Free function form of [`InvariantEquation::new`].
pub fn parse_equation(coeffs: &[i64]) -> Result<InvariantEquation> {
    InvariantEquation::new(coeffs.to_vec())
}

/// A partition of the variable positions `0..k` into blocks of variables
/// forced equal, with the coefficient of each block summed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityPattern {
    blocks: Vec<Vec<usize>>,
    reduced: Vec<i64>,
}

impl EqualityPattern {
    fn from_labels(labels: &[usize], coeffs: &[i64]) -> Self {
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        let mut reduced = vec![0i64; count];
        for (i, &label) in labels.iter().enumerate() {
            blocks[label].push(i);
            reduced[label] += coeffs[i];
        }
        EqualityPattern { blocks, reduced }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block-summed coefficients, one per block.
    pub fn reduced_coeffs(&self) -> &[i64] {
        &self.reduced
    }

    /// Möbius function `μ(0̂, π)` of the partition lattice:
    /// `Π_B (-1)^{|B|-1} (|B|-1)!`.
    pub fn mobius(&self) -> i64 {
        self.blocks
            .iter()
            .map(|b| {
                let m = b.len() as i64 - 1;
                let fact: i64 = (1..=m).product();
                if m % 2 == 0 {
                    fact
                } else {
                    -fact
                }
            })
            .product()
    }
}

/// Restricted growth strings of length `k`: one per set partition of `0..k`.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for label in 0..=next {
            prefix.push(label);
            extend(prefix, k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(k), k, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn named_examples() {
        let ap = InvariantEquation::new(vec![1, 1, -2]).unwrap();
        assert_eq!((ap.k(), ap.a_sum()), (3, 4));
        let sidon = InvariantEquation::new(vec![1, 1, -1, -1]).unwrap();
        assert_eq!((sidon.k(), sidon.a_sum()), (4, 4));
        assert!(matches!(
            InvariantEquation::new(vec![1, 1, -1]),
            Err(Error::NotInvariant { sum: 1 })
        ));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            InvariantEquation::new(vec![1, 0, -1]),
            Err(Error::ZeroCoefficient { index: 1 })
        ));
        assert!(matches!(
            InvariantEquation::new(vec![1, -1]),
            Err(Error::TooFewVariables { k: 2 })
        ));
        assert!(matches!(
            InvariantEquation::new(vec![1 << 30, 1 << 30, -(1 << 31)]),
            Err(Error::CoefficientRange { .. })
        ));
    }

    #[test]
    fn text_and_json_forms() {
        let a: InvariantEquation = "1, 1,-2".parse().unwrap();
        let b: InvariantEquation = r#"{"coeffs":[1,1,-2]}"#.parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1,1,-2");
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"coeffs":[1,1,-2]}"#);
        assert!(r#"{"coeffs":[1,1,-1]}"#.parse::<InvariantEquation>().is_err());
        assert!("1,x,-2".parse::<InvariantEquation>().is_err());
    }

    #[test]
    fn canonical_form() {
        let eq = InvariantEquation::new(vec![-2, -2, 4]).unwrap();
        assert_eq!(eq.canonicalize().coeffs(), &[1, 1, -2]);
    }

    #[test]
    fn bell_numbers() {
        let ap = InvariantEquation::three_ap();
        assert_eq!(ap.equality_patterns().len(), 5);
        assert_eq!(InvariantEquation::sidon().equality_patterns().len(), 15);
        let five = InvariantEquation::new(vec![1, 1, 1, 1, -4]).unwrap();
        assert_eq!(five.equality_patterns().len(), 52);
        let merged = ap
            .equality_patterns()
            .into_iter()
            .find(|p| p.blocks().len() == 1)
            .unwrap();
        assert_eq!(merged.reduced_coeffs(), &[0]);
    }

    #[test]
    fn mobius_values() {
        let sidon = InvariantEquation::sidon();
        let pats = sidon.equality_patterns();
        let finest = pats.iter().find(|p| p.blocks().len() == 4).unwrap();
        let coarsest = pats.iter().find(|p| p.blocks().len() == 1).unwrap();
        assert_eq!(finest.mobius(), 1);
        assert_eq!(coarsest.mobius(), -6);
        // Σ_π μ(0̂,π) = 0 for k ≥ 2.
        assert_eq!(pats.iter().map(EqualityPattern::mobius).sum::<i64>(), 0);
    }

    proptest! {
        #[test]
        fn validation_matches_rules(coeffs in prop::collection::vec(-6i64..=6, 0..7)) {
            let ok = coeffs.len() >= 3
                && coeffs.iter().all(|&a| a != 0)
                && coeffs.iter().sum::<i64>() == 0;
            prop_assert_eq!(InvariantEquation::new(coeffs.clone()).is_ok(), ok);
            if let Ok(eq) = InvariantEquation::new(coeffs.clone()) {
                prop_assert_eq!(eq.a_sum(), coeffs.iter().map(|a| a.unsigned_abs()).sum::<u64>());
            }
        }

        #[test]
        fn patterns_cover_and_stay_invariant(head in prop::collection::vec(1i64..5, 2..5), neg in any::<bool>()) {
            let mut coeffs: Vec<i64> = head.iter().map(|&a| if neg { -a } else { a }).collect();
            coeffs.push(-coeffs.iter().sum::<i64>());
            let eq = InvariantEquation::new(coeffs).unwrap();
            for pat in eq.equality_patterns() {
                prop_assert_eq!(pat.reduced_coeffs().iter().sum::<i64>(), 0);
                let mut seen: Vec<usize> = pat.blocks().iter().flatten().copied().collect();
                seen.sort_unstable();
                prop_assert_eq!(seen, (0..eq.k()).collect::<Vec<_>>());
            }
        }
    }
}
