//! Base-`a·t` encoding of lattice points in `[t]^d`.
//!
//! With digits in `[1, t]` and an invariant equation of weight `a = Σ|aⱼ|`,
//! each coordinate sum `Σ aⱼ xʲᵢ = Σ aⱼ (xʲᵢ - 1)` has absolute value below
//! `a·t`, so evaluating the equation on encoded integers never carries
//! between digits. Hence the encoded sum vanishes exactly when every
//! coordinate sum does.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equation::InvariantEquation;
use crate::error::{Error, Result};

/// Parameters of the positional encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoder {
    pub t: u64,
    pub d: usize,
    pub base: u64,
    /// `base^d`, the size of the encoded range `[M]`.
    pub modulus: u128,
}

impl Encoder {
    /// Rejects parameters whose weighted encoded sums could leave `i128`.
    pub fn new(a_sum: u64, t: u64, d: usize) -> Result<Self> {
        if t == 0 || d == 0 || a_sum == 0 {
            return Err(Error::input("encoder needs t, d and a positive"));
        }
        let overflow = || {
            Error::Overflow(format!(
                "({a_sum}·{t})^{d} does not fit the 128-bit encoder"
            ))
        };
        let base = a_sum.checked_mul(t).ok_or_else(overflow)?;
        let modulus = (base as u128).checked_pow(d as u32).ok_or_else(overflow)?;
        // Σ aⱼ p(xʲ) is bounded by a·M in absolute value.
        (a_sum as u128)
            .checked_mul(modulus)
            .filter(|&v| v <= i128::MAX as u128)
            .ok_or_else(overflow)?;
        Ok(Encoder {
            t,
            d,
            base,
            modulus,
        })
    }

    pub fn for_equation(eq: &InvariantEquation, t: u64, d: usize) -> Result<Self> {
        Encoder::new(eq.a_sum(), t, d)
    }

    /// `Σ xᵢ·base^{i-1}`.
    pub fn encode(&self, x: &[i64]) -> Result<EncodedPoint> {
        if x.len() != self.d {
            return Err(Error::input(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.d
            )));
        }
        if let Some(&c) = x.iter().find(|&&c| c < 1 || c as u64 > self.t) {
            return Err(Error::input(format!(
                "coordinate {c} outside [1, {}]",
                self.t
            )));
        }
        Ok(EncodedPoint {
            value: self.encode_unchecked(x),
            base: self.base,
            digits: x.to_vec(),
        })
    }

    pub(crate) fn encode_unchecked(&self, x: &[i64]) -> u128 {
        x.iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.base as u128 + c as u128)
    }

    /// Inverse of [`Encoder::encode`]; fails if any digit is outside `[1, t]`.
    pub fn decode(&self, value: u128) -> Result<Vec<i64>> {
        if value >= self.modulus {
            return Err(Error::input(format!("{value} is beyond the encoded range")));
        }
        let mut rest = value;
        let mut digits = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            let digit = (rest % self.base as u128) as u64;
            if digit < 1 || digit > self.t {
                return Err(Error::input(format!(
                    "{value} is not an encoded point (digit {digit})"
                )));
            }
            digits.push(digit as i64);
            rest /= self.base as u128;
        }
        Ok(digits)
    }
}

/// A lattice point together with its encoded integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedPoint {
    pub value: u128,
    pub base: u64,
    pub digits: Vec<i64>,
}

pub fn encode_point(x: &[i64], a_sum: u64, t: u64) -> Result<EncodedPoint> {
    Encoder::new(a_sum, t, x.len())?.encode(x)
}

/// Digits of `value` in `base`, each required to lie in `[1, max_digit]`.
pub fn decode_point(value: u128, base: u64, d: usize, max_digit: u64) -> Result<Vec<i64>> {
    if value == 0 {
        return Err(Error::input("0 is not an encoded point"));
    }
    let modulus = (base as u128)
        .checked_pow(d as u32)
        .ok_or_else(|| Error::Overflow("base^d exceeds 128 bits".into()))?;
    Encoder {
        t: max_digit,
        d,
        base,
        modulus,
    }
    .decode(value)
}

/// Both sides of the no-carry equivalence, computed independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoCarryCheck {
    /// `Σⱼ aⱼ·p(xʲ) = 0` over the integers.
    pub encoded_zero: bool,
    /// `Σⱼ aⱼ·xʲᵢ = 0` for every coordinate `i`.
    pub coordinatewise_zero: bool,
}

impl NoCarryCheck {
    pub fn agrees(&self) -> bool {
        self.encoded_zero == self.coordinatewise_zero
    }
}

/// Evaluates the equation on the encoded integers and coordinatewise.
pub fn no_carry_sides(eq: &InvariantEquation, points: &[Vec<i64>], t: u64) -> Result<NoCarryCheck> {
    if points.len() != eq.k() {
        return Err(Error::input(format!(
            "expected {} points, got {}",
            eq.k(),
            points.len()
        )));
    }
    let d = points[0].len();
    let encoder = Encoder::for_equation(eq, t, d)?;
    let mut encoded_sum: i128 = 0;
    for (&a, x) in eq.coeffs().iter().zip(points) {
        let v = encoder.encode(x)?.value as i128;
        encoded_sum += a as i128 * v;
    }
    let coordinatewise_zero = (0..d).all(|i| {
        eq.coeffs()
            .iter()
            .zip(points)
            .map(|(&a, x)| a as i128 * x[i] as i128)
            .sum::<i128>()
            == 0
    });
    Ok(NoCarryCheck {
        encoded_zero: encoded_sum == 0,
        coordinatewise_zero,
    })
}

/// Whether the encoded points solve the equation over the integers. Fails
/// with [`Error::Invariant`] if that disagrees with the coordinatewise test.
pub fn check_no_carry(eq: &InvariantEquation, points: &[Vec<i64>], t: u64) -> Result<bool> {
    let sides = no_carry_sides(eq, points, t)?;
    if !sides.agrees() {
        return Err(Error::Invariant(format!(
            "carry detected for {points:?} under {eq}"
        )));
    }
    Ok(sides.encoded_zero)
}

/// Outcome of checking the no-carry equivalence on many tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoCarrySweep {
    pub checked: u64,
    pub solutions: u64,
    pub disagreements: u64,
    pub first_counterexample: Option<Vec<Vec<i64>>>,
}

/// Largest number of tuples visited by an exhaustive sweep.
pub const SWEEP_LIMIT: u64 = 10_000_000;

/// Checks the equivalence on every `k`-tuple of points of `[t]^d`
/// (`samples = None`) or on random tuples. Every other random tuple has its
/// last point solved for coordinatewise when that lands in the box, so both
/// sides of the equivalence get exercised.
pub fn no_carry_sweep(
    eq: &InvariantEquation,
    t: u64,
    d: usize,
    samples: Option<u64>,
    seed: u64,
) -> Result<NoCarrySweep> {
    if t == 0 || d == 0 {
        return Err(Error::input("need t >= 1 and d >= 1"));
    }
    Encoder::for_equation(eq, t, d)?;
    let k = eq.k();
    let mut out = NoCarrySweep {
        checked: 0,
        solutions: 0,
        disagreements: 0,
        first_counterexample: None,
    };
    let mut record = |points: &[Vec<i64>]| -> Result<()> {
        let sides = no_carry_sides(eq, points, t)?;
        out.checked += 1;
        out.solutions += sides.coordinatewise_zero as u64;
        if !sides.agrees() {
            out.disagreements += 1;
            out.first_counterexample
                .get_or_insert_with(|| points.to_vec());
        }
        Ok(())
    };
    match samples {
        None => {
            let total = t
                .checked_pow((d * k) as u32)
                .filter(|&n| n <= SWEEP_LIMIT)
                .ok_or_else(|| {
                    Error::Budget(format!("{t}^{} tuples exceed the sweep limit", d * k))
                })?;
            for index in 0..total {
                let mut rest = index;
                let points: Vec<Vec<i64>> = (0..k)
                    .map(|_| {
                        (0..d)
                            .map(|_| {
                                let c = rest % t;
                                rest /= t;
                                c as i64 + 1
                            })
                            .collect()
                    })
                    .collect();
                record(&points)?;
            }
        }
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coeffs = eq.coeffs();
            for i in 0..n {
                let mut points: Vec<Vec<i64>> = (0..k)
                    .map(|_| (0..d).map(|_| rng.gen_range(1..=t as i64)).collect())
                    .collect();
                if i % 2 == 1 {
                    let last: Option<Vec<i64>> = (0..d)
                        .map(|c| {
                            let partial: i64 = (0..k - 1).map(|j| coeffs[j] * points[j][c]).sum();
                            let a = coeffs[k - 1];
                            (partial % a == 0)
                                .then(|| -partial / a)
                                .filter(|&v| (1..=t as i64).contains(&v))
                        })
                        .collect();
                    if let Some(last) = last {
                        points[k - 1] = last;
                    }
                }
                record(&points)?;
            }
        }
    }
    Ok(out)
}
