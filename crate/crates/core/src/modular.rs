//! Prime moduli and the reduction from `[n]` to `𝔽_p`.
//!
//! For `p > a·n` with `a = Σ|aᵢ|`, a tuple from `[n]` solves the equation mod
//! `p` exactly when it solves it over the integers, because `|Σ aᵢxᵢ| ≤ a·n`.

use serde::{Deserialize, Serialize};

use crate::equation::InvariantEquation;
use crate::error::{Error, Result};
use crate::MAX_GROUND;

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    // 6k ± 1 wheel
    let mut d = 7u64;
    let mut step = 4u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += step;
        step = 6 - step;
    }
    true
}

/// A prime modulus, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::input(format!("{p} is not prime")));
        }
        if p > u32::MAX as u64 {
            return Err(Error::input(format!("modulus {p} exceeds 32 bits")));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Canonical representative of `value` in `[0, p)`.
    pub fn reduce(self, value: i128) -> u64 {
        value.rem_euclid(self.0 as i128) as u64
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u64) -> Option<u64> {
        let a = a % self.0;
        (a != 0).then(|| self.pow(a, self.0 - 2))
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

/// A ground-set size together with a prime large enough that integer
/// solutions from `[n]` and solutions mod `p` coincide.
///
/// Invariant: `a_sum·n < p ≤ 2·a_sum·n` and `p` divides no coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeContext {
    pub n: u64,
    pub p: Prime,
    pub a_sum: u64,
}

impl PrimeContext {
    /// Validates an explicitly chosen prime against the window.
    pub fn new(n: u64, p: u64, a_sum: u64) -> Result<Self> {
        let p = Prime::new(p)?;
        let lo = a_sum as u128 * n as u128;
        if !(lo < p.get() as u128 && p.get() as u128 <= 2 * lo) {
            return Err(Error::input(format!(
                "prime {} outside the window ({lo}, {}]",
                p.get(),
                2 * lo
            )));
        }
        Ok(PrimeContext { n, p, a_sum })
    }

    /// Builds the context for an equation and checks that `p` divides none of
    /// its coefficients.
    pub fn for_equation(eq: &InvariantEquation, n: u64) -> Result<Self> {
        let ctx = choose_prime(n, eq.a_sum())?;
        if let Some(a) = eq
            .coeffs()
            .iter()
            .find(|&&a| a.unsigned_abs() % ctx.p.get() == 0)
        {
            return Err(Error::Invariant(format!(
                "prime {} divides coefficient {a}",
                ctx.p.get()
            )));
        }
        Ok(ctx)
    }
}

/// The smallest prime in `(a_sum·n, 2·a_sum·n]`, which exists by Bertrand's
/// postulate.
pub fn choose_prime(n: u64, a_sum: u64) -> Result<PrimeContext> {
    if n < 2 {
        return Err(Error::input("prime window needs n >= 2"));
    }
    if a_sum == 0 {
        return Err(Error::input("a_sum must be positive"));
    }
    if n > MAX_GROUND {
        return Err(Error::input(format!(
            "n = {n} exceeds the supported ground size {MAX_GROUND}"
        )));
    }
    let lo = a_sum
        .checked_mul(n)
        .filter(|&lo| lo < u32::MAX as u64 / 2)
        .ok_or_else(|| {
            Error::input(format!(
                "prime window for n = {n}, a = {a_sum} exceeds 32 bits"
            ))
        })?;
    let p = (lo + 1..=2 * lo)
        .find(|&c| is_prime(c))
        .ok_or_else(|| Error::Invariant(format!("no prime in ({lo}, {}]", 2 * lo)))?;
    PrimeContext::new(n, p, a_sum)
}

/// `Σ aᵢxᵢ mod p` in `[0, p)`.
pub fn eval_form(eq: &InvariantEquation, tuple: &[u64], p: Prime) -> Result<u64> {
    if tuple.len() != eq.k() {
        return Err(Error::input(format!(
            "tuple has {} entries, equation has {} variables",
            tuple.len(),
            eq.k()
        )));
    }
    let value: i128 = eq
        .coeffs()
        .iter()
        .zip(tuple)
        .map(|(&a, &x)| a as i128 * x as i128)
        .sum();
    Ok(p.reduce(value))
}

/// Whether a tuple from `[n]` solves the equation mod `p`. Inside the prime
/// window this coincides with solving it over the integers.
pub fn verify_lift(eq: &InvariantEquation, tuple: &[u64], ctx: &PrimeContext) -> Result<bool> {
    if let Some(&x) = tuple.iter().find(|&&x| x < 1 || x > ctx.n) {
        return Err(Error::input(format!("entry {x} outside [1, {}]", ctx.n)));
    }
    Ok(eval_form(eq, tuple, ctx.p)? == 0)
}
