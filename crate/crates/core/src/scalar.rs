//! Scalar types for densities, fractions and thresholds.
//!
//! Solution counts are always exact integers. The quantities derived from them
//! (set densities, good-sample fractions, mean fiber sizes) are expressed in a
//! [`Density`] scalar so callers can choose between floating point and exact
//! rationals. Decimal densities such as `0.9` should go through [`Rational`]:
//! `0.07_f64 * 100.0` is slightly above 7 and rounds up to 8, while the rational
//! `7/100` gives exactly 7.

use std::fmt::Debug;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = Ratio<i64>;

/// A scalar that can hold a density in `[0, 1]` and ratios of counts.
pub trait Density: Num + PartialOrd + Copy + Debug + Send + Sync + 'static {
    /// `num / den`, `den > 0`.
    fn from_ratio(num: u64, den: u64) -> Self;

    /// `⌈self · n⌉` for non-negative `self`.
    fn ceil_mul(self, n: u64) -> u64;

    fn to_f64(self) -> f64;

    /// Nearest representable value (exact types approximate).
    fn from_f64(value: f64) -> Self;

    /// `0 < self <= 1`.
    fn is_unit_density(self) -> bool {
        self > Self::zero() && self <= Self::one()
    }
}

macro_rules! impl_float_density {
    ($f:ty) => {
        impl Density for $f {
            fn from_ratio(num: u64, den: u64) -> Self {
                num as $f / den as $f
            }

            fn ceil_mul(self, n: u64) -> u64 {
                (self * n as $f).ceil() as u64
            }

            fn to_f64(self) -> f64 {
                self as f64
            }

            fn from_f64(value: f64) -> Self {
                value as $f
            }
        }
    };
}

impl_float_density!(f32);
impl_float_density!(f64);

impl Density for Ratio<i64> {
    fn from_ratio(num: u64, den: u64) -> Self {
        let g = num.gcd(&den).max(1);
        Ratio::new((num / g) as i64, (den / g) as i64)
    }

    fn ceil_mul(self, n: u64) -> u64 {
        // (num·n) / den rounded up, in 128 bits so large n cannot wrap.
        let num = *self.numer() as i128 * n as i128;
        let den = *self.denom() as i128;
        Integer::div_ceil(&num, &den).max(0) as u64
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn from_f64(value: f64) -> Self {
        Ratio::approximate_float(value).unwrap_or_else(|| Ratio::from_integer(0))
    }
}

/// Parses `"0.45"`, `"9/20"` or `"1"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }
    let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
    if frac_part.len() > 15 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['-', '+']);
    if int_digits.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let whole: i64 = if int_digits.is_empty() {
        0
    } else {
        int_digits.parse().map_err(|_| bad())?
    };
    let scale = 10i64.pow(frac_part.len() as u32);
    let frac: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| bad())?
    };
    let magnitude = whole
        .checked_mul(scale)
        .and_then(|w| w.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Ratio::new(
        if negative { -magnitude } else { magnitude },
        scale,
    ))
}

/// Converts between density scalars through `f64` when no exact route exists.
pub fn convert<A: Density, B: Density>(value: A) -> B {
    B::from_f64(value.to_f64())
}
