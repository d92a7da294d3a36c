use serde::{Deserialize, Serialize};

use super::Sampling;
use crate::encoding::Encoder;
use crate::error::{Error, Result};
use crate::scalar::Density;

/// Which of the parameter constraints hold, evaluated in `log₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterChecks {
    /// `(1/ε)^{2C} ≥ t^d`.
    pub upper: bool,
    /// `t^d ≥ (2dt²a^d/ε)^C`.
    pub lower: bool,
    /// `t^{d-2}/d ≥ 8/ε`, so the sphere cap is large enough for Chebyshev.
    pub guard: bool,
    pub log2_box: f64,
    pub log2_upper: f64,
    pub log2_lower: f64,
    pub log2_cap_floor: f64,
    pub log2_guard_target: f64,
}

impl ParameterChecks {
    pub fn all(&self) -> bool {
        self.upper && self.lower && self.guard
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplifierParams<T> {
    pub epsilon: T,
    pub c: T,
    pub a_sum: u64,
    pub t: u64,
    pub d: usize,
    pub overridden: bool,
    pub checks: ParameterChecks,
    pub trials: u64,
    pub seed: u64,
    /// Enumerate every `b` instead of sampling.
    pub exhaustive: bool,
    /// Refuse to run when `ε|X| < 8`.
    pub enforce_guard: bool,
}

impl<T> AmplifierParams<T> {
    pub fn sampling(&self) -> Sampling {
        if self.exhaustive {
            Sampling::Exhaustive
        } else {
            Sampling::Random {
                trials: self.trials,
                seed: self.seed,
            }
        }
    }
}

/// `t = 2^{√log₂(1/ε)}` and `d = 2C√log₂(1/ε)`, rounded to a power of two
/// and an integer respectively, both at least 2; or the given override.
pub fn choose_parameters<T: Density>(
    epsilon: T,
    c: T,
    a_sum: u64,
    override_td: Option<(u64, usize)>,
) -> Result<AmplifierParams<T>> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::input(format!("density {epsilon:?} outside (0, 1)")));
    }
    if c < T::one() {
        return Err(Error::input(format!(
            "exponent C = {c:?} must be at least 1"
        )));
    }
    let log_inv = -epsilon.to_f64().log2();
    let root = log_inv.sqrt();
    let (t, d) = match override_td {
        Some((t, d)) => {
            if t < 2 || d < 2 {
                return Err(Error::input(format!(
                    "override needs t >= 2 and d >= 2, got ({t}, {d})"
                )));
            }
            (t, d)
        }
        None => {
            let exp = (root.round() as u32).max(1);
            let t = 1u64
                .checked_shl(exp)
                .filter(|_| exp < 64)
                .ok_or_else(|| Error::Overflow(format!("t = 2^{exp} does not fit 64 bits")))?;
            (t, ((2.0 * c.to_f64() * root).round() as usize).max(2))
        }
    };
    Encoder::new(a_sum, t, d)?;

    let cf = c.to_f64();
    let lt = (t as f64).log2();
    let log2_box = d as f64 * lt;
    let log2_upper = 2.0 * cf * log_inv;
    let log2_lower =
        cf * ((2 * d) as f64).log2() + cf * (2.0 * lt + d as f64 * (a_sum as f64).log2() + log_inv);
    let log2_cap_floor = (d as f64 - 2.0) * lt - (d as f64).log2();
    let log2_guard_target = 3.0 + log_inv;
    let checks = ParameterChecks {
        upper: log2_upper >= log2_box,
        lower: log2_box >= log2_lower,
        guard: log2_cap_floor >= log2_guard_target,
        log2_box,
        log2_upper,
        log2_lower,
        log2_cap_floor,
        log2_guard_target,
    };
    Ok(AmplifierParams {
        epsilon,
        c,
        a_sum,
        t,
        d,
        overridden: override_td.is_some(),
        checks,
        trials: 1000,
        seed: 0,
        exhaustive: false,
        enforce_guard: true,
    })
}
