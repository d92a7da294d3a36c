//! Exact tools for invariant linear equations `Σ aᵢxᵢ = 0` (with `Σ aᵢ = 0`)
//! over `[n]` and `𝔽_p`: solution counting, extremal solution-free sets,
//! Behrend-type sphere constructions, and the randomized affine
//! amplification that turns "every dense set has a solution" into "every
//! dense set has many solutions".

pub mod amplifier;
pub mod counting;
pub mod encoding;
pub mod equation;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod modular;
pub mod scalar;

pub use counting::{GroundSet, Universe};
pub use equation::InvariantEquation;
pub use error::{Error, ErrorKind, Result};
pub use modular::{Prime, PrimeContext};
pub use scalar::{Density, Rational};

/// Largest universe size accepted anywhere in the crate.
pub const MAX_GROUND: u64 = 1 << 30;
