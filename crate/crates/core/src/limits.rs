//! Resource caps shared by the exponential searches.

use crate::error::{Error, Result};

/// Hard upper bound on the number of states: subsets are stored in a `u64`.
pub const MAX_STATES: usize = 64;

/// Default bound on the state count for powerset searches (2^24 subsets).
pub const DEFAULT_POWERSET_BITS: usize = 24;

/// Environment variable overriding [`Limits::powerset_bits`].
pub const CAP_BITS_ENV: &str = "CRAUTO_CAP_BITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest state count for which the powerset automaton is explored.
    pub powerset_bits: usize,
    /// Largest number of monoid elements kept by the pruned defect-≤1 enumeration.
    pub monoid_elements: usize,
    /// Largest permutation group enumerated by explicit closure.
    pub group_elements: usize,
    /// Largest product state space explored by the intersection oracle.
    pub product_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            powerset_bits: DEFAULT_POWERSET_BITS,
            monoid_elements: 4_000_000,
            group_elements: 4_000_000,
            product_states: 1 << 24,
        }
    }
}

impl Limits {
    /// Defaults, with the powerset cap taken from `CRAUTO_CAP_BITS` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(value) = std::env::var(CAP_BITS_ENV) {
            let bits: usize = value.trim().parse().map_err(|_| {
                Error::precondition(format!("{CAP_BITS_ENV} must be an integer, got `{value}`"))
            })?;
            limits.powerset_bits = bits.min(32);
        }
        Ok(limits)
    }

    pub(crate) fn check_powerset(&self, n: usize) -> Result<()> {
        if n > self.powerset_bits {
            return Err(Error::CapExceeded {
                what: "powerset state count",
                limit: self.powerset_bits,
                requested: n,
            });
        }
        Ok(())
    }
}
