//! Numerical tolerances and resource budgets shared by every module.

use serde::{Deserialize, Serialize};

/// Default cap on the number of dense amplitudes any single state may hold.
pub const DEFAULT_MAX_AMPLITUDES: usize = 1 << 24;

/// Environment variable that overrides [`DEFAULT_MAX_AMPLITUDES`].
pub const BUDGET_ENV_VAR: &str = "EGEOM_BUDGET_AMPS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of a state norm from 1.
    pub normalization: f64,
    /// Allowed entrywise deviation from Hermiticity.
    pub hermiticity: f64,
    /// Allowed deviation of a measurement basis from orthonormality.
    pub orthonormality: f64,
    /// Allowed deviation of a density-matrix trace from 1.
    pub trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}

/// The crate-wide defaults.
pub const TOLERANCES: Tolerances = Tolerances {
    normalization: 1e-12,
    hermiticity: 1e-10,
    orthonormality: 1e-10,
    trace: 1e-10,
};

/// Memory budget expressed in complex amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_amplitudes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_amplitudes: DEFAULT_MAX_AMPLITUDES,
        }
    }
}

impl Budget {
    pub fn new(max_amplitudes: usize) -> Self {
        Budget { max_amplitudes }
    }

    /// Default budget, overridden by `EGEOM_BUDGET_AMPS` when it parses.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Budget::new)
            .unwrap_or_default()
    }

    /// Returns `d^n` if it fits the budget.
    pub fn check_dims(&self, n: usize, d: usize) -> crate::Result<usize> {
        let requested = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if requested > self.max_amplitudes as u128 {
            return Err(crate::Error::Budget {
                requested,
                limit: self.max_amplitudes,
            });
        }
        Ok(requested as usize)
    }
}
