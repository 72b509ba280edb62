//! Resource caps shared by the analytic, oracle, and simulation paths.

use crate::error::{Error, Result};

/// Environment variable that overrides the mode and trajectory budgets.
pub const BUDGET_ENV: &str = "CODEWALK_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Maximum number of Fourier modes a direct mode sum may visit.
    pub modes: u128,
    /// Maximum number of walk trajectories exhaustive enumeration may visit.
    pub trajectories: u128,
    /// Largest state count for the dense hitting-time solve.
    pub dense_states: u128,
    /// Largest state count for exact probability-mass propagation.
    pub propagation_states: u128,
    /// Largest state-steps product for exact propagation.
    pub propagation_work: u128,
    /// Largest visited-set size, in bits, for exact distinct-site counting.
    pub visited_bits: u128,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            modes: 1 << 24,
            trajectories: 100_000_000,
            dense_states: 5000,
            propagation_states: 1_000_000,
            propagation_work: 20_000_000_000,
            visited_bits: 1 << 30,
        }
    }
}

impl Budgets {
    /// Defaults, with the mode and trajectory caps replaced by `CODEWALK_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        let mut budgets = Self::default();
        if let Ok(raw) = std::env::var(BUDGET_ENV) {
            let cap: u128 = raw.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{BUDGET_ENV}={raw:?} is not a nonnegative integer"))
            })?;
            budgets.modes = cap;
            budgets.trajectories = cap;
        }
        Ok(budgets)
    }

    pub(crate) fn check(what: &'static str, required: u128, budget: u128) -> Result<()> {
        if required > budget {
            Err(Error::BudgetExceeded {
                what,
                required,
                budget,
            })
        } else {
            Ok(())
        }
    }
}
