use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global truncation arity. Every quantification over `n ∈ ℕ` is checked for
/// `n ≤ n_max` only.
pub const DEFAULT_N_MAX: usize = 3;

/// Bounds on brute-force work.
///
/// `max_function_space` bounds enumerations of whole function spaces
/// (`|W|^|A|`, factorials in isomorphism search, endomorphism clone sizes).
/// `max_tuples` bounds materialised tuple sets and the number of axiom
/// instances checked per block before validators switch to sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_function_space: u64,
    pub max_tuples: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_function_space: 1 << 24,
            max_tuples: 1 << 24,
        }
    }
}

impl SearchBudget {
    pub fn new(max_function_space: u64, max_tuples: u64) -> Result<Self> {
        if max_function_space == 0 || max_tuples == 0 {
            return Err(Error::InvalidInput("budgets must be positive".into()));
        }
        Ok(SearchBudget {
            max_function_space,
            max_tuples,
        })
    }

    /// Same bound for both kinds of work.
    pub fn uniform(n: u64) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn check_functions(&self, what: &str, required: u128) -> Result<()> {
        if required > self.max_function_space as u128 {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                required,
                budget: self.max_function_space,
            });
        }
        Ok(())
    }

    pub fn check_tuples(&self, what: &str, required: u128) -> Result<()> {
        if required > self.max_tuples as u128 {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                required,
                budget: self.max_tuples,
            });
        }
        Ok(())
    }
}

/// `base^exp` without overflow; saturates at `u128::MAX`.
pub(crate) fn pow_sat(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
