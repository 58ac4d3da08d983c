//! Evaluation-budget accounting.
//!
//! Every call into an objective's noisy channel costs exactly one unit; the
//! exact channel is free. The Pareto-optimization algorithms all run under
//! the common cap `⌊2·e·k²·n⌋` unless overridden, so that comparing them at
//! equal budgets is meaningful.

/// Counter of noisy objective evaluations with a hard limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    limit: u64,
    used: u64,
}

/// Signal that a charge would exceed the remaining budget. The charge is
/// rejected atomically: the counter is unchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("evaluation budget exhausted: requested {requested}, remaining {remaining}")]
pub struct BudgetExhausted {
    pub requested: u64,
    pub remaining: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    /// The shared cap for the Pareto algorithms: `⌊2·e·k²·n⌋`.
    pub fn pareto_default(k: usize, n: usize) -> Self {
        Budget::new(pareto_budget(k, n))
    }

    /// Effectively no cap (used by the greedy baseline, which runs a fixed
    /// number of evaluations instead).
    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }

    /// Charges `cost` units, or rejects the whole charge if it does not fit.
    pub fn try_charge(&mut self, cost: u64) -> Result<(), BudgetExhausted> {
        if cost > self.remaining() {
            return Err(BudgetExhausted {
                requested: cost,
                remaining: self.remaining(),
            });
        }
        self.used += cost;
        Ok(())
    }
}

/// `⌊2·e·k²·n⌋`.
pub fn pareto_budget(k: usize, n: usize) -> u64 {
    (2.0 * std::f64::consts::E * (k * k) as f64 * n as f64).floor() as u64
}
