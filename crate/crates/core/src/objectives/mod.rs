//! The two-channel objective contract.
//!
//! An objective exposes a noisy channel `F` — a random variable whose
//! expectation is the accurate value `f` — and an exact channel used only
//! for reporting. Only the noisy channel is counted against the evaluation
//! budget, and the counting is centralized in [`evaluate_noisy`]: one call,
//! one unit, except that `F(∅)` is the constant 0 and costs nothing.

mod coverage;
mod noise;

pub use coverage::{make_coverage, CoverageInstance, CoverageObjective};
pub use noise::{wrap_multiplicative_noise, NoiseDistribution, NoiseModel, NoisyObjective};

use crate::budget::{Budget, BudgetExhausted};
use crate::itemset::ItemSet;
use rand::RngCore;
use std::sync::atomic::{AtomicU64, Ordering};

/// A set function with a noisy and an exact evaluation channel.
///
/// Implementations must keep `evaluate_exact` deterministic, normalized
/// (`f(∅) = 0`) and — for everything shipped here — monotone. The noisy
/// channel must draw all randomness from the caller's stream, so that runs
/// are reproducible from their seed.
pub trait Objective: Send + Sync {
    /// Number of items in the ground set `V`.
    fn ground_size(&self) -> usize;

    /// Draws one sample of `F(set)`. Callers go through
    /// [`evaluate_noisy`] so the draw is charged to a budget; implementors
    /// do not handle budgets or the empty set specially.
    fn sample_noisy(&self, set: &ItemSet, rng: &mut dyn RngCore) -> f64;

    /// The accurate value `f(set)`. Never counted against any budget.
    fn evaluate_exact(&self, set: &ItemSet) -> f64;
}

/// One budget-counted sample of `F(set)`.
///
/// `F(∅)` returns 0 without sampling and without charge: the objective is
/// normalized and multiplicative noise preserves zero, so spending budget
/// on it would only distort cross-algorithm accounting.
pub fn evaluate_noisy<O: Objective + ?Sized>(
    obj: &O,
    set: &ItemSet,
    budget: &mut Budget,
    rng: &mut dyn RngCore,
) -> Result<f64, BudgetExhausted> {
    if set.is_empty() {
        return Ok(0.0);
    }
    budget.try_charge(1)?;
    Ok(obj.sample_noisy(set, rng))
}

/// Wrapper that counts raw noisy-channel calls, for verifying that budget
/// deltas equal the number of samples actually drawn.
pub struct CountingObjective<O> {
    inner: O,
    calls: AtomicU64,
}

impl<O: Objective> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        CountingObjective {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    /// Number of `sample_noisy` calls observed so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: Objective> Objective for CountingObjective<O> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn sample_noisy(&self, set: &ItemSet, rng: &mut dyn RngCore) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.sample_noisy(set, rng)
    }

    fn evaluate_exact(&self, set: &ItemSet) -> f64 {
        self.inner.evaluate_exact(set)
    }
}
