//! Synthetic ε-bounded multiplicative noise.
//!
//! Every sample satisfies `(1−ε)·f(S) ≤ F(S) ≤ (1+ε)·f(S)` and the
//! expectation of `F(S)` is `f(S)`. Only the interval and the expectation
//! are contractual; the distribution within the interval is configurable,
//! with symmetric uniform as the default (the weakest assumption meeting
//! both constraints) and a two-point extreme distribution for worst-case
//! stress tests.

use crate::error::Error;
use crate::itemset::ItemSet;
use crate::objectives::Objective;
use rand::{Rng, RngCore};

/// How the multiplicative disturbance δ ∈ [−ε, +ε] is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NoiseDistribution {
    /// δ ~ Uniform(−ε, +ε).
    #[default]
    Uniform,
    /// δ = ±ε with probability 1/2 each; the extreme ε-bounded noise.
    TwoPoint,
}

/// ε-bounded multiplicative noise model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    epsilon: f64,
    distribution: NoiseDistribution,
}

impl NoiseModel {
    /// Uniform noise with half-width `epsilon ∈ [0, 1)`.
    pub fn uniform(epsilon: f64) -> Result<Self, Error> {
        NoiseModel::new(epsilon, NoiseDistribution::Uniform)
    }

    pub fn new(epsilon: f64, distribution: NoiseDistribution) -> Result<Self, Error> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        Ok(NoiseModel {
            epsilon,
            distribution,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn sample_delta<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.distribution {
            NoiseDistribution::Uniform => (rng.random::<f64>() * 2.0 - 1.0) * self.epsilon,
            NoiseDistribution::TwoPoint => {
                if rng.random::<bool>() {
                    self.epsilon
                } else {
                    -self.epsilon
                }
            }
        }
    }
}

/// An objective whose noisy channel perturbs the base exact value
/// multiplicatively; the exact channel passes through.
pub struct NoisyObjective<O> {
    base: O,
    noise: NoiseModel,
}

/// Wraps `base` so that `F(S) = f(S)·(1 + δ)` with δ drawn per call from
/// `noise`.
pub fn wrap_multiplicative_noise<O: Objective>(base: O, noise: NoiseModel) -> NoisyObjective<O> {
    NoisyObjective { base, noise }
}

impl<O> NoisyObjective<O> {
    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    pub fn base(&self) -> &O {
        &self.base
    }
}

impl<O: Objective> Objective for NoisyObjective<O> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn sample_noisy(&self, set: &ItemSet, rng: &mut dyn RngCore) -> f64 {
        self.base.evaluate_exact(set) * (1.0 + self.noise.sample_delta(rng))
    }

    fn evaluate_exact(&self, set: &ItemSet) -> f64 {
        self.base.evaluate_exact(set)
    }
}
