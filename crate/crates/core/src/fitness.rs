//! Bi-objective fitness and the (θ-)domination predicates.
//!
//! Subset selection with bound `k` is recast as maximizing the pair
//! `(f1, f2)` where `f1` is the (possibly robust) noisy objective value with
//! a `−∞` barrier at sizes ≥ 2k, and `f2 = −|x|`. `f2` is never stored; the
//! cardinality is kept instead and all predicates compare sizes with the
//! orientation flipped.
//!
//! `f1 = −∞` is an ordinary value here: it compares below every finite
//! value, ties with itself, and is absorbing under the positive θ-ratio
//! scaling. This makes every predicate total, which the population archive
//! relies on.

use crate::error::Error;

/// The bi-objective value of a solution: `f1` and the cardinality (so that
/// `f2 = -size`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiFitness {
    /// Objective channel: finite value, or `f64::NEG_INFINITY` beyond the
    /// size barrier.
    pub f1: f64,
    /// Cardinality of the solution; `f2` is its negation.
    pub size: usize,
}

impl BiFitness {
    pub fn new(f1: f64, size: usize) -> Self {
        debug_assert!(!f1.is_nan());
        BiFitness { f1, size }
    }

    /// The barrier value used for solutions of size ≥ 2k.
    pub fn barrier(size: usize) -> Self {
        BiFitness {
            f1: f64::NEG_INFINITY,
            size,
        }
    }

    /// Second objective, `-|x|`.
    pub fn f2(&self) -> i64 {
        -(self.size as i64)
    }

    pub fn is_barrier(&self) -> bool {
        self.f1 == f64::NEG_INFINITY
    }
}

/// Comparison margin for θ-domination.
///
/// Validated to `[0, 1)`: at θ = 1 the ratio `(1+θ)/(1−θ)` diverges and
/// no solution could ever θ-dominate another on `f1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theta(f64);

impl Theta {
    /// Plain domination; the ratio degenerates to exactly 1.
    pub const ZERO: Theta = Theta(0.0);

    pub fn new(theta: f64) -> Result<Self, Error> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidTheta(theta));
        }
        Ok(Theta(theta))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The multiplicative margin `(1+θ)/(1−θ) ≥ 1` demanded on `f1`.
    pub fn ratio(self) -> f64 {
        (1.0 + self.0) / (1.0 - self.0)
    }
}

/// `a ⪰ b`: `a.f1 ≥ b.f1` and `-a.size ≥ -b.size`.
pub fn weakly_dominates(a: BiFitness, b: BiFitness) -> bool {
    a.f1 >= b.f1 && a.size <= b.size
}

/// `a ≻ b`: weak domination plus strict improvement in some coordinate.
pub fn dominates(a: BiFitness, b: BiFitness) -> bool {
    weakly_dominates(a, b) && (a.f1 > b.f1 || a.size < b.size)
}

/// `a ⪰_θ b`: `a.f1 ≥ (1+θ)/(1−θ) · b.f1` and `-a.size ≥ -b.size`.
///
/// IEEE semantics give the intended extended-real behavior: the scaled
/// value of `−∞` is `−∞`, so any `a.f1` passes the `f1` clause against a
/// barrier `b`.
pub fn weakly_theta_dominates(a: BiFitness, b: BiFitness, theta: Theta) -> bool {
    a.f1 >= theta.ratio() * b.f1 && a.size <= b.size
}

/// `a ≻_θ b`: weak θ-domination plus a strict margin on `f1` or a strictly
/// smaller size.
pub fn theta_dominates(a: BiFitness, b: BiFitness, theta: Theta) -> bool {
    weakly_theta_dominates(a, b, theta)
        && (a.f1 > theta.ratio() * b.f1 || a.size < b.size)
}
