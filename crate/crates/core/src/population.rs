//! Size-bucketed archive of candidate solutions.
//!
//! The archive holds at most `2k` buckets, one per cardinality in
//! `[0, 2k)`. Solutions at or beyond the size barrier carry `f1 = −∞` and
//! are never admitted. The empty solution is inserted at construction and
//! can only ever be replaced by another copy of itself, so it survives the
//! whole run.
//!
//! Iteration order is canonical — ascending size, then insertion order —
//! which makes uniform selection and serialization deterministic per seed.

use crate::fitness::{theta_dominates, weakly_theta_dominates, BiFitness, Theta};
use crate::itemset::ItemSet;
use rand::Rng;

/// A candidate solution with its cached fitness.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub set: ItemSet,
    pub fitness: BiFitness,
    /// Iteration at which this individual was created (0 for the seed
    /// solution).
    pub birth_iteration: u64,
}

impl Individual {
    pub fn new(set: ItemSet, f1: f64, birth_iteration: u64) -> Self {
        let fitness = BiFitness::new(f1, set.cardinality());
        Individual {
            set,
            fitness,
            birth_iteration,
        }
    }
}

/// Archive of individuals bucketed by cardinality.
#[derive(Clone, Debug)]
pub struct Population {
    buckets: Vec<Vec<Individual>>,
    len: usize,
}

impl Population {
    /// Creates an archive for sizes `0..size_limit` holding only the empty
    /// solution (with `f1 = 0`, the normalized objective value of `∅`).
    pub fn with_empty(universe: usize, size_limit: usize) -> Self {
        assert!(size_limit >= 1);
        let mut buckets = vec![Vec::new(); size_limit];
        buckets[0].push(Individual::new(ItemSet::empty(universe), 0.0, 0));
        Population { buckets, len: 1 }
    }

    /// Total number of individuals.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// One past the largest admissible cardinality (`2k`).
    pub fn size_limit(&self) -> usize {
        self.buckets.len()
    }

    pub fn bucket_len(&self, size: usize) -> usize {
        self.buckets.get(size).map_or(0, Vec::len)
    }

    /// Individuals in canonical order: ascending size, then insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Individual> {
        self.buckets.iter().flatten()
    }

    pub fn contains_empty(&self) -> bool {
        !self.buckets[0].is_empty()
    }

    /// Archive update: rejects `x` if some member θ-dominates it, otherwise
    /// removes every member weakly θ-dominated by `x` and inserts `x`.
    /// Returns whether `x` was accepted.
    ///
    /// Barrier individuals (`f1 = −∞`) are always rejected: the empty
    /// solution θ-dominates them.
    pub fn insert_offspring(&mut self, x: Individual, theta: Theta) -> bool {
        if x.fitness.is_barrier() || x.fitness.size >= self.size_limit() {
            return false;
        }
        // A θ-dominating member must have size ≤ |x|.
        for bucket in &self.buckets[..=x.fitness.size] {
            if bucket
                .iter()
                .any(|z| theta_dominates(z.fitness, x.fitness, theta))
            {
                return false;
            }
        }
        // Members weakly θ-dominated by x must have size ≥ |x|.
        for bucket in &mut self.buckets[x.fitness.size..] {
            let before = bucket.len();
            bucket.retain(|z| !weakly_theta_dominates(x.fitness, z.fitness, theta));
            self.len -= before - bucket.len();
        }
        self.buckets[x.fitness.size].push(x);
        self.len += 1;
        true
    }

    /// Removes and returns the whole bucket for `size` (used by the
    /// pairwise-comparison population update).
    pub fn take_bucket(&mut self, size: usize) -> Vec<Individual> {
        let bucket = std::mem::take(&mut self.buckets[size]);
        self.len -= bucket.len();
        bucket
    }

    /// Reinserts an individual without any domination checks.
    pub fn push_raw(&mut self, x: Individual) {
        let size = x.fitness.size;
        self.buckets[size].push(x);
        self.len += 1;
    }

    /// If bucket `size` exceeds `cap`, evicts one member with minimal `f1`
    /// (ties broken uniformly at random) and returns it.
    pub fn trim_bucket_min_f1<R: Rng + ?Sized>(
        &mut self,
        size: usize,
        cap: usize,
        rng: &mut R,
    ) -> Option<Individual> {
        let bucket = &mut self.buckets[size];
        if bucket.len() <= cap {
            return None;
        }
        let min = bucket
            .iter()
            .map(|ind| ind.fitness.f1)
            .fold(f64::INFINITY, f64::min);
        let ties: Vec<usize> = bucket
            .iter()
            .enumerate()
            .filter(|(_, ind)| ind.fitness.f1 == min)
            .map(|(i, _)| i)
            .collect();
        let victim = ties[rng.random_range(0..ties.len())];
        self.len -= 1;
        Some(bucket.remove(victim))
    }

    /// Selects a member uniformly at random over the whole archive.
    pub fn select_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> &Individual {
        assert!(self.len > 0, "selection from an empty population");
        let mut idx = rng.random_range(0..self.len);
        for bucket in &self.buckets {
            if idx < bucket.len() {
                return &bucket[idx];
            }
            idx -= bucket.len();
        }
        unreachable!("len is the sum of bucket lengths");
    }

    /// The member with the largest `f1` among sizes ≤ `max_size`
    /// (first in canonical order on ties).
    pub fn best_within(&self, max_size: usize) -> Option<&Individual> {
        let top = max_size.min(self.size_limit() - 1);
        self.buckets[..=top]
            .iter()
            .flatten()
            .max_by(|a, b| {
                a.fitness
                    .f1
                    .partial_cmp(&b.fitness.f1)
                    .expect("fitness is never NaN")
            })
    }
}
