//! Bit-wise mutation: flip each bit independently with probability 1/n.
//!
//! The flips are sampled by geometric gap skipping instead of n Bernoulli
//! draws: the index of the next flipped bit past position i is distributed
//! as i + 1 + Geometric(1/n), which reproduces the joint law of independent
//! per-bit flips exactly while consuming O(1) expected draws per mutation.

use crate::itemset::ItemSet;
use rand::Rng;

/// Returns a mutated copy of `parent` with each bit flipped independently
/// with probability `1/n`. The offspring may equal the parent.
pub fn mutate<R: Rng + ?Sized>(parent: &ItemSet, rng: &mut R) -> ItemSet {
    let n = parent.universe_size();
    assert!(n >= 1, "mutation needs a nonempty ground set");
    let mut child = parent.clone();
    if n == 1 {
        // Flip probability 1/1: the single bit always flips.
        child.flip(0);
        return child;
    }
    // ln(1 - 1/n), strictly negative for n ≥ 2.
    let ln_keep = (1.0 - 1.0 / n as f64).ln();
    let mut i = 0usize;
    while i < n {
        // u ∈ (0, 1]; gap g = ⌊ln(u)/ln(1-p)⌋ has P(g) = (1-p)^g · p.
        let u = 1.0 - rng.random::<f64>();
        let gap = u.ln() / ln_keep;
        if !(gap < (n - i) as f64) {
            break; // next flip falls outside the remaining range
        }
        i += gap as usize;
        child.flip(i);
        i += 1;
    }
    child
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// RngCore that repeats one word forever; lets tests pin the uniform
    /// draws feeding the gap sampler.
    struct ConstRng(u64);

    impl RngCore for ConstRng {
        fn next_u32(&mut self) -> u32 {
            self.0 as u32
        }
        fn next_u64(&mut self) -> u64 {
            self.0
        }
        fn fill_bytes(&mut self, dst: &mut [u8]) {
            for b in dst {
                *b = 0;
            }
        }
    }

    #[test]
    fn single_item_universe_always_flips() {
        let parent = ItemSet::empty(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let child = mutate(&parent, &mut rng);
            assert_eq!(child.members(), vec![0]);
        }
    }

    #[test]
    fn stream_without_flips_returns_parent() {
        // All-ones words → u ≈ 1e-16 → gap far beyond any desk-scale n.
        let parent = ItemSet::from_members(40, &[2, 17, 39]).unwrap();
        let mut rng = ConstRng(u64::MAX);
        assert_eq!(mutate(&parent, &mut rng), parent);
    }

    #[test]
    fn stream_of_zero_gaps_flips_every_bit() {
        // Zero words → u = 1 → gap 0 at every position.
        let parent = ItemSet::from_members(10, &[0, 5]).unwrap();
        let mut rng = ConstRng(0);
        let child = mutate(&parent, &mut rng);
        assert_eq!(child.cardinality(), 8);
        assert!(!child.contains(0) && !child.contains(5));
    }

    #[test]
    fn mean_flip_count_matches_binomial() {
        // Flip count ~ Binomial(n, 1/n); mean must land in [0.98, 1.02]
        // over 10^5 mutations of the empty set with n = 100.
        let n = 100;
        let trials = 100_000usize;
        let parent = ItemSet::empty(n);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut flips = 0usize;
        for _ in 0..trials {
            flips += mutate(&parent, &mut rng).cardinality();
        }
        let mean = flips as f64 / trials as f64;
        assert!((0.98..=1.02).contains(&mean), "mean flip count {mean}");
    }

    #[test]
    fn per_bit_flip_frequency_is_uniform() {
        // Marginal flip frequency of every bit ≈ 1/n; a coarse chi-square
        // guard against positional bias in the gap sampler.
        let n = 16;
        let trials = 200_000usize;
        let parent = ItemSet::empty(n);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = vec![0usize; n];
        for _ in 0..trials {
            for i in mutate(&parent, &mut rng).iter() {
                counts[i] += 1;
            }
        }
        let expected = trials as f64 / n as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // 15 degrees of freedom; 99.9th percentile ≈ 37.7.
        assert!(chi2 < 37.7, "chi-square {chi2}, counts {counts:?}");
    }

    #[test]
    fn same_seed_same_offspring_sequence() {
        let parent = ItemSet::from_members(64, &[1, 2, 3, 40]).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..100).map(|_| mutate(&parent, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(run(99), run(99));
    }
}
