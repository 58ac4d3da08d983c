//! Contracts every shipped objective honors: ε-bounded noise, unbiased
//! noisy channels, and exact budget accounting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subsel::objectives::{
    evaluate_noisy, make_coverage, wrap_multiplicative_noise, CountingObjective,
    CoverageInstance, NoiseDistribution, NoiseModel,
};
use subsel::{Budget, ItemSet, Objective};

#[test]
fn every_noisy_sample_is_epsilon_bounded() {
    // 10^5 random (subset, sample) pairs across ε levels and both
    // distributions.
    let mut rng = ChaCha8Rng::seed_from_u64(0xeb);
    let inst = CoverageInstance::random(15, 40, 6, &mut rng);
    let base = make_coverage(inst);
    for &epsilon in &[0.0, 0.05, 0.3, 0.8] {
        for dist in [NoiseDistribution::Uniform, NoiseDistribution::TwoPoint] {
            let obj = wrap_multiplicative_noise(
                make_coverage(base.instance().clone()),
                NoiseModel::new(epsilon, dist).unwrap(),
            );
            for _ in 0..12_500 {
                let size = rng.random_range(0..=6usize);
                let members = rand::seq::index::sample(&mut rng, 15, size).into_vec();
                let s = ItemSet::from_members(15, &members).unwrap();
                let f = obj.evaluate_exact(&s);
                let sample = obj.sample_noisy(&s, &mut rng);
                assert!(
                    (1.0 - epsilon) * f - 1e-12 <= sample
                        && sample <= (1.0 + epsilon) * f + 1e-12,
                    "ε={epsilon}: sample {sample} escapes [{}, {}]",
                    (1.0 - epsilon) * f,
                    (1.0 + epsilon) * f
                );
            }
        }
    }
}

#[test]
fn noisy_channel_is_unbiased() {
    // Sample mean over 10^5 draws within 1% of the exact value.
    let mut rng = ChaCha8Rng::seed_from_u64(0xabba);
    let inst = CoverageInstance::random(10, 30, 5, &mut rng);
    let obj = wrap_multiplicative_noise(make_coverage(inst), NoiseModel::uniform(0.3).unwrap());
    let s = ItemSet::from_members(10, &[0, 3, 7]).unwrap();
    let f = obj.evaluate_exact(&s);
    assert!(f > 0.0);
    let samples = 100_000;
    let mean: f64 = (0..samples)
        .map(|_| obj.sample_noisy(&s, &mut rng))
        .sum::<f64>()
        / f64::from(samples);
    assert!(
        (mean - f).abs() <= 0.01 * f,
        "mean {mean} deviates from f = {f}"
    );
}

#[test]
fn budget_delta_always_equals_completed_samples() {
    // Random call patterns over random subsets: the budget counter and the
    // instrumented sample count move in lockstep, with the empty set free.
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0);
    let inst = CoverageInstance::random(12, 30, 5, &mut rng);
    let obj = CountingObjective::new(wrap_multiplicative_noise(
        make_coverage(inst),
        NoiseModel::uniform(0.2).unwrap(),
    ));
    let mut budget = Budget::new(500);
    let mut expected_calls = 0u64;
    for _ in 0..2_000 {
        let size = rng.random_range(0..=5usize);
        let members = rand::seq::index::sample(&mut rng, 12, size).into_vec();
        let s = ItemSet::from_members(12, &members).unwrap();
        match evaluate_noisy(&obj, &s, &mut budget, &mut rng) {
            Ok(_) => {
                if !s.is_empty() {
                    expected_calls += 1;
                }
            }
            Err(_) => break,
        }
        assert_eq!(obj.calls(), expected_calls);
        assert_eq!(budget.used(), expected_calls);
    }
    // Exhaust the budget and verify nothing further is drawn.
    let s = ItemSet::from_members(12, &[0]).unwrap();
    while evaluate_noisy(&obj, &s, &mut budget, &mut rng).is_ok() {}
    assert_eq!(budget.used(), budget.limit());
    assert_eq!(obj.calls(), budget.limit());
}
