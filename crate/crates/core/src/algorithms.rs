//! The four optimizers with exact evaluation-budget accounting.
//!
//! - **greedy**: k passes over the ground set, picking the item with the
//!   best noisy marginal value; `Σ_{i<k}(n−i)` evaluations, no cap.
//! - **POSS**: uniform parent selection, bit-wise mutation, one noisy
//!   evaluation per offspring, plain-domination archive update; 1 (or 0,
//!   past the size barrier) evaluation per iteration.
//! - **PONSS**: POSS with θ-domination; when a size bucket reaches `B+1`
//!   members, `B` pairwise tournaments re-evaluate two random members each
//!   and keep the winner, costing `2B` extra evaluations.
//! - **PORE**: θ-domination with the leave-one-out robust fitness
//!   ([`robust_f1`]), `|x'|` evaluations per offspring; an overfull bucket
//!   evicts its smallest-`f1` member with no re-evaluation. **PORE-F** is
//!   the ablation that keeps PORE's archive rules but scores offspring
//!   with a single noisy sample.
//!
//! The per-iteration prices above are contractual: the instrumented
//! sample counter always equals the budget delta, final selection uses
//! cached fitness only, and a run ends the moment an offspring's required
//! evaluations would exceed the remaining budget (that offspring is
//! discarded).

use crate::budget::{Budget, BudgetExhausted};
use crate::fitness::Theta;
use crate::itemset::ItemSet;
use crate::mutation::mutate;
use crate::objectives::{evaluate_noisy, Objective};
use crate::population::{Individual, Population};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which optimizer produced a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    Greedy,
    Poss,
    Ponss,
    Pore,
    PoreF,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 5] = [
        AlgorithmId::Greedy,
        AlgorithmId::Poss,
        AlgorithmId::Ponss,
        AlgorithmId::Pore,
        AlgorithmId::PoreF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::Greedy => "greedy",
            AlgorithmId::Poss => "POSS",
            AlgorithmId::Ponss => "PONSS",
            AlgorithmId::Pore => "PORE",
            AlgorithmId::PoreF => "PORE-F",
        }
    }

    /// Case-insensitive parse; accepts `pore-f` and `pore_f`.
    pub fn parse(s: &str) -> Option<AlgorithmId> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "greedy" => Some(AlgorithmId::Greedy),
            "poss" => Some(AlgorithmId::Poss),
            "ponss" => Some(AlgorithmId::Ponss),
            "pore" => Some(AlgorithmId::Pore),
            "pore-f" => Some(AlgorithmId::PoreF),
            _ => None,
        }
    }

    /// Whether the algorithm runs under the shared `2ek²n` cap.
    pub fn is_pareto(self) -> bool {
        self != AlgorithmId::Greedy
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How `robust_f1` scores singletons, where the literal leave-one-out
/// average degenerates to `F(∅)/1 = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SingletonPolicy {
    /// Score singletons with one sample of `F({v})` (1 evaluation).
    /// Default: keeps size-1 comparisons informative.
    #[default]
    Fallback,
    /// The literal leave-one-out value, 0 for every singleton
    /// (0 evaluations). Retained for fidelity experiments.
    Literal,
}

/// Parameters shared by the Pareto-optimization algorithms.
#[derive(Clone, Debug)]
pub struct AlgoConfig {
    /// Cardinality bound of the original problem.
    pub k: usize,
    /// θ-domination margin (ignored by POSS, which uses plain domination).
    pub theta: Theta,
    /// Per-size bucket cap `B` for PONSS and PORE; defaults to `k`.
    pub bucket_cap: usize,
    pub singleton_policy: SingletonPolicy,
    /// Anytime snapshot interval in units of `k·n` evaluations; `None`
    /// disables checkpoints.
    pub checkpoint_kn: Option<u64>,
    /// Record per-iteration offspring size / cost / tournament flags.
    pub record_trace: bool,
}

impl AlgoConfig {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "cardinality bound must be at least 1");
        AlgoConfig {
            k,
            theta: Theta::ZERO,
            bucket_cap: k,
            singleton_policy: SingletonPolicy::default(),
            checkpoint_kn: None,
            record_trace: false,
        }
    }

    pub fn with_theta(mut self, theta: Theta) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_bucket_cap(mut self, cap: usize) -> Self {
        assert!(cap >= 1, "bucket cap must be at least 1");
        self.bucket_cap = cap;
        self
    }

    pub fn with_singleton_policy(mut self, policy: SingletonPolicy) -> Self {
        self.singleton_policy = policy;
        self
    }

    pub fn with_checkpoints(mut self, every_kn: u64) -> Self {
        assert!(every_kn >= 1);
        self.checkpoint_kn = Some(every_kn);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }
}

/// Anytime snapshot: the best (cached-`f1`, size ≤ k) solution in the
/// archive when the evaluation counter crossed `kn · k · n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    /// Evaluations used, in `k·n` units.
    pub kn: u64,
    pub set: ItemSet,
    /// Exact value, filled in after the run terminates so reporting never
    /// consumes budget.
    pub exact_value: f64,
}

/// Per-iteration accounting, recorded when `AlgoConfig::record_trace` is
/// set.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub offspring_size: usize,
    /// Noisy evaluations consumed by this iteration.
    pub cost: u64,
    /// Whether a PONSS bucket tournament ran.
    pub tournament: bool,
    pub accepted: bool,
}

/// Seeded run provenance: final subset, exact value, evaluation counts and
/// anytime checkpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub algorithm: AlgorithmId,
    pub seed: u64,
    pub k: usize,
    /// Returned solution; always satisfies `|S| ≤ k`.
    pub final_set: ItemSet,
    /// Exact value of the final solution (reporting channel).
    pub final_exact: f64,
    /// Noisy evaluations consumed; equals the number of `F` samples drawn.
    pub evals_used: u64,
    pub iterations: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub trace: Option<Vec<IterationTrace>>,
}

/// The leave-one-out robust fitness of `x`:
/// the average of `F(x \ {i})` over all members `i`, at `|x|` evaluations.
///
/// Sizes at or beyond the `2k` barrier score `−∞` at no cost; the empty
/// solution scores 0 at no cost; singletons follow `policy`. The charge is
/// all-or-nothing: if fewer than `|x|` evaluations remain, the budget is
/// left untouched and the caller discards the offspring.
pub fn robust_f1<O: Objective + ?Sized, R: Rng>(
    obj: &O,
    x: &ItemSet,
    k: usize,
    rng: &mut R,
    policy: SingletonPolicy,
    budget: &mut Budget,
) -> Result<f64, BudgetExhausted> {
    let size = x.cardinality();
    if size >= 2 * k {
        return Ok(f64::NEG_INFINITY);
    }
    match size {
        0 => Ok(0.0),
        1 => match policy {
            SingletonPolicy::Literal => Ok(0.0), // F(∅)/1
            SingletonPolicy::Fallback => evaluate_noisy(obj, x, budget, rng),
        },
        _ => {
            budget.try_charge(size as u64)?;
            let mut sum = 0.0;
            for i in x.iter() {
                let mut y = x.clone();
                y.remove(i);
                sum += obj.sample_noisy(&y, rng);
            }
            Ok(sum / size as f64)
        }
    }
}

/// Greedy baseline: k iterations, each evaluating `F(S ∪ {v})` once per
/// remaining candidate and adding an argmax (ties uniform at random).
/// Runs `Σ_{i=0}^{k−1}(n−i)` evaluations; not subject to the shared cap.
pub fn greedy<O: Objective + ?Sized>(obj: &O, k: usize, seed: u64) -> RunRecord {
    let n = obj.ground_size();
    assert!(k <= n, "k={k} exceeds ground set size {n}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut budget = Budget::unlimited();
    let mut current = ItemSet::empty(n);
    for _ in 0..k {
        let mut best_value = f64::NEG_INFINITY;
        let mut ties: Vec<usize> = Vec::new();
        for v in 0..n {
            if current.contains(v) {
                continue;
            }
            let mut candidate = current.clone();
            candidate.insert(v);
            let value = evaluate_noisy(obj, &candidate, &mut budget, &mut rng)
                .expect("unlimited budget");
            if value > best_value {
                best_value = value;
                ties.clear();
                ties.push(v);
            } else if value == best_value {
                ties.push(v);
            }
        }
        let pick = ties[rng.random_range(0..ties.len())];
        current.insert(pick);
    }
    let final_exact = obj.evaluate_exact(&current);
    RunRecord {
        algorithm: AlgorithmId::Greedy,
        seed,
        k,
        final_set: current,
        final_exact,
        evals_used: budget.used(),
        iterations: k as u64,
        checkpoints: Vec::new(),
        trace: None,
    }
}

/// POSS: plain-domination Pareto optimization, one evaluation per
/// offspring.
pub fn poss<O: Objective + ?Sized>(
    obj: &O,
    cfg: &AlgoConfig,
    budget: &mut Budget,
    seed: u64,
) -> RunRecord {
    pareto_run(AlgorithmId::Poss, obj, cfg, budget, seed)
}

/// PONSS: θ-domination with `B`-bounded buckets resolved by pairwise
/// re-evaluation tournaments (1 or 1+2B evaluations per iteration).
pub fn ponss<O: Objective + ?Sized>(
    obj: &O,
    cfg: &AlgoConfig,
    budget: &mut Budget,
    seed: u64,
) -> RunRecord {
    pareto_run(AlgorithmId::Ponss, obj, cfg, budget, seed)
}

/// PORE: θ-domination with robust leave-one-out fitness (`|x'|`
/// evaluations per offspring) and eviction of the smallest cached `f1`
/// when a bucket overflows.
pub fn pore<O: Objective + ?Sized>(
    obj: &O,
    cfg: &AlgoConfig,
    budget: &mut Budget,
    seed: u64,
) -> RunRecord {
    pareto_run(AlgorithmId::Pore, obj, cfg, budget, seed)
}

/// PORE-F ablation: PORE's archive rules with a single noisy sample as
/// fitness (1 evaluation per offspring).
pub fn pore_f<O: Objective + ?Sized>(
    obj: &O,
    cfg: &AlgoConfig,
    budget: &mut Budget,
    seed: u64,
) -> RunRecord {
    pareto_run(AlgorithmId::PoreF, obj, cfg, budget, seed)
}

/// Runs `algorithm` with the default budget `⌊2ek²n⌋` (or `budget_limit`),
/// dispatching on the id. The greedy baseline ignores the limit.
pub fn run<O: Objective + ?Sized>(
    algorithm: AlgorithmId,
    obj: &O,
    cfg: &AlgoConfig,
    budget_limit: Option<u64>,
    seed: u64,
) -> RunRecord {
    match algorithm {
        AlgorithmId::Greedy => greedy(obj, cfg.k, seed),
        pareto => {
            let mut budget = match budget_limit {
                Some(limit) => Budget::new(limit),
                None => Budget::pareto_default(cfg.k, obj.ground_size()),
            };
            pareto_run(pareto, obj, cfg, &mut budget, seed)
        }
    }
}

/// Shared evolutionary loop. POSS, PONSS, PORE and PORE-F differ only in
/// the fitness computation for an offspring and in how an overfull bucket
/// is resolved; everything else — selection, mutation, archive update,
/// checkpointing, termination — is this one code path.
fn pareto_run<O: Objective + ?Sized>(
    algorithm: AlgorithmId,
    obj: &O,
    cfg: &AlgoConfig,
    budget: &mut Budget,
    seed: u64,
) -> RunRecord {
    let n = obj.ground_size();
    let k = cfg.k;
    let size_limit = 2 * k;
    let theta = if algorithm == AlgorithmId::Poss {
        Theta::ZERO
    } else {
        cfg.theta
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pop = Population::with_empty(n, size_limit);
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut checkpoints: Vec<Checkpoint> = Vec::new();
    let mark_step = cfg.checkpoint_kn.map(|c| c * (k as u64) * (n as u64));
    let mut next_mark = mark_step.unwrap_or(u64::MAX);
    let mut kn_crossed = 0u64;
    let mut iterations = 0u64;

    while budget.remaining() > 0 {
        iterations += 1;
        let parent = pop.select_uniform(&mut rng).set.clone();
        let child = mutate(&parent, &mut rng);
        let child_size = child.cardinality();
        let used_before = budget.used();

        let f1 = {
            let scored = match algorithm {
                AlgorithmId::Pore => {
                    robust_f1(obj, &child, k, &mut rng, cfg.singleton_policy, budget)
                }
                _ => {
                    if child_size >= size_limit {
                        Ok(f64::NEG_INFINITY)
                    } else {
                        evaluate_noisy(obj, &child, budget, &mut rng)
                    }
                }
            };
            match scored {
                Ok(v) => v,
                // Offspring needs more evaluations than remain: discard it
                // and end the run.
                Err(_) => break,
            }
        };

        let accepted = pop.insert_offspring(Individual::new(child, f1, iterations), theta);
        let mut tournament = false;
        if accepted && child_size < size_limit {
            match algorithm {
                AlgorithmId::Ponss => {
                    if pop.bucket_len(child_size) == cfg.bucket_cap + 1 {
                        if budget.remaining() < 2 * cfg.bucket_cap as u64 {
                            // Cannot afford the tournament: leave the
                            // bucket one over cap and end the run.
                            record_trace(&mut trace, child_size, budget.used() - used_before, false, accepted);
                            break;
                        }
                        tournament = true;
                        bucket_tournament(obj, &mut pop, child_size, cfg.bucket_cap, budget, &mut rng);
                    }
                }
                AlgorithmId::Pore | AlgorithmId::PoreF => {
                    pop.trim_bucket_min_f1(child_size, cfg.bucket_cap, &mut rng);
                }
                _ => {}
            }
        }
        record_trace(&mut trace, child_size, budget.used() - used_before, tournament, accepted);
        debug_assert!(
            child_size >= size_limit
                || match algorithm {
                    AlgorithmId::Poss => pop.bucket_len(child_size) <= 1,
                    _ => pop.bucket_len(child_size) <= cfg.bucket_cap,
                },
            "bucket {child_size} over cap after a complete iteration"
        );

        if let Some(step) = mark_step {
            while budget.used() >= next_mark {
                kn_crossed += cfg.checkpoint_kn.expect("mark_step implies interval");
                let best = pop.best_within(k).expect("empty solution always present");
                checkpoints.push(Checkpoint {
                    kn: kn_crossed,
                    set: best.set.clone(),
                    exact_value: f64::NAN, // filled in below
                });
                next_mark = next_mark.saturating_add(step);
            }
        }

        debug_assert!(pop.contains_empty());
    }

    let best = pop.best_within(k).expect("empty solution always present");
    let final_set = best.set.clone();
    let final_exact = obj.evaluate_exact(&final_set);
    for cp in &mut checkpoints {
        cp.exact_value = obj.evaluate_exact(&cp.set);
    }
    RunRecord {
        algorithm,
        seed,
        k,
        final_set,
        final_exact,
        evals_used: budget.used(),
        iterations,
        checkpoints,
        trace,
    }
}

fn record_trace(
    trace: &mut Option<Vec<IterationTrace>>,
    offspring_size: usize,
    cost: u64,
    tournament: bool,
    accepted: bool,
) {
    if let Some(t) = trace {
        t.push(IterationTrace {
            offspring_size,
            cost,
            tournament,
            accepted,
        });
    }
}

/// PONSS bucket resolution: remove the overfull bucket wholesale, then B
/// times draw two distinct members, re-evaluate both with fresh samples
/// (2 evaluations, charged), and reinsert the one with the higher sample
/// (ties random) keeping its cached fitness. The remaining member is
/// discarded.
fn bucket_tournament<O: Objective + ?Sized, R: Rng>(
    obj: &O,
    pop: &mut Population,
    size: usize,
    cap: usize,
    budget: &mut Budget,
    rng: &mut R,
) {
    let mut queue = pop.take_bucket(size);
    debug_assert_eq!(queue.len(), cap + 1);
    for _ in 0..cap {
        let picks = rand::seq::index::sample(rng, queue.len(), 2);
        let (a, b) = (picks.index(0), picks.index(1));
        let va = evaluate_noisy(obj, &queue[a].set, budget, rng).expect("charge checked upfront");
        let vb = evaluate_noisy(obj, &queue[b].set, budget, rng).expect("charge checked upfront");
        let winner = if va > vb || (va == vb && rng.random::<bool>()) {
            a
        } else {
            b
        };
        let kept = queue.swap_remove(winner);
        pop.push_raw(kept);
    }
    debug_assert_eq!(queue.len(), 1);
    debug_assert_eq!(pop.bucket_len(size), cap);
}
