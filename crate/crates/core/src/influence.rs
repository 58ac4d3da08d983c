//! Influence maximization under the Independent Cascade model.
//!
//! The spread objective `E[|IC(S)|]` is #P-hard to evaluate, so both
//! channels are simulation averages: the noisy channel averages a small
//! number of cascades drawn from the run's stream (one budget unit per
//! call, regardless of the internal simulation count), and the exact
//! reporting channel averages a large number of cascades driven by a fixed
//! dedicated seed, so the reported value of a subset is identical across
//! algorithms, runs and thread counts.

use crate::error::Error;
use crate::itemset::ItemSet;
use crate::objectives::Objective;
use crate::seeding::derive_seed;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::BufRead;

/// Fixed stream for the exact reporting channel; never mixed with run
/// streams.
const REPORTING_SEED: u64 = 0x1c5e_ed00_u64;

/// Directed graph in compressed adjacency form with per-edge activation
/// probabilities `p(u,v) = weight(u,v) / (total in-weight of v)`.
///
/// Node ids from the input are remapped to a dense `[0, n)` range in
/// ascending order of the original ids. Out-edges are sorted by target so
/// cascades consume random draws in a fixed `(u, v)` order.
#[derive(Clone, Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    probs: Vec<f64>,
    original_ids: Vec<u64>,
}

impl Graph {
    /// Parses a whitespace-separated edge list: `u v` or `u v w` per line,
    /// `#` lines ignored. With `undirected`, each input edge produces both
    /// directions. Duplicate edges are merged by summing weights before
    /// probabilities are computed; self-loops are dropped.
    pub fn load_edge_list<R: BufRead>(reader: R, undirected: bool) -> Result<Self, Error> {
        let mut raw: Vec<(u64, u64, f64)> = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(no + 1, e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut toks = trimmed.split_whitespace();
            let u: u64 = toks
                .next()
                .unwrap()
                .parse()
                .map_err(|_| Error::parse(no + 1, "source id is not a nonnegative integer"))?;
            let v: u64 = toks
                .next()
                .ok_or_else(|| Error::parse(no + 1, "missing target id"))?
                .parse()
                .map_err(|_| Error::parse(no + 1, "target id is not a nonnegative integer"))?;
            let w: f64 = match toks.next() {
                Some(t) => t
                    .parse()
                    .map_err(|_| Error::parse(no + 1, "weight is not a number"))?,
                None => 1.0,
            };
            if toks.next().is_some() {
                return Err(Error::parse(no + 1, "expected at most 3 fields"));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::parse(no + 1, "weight must be positive and finite"));
            }
            if u == v {
                continue; // self-loop
            }
            raw.push((u, v, w));
            if undirected {
                raw.push((v, u, w));
            }
        }
        if raw.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Graph::from_weighted_edges(raw)
    }

    /// Builds a graph from explicit directed edges with weights; ids may be
    /// sparse and are remapped.
    pub fn from_weighted_edges(edges: Vec<(u64, u64, f64)>) -> Result<Self, Error> {
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut ids: Vec<u64> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        let index_of = |id: u64| ids.binary_search(&id).expect("id present");
        let n = ids.len();

        // Merge duplicates by summing weights.
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(edges.len());
        {
            let mut sorted: Vec<(u32, u32, f64)> = edges
                .iter()
                .map(|&(u, v, w)| (index_of(u) as u32, index_of(v) as u32, w))
                .collect();
            sorted.sort_by_key(|&(u, v, _)| (u, v));
            for (u, v, w) in sorted {
                match merged.last_mut() {
                    Some(last) if last.0 == u && last.1 == v => last.2 += w,
                    _ => merged.push((u, v, w)),
                }
            }
        }

        let mut in_weight = vec![0.0f64; n];
        for &(_, v, w) in &merged {
            in_weight[v as usize] += w;
        }

        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in &merged {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut targets = vec![0u32; merged.len()];
        let mut probs = vec![0.0f64; merged.len()];
        let mut cursor = offsets.clone();
        for (u, v, w) in merged {
            let at = cursor[u as usize];
            targets[at] = v;
            probs[at] = w / in_weight[v as usize];
            cursor[u as usize] += 1;
        }
        Ok(Graph {
            offsets,
            targets,
            probs,
            original_ids: ids,
        })
    }

    pub fn node_count(&self) -> usize {
        self.original_ids.len()
    }

    /// Number of directed edges after merging duplicates.
    pub fn directed_edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Out-neighbors of `u` with activation probabilities, ascending by
    /// target.
    pub fn out_edges(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.targets[range.clone()]
            .iter()
            .zip(&self.probs[range])
            .map(|(&v, &p)| (v as usize, p))
    }

    /// The input id a dense node index was remapped from.
    pub fn original_id(&self, node: usize) -> u64 {
        self.original_ids[node]
    }
}

/// Runs one cascade from `seeds` and returns the number of activated nodes
/// (seeds included).
///
/// Frontier nodes are processed breadth-first in ascending node order, and
/// each activated node attempts each out-edge exactly once, in ascending
/// target order, so a given stream always reproduces the same cascade.
pub fn simulate_ic_once<R: Rng + ?Sized>(g: &Graph, seeds: &ItemSet, rng: &mut R) -> usize {
    debug_assert!(seeds.universe_size() == g.node_count());
    let mut active = vec![false; g.node_count()];
    let mut frontier: Vec<usize> = seeds.iter().collect();
    for &s in &frontier {
        active[s] = true;
    }
    let mut activated = frontier.len();
    #[cfg(debug_assertions)]
    let mut processed = vec![false; g.node_count()];
    while !frontier.is_empty() {
        frontier.sort_unstable();
        let mut next = Vec::new();
        for &u in &frontier {
            #[cfg(debug_assertions)]
            {
                assert!(!processed[u], "node {u} attempted its out-edges twice");
                processed[u] = true;
            }
            for (v, p) in g.out_edges(u) {
                if !active[v] && rng.random::<f64>() < p {
                    active[v] = true;
                    activated += 1;
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    activated
}

/// The exact expected spread by enumeration over all 2^|E| edge-outcome
/// worlds: each world keeps every edge independently with its activation
/// probability, and the spread in a world is the number of nodes reachable
/// from the seeds. This is a desk-scale verification oracle, deliberately
/// independent of [`simulate_ic_once`]; it refuses graphs with more than
/// 20 edges.
pub fn exact_spread_enumerated(g: &Graph, seeds: &ItemSet) -> Result<f64, Error> {
    let m = g.directed_edge_count();
    if m > 20 {
        return Err(Error::InstanceTooLarge(format!(
            "{m} edges exceeds the 2^20 world enumeration guard"
        )));
    }
    let edges: Vec<(usize, usize, f64)> = (0..g.node_count())
        .flat_map(|u| g.out_edges(u).map(move |(v, p)| (u, v, p)))
        .collect();
    let n = g.node_count();
    let mut expected = 0.0;
    for world in 0u32..(1 << m) {
        let mut probability = 1.0;
        for (i, &(_, _, p)) in edges.iter().enumerate() {
            probability *= if world >> i & 1 == 1 { p } else { 1.0 - p };
        }
        if probability == 0.0 {
            continue;
        }
        // Reachability from the seeds over the live edges.
        let mut reached = vec![false; n];
        let mut stack: Vec<usize> = seeds.iter().collect();
        for &s in &stack {
            reached[s] = true;
        }
        while let Some(u) = stack.pop() {
            for (i, &(a, b, _)) in edges.iter().enumerate() {
                if a == u && world >> i & 1 == 1 && !reached[b] {
                    reached[b] = true;
                    stack.push(b);
                }
            }
        }
        expected += probability * reached.iter().filter(|r| **r).count() as f64;
    }
    Ok(expected)
}

/// Mean and spread of per-simulation activation counts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub simulations: usize,
    /// Sample standard deviation of the per-simulation counts.
    pub std_dev: f64,
}

/// Averages `simulations` cascades drawn sequentially from `rng`.
pub fn estimate_spread<R: Rng + ?Sized>(
    g: &Graph,
    seeds: &ItemSet,
    simulations: usize,
    rng: &mut R,
) -> SpreadEstimate {
    assert!(simulations >= 1);
    let mut sum = 0u64;
    let mut sum_sq = 0u128;
    for _ in 0..simulations {
        let c = simulate_ic_once(g, seeds, rng) as u64;
        sum += c;
        sum_sq += u128::from(c) * u128::from(c);
    }
    summarize_counts(sum, sum_sq, simulations)
}

/// Averages `simulations` cascades, each driven by its own stream derived
/// from `base_seed` and the simulation index. The counts are summed in
/// integers, so the result is independent of execution order and thread
/// count.
pub fn estimate_spread_seeded(
    g: &Graph,
    seeds: &ItemSet,
    simulations: usize,
    base_seed: u64,
) -> SpreadEstimate {
    assert!(simulations >= 1);
    let (sum, sum_sq) = (0..simulations as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(base_seed, &[i]));
            let c = simulate_ic_once(g, seeds, &mut rng) as u64;
            (c, u128::from(c) * u128::from(c))
        })
        .reduce(|| (0u64, 0u128), |a, b| (a.0 + b.0, a.1 + b.1));
    summarize_counts(sum, sum_sq, simulations)
}

fn summarize_counts(sum: u64, sum_sq: u128, m: usize) -> SpreadEstimate {
    let mean = sum as f64 / m as f64;
    let std_dev = if m > 1 {
        let var = (sum_sq as f64 - m as f64 * mean * mean) / (m as f64 - 1.0);
        var.max(0.0).sqrt()
    } else {
        0.0
    };
    SpreadEstimate {
        mean,
        simulations: m,
        std_dev,
    }
}

/// The influence-spread objective: noisy = small simulation average from
/// the caller's stream, exact = large fixed-seed simulation average.
pub struct InfluenceObjective {
    graph: Graph,
    m_noisy: usize,
    m_exact: usize,
    reporting_seed: u64,
}

/// Builds the spread objective; `m_noisy ≥ 1` simulations per noisy call,
/// `m_exact ≥ m_noisy` for the reporting channel.
pub fn make_influence_objective(
    graph: Graph,
    m_noisy: usize,
    m_exact: usize,
) -> Result<InfluenceObjective, Error> {
    if m_noisy < 1 || m_exact < m_noisy {
        return Err(Error::InvalidConfig(format!(
            "need 1 <= m_noisy <= m_exact, got m_noisy={m_noisy}, m_exact={m_exact}"
        )));
    }
    Ok(InfluenceObjective {
        graph,
        m_noisy,
        m_exact,
        reporting_seed: REPORTING_SEED,
    })
}

impl InfluenceObjective {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn m_noisy(&self) -> usize {
        self.m_noisy
    }

    pub fn m_exact(&self) -> usize {
        self.m_exact
    }

    /// Overrides the reporting seed (tests only; the default makes exact
    /// values comparable across processes).
    pub fn with_reporting_seed(mut self, seed: u64) -> Self {
        self.reporting_seed = seed;
        self
    }
}

impl Objective for InfluenceObjective {
    fn ground_size(&self) -> usize {
        self.graph.node_count()
    }

    fn sample_noisy(&self, set: &ItemSet, rng: &mut dyn RngCore) -> f64 {
        estimate_spread(&self.graph, set, self.m_noisy, rng).mean
    }

    fn evaluate_exact(&self, set: &ItemSet) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        estimate_spread_seeded(&self.graph, set, self.m_exact, self.reporting_seed).mean
    }
}
