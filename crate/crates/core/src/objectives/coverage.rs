//! Max-coverage instances: the exact, monotone submodular oracle used by
//! property tests, brute-force verification and the synthetic noise
//! harness.

use crate::error::Error;
use crate::itemset::ItemSet;
use crate::objectives::Objective;
use rand::Rng;
use rand::RngCore;
use std::io::BufRead;

/// `n` items over a finite element universe; item `i` covers a fixed set of
/// elements. The value of a subset is the size of the union it covers.
#[derive(Clone, Debug)]
pub struct CoverageInstance {
    universe: usize,
    covers: Vec<Vec<u32>>,
    /// Per-item cover as packed element masks, for fast unions.
    masks: Vec<Vec<u64>>,
}

impl CoverageInstance {
    /// Builds an instance; element indices must lie in `[0, universe)`.
    pub fn new(universe: usize, covers: Vec<Vec<u32>>) -> Result<Self, Error> {
        if covers.is_empty() {
            return Err(Error::EmptyData("coverage instance has no items".into()));
        }
        let words = universe.div_ceil(64);
        let mut masks = Vec::with_capacity(covers.len());
        let mut clean = Vec::with_capacity(covers.len());
        for cover in covers {
            let mut mask = vec![0u64; words];
            let mut sorted = cover;
            sorted.sort_unstable();
            sorted.dedup();
            for &e in &sorted {
                let e = e as usize;
                if e >= universe {
                    return Err(Error::IndexOutOfRange {
                        index: e,
                        universe,
                    });
                }
                mask[e / 64] |= 1u64 << (e % 64);
            }
            masks.push(mask);
            clean.push(sorted);
        }
        Ok(CoverageInstance {
            universe,
            covers: clean,
            masks,
        })
    }

    /// Parses the plain-text format: first line `n |U|`, then exactly `n`
    /// data lines, one per item, listing covered element indices
    /// (whitespace-separated, 0-based). Lines starting with `#` are
    /// skipped; a blank data line is an item that covers nothing.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, Error> {
        let mut lines = reader.lines().enumerate();
        let (header_no, header) = loop {
            match lines.next() {
                Some((no, line)) => {
                    let line = line.map_err(|e| Error::parse(no + 1, e.to_string()))?;
                    if line.trim_start().starts_with('#') || line.trim().is_empty() {
                        continue;
                    }
                    break (no + 1, line);
                }
                None => return Err(Error::EmptyData("coverage file has no header".into())),
            }
        };
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .ok_or_else(|| Error::parse(header_no, "missing item count"))?
            .parse()
            .map_err(|_| Error::parse(header_no, "item count is not an integer"))?;
        let universe: usize = parts
            .next()
            .ok_or_else(|| Error::parse(header_no, "missing universe size"))?
            .parse()
            .map_err(|_| Error::parse(header_no, "universe size is not an integer"))?;
        if n == 0 {
            return Err(Error::EmptyData("coverage instance has no items".into()));
        }

        let mut covers = Vec::with_capacity(n);
        while covers.len() < n {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::EmptyData(format!("expected {n} item lines, got {}", covers.len())))?;
            let line = line.map_err(|e| Error::parse(no + 1, e.to_string()))?;
            if line.trim_start().starts_with('#') {
                continue;
            }
            let mut cover = Vec::new();
            for tok in line.split_whitespace() {
                let e: u32 = tok
                    .parse()
                    .map_err(|_| Error::parse(no + 1, format!("bad element index {tok:?}")))?;
                if e as usize >= universe {
                    return Err(Error::parse(
                        no + 1,
                        format!("element {e} outside universe of size {universe}"),
                    ));
                }
                cover.push(e);
            }
            covers.push(cover);
        }
        CoverageInstance::new(universe, covers)
    }

    /// A random instance for the synthetic harness: each of `items` items
    /// covers between 1 and `max_cover` distinct elements.
    pub fn random<R: Rng + ?Sized>(
        items: usize,
        universe: usize,
        max_cover: usize,
        rng: &mut R,
    ) -> Self {
        assert!(items >= 1 && universe >= 1);
        let max_cover = max_cover.clamp(1, universe);
        let covers = (0..items)
            .map(|_| {
                let size = rng.random_range(1..=max_cover);
                rand::seq::index::sample(rng, universe, size)
                    .into_iter()
                    .map(|e| e as u32)
                    .collect()
            })
            .collect();
        CoverageInstance::new(universe, covers).expect("generated instance is valid")
    }

    pub fn item_count(&self) -> usize {
        self.covers.len()
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    /// Elements covered by item `i`, ascending.
    pub fn cover(&self, item: usize) -> &[u32] {
        &self.covers[item]
    }
}

/// Exact coverage objective; the noisy channel equals the exact one (wrap
/// with a noise model for a noisy variant).
pub struct CoverageObjective {
    instance: CoverageInstance,
}

/// Builds the coverage objective over `instance`.
pub fn make_coverage(instance: CoverageInstance) -> CoverageObjective {
    CoverageObjective { instance }
}

impl CoverageObjective {
    pub fn instance(&self) -> &CoverageInstance {
        &self.instance
    }
}

impl Objective for CoverageObjective {
    fn ground_size(&self) -> usize {
        self.instance.item_count()
    }

    fn sample_noisy(&self, set: &ItemSet, _rng: &mut dyn RngCore) -> f64 {
        self.evaluate_exact(set)
    }

    fn evaluate_exact(&self, set: &ItemSet) -> f64 {
        let words = self.instance.universe.div_ceil(64);
        let mut union = vec![0u64; words];
        for item in set.iter() {
            for (w, m) in union.iter_mut().zip(&self.instance.masks[item]) {
                *w |= m;
            }
        }
        union.iter().map(|w| w.count_ones() as u64).sum::<u64>() as f64
    }
}
