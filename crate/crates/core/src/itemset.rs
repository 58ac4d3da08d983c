//! Subsets of a fixed ground set, stored as packed bit vectors.

use crate::error::Error;
use std::fmt;

const BITS: usize = 64;

/// A subset of the ground set `V = {0, 1, ..., n-1}`.
///
/// Membership is a packed bit per item; the cardinality is cached so that
/// size lookups during domination checks are O(1). Two sets over the same
/// universe compare equal iff their bit patterns are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ItemSet {
    universe: usize,
    count: usize,
    blocks: Vec<u64>,
}

impl ItemSet {
    /// The empty subset of a ground set with `universe` items.
    pub fn empty(universe: usize) -> Self {
        ItemSet {
            universe,
            count: 0,
            blocks: vec![0; universe.div_ceil(BITS)],
        }
    }

    /// The full ground set.
    pub fn full(universe: usize) -> Self {
        let mut s = ItemSet::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    /// Builds a set from explicit member indices.
    pub fn from_members(universe: usize, members: &[usize]) -> Result<Self, Error> {
        let mut s = ItemSet::empty(universe);
        for &i in members {
            if i >= universe {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    universe,
                });
            }
            s.insert(i);
        }
        Ok(s)
    }

    /// Number of items in the ground set.
    pub fn universe_size(&self) -> usize {
        self.universe
    }

    /// Number of selected items.
    pub fn cardinality(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, item: usize) -> bool {
        debug_assert!(item < self.universe);
        self.blocks[item / BITS] & (1u64 << (item % BITS)) != 0
    }

    /// Adds `item`; returns whether the set changed.
    pub fn insert(&mut self, item: usize) -> bool {
        assert!(item < self.universe, "item {item} outside universe {}", self.universe);
        let mask = 1u64 << (item % BITS);
        let block = &mut self.blocks[item / BITS];
        if *block & mask == 0 {
            *block |= mask;
            self.count += 1;
            true
        } else {
            false
        }
    }

    /// Removes `item`; returns whether the set changed.
    pub fn remove(&mut self, item: usize) -> bool {
        assert!(item < self.universe, "item {item} outside universe {}", self.universe);
        let mask = 1u64 << (item % BITS);
        let block = &mut self.blocks[item / BITS];
        if *block & mask != 0 {
            *block &= !mask;
            self.count -= 1;
            true
        } else {
            false
        }
    }

    /// Toggles membership of `item`.
    pub fn flip(&mut self, item: usize) {
        if !self.insert(item) {
            self.remove(item);
        }
    }

    /// Iterates member indices in ascending order.
    pub fn iter(&self) -> Members<'_> {
        Members {
            set: self,
            block_idx: 0,
            current: if self.blocks.is_empty() { 0 } else { self.blocks[0] },
        }
    }

    /// Member indices in ascending order.
    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// True iff every member of `self` is a member of `other`.
    pub fn is_subset_of(&self, other: &ItemSet) -> bool {
        assert_eq!(self.universe, other.universe);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ItemSet(n={}, {{", self.universe)?;
        for (i, m) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}})")
    }
}

/// Ascending iterator over members of an [`ItemSet`].
pub struct Members<'a> {
    set: &'a ItemSet,
    block_idx: usize,
    current: u64,
}

impl Iterator for Members<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.block_idx += 1;
            if self.block_idx >= self.set.blocks.len() {
                return None;
            }
            self.current = self.set.blocks[self.block_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.block_idx * BITS + bit)
    }
}

impl<'a> IntoIterator for &'a ItemSet {
    type Item = usize;
    type IntoIter = Members<'a>;

    fn into_iter(self) -> Members<'a> {
        self.iter()
    }
}
