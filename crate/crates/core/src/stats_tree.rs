//! The statistics structure: a positional list of quadruples
//! `⟨key, weight, indices, next_context⟩` kept in a balanced tree with
//! subtree weight sums.
//!
//! Every operation runs in `O(log t)` time and none of them can compare keys:
//! `StatisticsTree<K>` places no bound on `K`. Positions are 1-based; the
//! caller alone decides where a quadruple goes, so keeping the list sorted by
//! key is the caller's job.

use thiserror::Error;

use crate::postree::{PosTree, Weighted};

/// Handle to another statistics tree owned by the same sorter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextId(pub u32);

impl ContextId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadruple<K> {
    pub key: K,
    pub weight: u64,
    /// Sequence positions (1-based) in the order they were appended.
    pub indices: Vec<usize>,
    pub next_context: Option<ContextId>,
}

impl<K> Weighted for Quadruple<K> {
    #[inline]
    fn weight(&self) -> u64 {
        self.weight
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsTreeError {
    #[error("position {position} out of range 1..={len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("threshold {num}/{den} exceeds total weight {total}")]
    ThresholdExceedsTotal { num: u128, den: u128, total: u64 },
    #[error("search threshold denominator is zero")]
    ZeroDenominator,
}

/// Height bound constant: every tree satisfies
/// `height <= HEIGHT_CONSTANT * log2(t + 1)`.
///
/// AVL trees of height `h` hold at least `F(h+2) - 1` nodes, which gives the
/// familiar `1.4405 log2(t + 2)` bound; 1.45 covers the `t + 1` form for all
/// `t >= 1`.
pub const HEIGHT_CONSTANT: f64 = 1.45;

#[derive(Debug, Clone)]
pub struct StatisticsTree<K> {
    tree: PosTree<Quadruple<K>>,
    context_ranks: Option<Vec<u32>>,
}

impl<K> Default for StatisticsTree<K> {
    fn default() -> Self {
        StatisticsTree {
            tree: PosTree::default(),
            context_ranks: None,
        }
    }
}

impl<K> StatisticsTree<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_context_ranks(ranks: Vec<u32>) -> Self {
        StatisticsTree {
            tree: PosTree::default(),
            context_ranks: Some(ranks),
        }
    }

    /// Ranks of the tail of the owning context, when this tree belongs to one.
    pub fn context_ranks(&self) -> Option<&[u32]> {
        self.context_ranks.as_deref()
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_weight(&self) -> u64 {
        self.tree.total_weight()
    }

    pub fn height(&self) -> u32 {
        self.tree.height()
    }

    fn check(&self, position: usize) -> Result<usize, StatsTreeError> {
        if position == 0 || position > self.len() {
            Err(StatsTreeError::PositionOutOfRange {
                position,
                len: self.len(),
            })
        } else {
            Ok(position - 1)
        }
    }

    /// Smallest `j` with `den * (w_1 + … + w_j) >= num`, i.e. the first
    /// position whose prefix weight reaches the rational threshold `num/den`.
    pub fn search(&self, num: u128, den: u128) -> Result<usize, StatsTreeError> {
        if den == 0 {
            return Err(StatsTreeError::ZeroDenominator);
        }
        let exceeded = StatsTreeError::ThresholdExceedsTotal {
            num,
            den,
            total: self.total_weight(),
        };
        if self.is_empty() {
            return Err(exceeded);
        }
        self.tree
            .search_threshold(num, den)
            .map(|p| p + 1)
            .ok_or(exceeded)
    }

    /// `w_1 + … + w_j`. `sum(0)` is accepted and returns 0.
    pub fn sum(&self, j: usize) -> Result<u64, StatsTreeError> {
        if j > self.len() {
            return Err(StatsTreeError::PositionOutOfRange {
                position: j,
                len: self.len(),
            });
        }
        Ok(self.tree.prefix_sum(j))
    }

    pub fn triple(&self, j: usize) -> Result<&Quadruple<K>, StatsTreeError> {
        let pos = self.check(j)?;
        Ok(self.tree.get(pos))
    }

    pub fn increment(&mut self, j: usize) -> Result<(), StatsTreeError> {
        let pos = self.check(j)?;
        self.tree.update(pos, |q| q.weight += 1);
        Ok(())
    }

    /// Adds `delta` to `w_j` in one step; equivalent to `delta` increments.
    pub fn add_weight(&mut self, j: usize, delta: u64) -> Result<(), StatsTreeError> {
        let pos = self.check(j)?;
        self.tree.update(pos, |q| q.weight += delta);
        Ok(())
    }

    pub fn append(&mut self, i: usize, j: usize) -> Result<(), StatsTreeError> {
        let pos = self.check(j)?;
        self.tree.update(pos, |q| q.indices.push(i));
        Ok(())
    }

    /// Inserts `⟨key, 1, ⟨i⟩, next⟩` so it becomes the `j`-th quadruple;
    /// `j` may be one past the end.
    pub fn insert(
        &mut self,
        key: K,
        i: usize,
        j: usize,
        next: Option<ContextId>,
    ) -> Result<(), StatsTreeError> {
        if j == 0 || j > self.len() + 1 {
            return Err(StatsTreeError::PositionOutOfRange {
                position: j,
                len: self.len(),
            });
        }
        let quad = Quadruple {
            key,
            weight: 1,
            indices: vec![i],
            next_context: next,
        };
        self.tree.insert(j - 1, quad);
        Ok(())
    }

    /// Quadruples in positional order.
    pub fn iter(&self) -> impl Iterator<Item = &Quadruple<K>> + '_ {
        self.tree.iter()
    }

    pub fn into_quadruples(self) -> Vec<Quadruple<K>> {
        self.tree.into_items()
    }

    #[cfg(test)]
    pub(crate) fn check_invariants(&self) {
        self.tree.check_invariants();
    }
}
