//! The two dictionaries behind the context lookup.
//!
//! [`RankDictionary`] maps elements to the ordinal of their first appearance
//! and is the only place outside descents and the final merge where elements
//! are compared. [`ContextDictionary`] maps gamma-coded rank tuples to
//! context handles; its keys are bit strings, so it cannot compare elements.

use std::collections::BTreeMap;

use crate::comparator::{ComparisonLedger, Phase};
use crate::postree::{PosTree, Weighted, NIL};
use crate::stats_tree::ContextId;

use super::gamma::{BitString, Bits};

#[derive(Debug, Clone)]
struct RankEntry<'a, T: ?Sized> {
    key: &'a T,
    rank: u32,
}

impl<T: ?Sized> Weighted for RankEntry<'_, T> {
    fn weight(&self) -> u64 {
        1
    }
}

/// Balanced search tree of `⟨element, rank⟩` pairs, key-sorted.
#[derive(Debug, Clone)]
pub struct RankDictionary<'a, T: ?Sized> {
    tree: PosTree<RankEntry<'a, T>>,
}

impl<T: ?Sized> Default for RankDictionary<'_, T> {
    fn default() -> Self {
        RankDictionary {
            tree: PosTree::default(),
        }
    }
}

impl<'a, T: Ord + ?Sized> RankDictionary<'a, T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn height(&self) -> u32 {
        self.tree.height()
    }

    /// Returns `x`'s rank, inserting it with the next rank if unseen. The
    /// flag is true on insertion. Costs at most `height + 1` comparisons.
    pub fn rank_or_insert(&mut self, x: &'a T, ledger: &mut ComparisonLedger) -> (u32, bool) {
        // lower bound: first entry with x <= key
        let mut node = self.tree.root();
        let mut base = 0;
        let mut candidate: Option<(usize, usize)> = None;
        while node != NIL {
            let pos = base + self.tree.left_size(node);
            if ledger.leq(x, self.tree.item(node).key, Phase::B1Dictionary) {
                candidate = Some((pos, node));
                node = self.tree.left(node);
            } else {
                base = pos + 1;
                node = self.tree.right(node);
            }
        }
        let insert_at = match candidate {
            Some((pos, node)) => {
                let entry = self.tree.item(node);
                if ledger.leq(entry.key, x, Phase::B1Dictionary) {
                    return (entry.rank, false);
                }
                pos
            }
            None => self.tree.len(),
        };
        let rank = self.tree.len() as u32 + 1;
        self.tree.insert(insert_at, RankEntry { key: x, rank });
        (rank, true)
    }

    /// `(element, rank)` pairs in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&'a T, u32)> + '_ {
        self.tree.iter().map(|e| (e.key, e.rank))
    }
}

/// Gamma-coded rank tuples to context handles, ordered by raw bits.
#[derive(Debug, Clone, Default)]
pub struct ContextDictionary {
    map: BTreeMap<BitString, ContextId>,
}

impl ContextDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, key: &Bits) -> Option<ContextId> {
        self.map.get(key).copied()
    }

    /// Looks `key` up, calling `create` for a fresh handle when absent. The
    /// flag is true when a handle was created.
    pub fn get_or_create(
        &mut self,
        key: BitString,
        create: impl FnOnce() -> ContextId,
    ) -> (ContextId, bool) {
        let mut created = false;
        let id = *self.map.entry(key).or_insert_with(|| {
            created = true;
            create()
        });
        (id, created)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bits, ContextId)> + '_ {
        self.map.iter().map(|(k, &v)| (k.as_bitslice(), v))
    }
}
