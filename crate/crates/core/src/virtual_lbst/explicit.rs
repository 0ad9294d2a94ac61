//! The same tree, materialized as linked nodes.
//!
//! Used as an oracle for the implicit navigation. Codes are derived by plain
//! long division over a `Vec` of prefix sums, independent of the statistics
//! tree and of [`super::Navigator`].

use crate::comparator::{ComparisonLedger, Phase};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExplicitNode<K> {
    Leaf {
        position: usize,
        key: K,
    },
    Internal {
        left: Option<Box<ExplicitNode<K>>>,
        right: Option<Box<ExplicitNode<K>>>,
        /// Position and key of the rightmost leaf in the left subtree; only
        /// present when both children exist.
        split: Option<(usize, K)>,
    },
}

/// First `depth` bits of `num/den` (`num < den`) by repeated doubling.
fn expansion(mut num: u128, den: u128, depth: usize) -> Vec<bool> {
    let mut bits = Vec::with_capacity(depth);
    for _ in 0..depth {
        num *= 2;
        if num >= den {
            bits.push(true);
            num -= den;
        } else {
            bits.push(false);
        }
    }
    bits
}

/// Smallest `k` with `w * 2^k >= total`.
fn doubling_steps(total: u64, w: u64) -> usize {
    let mut k = 0;
    let mut reach = w as u128;
    while reach < total as u128 {
        reach *= 2;
        k += 1;
    }
    k
}

/// Leaf codes for the given weights, one `Vec<bool>` per leaf.
pub fn leaf_codes(weights: &[u64]) -> Vec<Vec<bool>> {
    let total: u64 = weights.iter().sum();
    let mut before = 0u64;
    weights
        .iter()
        .map(|&w| {
            let num = 2 * before as u128 + w as u128;
            before += w;
            expansion(num, 2 * total as u128, doubling_steps(total, w) + 1)
        })
        .collect()
}

/// Builds the tree for `keys` (strictly increasing) with positive `weights`.
///
/// Panics if the slices are empty or of different lengths.
pub fn build_explicit<K: Clone>(keys: &[K], weights: &[u64]) -> ExplicitNode<K> {
    assert!(!keys.is_empty() && keys.len() == weights.len());
    let codes = leaf_codes(weights);
    build(keys, &codes, 0, keys.len(), 0)
}

fn build<K: Clone>(
    keys: &[K],
    codes: &[Vec<bool>],
    lo: usize,
    hi: usize,
    depth: usize,
) -> ExplicitNode<K> {
    if hi - lo == 1 && codes[lo].len() == depth {
        return ExplicitNode::Leaf {
            position: lo + 1,
            key: keys[lo].clone(),
        };
    }
    let mid = (lo..hi).find(|&j| codes[j][depth]).unwrap_or(hi);
    let left = (mid > lo).then(|| Box::new(build(keys, codes, lo, mid, depth + 1)));
    let right = (hi > mid).then(|| Box::new(build(keys, codes, mid, hi, depth + 1)));
    let split = (mid > lo && hi > mid).then(|| (mid, keys[mid - 1].clone()));
    ExplicitNode::Internal { left, right, split }
}

impl<K> ExplicitNode<K> {
    pub fn is_leaf(&self) -> bool {
        matches!(self, ExplicitNode::Leaf { .. })
    }

    /// The node reached by following `path` from here.
    pub fn at(&self, path: &[bool]) -> Option<&ExplicitNode<K>> {
        let mut node = self;
        for &bit in path {
            node = match node {
                ExplicitNode::Leaf { .. } => return None,
                ExplicitNode::Internal { left, right, .. } => {
                    if bit {
                        right.as_deref()?
                    } else {
                        left.as_deref()?
                    }
                }
            };
        }
        Some(node)
    }

    /// Every node with its path, in pre-order.
    pub fn nodes(&self) -> Vec<(Vec<bool>, &ExplicitNode<K>)> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), self)];
        while let Some((path, node)) = stack.pop() {
            if let ExplicitNode::Internal { left, right, .. } = node {
                if let Some(r) = right {
                    let mut p = path.clone();
                    p.push(true);
                    stack.push((p, r));
                }
                if let Some(l) = left {
                    let mut p = path.clone();
                    p.push(false);
                    stack.push((p, l));
                }
            }
            out.push((path, node));
        }
        out
    }

    /// Depth of each leaf, indexed by position - 1.
    pub fn leaf_depths(&self) -> Vec<usize> {
        let mut leaves: Vec<(usize, usize)> = self
            .nodes()
            .into_iter()
            .filter_map(|(path, node)| match node {
                ExplicitNode::Leaf { position, .. } => Some((*position, path.len())),
                _ => None,
            })
            .collect();
        leaves.sort_unstable();
        leaves.into_iter().map(|(_, d)| d).collect()
    }

    /// Descends for `s` the same way the implicit search does, returning the
    /// leaf position reached and the number of branch comparisons spent.
    pub fn search<T>(&self, s: &T, ledger: &mut ComparisonLedger) -> (usize, u64)
    where
        T: Ord + ?Sized,
        K: std::borrow::Borrow<T>,
    {
        let mut node = self;
        let mut spent = 0;
        loop {
            match node {
                ExplicitNode::Leaf { position, .. } => return (*position, spent),
                ExplicitNode::Internal { left, right, split } => {
                    node = match (left, right, split) {
                        (Some(l), Some(r), Some((_, key))) => {
                            spent += 1;
                            if ledger.leq(s, key.borrow(), Phase::Search) {
                                l
                            } else {
                                r
                            }
                        }
                        (Some(l), None, _) => l,
                        (None, Some(r), _) => r,
                        _ => unreachable!("internal node without children"),
                    };
                }
            }
        }
    }
}
