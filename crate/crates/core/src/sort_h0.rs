//! Sorting with `(H₀(S) + O(1)) m` comparisons.
//!
//! One statistics tree holds the distinct elements seen so far with their
//! frequencies and occurrence lists. Each new element is located with a
//! counted descent of the implicit nearly optimal search tree for the prefix
//! read so far, then either recorded against its existing quadruple or
//! inserted next to the leaf the descent ended on.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comparator::{ComparisonLedger, LedgerError, Phase};
use crate::stats_tree::{ContextId, StatisticsTree, StatsTreeError};
use crate::virtual_lbst::{ceil_log2, ceil_log2_ratio, descend, LbstError, Relation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SortError {
    #[error(transparent)]
    Navigation(#[from] LbstError),
    #[error(transparent)]
    Tree(#[from] StatsTreeError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// Measured and budgeted comparisons for one context's tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextSummary {
    /// The context as first-appearance ranks; empty for order 0.
    pub ranks: Vec<u32>,
    /// Number of elements processed in this context.
    pub len: u64,
    /// Search and verification comparisons spent in this context.
    pub comparisons: u64,
    /// The per-step bound `Σ (⌈log …⌉ + 3)` accumulated over those elements.
    pub budget: u64,
    /// `H₀` of the elements processed in this context.
    pub h0: f64,
}

/// Element comparisons observed across operations that must not compare.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonAudit {
    pub stats_tree_ops: u64,
    pub b2_ops: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SortWarning {
    /// `n^(ℓ+1) log2 n > m`: the entropy bound is not expected to hold.
    ContextPremiseViolated { n: usize, order: usize, m: usize },
    /// `ℓ >= m`: every element is a dummy and the run is a plain merge sort.
    OrderAtLeastLength { order: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortOutcome {
    pub order: usize,
    /// 1-based sequence positions in sorted order.
    pub permutation: Vec<usize>,
    /// `inverse[i - 1]` is the sorted rank (1-based) of position `i`.
    pub inverse: Vec<usize>,
    pub ledger: ComparisonLedger,
    /// Sum of the per-context budgets; bounds search plus verify comparisons.
    pub lemma1_budget: u64,
    /// `H_order(S)` recomputed from the final tree weights.
    pub entropy: f64,
    pub distinct: usize,
    pub contexts: Vec<ContextSummary>,
    pub black_box_queries: usize,
    pub audit: ComparisonAudit,
    pub warnings: Vec<SortWarning>,
}

impl SortOutcome {
    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    /// Comparisons spent on descents and leaf checks.
    pub fn descent_comparisons(&self) -> u64 {
        self.ledger.phase_count(Phase::Search) + self.ledger.phase_count(Phase::Verify)
    }

    pub fn sorted<'a, T>(&self, seq: &'a [T]) -> Vec<&'a T> {
        self.permutation.iter().map(|&i| &seq[i - 1]).collect()
    }
}

/// Inverse of a 1-based permutation.
pub fn invert(permutation: &[usize]) -> Vec<usize> {
    let mut inverse = vec![0; permutation.len()];
    for (rank, &i) in permutation.iter().enumerate() {
        inverse[i - 1] = rank + 1;
    }
    inverse
}

pub(crate) fn weighted_h0_bits(weights: impl Iterator<Item = u64>) -> (u64, f64) {
    let weights: Vec<u64> = weights.collect();
    let total: u64 = weights.iter().sum();
    if total == 0 {
        return (0, 0.0);
    }
    let t = total as f64;
    let bits = weights
        .iter()
        .map(|&w| w as f64 * (t / w as f64).log2())
        .sum();
    (total, bits)
}

/// Where the current element goes in a context tree.
pub(crate) enum Placement {
    Hit(usize),
    Insert(usize),
}

pub(crate) struct Step {
    pub placement: Placement,
    pub comparisons: u64,
    pub budget: u64,
}

/// Locates `s` in `tree` and prices the step against its budget term.
pub(crate) fn locate<T: Ord + ?Sized>(
    s: &T,
    tree: &StatisticsTree<&T>,
    ledger: &mut ComparisonLedger,
) -> Result<Step, SortError> {
    let seen = tree.total_weight();
    if seen == 0 {
        return Ok(Step {
            placement: Placement::Insert(1),
            comparisons: 0,
            budget: 0,
        });
    }
    let found = descend(s, tree, ledger)?;
    let (placement, budget) = match found.relation {
        Relation::Equal => {
            let w = tree.triple(found.position)?.weight;
            (
                Placement::Hit(found.position),
                ceil_log2_ratio(seen, w) as u64 + 3,
            )
        }
        Relation::PredecessorFound => (
            Placement::Insert(found.position + 1),
            ceil_log2(seen) as u64 + 3,
        ),
        Relation::SuccessorFound => (
            Placement::Insert(found.position),
            ceil_log2(seen) as u64 + 3,
        ),
    };
    Ok(Step {
        placement,
        comparisons: found.comparisons_used(),
        budget,
    })
}

/// Applies a located step; returns the hit quadruple's cached handle.
pub(crate) fn record<'a, T: ?Sized>(
    tree: &mut StatisticsTree<&'a T>,
    s: &'a T,
    i: usize,
    placement: &Placement,
    next: impl FnOnce() -> Result<Option<ContextId>, SortError>,
    ledger: &ComparisonLedger,
    audit: &mut ComparisonAudit,
) -> Result<Option<ContextId>, SortError> {
    match *placement {
        Placement::Hit(j) => {
            let before = ledger.binary_count();
            tree.increment(j)?;
            tree.append(i, j)?;
            let handle = tree.triple(j)?.next_context;
            audit.stats_tree_ops += ledger.binary_count() - before;
            Ok(handle)
        }
        Placement::Insert(j) => {
            let handle = next()?;
            let before = ledger.binary_count();
            tree.insert(s, i, j, handle)?;
            audit.stats_tree_ops += ledger.binary_count() - before;
            Ok(handle)
        }
    }
}

/// Stably sorts `seq`, returning the sorting permutation and the comparison
/// record.
pub fn sort0<T: Ord>(seq: &[T], ledger: &mut ComparisonLedger) -> Result<SortOutcome, SortError> {
    let start = ledger.snapshot();
    let mut tree: StatisticsTree<&T> = StatisticsTree::new();
    let mut audit = ComparisonAudit::default();
    let mut comparisons = 0;
    let mut budget = 0;
    for (idx, s) in seq.iter().enumerate() {
        let step = locate(s, &tree, ledger)?;
        comparisons += step.comparisons;
        budget += step.budget;
        record(
            &mut tree,
            s,
            idx + 1,
            &step.placement,
            || Ok(None),
            ledger,
            &mut audit,
        )?;
    }

    let (len, bits) = weighted_h0_bits(tree.iter().map(|q| q.weight));
    let distinct = tree.len();
    let permutation: Vec<usize> = tree
        .into_quadruples()
        .into_iter()
        .flat_map(|q| q.indices)
        .collect();
    let inverse = invert(&permutation);
    let m = seq.len();
    Ok(SortOutcome {
        order: 0,
        permutation,
        inverse,
        ledger: ComparisonLedger::delta(&start, ledger)?,
        lemma1_budget: budget,
        entropy: if m == 0 { 0.0 } else { bits / m as f64 },
        distinct,
        contexts: vec![ContextSummary {
            ranks: Vec::new(),
            len,
            comparisons,
            budget,
            h0: if len == 0 { 0.0 } else { bits / len as f64 },
        }],
        black_box_queries: 0,
        audit,
        warnings: Vec::new(),
    })
}

/// The exact comparison budget for `sort0` on `seq`, by one counting scan:
/// `⌈log2(i-1)⌉ + 3` for each first occurrence after the first position and
/// `⌈log2((i-1)/#)⌉ + 3` for each repeat, `#` being the earlier count.
pub fn lemma1_budget<T: Hash + Eq>(seq: &[T]) -> u64 {
    let mut counts: HashMap<&T, u64> = HashMap::new();
    let mut budget = 0;
    for (idx, x) in seq.iter().enumerate() {
        let seen = idx as u64;
        let count = counts.entry(x).or_insert(0);
        if seen > 0 {
            budget += 3 + if *count == 0 {
                ceil_log2(seen)
            } else {
                ceil_log2_ratio(seen, *count)
            } as u64;
        }
        *count += 1;
    }
    budget
}
