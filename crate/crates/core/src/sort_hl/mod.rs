//! Sorting with `(H_ℓ(S) + O(1)) m` comparisons.
//!
//! One statistics tree per distinct ℓ-tuple seen so far. The tree searched
//! when processing `s_i` is the one for `(s_{i-ℓ}, …, s_{i-1})`; each of its
//! quadruples caches the handle of the tree for the context that follows,
//! `(s_{i-ℓ+1}, …, s_i)`. Only a miss (a new `(ℓ+1)`-tuple) goes to the
//! dictionaries: the element's first-appearance rank comes from the counted
//! [`RankDictionary`], and the successor context's gamma-coded rank tuple is
//! looked up in the [`ContextDictionary`].
//!
//! At the end, all quadruples plus one dummy per leading element are sorted by
//! key with the instrumented merge sort and equal keys' index lists are
//! merged, which yields the same stable permutation as [`sort0`].
//!
//! [`sort0`]: crate::sort_h0::sort0

pub mod dictionary;
pub mod gamma;

use crate::comparator::{ComparisonLedger, Phase};
use crate::mergesort::sorted_order;
use crate::sort_h0::{
    invert, locate, record, weighted_h0_bits, ComparisonAudit, ContextSummary, Placement,
    SortError, SortOutcome, SortWarning,
};
use crate::stats_tree::{ContextId, StatisticsTree};

pub use dictionary::{ContextDictionary, RankDictionary};
pub use gamma::{decode_tuple, encode_tuple, gamma_decode, gamma_encode, BitString, GammaError};

/// Per-context statistics trees, addressed by [`ContextId`].
#[derive(Debug, Default)]
pub struct ContextSet<'a, T: ?Sized> {
    trees: Vec<StatisticsTree<&'a T>>,
    spent: Vec<(u64, u64)>,
}

impl<'a, T: ?Sized> ContextSet<'a, T> {
    pub fn new() -> Self {
        ContextSet {
            trees: Vec::new(),
            spent: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn tree(&self, id: ContextId) -> &StatisticsTree<&'a T> {
        &self.trees[id.index()]
    }

    fn create(&mut self, tail_ranks: Vec<u32>) -> ContextId {
        let id = ContextId(self.trees.len() as u32);
        self.trees
            .push(StatisticsTree::with_context_ranks(tail_ranks));
        self.spent.push((0, 0));
        id
    }
}

/// The lookup consulted on every new `(ℓ+1)`-tuple.
#[derive(Debug)]
pub struct BlackBox<'a, T: ?Sized> {
    order: usize,
    ranks: RankDictionary<'a, T>,
    contexts: ContextDictionary,
    queries: usize,
    b2_comparisons: u64,
}

impl<'a, T: Ord + ?Sized> BlackBox<'a, T> {
    pub fn new(order: usize) -> Self {
        BlackBox {
            order,
            ranks: RankDictionary::new(),
            contexts: ContextDictionary::new(),
            queries: 0,
            b2_comparisons: 0,
        }
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn rank_dictionary(&self) -> &RankDictionary<'a, T> {
        &self.ranks
    }

    pub fn context_dictionary(&self) -> &ContextDictionary {
        &self.contexts
    }

    /// Element comparisons observed during context-dictionary operations.
    pub fn b2_comparisons(&self) -> u64 {
        self.b2_comparisons
    }

    fn resolve(
        &mut self,
        ranks: Vec<u32>,
        set: &mut ContextSet<'a, T>,
        ledger: &ComparisonLedger,
    ) -> ContextId {
        self.queries += 1;
        let key = encode_tuple(&ranks);
        let before = ledger.binary_count();
        let tail = ranks.get(1..).unwrap_or_default().to_vec();
        let (id, _) = self.contexts.get_or_create(key, || set.create(tail));
        self.b2_comparisons += ledger.binary_count() - before;
        id
    }

    /// Seeds the rank dictionary with the first ℓ elements and returns the
    /// tree for that initial context.
    pub fn bootstrap(
        &mut self,
        prefix: &'a [T],
        set: &mut ContextSet<'a, T>,
        ledger: &mut ComparisonLedger,
    ) -> ContextId
    where
        T: Sized,
    {
        assert_eq!(prefix.len(), self.order);
        let ranks: Vec<u32> = prefix
            .iter()
            .map(|x| self.ranks.rank_or_insert(x, ledger).0)
            .collect();
        self.resolve(ranks, set, ledger)
    }

    /// Handle of the context that follows `current` once `s` is appended.
    pub fn query(
        &mut self,
        current: ContextId,
        s: &'a T,
        set: &mut ContextSet<'a, T>,
        ledger: &mut ComparisonLedger,
    ) -> ContextId {
        if self.order == 0 {
            return self.resolve(Vec::new(), set, ledger);
        }
        let (rank, _) = self.ranks.rank_or_insert(s, ledger);
        let mut ranks = set
            .tree(current)
            .context_ranks()
            .unwrap_or_default()
            .to_vec();
        ranks.push(rank);
        self.resolve(ranks, set, ledger)
    }
}

/// Stably sorts `seq` using one statistics tree per order-`order` context.
pub fn sort_ell<T: Ord>(
    seq: &[T],
    order: usize,
    ledger: &mut ComparisonLedger,
) -> Result<SortOutcome, SortError> {
    let start = ledger.snapshot();
    let m = seq.len();
    let mut warnings = Vec::new();
    let mut set: ContextSet<'_, T> = ContextSet::new();
    let mut black_box = BlackBox::new(order);
    let mut audit = ComparisonAudit::default();

    if m > 0 && order >= m {
        warnings.push(SortWarning::OrderAtLeastLength { order, m });
    }
    if m > order {
        let mut current = black_box.bootstrap(&seq[..order], &mut set, ledger);
        for (idx, s) in seq.iter().enumerate().skip(order) {
            let step = locate(s, set.tree(current), ledger)?;
            let spent = &mut set.spent[current.index()];
            spent.0 += step.comparisons;
            spent.1 += step.budget;
            let handle = match step.placement {
                Placement::Hit(_) => None,
                Placement::Insert(_) => Some(black_box.query(current, s, &mut set, ledger)),
            };
            let tree = &mut set.trees[current.index()];
            let next = record(
                tree,
                s,
                idx + 1,
                &step.placement,
                || Ok(handle),
                ledger,
                &mut audit,
            )?;
            current = next.expect("every quadruple carries a successor handle");
        }
    }
    audit.b2_ops = black_box.b2_comparisons();
    let black_box_queries = black_box.queries();

    // Gather quadruples in context-dictionary order, then the dummies.
    let mut contexts = Vec::with_capacity(set.len());
    let mut items: Vec<(&T, Vec<usize>)> = Vec::new();
    let mut entropy_bits = 0.0;
    let mut lemma1_budget = 0;
    let mut trees: Vec<Option<StatisticsTree<&T>>> = set.trees.into_iter().map(Some).collect();
    for (key, id) in black_box.context_dictionary().iter() {
        let tree = trees[id.index()].take().expect("each context listed once");
        let (comparisons, budget) = set.spent[id.index()];
        let (len, bits) = weighted_h0_bits(tree.iter().map(|q| q.weight));
        entropy_bits += bits;
        lemma1_budget += budget;
        let ranks = decode_tuple(key).expect("dictionary keys are gamma codes");
        contexts.push(ContextSummary {
            ranks: ranks.into_iter().map(|r| r as u32).collect(),
            len,
            comparisons,
            budget,
            h0: if len == 0 { 0.0 } else { bits / len as f64 },
        });
        items.extend(
            tree.into_quadruples()
                .into_iter()
                .map(|q| (q.key, q.indices)),
        );
    }
    items.extend(
        seq.iter()
            .take(order)
            .enumerate()
            .map(|(k, x)| (x, vec![k + 1])),
    );

    let sorted = sorted_order(&items, |item| item.0, ledger, Phase::FinalMerge);
    let mut permutation = Vec::with_capacity(m);
    let mut group: Vec<usize> = Vec::new();
    let mut distinct = 0;
    for (rank, &idx) in sorted.iter().enumerate() {
        // sorted order already gives prev <= cur; equal iff cur <= prev
        let starts_group = rank == 0 || {
            let prev = items[sorted[rank - 1]].0;
            !ledger.leq(items[idx].0, prev, Phase::FinalMerge)
        };
        if starts_group {
            flush(&mut group, &mut permutation);
            distinct += 1;
        }
        group.extend_from_slice(&items[idx].1);
    }
    flush(&mut group, &mut permutation);

    if order > 0 && premise_violated(distinct, order, m) {
        warnings.push(SortWarning::ContextPremiseViolated {
            n: distinct,
            order,
            m,
        });
    }
    let inverse = invert(&permutation);
    Ok(SortOutcome {
        order,
        permutation,
        inverse,
        ledger: crate::ComparisonLedger::delta(&start, ledger)?,
        lemma1_budget,
        entropy: if m == 0 { 0.0 } else { entropy_bits / m as f64 },
        distinct,
        contexts,
        black_box_queries,
        audit,
        warnings,
    })
}

fn flush(group: &mut Vec<usize>, out: &mut Vec<usize>) {
    group.sort_unstable();
    out.append(group);
}

/// Whether `n^(ℓ+1) log2 n > m`.
pub fn premise_violated(n: usize, order: usize, m: usize) -> bool {
    if n <= 1 {
        return false;
    }
    let lhs = (n as f64).powi(order as i32 + 1) * (n as f64).log2();
    lhs > m as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sort_h0::sort0;

    #[test]
    fn order_zero_matches_sort0() {
        let s: Vec<char> = "TORONTO".chars().collect();
        let a = sort0(&s, &mut ComparisonLedger::new()).unwrap();
        let b = sort_ell(&s, 0, &mut ComparisonLedger::new()).unwrap();
        assert_eq!(a.permutation, b.permutation);
        assert_eq!(a.descent_comparisons(), b.descent_comparisons());
        assert_eq!(b.ledger.phase_count(Phase::B1Dictionary), 0);
        assert_eq!(b.contexts.len(), 1);
        // the initial query plus one per distinct element
        assert_eq!(b.black_box_queries, 1 + 4);
    }

    #[test]
    fn toronto_order_one() {
        let s: Vec<char> = "TORONTO".chars().collect();
        let mut ledger = ComparisonLedger::new();
        let out = sort_ell(&s, 1, &mut ledger).unwrap();
        assert_eq!(out.permutation, vec![5, 2, 4, 7, 3, 1, 6]);
        assert!((out.entropy - 2.0 / 7.0).abs() < 1e-12);
        assert_eq!(out.distinct, 4);
        // contexts T, O, R, N
        assert_eq!(out.contexts.len(), 4);
        for c in &out.contexts {
            assert!(c.comparisons <= c.budget);
        }
        assert_eq!(out.ledger, ledger);
        assert_eq!(out.audit, ComparisonAudit::default());
    }

    #[test]
    fn periodic_order_one_is_cheap() {
        let s: Vec<u8> = b"abc".iter().copied().cycle().take(300).collect();
        let mut ledger = ComparisonLedger::new();
        let out = sort_ell(&s, 1, &mut ledger).unwrap();
        assert_eq!(ledger.phase_count(Phase::Search), 0);
        // after the first pass every step checks one leaf twice
        assert_eq!(ledger.phase_count(Phase::Verify), 2 * (300 - 4));
        assert!(ledger.binary_count() <= 3 * 300);
        assert_eq!(out.entropy, 0.0);
    }

    #[test]
    fn order_at_least_length() {
        let s = [3, 1, 2];
        let out = sort_ell(&s, 5, &mut ComparisonLedger::new()).unwrap();
        assert_eq!(out.permutation, vec![2, 3, 1]);
        assert!(out.contexts.is_empty());
        assert!(out
            .warnings
            .contains(&SortWarning::OrderAtLeastLength { order: 5, m: 3 }));
        let out = sort_ell(&s, 3, &mut ComparisonLedger::new()).unwrap();
        assert_eq!(out.permutation, vec![2, 3, 1]);
    }

    #[test]
    fn empty_and_single() {
        let out = sort_ell::<u8>(&[], 2, &mut ComparisonLedger::new()).unwrap();
        assert!(out.is_empty());
        let mut ledger = ComparisonLedger::new();
        let out = sort_ell(&[9], 0, &mut ledger).unwrap();
        assert_eq!(out.permutation, vec![1]);
        assert_eq!(ledger.binary_count(), 0);
    }

    #[test]
    fn premise_check() {
        assert!(!premise_violated(1, 3, 1));
        assert!(!premise_violated(2, 1, 8));
        assert!(premise_violated(2, 1, 3));
        assert!(premise_violated(256, 1, 100_000));
    }
}
