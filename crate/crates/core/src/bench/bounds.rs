//! Budgets and envelopes computed from the input alone, without running any
//! sorter.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::entropy::{first_appearance_ranks, profile};
use crate::sort_h0::lemma1_budget;
use crate::virtual_lbst::ceil_log2;

/// Additive constant in the `(H + C) m` envelopes. Frozen after a sweep of
/// the standard corpus against the per-step budgets.
pub const ENVELOPE_CONSTANT: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextBudget {
    /// Context as first-appearance ranks.
    pub ranks: Vec<u32>,
    /// `|S_α|`.
    pub len: u64,
    /// Per-step budget of sorting `S_α` on its own.
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub m: usize,
    pub n: usize,
    pub order: usize,
    /// `H₀ … H_order`.
    pub entropy: Vec<f64>,
    /// Per-step budget of the whole sequence in one tree.
    pub order0_budget: u64,
    /// `Σ_α` budget over the order-`order` contexts.
    pub per_context: u64,
    pub contexts: Vec<ContextBudget>,
    /// Distinct `(order+1)`-tuples; each costs exactly one dictionary query.
    pub successor_tuples: usize,
    /// `(H₀ + C) m`.
    pub envelope_h0: f64,
    /// `(H_order + C) m`.
    pub envelope_order: f64,
    /// `n ⌈log2 m⌉ <= m`.
    pub h0_premise: bool,
    /// `n^(order+1) log2 n <= m`.
    pub order_premise: bool,
}

impl Bounds {
    pub fn h_order(&self) -> f64 {
        self.entropy[self.order.min(self.entropy.len() - 1)]
    }

    /// Dictionary queries a context sorter makes on this input.
    pub fn expected_queries(&self) -> usize {
        if self.m > self.order {
            1 + self.successor_tuples
        } else {
            0
        }
    }
}

/// Evaluates every bound for `seq` at context order `order`.
pub fn evaluate_bounds<T: Hash + Eq>(seq: &[T], order: usize) -> Bounds {
    let prof = profile(seq, order);
    let m = seq.len();
    let n = prof.n;
    let ranks = first_appearance_ranks(seq);

    let mut successors: HashMap<&[u32], Vec<u32>> = HashMap::new();
    if m > order {
        for i in order..m {
            successors
                .entry(&ranks[i - order..i])
                .or_default()
                .push(ranks[i]);
        }
    }
    let mut contexts: Vec<ContextBudget> = successors
        .iter()
        .map(|(alpha, succ)| ContextBudget {
            ranks: alpha.to_vec(),
            len: succ.len() as u64,
            budget: lemma1_budget(succ),
        })
        .collect();
    contexts.sort_by(|a, b| a.ranks.cmp(&b.ranks));
    let successor_tuples = successors
        .values()
        .map(|succ| {
            let mut distinct = succ.clone();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len()
        })
        .sum();

    let mut entropy = prof.h.clone();
    entropy.resize(order + 1, 0.0);
    let h_order = entropy[order];
    let mf = m as f64;
    let order_premise = n <= 1 || (n as f64).powi(order as i32 + 1) * (n as f64).log2() <= mf;
    Bounds {
        m,
        n,
        order,
        order0_budget: lemma1_budget(seq),
        per_context: contexts.iter().map(|c| c.budget).sum(),
        contexts,
        successor_tuples,
        envelope_h0: (entropy[0] + ENVELOPE_CONSTANT) * mf,
        envelope_order: (h_order + ENVELOPE_CONSTANT) * mf,
        h0_premise: m > 0 && n as u64 * ceil_log2(m as u64) as u64 <= m as u64,
        order_premise,
        entropy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toronto() {
        let s: Vec<char> = "TORONTO".chars().collect();
        let b = evaluate_bounds(&s, 0);
        assert_eq!(b.order0_budget, 28);
        assert_eq!(b.per_context, 28);
        assert_eq!(b.contexts.len(), 1);
        assert_eq!(b.expected_queries(), 5);
        let b = evaluate_bounds(&s, 1);
        assert_eq!(b.contexts.len(), 4);
        assert_eq!(b.contexts.iter().map(|c| c.len).sum::<u64>(), 6);
        assert!((b.h_order() - 2.0 / 7.0).abs() < 1e-12);
        // T→O, O→R, R→O, O→N, N→T, T→O: five distinct pairs
        assert_eq!(b.successor_tuples, 5);
    }

    #[test]
    fn constant_sequence() {
        let s = vec![7u8; 100];
        for order in 0..3 {
            let b = evaluate_bounds(&s, order);
            assert_eq!(b.h_order(), 0.0);
            assert_eq!(b.envelope_order, ENVELOPE_CONSTANT * 100.0);
        }
    }

    #[test]
    fn periodic_contexts_are_single_keyed() {
        let k = 100;
        let s: Vec<u8> = b"abc".iter().copied().cycle().take(3 * k).collect();
        let b = evaluate_bounds(&s, 1);
        assert_eq!(b.contexts.len(), 3);
        // a one-key context costs 3 per step after its first element
        let expect: u64 = b.contexts.iter().map(|c| 3 * (c.len - 1)).sum();
        assert_eq!(b.per_context, expect);
        assert_eq!(expect, 3 * (3 * k as u64 - 1 - 3));
    }

    #[test]
    fn order_beyond_length() {
        let b = evaluate_bounds(&[1, 2], 4);
        assert!(b.contexts.is_empty());
        assert_eq!(b.per_context, 0);
        assert_eq!(b.expected_queries(), 0);
        assert_eq!(b.entropy.len(), 5);
    }
}
