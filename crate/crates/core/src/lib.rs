//! Entropy-adaptive comparison sorting.
//!
//! Sorts a sequence of `m` elements with `n` distinct values using
//! `(H_ℓ(S) + O(1)) m` binary comparisons, where `H_ℓ` is the ℓth-order
//! empirical entropy. Every comparison is counted by a
//! [`ComparisonLedger`], so the bounds can be checked on every run.
//!
//! - [`sort0`] keeps one statistics tree and searches an implicit nearly
//!   optimal leaf-oriented tree over it.
//! - [`sort_ell`] keeps one such tree per ℓ-tuple context.
//! - [`bench`] generates corpora, runs a merge-sort baseline and evaluates
//!   the bounds directly from the input.

pub mod bench;
pub mod comparator;
pub mod entropy;
mod mergesort;
mod postree;
pub mod sort_h0;
pub mod sort_hl;
pub mod stats_tree;
pub mod virtual_lbst;

pub use comparator::{ComparisonLedger, LedgerError, Phase};
pub use entropy::{h0, h_ell, profile, EntropyProfile};
pub use sort_h0::{lemma1_budget, sort0, SortError, SortOutcome};
pub use sort_hl::sort_ell;
pub use stats_tree::{ContextId, Quadruple, StatisticsTree};
