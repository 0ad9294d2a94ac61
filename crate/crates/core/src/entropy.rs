//! Zeroth- and higher-order empirical entropy.
//!
//! This is measurement code: it hashes and compares elements freely and none
//! of its work is charged to a [`ComparisonLedger`](crate::ComparisonLedger).

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntropyError {
    #[error("entropy of an empty frequency multiset")]
    Empty,
    #[error("frequency counts must be positive")]
    ZeroCount,
}

/// `H₀` of a frequency multiset, in bits per element.
pub fn h0(counts: &[u64]) -> Result<f64, EntropyError> {
    if counts.is_empty() {
        return Err(EntropyError::Empty);
    }
    if counts.contains(&0) {
        return Err(EntropyError::ZeroCount);
    }
    Ok(h0_unchecked(counts))
}

fn h0_unchecked(counts: &[u64]) -> f64 {
    let m: u64 = counts.iter().sum();
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    counts
        .iter()
        .map(|&c| {
            let c = c as f64;
            (c / mf) * (mf / c).log2()
        })
        .sum()
}

/// Replaces each element by the ordinal of its first appearance (1-based).
pub fn first_appearance_ranks<T: Hash + Eq>(seq: &[T]) -> Vec<u32> {
    let mut ranks: HashMap<&T, u32> = HashMap::new();
    seq.iter()
        .map(|x| {
            let next = ranks.len() as u32 + 1;
            *ranks.entry(x).or_insert(next)
        })
        .collect()
}

/// One ℓ-tuple `α` together with the statistics of its successor sequence `S_α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextEntry {
    /// `α` written as first-appearance ranks.
    pub ranks: Vec<u32>,
    /// `|S_α|`; one less than the occurrence count of `α` when `α` is a suffix.
    pub len: u64,
    /// `H₀(S_α)`, zero when `S_α` is empty.
    pub h0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub m: usize,
    pub n: usize,
    /// `H₀ … H_L`.
    pub h: Vec<f64>,
    /// `context_table[ℓ]` lists every ℓ-tuple of `S`, sorted by rank tuple.
    pub context_table: Vec<Vec<ContextEntry>>,
}

impl EntropyProfile {
    pub fn max_order(&self) -> usize {
        self.h.len().saturating_sub(1)
    }
}

/// `H_ℓ(S)` in bits per element. Zero for empty input and for `ℓ >= m`.
pub fn h_ell<T: Hash + Eq>(seq: &[T], ell: usize) -> f64 {
    let ranks = first_appearance_ranks(seq);
    h_ell_of_ranks(&ranks, ell)
}

fn h_ell_of_ranks(ranks: &[u32], ell: usize) -> f64 {
    let m = ranks.len();
    if m == 0 || ell >= m {
        return 0.0;
    }
    let table = context_table(ranks, ell);
    table.iter().map(|e| e.len as f64 * e.h0).sum::<f64>() / m as f64
}

/// Successor counts of every ℓ-tuple occurring in `ranks`.
fn successor_counts(ranks: &[u32], ell: usize) -> HashMap<&[u32], HashMap<u32, u64>> {
    let mut table: HashMap<&[u32], HashMap<u32, u64>> = HashMap::new();
    if ell > ranks.len() {
        return table;
    }
    for start in 0..=ranks.len() - ell {
        let alpha = &ranks[start..start + ell];
        let succ = table.entry(alpha).or_default();
        if let Some(&next) = ranks.get(start + ell) {
            *succ.entry(next).or_insert(0) += 1;
        }
    }
    table
}

fn context_table(ranks: &[u32], ell: usize) -> Vec<ContextEntry> {
    let mut out: Vec<ContextEntry> = successor_counts(ranks, ell)
        .into_iter()
        .map(|(alpha, succ)| {
            let counts: Vec<u64> = succ.into_values().collect();
            ContextEntry {
                ranks: alpha.to_vec(),
                len: counts.iter().sum(),
                h0: h0_unchecked(&counts),
            }
        })
        .collect();
    out.sort_by(|a, b| a.ranks.cmp(&b.ranks));
    out
}

/// `H₀ … H_L` plus the per-order context tables.
pub fn profile<T: Hash + Eq>(seq: &[T], max_order: usize) -> EntropyProfile {
    let ranks = first_appearance_ranks(seq);
    let n = ranks.iter().copied().max().unwrap_or(0) as usize;
    let m = ranks.len();
    let mut h = Vec::with_capacity(max_order + 1);
    let mut tables = Vec::with_capacity(max_order + 1);
    for ell in 0..=max_order {
        let table = context_table(&ranks, ell);
        let value = if m == 0 || ell >= m {
            0.0
        } else {
            table.iter().map(|e| e.len as f64 * e.h0).sum::<f64>() / m as f64
        };
        h.push(value);
        tables.push(table);
    }
    EntropyProfile {
        m,
        n,
        h,
        context_table: tables,
    }
}
