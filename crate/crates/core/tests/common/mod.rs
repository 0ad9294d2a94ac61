#![allow(dead_code)]

use std::cell::Cell;
use std::cmp::Ordering;

use entsort::virtual_lbst::{
    build_explicit, classify, leaf_depth, sigma, ExplicitNode, LbstError, NodeView, PathCode,
};
use entsort::StatisticsTree;

thread_local! {
    static PROBES: Cell<u64> = const { Cell::new(0) };
}

/// An element that counts every comparison made on it, independently of the
/// ledger.
#[derive(Debug, Clone, Copy)]
pub struct Probe(pub u32);

pub fn probe_count() -> u64 {
    PROBES.with(Cell::get)
}

pub fn reset_probes() {
    PROBES.with(|c| c.set(0));
}

fn bump() {
    PROBES.with(|c| c.set(c.get() + 1));
}

impl PartialEq for Probe {
    fn eq(&self, other: &Self) -> bool {
        bump();
        self.0 == other.0
    }
}

impl Eq for Probe {}

impl std::hash::Hash for Probe {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl PartialOrd for Probe {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Probe {
    fn cmp(&self, other: &Self) -> Ordering {
        bump();
        self.0.cmp(&other.0)
    }
}

pub fn probes(values: &[u32]) -> Vec<Probe> {
    values.iter().copied().map(Probe).collect()
}

pub fn tree_of<K: Clone>(keys: &[K], weights: &[u64]) -> StatisticsTree<K> {
    let mut t = StatisticsTree::new();
    for (j, (k, &w)) in keys.iter().zip(weights).enumerate() {
        t.insert(k.clone(), j + 1, j + 1, None).unwrap();
        t.add_weight(j + 1, w - 1).unwrap();
    }
    t
}

pub fn path(bits: &[bool]) -> PathCode {
    bits.iter().fold(PathCode::root(), |p, &b| p.child(b))
}

fn expected_view(node: &ExplicitNode<usize>) -> NodeView {
    match node {
        ExplicitNode::Leaf { position, .. } => NodeView {
            is_leaf: true,
            leaf_position: Some(*position),
            has_left: false,
            has_right: false,
            split_position: None,
        },
        ExplicitNode::Internal { left, right, split } => NodeView {
            is_leaf: false,
            leaf_position: None,
            has_left: left.is_some(),
            has_right: right.is_some(),
            split_position: split.as_ref().map(|s| s.0),
        },
    }
}

/// Checks leaf depths against the closed form and every node of the
/// implicit tree against the materialized one, including absent children.
pub fn compare_with_explicit(weights: &[u64]) -> Result<(), String> {
    let keys: Vec<usize> = (1..=weights.len()).collect();
    let tree = tree_of(&keys, weights);
    let explicit = build_explicit(&keys, weights);
    let total: u64 = weights.iter().sum();
    for (j, &w) in weights.iter().enumerate() {
        let code = sigma(j + 1, &tree).map_err(|e| e.to_string())?;
        let want = leaf_depth(total, w);
        if code.len() != want {
            return Err(format!(
                "leaf {} depth {} != {want} for {weights:?}",
                j + 1,
                code.len()
            ));
        }
    }
    let depths = explicit.leaf_depths();
    for (j, &w) in weights.iter().enumerate() {
        if depths[j] != leaf_depth(total, w) as usize {
            return Err(format!(
                "explicit leaf {} depth {} for {weights:?}",
                j + 1,
                depths[j]
            ));
        }
    }
    for (bits, node) in explicit.nodes() {
        let p = path(&bits);
        let got = classify(&p, &tree).map_err(|e| format!("{p}: {e}"))?;
        let want = expected_view(node);
        if got != want {
            return Err(format!(
                "{p}: implicit {got:?} vs explicit {want:?} for {weights:?}"
            ));
        }
        let absent: Vec<bool> = match node {
            ExplicitNode::Leaf { .. } => vec![false, true],
            ExplicitNode::Internal { left, right, .. } => {
                [(false, left.is_none()), (true, right.is_none())]
                    .into_iter()
                    .filter(|&(_, missing)| missing)
                    .map(|(b, _)| b)
                    .collect()
            }
        };
        for b in absent {
            let c = p.child(b);
            match classify(&c, &tree) {
                Err(LbstError::NoSuchNode(_)) => {}
                other => {
                    return Err(format!(
                        "{c}: expected no node, got {other:?} for {weights:?}"
                    ))
                }
            }
        }
    }
    Ok(())
}
