//! A nearly optimal leaf-oriented search tree that is never built.
//!
//! For a statistics tree holding weights `w_1 … w_t` with total `W`, leaf `j`
//! sits at the path spelled by the first `⌈log2(W/w_j)⌉ + 1` bits of
//!
//! ```text
//! f_j = (w_1 + … + w_{j-1} + w_j / 2) / W
//! ```
//!
//! Those codes are prefix-free and increase lexicographically with `j`, so
//! the trie they form is a leaf-oriented search tree over the keys in
//! positional order. [`classify`] answers "what is at this path?" with a
//! constant number of weight-rank queries against the statistics tree, and
//! [`descend`] runs a counted search over that trie.
//!
//! All arithmetic is exact: rationals are handled as `u128` numerator and
//! denominator pairs, never as floats.

pub mod explicit;

use std::borrow::Borrow;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::comparator::{ComparisonLedger, Phase};
use crate::stats_tree::{StatisticsTree, StatsTreeError};

pub use explicit::{build_explicit, ExplicitNode};

/// Largest allowed `|σ| + bitlen(W)`.
pub const MAX_CODE_BITS: u32 = 126;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LbstError {
    #[error(
        "code of depth {depth} over total weight {total} needs more than {MAX_CODE_BITS} bits"
    )]
    Overflow { depth: u32, total: u64 },
    #[error("no node at path {0}")]
    NoSuchNode(PathCode),
    #[error("navigation over an empty tree")]
    EmptyTree,
    #[error(transparent)]
    Tree(#[from] StatsTreeError),
}

/// A root-to-node path: bit `k` is 0 for a left edge, 1 for a right edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PathCode {
    value: u128,
    len: u32,
}

impl PathCode {
    pub fn root() -> Self {
        PathCode::default()
    }

    /// Builds a code from the low `len` bits of `value`, most significant first.
    pub fn from_bits(value: u128, len: u32) -> Self {
        assert!(len <= 127);
        let mask = if len == 0 {
            0
        } else {
            u128::MAX >> (128 - len)
        };
        PathCode {
            value: value & mask,
            len,
        }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The bits read as a binary integer.
    pub fn value(&self) -> u128 {
        self.value
    }

    /// Bit `k`, counting from the root edge at `k = 0`.
    pub fn bit(&self, k: u32) -> bool {
        assert!(k < self.len);
        (self.value >> (self.len - 1 - k)) & 1 == 1
    }

    pub fn child(&self, right: bool) -> PathCode {
        assert!(self.len < 127, "path too deep");
        PathCode {
            value: (self.value << 1) | right as u128,
            len: self.len + 1,
        }
    }

    pub fn is_prefix_of(&self, other: &PathCode) -> bool {
        self.len <= other.len && other.value >> (other.len - self.len) == self.value
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |k| self.bit(k))
    }
}

impl fmt::Display for PathCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("ε");
        }
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for PathCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut code = PathCode::root();
        for c in s.chars() {
            code = match c {
                '0' => code.child(false),
                '1' => code.child(true),
                _ => return Err(format!("invalid path character {c:?}")),
            };
        }
        Ok(code)
    }
}

/// What sits at a path of the implicit tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeView {
    pub is_leaf: bool,
    pub leaf_position: Option<usize>,
    pub has_left: bool,
    pub has_right: bool,
    /// Position of the rightmost leaf of the left subtree, when both
    /// children exist.
    pub split_position: Option<usize>,
}

impl NodeView {
    fn leaf(j: usize) -> Self {
        NodeView {
            is_leaf: true,
            leaf_position: Some(j),
            has_left: false,
            has_right: false,
            split_position: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// The leaf holds the searched element.
    Equal,
    /// The leaf holds the predecessor; a new key belongs at `position + 1`.
    PredecessorFound,
    /// The leaf holds the successor; a new key belongs at `position`.
    SuccessorFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchResult {
    pub position: usize,
    pub relation: Relation,
    pub search_comparisons: u64,
    pub verify_comparisons: u64,
}

impl SearchResult {
    pub fn comparisons_used(&self) -> u64 {
        self.search_comparisons + self.verify_comparisons
    }
}

/// `⌈log2 x⌉` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `⌈log2(num / den)⌉` for `num >= den >= 1`.
pub fn ceil_log2_ratio(num: u64, den: u64) -> u32 {
    assert!(den >= 1 && num >= den);
    ceil_log2(num.div_ceil(den))
}

/// Depth of a leaf of weight `w` in a tree of total weight `total`.
pub fn leaf_depth(total: u64, w: u64) -> u32 {
    ceil_log2_ratio(total, w) + 1
}

fn bit_len(x: u64) -> u32 {
    64 - x.leading_zeros()
}

/// Exact-arithmetic view of a statistics tree as the implicit LBST.
struct Navigator<'t, K> {
    tree: &'t StatisticsTree<K>,
    total: u64,
}

/// Result of inspecting one node: the view plus where its children's leaf
/// ranges begin, so a descent does not recompute them.
struct Probe {
    view: NodeView,
    left_first: Option<usize>,
    right_first: Option<usize>,
}

impl<'t, K> Navigator<'t, K> {
    fn new(tree: &'t StatisticsTree<K>) -> Result<Self, LbstError> {
        if tree.is_empty() {
            return Err(LbstError::EmptyTree);
        }
        Ok(Navigator {
            tree,
            total: tree.total_weight(),
        })
    }

    fn guard(&self, depth: u32) -> Result<(), LbstError> {
        if depth + bit_len(self.total) > MAX_CODE_BITS {
            Err(LbstError::Overflow {
                depth,
                total: self.total,
            })
        } else {
            Ok(())
        }
    }

    /// `f_j` as `(num, den)` with `den = 2W`.
    fn midpoint(&self, j: usize) -> Result<(u128, u128), LbstError> {
        let before = self.tree.sum(j - 1)? as u128;
        let w = self.tree.triple(j)?.weight as u128;
        Ok((2 * before + w, 2 * self.total as u128))
    }

    fn depth(&self, j: usize) -> Result<u32, LbstError> {
        Ok(leaf_depth(self.total, self.tree.triple(j)?.weight))
    }

    fn sigma(&self, j: usize) -> Result<PathCode, LbstError> {
        let depth = self.depth(j)?;
        self.guard(depth)?;
        let (num, den) = self.midpoint(j)?;
        Ok(PathCode::from_bits((num << depth) / den, depth))
    }

    /// Smallest `j` whose `f_j` begins with `rho`, if any.
    fn first_match(&self, rho: &PathCode) -> Result<Option<usize>, LbstError> {
        let k = rho.len();
        self.guard(k)?;
        let r = rho.value();
        let total = self.total as u128;
        // First position whose prefix weight reaches (.rho) * W; the leaf we
        // want is that one or the next.
        let start = self.tree.search(r * total, 1u128 << k)?;
        for j in [start, start + 1] {
            if j > self.tree.len() {
                break;
            }
            let (num, den) = self.midpoint(j)?;
            let scaled = num << k;
            if scaled >= r * den {
                return Ok((scaled < (r + 1) * den).then_some(j));
            }
        }
        Ok(None)
    }

    fn probe(&self, sigma: &PathCode, first: usize) -> Result<Probe, LbstError> {
        let depth = self.depth(first)?;
        if depth == sigma.len() {
            return Ok(Probe {
                view: NodeView::leaf(first),
                left_first: None,
                right_first: None,
            });
        }
        if depth < sigma.len() {
            return Err(LbstError::NoSuchNode(*sigma));
        }
        let left_first = self.first_match(&sigma.child(false))?;
        let right_first = self.first_match(&sigma.child(true))?;
        let split_position = match (left_first, right_first) {
            (Some(_), Some(r)) => Some(r - 1),
            _ => None,
        };
        Ok(Probe {
            view: NodeView {
                is_leaf: false,
                leaf_position: None,
                has_left: left_first.is_some(),
                has_right: right_first.is_some(),
                split_position,
            },
            left_first,
            right_first,
        })
    }
}

/// The path code of leaf `j`.
pub fn sigma<K>(j: usize, tree: &StatisticsTree<K>) -> Result<PathCode, LbstError> {
    let nav = Navigator::new(tree)?;
    if j == 0 || j > tree.len() {
        return Err(StatsTreeError::PositionOutOfRange {
            position: j,
            len: tree.len(),
        }
        .into());
    }
    nav.sigma(j)
}

/// Classifies the node at `path`.
pub fn classify<K>(path: &PathCode, tree: &StatisticsTree<K>) -> Result<NodeView, LbstError> {
    let nav = Navigator::new(tree)?;
    let first = nav.first_match(path)?.ok_or(LbstError::NoSuchNode(*path))?;
    Ok(nav.probe(path, first)?.view)
}

/// Searches for `s`, charging branch comparisons to [`Phase::Search`] and the
/// leaf check to [`Phase::Verify`].
///
/// The leaf check asks `a <= s` first; a false answer already pins `a` as the
/// successor, otherwise `s <= a` separates equal from predecessor.
pub fn descend<T, K>(
    s: &T,
    tree: &StatisticsTree<K>,
    ledger: &mut ComparisonLedger,
) -> Result<SearchResult, LbstError>
where
    T: Ord + ?Sized,
    K: Borrow<T>,
{
    let nav = Navigator::new(tree)?;
    let mut path = PathCode::root();
    let mut first = nav.first_match(&path)?.ok_or(LbstError::NoSuchNode(path))?;
    let mut search_comparisons = 0;
    loop {
        let probe = nav.probe(&path, first)?;
        let view = probe.view;
        if view.is_leaf {
            let key = tree.triple(first)?.key.borrow();
            let relation = if !ledger.leq(key, s, Phase::Verify) {
                Relation::SuccessorFound
            } else if ledger.leq(s, key, Phase::Verify) {
                Relation::Equal
            } else {
                Relation::PredecessorFound
            };
            let verify_comparisons = if relation == Relation::SuccessorFound {
                1
            } else {
                2
            };
            return Ok(SearchResult {
                position: first,
                relation,
                search_comparisons,
                verify_comparisons,
            });
        }
        let go_right = match view.split_position {
            Some(split) => {
                search_comparisons += 1;
                let key = tree.triple(split)?.key.borrow();
                !ledger.leq(s, key, Phase::Search)
            }
            None => view.has_right,
        };
        path = path.child(go_right);
        first = if go_right {
            probe.right_first
        } else {
            probe.left_first
        }
        .ok_or(LbstError::NoSuchNode(path))?;
    }
}
