//! Stable top-down merge sort with every comparison charged to a ledger.

use crate::comparator::{ComparisonLedger, Phase};

/// Returns the 0-based order that stably sorts `items` by `key`.
pub(crate) fn sorted_order<I, T, F>(
    items: &[I],
    key: F,
    ledger: &mut ComparisonLedger,
    phase: Phase,
) -> Vec<usize>
where
    T: Ord + ?Sized,
    F: Fn(&I) -> &T,
{
    let mut order: Vec<usize> = (0..items.len()).collect();
    let mut scratch = order.clone();
    sort_range(&mut order, &mut scratch, items, &key, ledger, phase);
    order
}

fn sort_range<I, T, F>(
    order: &mut [usize],
    scratch: &mut [usize],
    items: &[I],
    key: &F,
    ledger: &mut ComparisonLedger,
    phase: Phase,
) where
    T: Ord + ?Sized,
    F: Fn(&I) -> &T,
{
    let len = order.len();
    if len < 2 {
        return;
    }
    let mid = len / 2;
    {
        let (lo, hi) = order.split_at_mut(mid);
        let (slo, shi) = scratch.split_at_mut(mid);
        sort_range(lo, slo, items, key, ledger, phase);
        sort_range(hi, shi, items, key, ledger, phase);
    }
    let (mut a, mut b, mut out) = (0, mid, 0);
    while a < mid && b < len {
        // ties go left for stability
        if ledger.leq(key(&items[order[a]]), key(&items[order[b]]), phase) {
            scratch[out] = order[a];
            a += 1;
        } else {
            scratch[out] = order[b];
            b += 1;
        }
        out += 1;
    }
    scratch[out..out + mid - a].copy_from_slice(&order[a..mid]);
    out += mid - a;
    scratch[out..].copy_from_slice(&order[b..len]);
    order.copy_from_slice(&scratch[..len]);
}
