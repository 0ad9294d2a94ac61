//! Instrumented binary comparisons.
//!
//! Every comparison between two input elements made by the sorters goes
//! through [`ComparisonLedger::leq`]. The ledger counts binary `x <= y`
//! queries and attributes each one to a [`Phase`], so comparison bounds can
//! be checked against a ground-truth counter after every run.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Where a comparison was spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    /// Branching at two-child nodes during an LBST descent.
    Search,
    /// Deciding predecessor / equal / successor at the leaf a descent ends on.
    Verify,
    /// Lookups and inserts in the element-to-rank dictionary.
    B1Dictionary,
    /// Sorting the collected quadruples at the end of an order-ℓ run.
    FinalMerge,
    /// The merge-sort baseline.
    Baseline,
}

impl Phase {
    pub const ALL: [Phase; 5] = [
        Phase::Search,
        Phase::Verify,
        Phase::B1Dictionary,
        Phase::FinalMerge,
        Phase::Baseline,
    ];

    fn slot(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::Search => "search",
            Phase::Verify => "verify",
            Phase::B1Dictionary => "b1-dictionary",
            Phase::FinalMerge => "final-merge",
            Phase::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LedgerError {
    #[error("ledger went backwards in phase {phase}: {before} -> {after}")]
    NegativeDelta {
        phase: Phase,
        before: u64,
        after: u64,
    },
}

/// Per-phase counts of binary `<=` queries.
///
/// The total is always the sum of the phase counts; it is derived rather than
/// stored so the two can never disagree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComparisonLedger {
    counts: [u64; 5],
}

impl ComparisonLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Answers `x <= y` and charges one binary comparison to `phase`.
    #[inline]
    pub fn leq<T: Ord + ?Sized>(&mut self, x: &T, y: &T, phase: Phase) -> bool {
        self.counts[phase.slot()] += 1;
        x <= y
    }

    pub fn binary_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn phase_count(&self, phase: Phase) -> u64 {
        self.counts[phase.slot()]
    }

    pub fn phase_counts(&self) -> impl Iterator<Item = (Phase, u64)> + '_ {
        Phase::ALL.iter().map(move |&p| (p, self.counts[p.slot()]))
    }

    /// A copy of the current counts.
    pub fn snapshot(&self) -> ComparisonLedger {
        self.clone()
    }

    /// Per-phase difference `after - before`.
    pub fn delta(
        before: &ComparisonLedger,
        after: &ComparisonLedger,
    ) -> Result<ComparisonLedger, LedgerError> {
        let mut out = ComparisonLedger::new();
        for p in Phase::ALL {
            let (b, a) = (before.counts[p.slot()], after.counts[p.slot()]);
            if a < b {
                return Err(LedgerError::NegativeDelta {
                    phase: p,
                    before: b,
                    after: a,
                });
            }
            out.counts[p.slot()] = a - b;
        }
        Ok(out)
    }

    /// Adds another ledger's counts into this one.
    pub fn absorb(&mut self, other: &ComparisonLedger) {
        for (c, o) in self.counts.iter_mut().zip(other.counts.iter()) {
            *c += o;
        }
    }
}

/// Wire form: `{"binary_count": .., "phase_counts": {"search": .., ...}}`.
#[derive(Serialize, Deserialize)]
struct LedgerRepr {
    binary_count: u64,
    phase_counts: std::collections::BTreeMap<Phase, u64>,
}

impl Serialize for ComparisonLedger {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LedgerRepr {
            binary_count: self.binary_count(),
            phase_counts: self.phase_counts().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComparisonLedger {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = LedgerRepr::deserialize(deserializer)?;
        let mut ledger = ComparisonLedger::new();
        for (p, c) in repr.phase_counts {
            ledger.counts[p.slot()] = c;
        }
        if ledger.binary_count() != repr.binary_count {
            return Err(serde::de::Error::custom(
                "binary_count does not equal the sum of phase_counts",
            ));
        }
        Ok(ledger)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leq_counts_one_per_query() {
        let mut ledger = ComparisonLedger::new();
        assert_eq!(ledger.binary_count(), 0);
        assert!(ledger.leq(&3, &5, Phase::Search));
        assert_eq!(ledger.binary_count(), 1);
        assert!(!ledger.leq(&'T', &'O', Phase::Verify));
        assert!(ledger.leq(&'x', &'x', Phase::Verify));
        assert_eq!(ledger.phase_count(Phase::Search), 1);
        assert_eq!(ledger.phase_count(Phase::Verify), 2);
        assert_eq!(ledger.binary_count(), 3);
    }

    #[test]
    fn delta_is_per_phase_difference() {
        let mut ledger = ComparisonLedger::new();
        for _ in 0..10 {
            ledger.leq(&1, &2, Phase::Baseline);
        }
        let before = ledger.snapshot();
        for _ in 0..3 {
            ledger.leq(&1, &2, Phase::Baseline);
        }
        let d = ComparisonLedger::delta(&before, &ledger).unwrap();
        assert_eq!(d.binary_count(), 3);
        assert_eq!(d.phase_count(Phase::Baseline), 3);

        let same = ComparisonLedger::delta(&ledger, &ledger).unwrap();
        assert!(same.phase_counts().all(|(_, c)| c == 0));
    }

    #[test]
    fn delta_rejects_going_backwards() {
        let mut later = ComparisonLedger::new();
        later.leq(&1, &2, Phase::Search);
        let err = ComparisonLedger::delta(&later, &ComparisonLedger::new()).unwrap_err();
        assert!(matches!(
            err,
            LedgerError::NegativeDelta {
                phase: Phase::Search,
                ..
            }
        ));
    }

    #[test]
    fn json_round_trip_checks_total() {
        let mut ledger = ComparisonLedger::new();
        ledger.leq(&1, &2, Phase::B1Dictionary);
        ledger.leq(&1, &2, Phase::FinalMerge);
        let json = serde_json::to_string(&ledger).unwrap();
        assert!(json.contains("\"binary_count\":2"));
        assert!(json.contains("\"b1-dictionary\":1"));
        let back: ComparisonLedger = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ledger);

        let bad = r#"{"binary_count":5,"phase_counts":{"search":1}}"#;
        assert!(serde_json::from_str::<ComparisonLedger>(bad).is_err());
    }
}
