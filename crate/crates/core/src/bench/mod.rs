//! Corpus generation, a merge-sort baseline, and the harness that runs the
//! sorters and checks every bound.

mod bounds;
mod source;

use std::hash::Hash;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comparator::{ComparisonLedger, Phase};
use crate::mergesort::sorted_order;
use crate::sort_h0::{sort0, SortError, SortOutcome};
use crate::sort_hl::sort_ell;

pub use bounds::{evaluate_bounds, Bounds, ContextBudget, ENVELOPE_CONSTANT};
pub use source::{generate, SourceKind, SourceSpec};

/// Version of the [`Report`] layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid source spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Sort(#[from] SortError),
}

/// Stable top-down merge sort; returns a 1-based permutation. Comparisons are
/// charged to [`Phase::Baseline`].
pub fn baseline_mergesort<T: Ord>(seq: &[T], ledger: &mut ComparisonLedger) -> Vec<usize> {
    sorted_order(seq, |x| x, ledger, Phase::Baseline)
        .into_iter()
        .map(|k| k + 1)
        .collect()
}

/// Uncounted stable sort from the standard library, used as the oracle.
pub fn reference_permutation<T: Ord>(seq: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..=seq.len()).collect();
    idx.sort_by(|&a, &b| seq[a - 1].cmp(&seq[b - 1]));
    idx
}

/// `(sorted_ok, stable)` for a 1-based permutation. `sorted_ok` requires a
/// bijection onto `1..=m` with non-decreasing values; `stable` additionally
/// requires equal values to keep their input order.
pub fn check_permutation<T: Ord>(seq: &[T], perm: &[usize]) -> (bool, bool) {
    let m = seq.len();
    if perm.len() != m {
        return (false, false);
    }
    let mut seen = vec![false; m];
    for &i in perm {
        if i == 0 || i > m || std::mem::replace(&mut seen[i - 1], true) {
            return (false, false);
        }
    }
    let mut sorted = true;
    let mut stable = true;
    for w in perm.windows(2) {
        match seq[w[0] - 1].cmp(&seq[w[1] - 1]) {
            std::cmp::Ordering::Greater => sorted = false,
            std::cmp::Ordering::Equal if w[0] > w[1] => stable = false,
            _ => {}
        }
    }
    (sorted, sorted && stable)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sorter {
    Sort0,
    SortEll,
    Baseline,
}

impl Sorter {
    pub fn label(self) -> &'static str {
        match self {
            Sorter::Sort0 => "sort0",
            Sorter::SortEll => "sort_ell",
            Sorter::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonCounts {
    pub search: u64,
    pub verify: u64,
    pub b1: u64,
    pub merge: u64,
    /// Every comparison the run made.
    pub total: u64,
    /// Baseline merge-sort count on the same input, when it was run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<u64>,
}

impl ComparisonCounts {
    fn from_ledger(ledger: &ComparisonLedger) -> Self {
        ComparisonCounts {
            search: ledger.phase_count(Phase::Search),
            verify: ledger.phase_count(Phase::Verify),
            b1: ledger.phase_count(Phase::B1Dictionary),
            merge: ledger.phase_count(Phase::FinalMerge),
            total: ledger.binary_count(),
            baseline: None,
        }
    }
}

/// One sorter run on one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub sorter: Sorter,
    pub m: usize,
    pub n: usize,
    pub order: usize,
    pub entropy: Vec<f64>,
    pub comparisons: ComparisonCounts,
    pub budget_lemma1: u64,
    pub budget_per_context: u64,
    pub wall_ms: f64,
    pub stable: bool,
    pub sorted_ok: bool,
    #[serde(default)]
    pub violations: Vec<String>,
}

impl Report {
    /// Whether the phase counts sum to the total.
    pub fn reconciles(&self) -> bool {
        let c = &self.comparisons;
        let own = match self.sorter {
            Sorter::Baseline => c.baseline.unwrap_or(0),
            _ => c.search + c.verify + c.b1 + c.merge,
        };
        own == c.total
    }

    pub const CSV_HEADER: [&'static str; 19] = [
        "schema_version",
        "source",
        "sorter",
        "m",
        "n",
        "order",
        "entropy",
        "search",
        "verify",
        "b1",
        "merge",
        "total",
        "baseline",
        "budget_lemma1",
        "budget_per_context",
        "wall_ms",
        "stable",
        "sorted_ok",
        "violations",
    ];

    /// Flat row matching [`Report::CSV_HEADER`]; lists are `;`-joined.
    pub fn csv_record(&self) -> Vec<String> {
        let c = &self.comparisons;
        vec![
            self.schema_version.to_string(),
            self.source.clone().unwrap_or_default(),
            self.sorter.label().to_owned(),
            self.m.to_string(),
            self.n.to_string(),
            self.order.to_string(),
            self.entropy
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            c.search.to_string(),
            c.verify.to_string(),
            c.b1.to_string(),
            c.merge.to_string(),
            c.total.to_string(),
            c.baseline.map(|b| b.to_string()).unwrap_or_default(),
            self.budget_lemma1.to_string(),
            self.budget_per_context.to_string(),
            format!("{:.3}", self.wall_ms),
            self.stable.to_string(),
            self.sorted_ok.to_string(),
            self.violations.join(";"),
        ]
    }
}

/// Which runs to make on each input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunPlan {
    pub sort0: bool,
    /// Orders for `sort_ell`.
    pub orders: Vec<usize>,
    pub baseline: bool,
}

impl Default for RunPlan {
    fn default() -> Self {
        RunPlan {
            sort0: true,
            orders: vec![0, 1, 2, 3],
            baseline: true,
        }
    }
}

/// All runs on one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SourceSpec>,
    pub m: usize,
    pub n: usize,
    /// `H₀ … H_L` for the largest planned order `L`.
    pub entropy: Vec<f64>,
    pub reports: Vec<Report>,
}

impl RunRecord {
    pub fn violations(&self) -> impl Iterator<Item = (&Report, &str)> + '_ {
        self.reports
            .iter()
            .flat_map(|r| r.violations.iter().map(move |v| (r, v.as_str())))
    }

    pub fn is_clean(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// A finished sorter run together with its report.
#[derive(Debug, Clone)]
pub struct SorterRun {
    pub outcome: Option<SortOutcome>,
    pub permutation: Vec<usize>,
    pub report: Report,
}

/// Runs one sorter on `seq` and checks it against `bounds` and the oracle.
/// [`Sorter::SortEll`] runs at `bounds.order`.
pub fn run_sorter<T: Ord>(
    seq: &[T],
    sorter: Sorter,
    bounds: &Bounds,
    oracle: &[usize],
    source: Option<&str>,
) -> Result<SorterRun, BenchError> {
    let mut ledger = ComparisonLedger::new();
    let start = Instant::now();
    let (permutation, outcome) = match sorter {
        Sorter::Sort0 => {
            let out = sort0(seq, &mut ledger)?;
            (out.permutation.clone(), Some(out))
        }
        Sorter::SortEll => {
            let out = sort_ell(seq, bounds.order, &mut ledger)?;
            (out.permutation.clone(), Some(out))
        }
        Sorter::Baseline => (baseline_mergesort(seq, &mut ledger), None),
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let (sorted_ok, stable) = check_permutation(seq, &permutation);
    let mut comparisons = ComparisonCounts::from_ledger(&ledger);
    if sorter == Sorter::Baseline {
        comparisons.baseline = Some(ledger.phase_count(Phase::Baseline));
    }
    let order = if sorter == Sorter::SortEll {
        bounds.order
    } else {
        0
    };
    let budget_per_context = if sorter == Sorter::SortEll {
        bounds.per_context
    } else {
        bounds.order0_budget
    };
    let mut violations = Vec::new();
    if !sorted_ok {
        violations.push("output not sorted".to_owned());
    } else if !stable {
        violations.push("output not stable".to_owned());
    }
    if permutation != oracle {
        violations.push("permutation differs from reference stable sort".to_owned());
    }
    if let Some(out) = &outcome {
        check_outcome(out, &ledger, sorter, bounds, &mut violations);
    }
    let entropy = bounds.entropy[..=order].to_vec();
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        source: source.map(str::to_owned),
        sorter,
        m: bounds.m,
        n: bounds.n,
        order,
        entropy,
        comparisons,
        budget_lemma1: bounds.order0_budget,
        budget_per_context,
        wall_ms,
        stable,
        sorted_ok,
        violations,
    };
    if !report.reconciles() {
        report
            .violations
            .push("phase counts do not sum to the total".to_owned());
    }
    Ok(SorterRun {
        outcome,
        permutation,
        report,
    })
}

fn check_outcome(
    out: &SortOutcome,
    ledger: &ComparisonLedger,
    sorter: Sorter,
    bounds: &Bounds,
    violations: &mut Vec<String>,
) {
    let mut fail = |msg: String| violations.push(msg);
    let total = ledger.binary_count();
    if out.ledger != *ledger {
        fail("reported counts differ from the ledger".to_owned());
    }
    if out.audit.stats_tree_ops != 0 || out.audit.b2_ops != 0 {
        fail(format!(
            "element comparisons in non-comparing operations: stats tree {}, B2 {}",
            out.audit.stats_tree_ops, out.audit.b2_ops
        ));
    }
    let (budget, entropy, envelope, premise) = match sorter {
        Sorter::Sort0 => (
            bounds.order0_budget,
            bounds.entropy[0],
            bounds.envelope_h0,
            bounds.h0_premise,
        ),
        _ => (
            bounds.per_context,
            bounds.h_order(),
            bounds.envelope_order,
            bounds.order_premise,
        ),
    };
    if out.lemma1_budget != budget {
        fail(format!(
            "sorter budget {} differs from direct budget {budget}",
            out.lemma1_budget
        ));
    }
    if out.descent_comparisons() > budget {
        fail(format!(
            "descent comparisons {} exceed budget {budget}",
            out.descent_comparisons()
        ));
    }
    if sorter == Sorter::Sort0 && total > budget {
        fail(format!("total comparisons {total} exceed budget {budget}"));
    }
    if premise && total as f64 > envelope {
        fail(format!(
            "total comparisons {total} exceed envelope {envelope:.1}"
        ));
    }
    if (out.entropy - entropy).abs() > 1e-9 * entropy.max(1.0) {
        fail(format!(
            "sorter entropy {} differs from direct entropy {entropy}",
            out.entropy
        ));
    }
    if sorter == Sorter::SortEll && out.black_box_queries != bounds.expected_queries() {
        fail(format!(
            "{} dictionary queries, expected {}",
            out.black_box_queries,
            bounds.expected_queries()
        ));
    }
}

/// Runs the plan on `seq`. Sorter reports carry the baseline count when the
/// plan includes the baseline.
pub fn run_sequence<T: Ord + Hash + Eq>(
    seq: &[T],
    plan: &RunPlan,
    spec: Option<SourceSpec>,
) -> Result<RunRecord, BenchError> {
    let label = spec.as_ref().map(SourceSpec::label);
    let source = label.as_deref();
    let oracle = reference_permutation(seq);
    let max_order = plan.orders.iter().copied().max().unwrap_or(0);
    let mut by_order: Vec<Option<Bounds>> = vec![None; max_order + 1];
    let mut bounds_at = |order: usize| -> Bounds {
        by_order[order]
            .get_or_insert_with(|| evaluate_bounds(seq, order))
            .clone()
    };
    let zero = bounds_at(0);

    let mut runs = Vec::new();
    if plan.baseline {
        runs.push(run_sorter(seq, Sorter::Baseline, &zero, &oracle, source)?);
    }
    if plan.sort0 {
        runs.push(run_sorter(seq, Sorter::Sort0, &zero, &oracle, source)?);
    }
    for &order in &plan.orders {
        runs.push(run_sorter(
            seq,
            Sorter::SortEll,
            &bounds_at(order),
            &oracle,
            source,
        )?);
    }
    let baseline = runs
        .first()
        .filter(|r| r.report.sorter == Sorter::Baseline)
        .map(|r| r.report.comparisons.total);
    let mut reports: Vec<Report> = runs.into_iter().map(|r| r.report).collect();
    for r in &mut reports {
        r.comparisons.baseline = baseline;
    }
    Ok(RunRecord {
        spec,
        m: zero.m,
        n: zero.n,
        entropy: bounds_at(max_order).entropy,
        reports,
    })
}

/// Generates the described source's sequence and runs the plan on it.
pub fn run_spec(spec: &SourceSpec, plan: &RunPlan) -> Result<RunRecord, BenchError> {
    let seq = generate(spec)?;
    run_sequence(&seq, plan, Some(spec.clone()))
}

/// The default benchmark suite: uniform, Zipf, Markov and periodic sources
/// over `n ∈ {2, 16, 256}` and `m ∈ {10², 10³, 10⁴, 10⁵}`.
pub fn standard_corpus(seed: u64) -> Vec<SourceSpec> {
    let mut specs = Vec::new();
    let mut next_seed = seed;
    let mut fresh = || {
        next_seed = next_seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        next_seed
    };
    for m in [100, 1_000, 10_000, 100_000] {
        for n in [2, 16, 256] {
            specs.push(SourceSpec::uniform(n, m, fresh()));
            specs.push(SourceSpec::zipf(n, m, 1.2, fresh()));
            specs.push(SourceSpec::markov(n, m, 1, 0.05, fresh()));
            specs.push(SourceSpec::markov(n, m, 2, 0.05, fresh()));
        }
        specs.push(SourceSpec::periodic("abc", m));
        specs.push(SourceSpec::periodic("entropy", m));
    }
    specs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_toronto() {
        let s: Vec<char> = "TORONTO".chars().collect();
        let mut ledger = ComparisonLedger::new();
        assert_eq!(
            baseline_mergesort(&s, &mut ledger),
            vec![5, 2, 4, 7, 3, 1, 6]
        );
        assert_eq!(ledger.binary_count(), ledger.phase_count(Phase::Baseline));
        assert!(ledger.binary_count() > 0);
        assert_eq!(reference_permutation(&s), vec![5, 2, 4, 7, 3, 1, 6]);
    }

    #[test]
    fn baseline_trivial() {
        let mut ledger = ComparisonLedger::new();
        assert_eq!(baseline_mergesort(&[1], &mut ledger), vec![1]);
        assert_eq!(ledger.binary_count(), 0);
        assert!(baseline_mergesort::<u8>(&[], &mut ledger).is_empty());
    }

    #[test]
    fn permutation_checks() {
        let s = [2, 1, 2];
        assert_eq!(check_permutation(&s, &[2, 1, 3]), (true, true));
        assert_eq!(check_permutation(&s, &[2, 3, 1]), (true, false));
        assert_eq!(check_permutation(&s, &[1, 2, 3]), (false, false));
        assert_eq!(check_permutation(&s, &[2, 2, 3]), (false, false));
        assert_eq!(check_permutation(&s, &[2, 1]), (false, false));
    }

    #[test]
    fn toronto_run_is_clean() {
        let s: Vec<char> = "TORONTO".chars().collect();
        let record = run_sequence(&s, &RunPlan::default(), None).unwrap();
        assert_eq!(record.reports.len(), 6);
        for r in &record.reports {
            assert!(
                r.violations.is_empty(),
                "{:?}: {:?}",
                r.sorter,
                r.violations
            );
            assert!(r.sorted_ok && r.stable);
            assert_eq!(
                r.comparisons.baseline,
                record.reports[0].comparisons.baseline
            );
            assert!(r.reconciles());
        }
        let sort0 = &record.reports[1];
        assert_eq!(sort0.budget_lemma1, 28);
        assert!(sort0.comparisons.total <= 28);
        assert_eq!(record.entropy.len(), 4);
    }

    #[test]
    fn report_json_and_csv() {
        let s = b"abracadabra".to_vec();
        let plan = RunPlan {
            sort0: false,
            orders: vec![1],
            baseline: false,
        };
        let record = run_sequence(&s, &plan, None).unwrap();
        let report = &record.reports[0];
        let json = serde_json::to_value(report).unwrap();
        for key in [
            "schema_version",
            "m",
            "n",
            "order",
            "entropy",
            "comparisons",
            "budget_lemma1",
            "budget_per_context",
            "wall_ms",
            "stable",
            "sorted_ok",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        for key in ["search", "verify", "b1", "merge", "total"] {
            assert!(json["comparisons"].get(key).is_some(), "missing {key}");
        }
        assert!(json["comparisons"].get("baseline").is_none());
        let back: Report = serde_json::from_value(json).unwrap();
        assert_eq!(&back, report);
        assert_eq!(report.csv_record().len(), Report::CSV_HEADER.len());
        assert_eq!(report.csv_record()[2], "sort_ell");
    }

    #[test]
    fn standard_corpus_runs_clean() {
        let plan = RunPlan {
            sort0: true,
            orders: vec![0, 1],
            baseline: true,
        };
        for spec in standard_corpus(1).into_iter().filter(|s| s.length <= 1_000) {
            let record = run_spec(&spec, &plan).unwrap();
            assert!(
                record.is_clean(),
                "{}: {:?}",
                spec.label(),
                record.violations().collect::<Vec<_>>()
            );
        }
    }
}
