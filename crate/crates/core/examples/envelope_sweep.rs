//! Prints the largest `total/m - H` over the standard corpus for each sorter
//! and order, restricted to inputs where the envelope applies.

use entsort::bench::{
    evaluate_bounds, generate, reference_permutation, run_sorter, standard_corpus, Sorter,
};

fn main() {
    let mut worst: Vec<(String, f64, String)> = Vec::new();
    let mut note =
        |key: String, slack: f64, label: &str| match worst.iter_mut().find(|w| w.0 == key) {
            Some(w) if w.1 >= slack => {}
            Some(w) => *w = (key, slack, label.to_owned()),
            None => worst.push((key, slack, label.to_owned())),
        };
    for spec in standard_corpus(1) {
        let seq = generate(&spec).expect("valid spec");
        let oracle = reference_permutation(&seq);
        let label = spec.label();
        let zero = evaluate_bounds(&seq, 0);
        let run = run_sorter(&seq, Sorter::Sort0, &zero, &oracle, None).expect("sort0");
        let m = seq.len() as f64;
        let slack = run.report.comparisons.total as f64 / m - zero.entropy[0];
        let budget_slack = zero.order0_budget as f64 / m - zero.entropy[0];
        note(format!("sort0 premise={}", zero.h0_premise), slack, &label);
        note(
            format!("order0_budget budget premise={}", zero.h0_premise),
            budget_slack,
            &label,
        );
        for order in 0..=3 {
            let b = evaluate_bounds(&seq, order);
            let run = run_sorter(&seq, Sorter::SortEll, &b, &oracle, None).expect("sort_ell");
            let slack = run.report.comparisons.total as f64 / m - b.h_order();
            note(
                format!("sort_ell l={order} premise={}", b.order_premise),
                slack,
                &label,
            );
        }
    }
    worst.sort_by(|a, b| a.0.cmp(&b.0));
    for (key, slack, label) in worst {
        println!("{key:32} {slack:8.3}  {label}");
    }
}
