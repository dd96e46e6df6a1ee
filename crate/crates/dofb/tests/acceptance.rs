//! End-to-end acceptance suite.
//!
//! Runs every verification criterion and prints exactly one PASS/FAIL
//! line per criterion (run with `--nocapture` to see them). All checks
//! are exact — rational or finite-field arithmetic throughout — so the
//! tolerance everywhere is equality.

use dofb::field::PrimeField;
use dofb::verify::{render_row, run_all};

#[test]
fn acceptance() {
    let rows = run_all(PrimeField::default(), 0);

    let mut criteria: Vec<String> = Vec::new();
    for row in &rows {
        if !criteria.contains(&row.criterion) {
            criteria.push(row.criterion.clone());
        }
    }

    let mut failed = Vec::new();
    for criterion in &criteria {
        let group: Vec<_> = rows.iter().filter(|r| &r.criterion == criterion).collect();
        let pass = group.iter().all(|r| r.pass);
        println!(
            "criterion {criterion}: {} ({} checks)",
            if pass { "PASS" } else { "FAIL" },
            group.len()
        );
        for row in group.iter().filter(|r| !r.pass) {
            println!("    {}", render_row(row));
        }
        if !pass {
            failed.push(criterion.clone());
        }
    }

    assert!(
        failed.is_empty(),
        "acceptance criteria failed: {}",
        failed.join(", ")
    );
}
