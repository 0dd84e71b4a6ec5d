//! Acceptance suite as an integration test: runs every criterion at its
//! stated tolerance and prints one pass/fail line per criterion.

use mhc_cli::acceptance::{print_report, run_all};

#[test]
fn acceptance_criteria() {
    let results = run_all();
    let all_pass = print_report(&results);
    assert_eq!(results.len(), 11);
    for c in &results {
        assert!(c.pass, "criterion {} ({}) failed: {}", c.id, c.name, c.detail);
    }
    assert!(all_pass);
}
