//! Acceptance suite: runs every reproduction check at its pinned tolerance
//! and time budget, one PASS/FAIL line each.
//!
//! `cargo test -p pebbling-core --test acceptance -- --nocapture`

use std::io::Write;

use pebbling_core::verify::{self, Level};

#[test]
fn acceptance_criteria() {
    let outcomes = verify::run(Level::Full);
    // written straight to stderr so the table shows without --nocapture
    let mut err = std::io::stderr().lock();
    for o in &outcomes {
        writeln!(err, "{o}").unwrap();
    }
    drop(err);
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert_eq!(outcomes.len(), verify::checks().len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
