//! Mutation smoke test: a step that flips the sign of the absorption term
//! must be caught by the comparison checks and fail the property suite.

use degenlog::evolve::{lagged_step, Stepper};
use degenlog::grid::{Field, Grid};
use degenlog::suite::{comparison_forcing, run_suite_with_kernel, RowStatus, SuiteName, SuiteOptions};

fn flipped_absorption(stepper: &Stepper, grid: &Grid, u: &Field, n: &Field) -> degenlog::Result<Field> {
    stepper.advance(grid, u, &n.scaled(-1.0))
}

#[test]
fn comparison_check_separates_correct_and_faulty_steps() {
    assert!(comparison_forcing(lagged_step).unwrap().pass);
    // either the ordering breaks or the step operator stops being positive definite
    match comparison_forcing(flipped_absorption) {
        Ok(o) => assert!(!o.pass, "flipped absorption went unnoticed: {o:?}"),
        Err(e) => assert!(e.to_string().contains("positive definite"), "{e}"),
    }
}

#[test]
fn faulty_step_fails_the_property_suite() {
    let report = run_suite_with_kernel(SuiteName::Properties, &SuiteOptions { jobs: 1 }, flipped_absorption).unwrap();
    let row = report.row("comparison-forcing").unwrap();
    assert_eq!(row.status, RowStatus::Fail, "{row:?}");
    assert_ne!(report.exit_code(), 0);
}
