//! Acceptance suite: every criterion at its stated tolerance, one line each.
//! Runs at the stated grid sizes; `RHSIM_VERIFY_LEVEL=quick` drops to N=16.

use rhsim_core::{CoreState, Result};
use rhsim_verify::criteria::conservation_drift;
use rhsim_verify::{run_all, Level, CRITERIA};

fn level() -> Level {
    match std::env::var("RHSIM_VERIFY_LEVEL").as_deref() {
        Ok("quick") => Level::Quick,
        _ => Level::Full,
    }
}

#[test]
fn all_criteria_pass() {
    let level = level();
    println!("acceptance level: {level:?}");
    let reports = run_all(level, |r| println!("{r}"));
    assert_eq!(reports.len(), CRITERIA.len());
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

/// Negative control: a step that leaks one part in 10⁶ of the travelers per
/// step must be caught by the conservation check.
#[test]
fn conservation_catches_a_leaky_step() {
    let (grid, params) = rhsim_verify::criteria::standard_setup(Level::Quick);
    let stepper = rhsim_core::CoreStepper::new(params, grid).unwrap();
    let leaky = |s: &CoreState, dt: f64| -> Result<CoreState> {
        let mut next = stepper.step(s, dt)?;
        next.v = next.v.scale(1.0 - 1e-6);
        Ok(next)
    };
    let drift = conservation_drift(Level::Quick, leaky).unwrap();
    println!("leaky step drift = {drift:.3e}");
    assert!(drift > 1e-10);
    let honest = conservation_drift(Level::Quick, |s, dt| stepper.step(s, dt)).unwrap();
    assert!(honest <= 1e-10);
}
