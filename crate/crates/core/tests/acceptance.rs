//! End-to-end acceptance gate: every numbered library criterion at its
//! stated tolerance and full budget, one verdict line per criterion.
//! (The reproducibility criterion exercises the command-line binary and
//! lives in that crate's test suite.)

use fraczero_core::verify::{run_criterion, Relation, VerifyOptions};
use std::time::Instant;

fn gate(id: u32, time_limit: Option<f64>) {
    let opts = VerifyOptions::default();
    let t0 = Instant::now();
    let rep = run_criterion(id, &opts);
    let elapsed = t0.elapsed().as_secs_f64();
    println!("{}  [{elapsed:.1}s]", rep.summary_line());
    for c in &rep.checks {
        let rel = match c.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        println!(
            "    {:<52} {:>13.6e} {rel} {:.6e}  {}",
            c.name,
            c.value,
            c.bound,
            if c.pass { "ok" } else { "VIOLATED" }
        );
    }
    if let Some(err) = &rep.error {
        println!("    error: {err}");
    }
    assert!(rep.pass, "criterion {id} failed");
    if let Some(limit) = time_limit {
        assert!(
            elapsed < limit,
            "criterion {id} took {elapsed:.1}s, limit {limit}s"
        );
    }
}

#[test]
fn criterion_01_closed_form_residual() {
    gate(1, Some(10.0));
}

#[test]
fn criterion_02_family_residual_refinement() {
    gate(2, Some(300.0));
}

#[test]
fn criterion_03_potential_tail_table() {
    gate(3, None);
}

#[test]
fn criterion_04_potential_sign_grid() {
    gate(4, None);
}

#[test]
fn criterion_05_exit_time_oracle() {
    gate(5, Some(120.0));
}

#[test]
fn criterion_06_survival_bound() {
    gate(6, None);
}

#[test]
fn criterion_07_harmonic_fk_identity() {
    gate(7, None);
}

#[test]
fn criterion_08_iteration_limits() {
    gate(8, None);
}

#[test]
fn criterion_09_envelope_identity() {
    gate(9, None);
}

#[test]
fn criterion_10_lifetime_lower_bound() {
    gate(10, None);
}

#[test]
fn criterion_11_exit_law_goodness_of_fit() {
    gate(11, None);
}
