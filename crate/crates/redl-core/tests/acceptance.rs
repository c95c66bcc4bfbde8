//! Acceptance suite: one test per release criterion. Each prints its
//! pass/fail line with runtime and details.

use redl_core::selftest::{self, CheckOutcome};

fn assert_check(outcome: CheckOutcome) {
    println!("{}", outcome.summary_line());
    assert!(outcome.passed, "{}", outcome.summary_line());
}

#[test]
fn c01_bijection_round_trip() {
    assert_check(selftest::check_bijection_round_trip());
}

#[test]
fn c02_expectation_identity() {
    assert_check(selftest::check_expectation_identity());
}

#[test]
fn c03_loss_decomposition() {
    assert_check(selftest::check_loss_decomposition());
}

#[test]
fn c04_uncertainty_measure_oracles() {
    assert_check(selftest::check_uncertainty_measure_oracles());
}

#[test]
fn c05_kl_regularizer() {
    assert_check(selftest::check_kl_regularizer());
}

#[test]
fn c06_gradient_certification() {
    assert_check(selftest::check_gradient_certification());
}

#[test]
fn c07_paper_spot_value() {
    assert_check(selftest::check_paper_spot_value());
}

#[test]
fn c08_argmax_lambda_invariance() {
    assert_check(selftest::check_argmax_lambda_invariance());
}

#[test]
fn c09_evidence_suppression_direction() {
    assert_check(selftest::check_evidence_suppression_direction());
}

#[test]
fn c10_projected_probability_benefit() {
    assert_check(selftest::check_projected_probability_benefit());
}

#[test]
fn c11_metric_correctness() {
    assert_check(selftest::check_metric_correctness());
}

#[test]
fn c12_determinism() {
    assert_check(selftest::check_determinism());
}
