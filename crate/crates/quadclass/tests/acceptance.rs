//! Acceptance suite: one test per verification criterion, each printing
//! its PASS/FAIL line. The sweep to 10^6 is shared across criteria.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use quadclass::moments::SweepTable;
use quadclass::verify::{self, CriterionResult};
use std::sync::LazyLock;

static TABLE: LazyLock<SweepTable> =
    LazyLock::new(|| verify::build_sweep_table(1_000_000, 0).expect("sweep to 10^6"));
static GRID: [u64; 3] = [10_000, 100_000, 1_000_000];

fn check(r: CriterionResult) {
    println!("{}", verify::format_line(&r));
    assert!(r.passed, "{}", r.details);
}

#[test]
fn c01_class_group_oracle_agreement() {
    check(verify::criterion_1_class_group_oracle(10_000));
}

#[test]
fn c02_davenport_heilbronn_trend() {
    check(verify::criterion_2_dh_trend(&TABLE, &GRID));
}

#[test]
fn c03_root_count_lemma_exhaustive() {
    check(verify::criterion_3_m_solve(300, 60));
}

#[test]
fn c04_s3_strategy_equivalence() {
    check(verify::criterion_4_s3_equivalence(10_000, &[10, 21]));
}

#[test]
fn c05_small_window_vanishing() {
    check(verify::criterion_5_vanishing(10_000));
}

#[test]
fn c06_pair_count_double_identity() {
    check(verify::criterion_6_tg_identity(1_000, 6));
}

#[test]
fn c07_lattice_point_count_audit() {
    check(verify::criterion_7_davenport(200));
}

#[test]
fn c08_congruence_system_soundness() {
    check(verify::criterion_8_lattice_systems(10_000));
}

#[test]
fn c09_kernel_audit() {
    check(verify::criterion_9_kernel_audit(1_000_000));
}

#[test]
fn c10_moment_exponent_continuity() {
    check(verify::criterion_10_exponents());
}

#[test]
fn c11_first_moment_slope_fit() {
    check(verify::criterion_11_slope(&TABLE, &GRID));
}
