//! Acceptance gate: one test per shipped guarantee, each pinning its
//! instance count, tolerance, and wall-clock budget. Every test prints a
//! single labeled PASS/FAIL line (visible with `--nocapture`) and fails
//! loudly with the offending rows otherwise.

use freehol::harness::{run_suite, SuiteConfig, VerdictRow};
use std::collections::BTreeMap;
use std::time::Instant;

fn config(suites: &[&str], n: usize, d: usize, max_degree: usize, level: usize, trials: usize) -> SuiteConfig {
    SuiteConfig {
        seed: 2026,
        n,
        d,
        max_degree,
        level,
        trials,
        tolerances: BTreeMap::new(),
        suites: suites.iter().map(|s| s.to_string()).collect(),
        unsafe_sizes: false,
    }
}

/// Run the configured suites, print the labeled verdict line, and enforce
/// both the row verdicts and the time budget.
fn check(label: &str, budget_secs: f64, cfgs: &[SuiteConfig]) -> Vec<VerdictRow> {
    let start = Instant::now();
    let mut rows = Vec::new();
    for cfg in cfgs {
        rows.extend(run_suite(cfg).expect("suite must run"));
    }
    let secs = start.elapsed().as_secs_f64();
    let failures: Vec<&VerdictRow> = rows.iter().filter(|r| !r.pass).collect();
    let ok = failures.is_empty() && secs <= budget_secs;
    println!(
        "{label}: {} — {} rows in {secs:.2}s (budget {budget_secs:.0}s)",
        if ok { "PASS" } else { "FAIL" },
        rows.len(),
    );
    for f in &failures {
        println!(
            "    failed row: {} #{} {} lhs={:e} rhs={:e} slack={:e}",
            f.suite, f.instance, f.quantity, f.lhs, f.rhs, f.slack
        );
    }
    assert!(
        failures.is_empty(),
        "{label}: {} of {} rows failed",
        failures.len(),
        rows.len()
    );
    assert!(
        secs <= budget_secs,
        "{label}: took {secs:.2}s, budget {budget_secs:.0}s"
    );
    rows
}

#[test]
fn acceptance_01_homogeneous_norm_identity() {
    // 100 homogeneous scalar blocks, n ∈ {2, 3}, k ≤ 6, realized at N = k;
    // ‖Σ a_α S_α‖ must equal (Σ|a_α|²)^{1/2} to 1e-10 relative.
    let rows = check(
        "acceptance 01 homogeneous norm identity",
        10.0,
        &[config(&["homogeneous_norm"], 3, 1, 6, 6, 100)],
    );
    assert_eq!(rows.len(), 100);
}

#[test]
fn acceptance_02_hadamard_radius_recovery() {
    // Geometric profiles with ratio t ∈ {0.3, 0.5, 0.8} on n = 2 must
    // report a degree-window [8,16] radius within 10% of 1/t.
    let rows = check(
        "acceptance 02 hadamard radius recovery",
        30.0,
        &[config(&["hadamard_radius"], 2, 1, 12, 8, 6)],
    );
    assert_eq!(rows.len(), 6);
}

#[test]
fn acceptance_03_cauchy_coefficient_estimates() {
    // b_k ≤ M(ρ)/ρᵏ for all k ≤ D on 50 random polynomials, ρ ∈ {0.5, 0.9},
    // slack ≥ -1e-9.
    let rows = check(
        "acceptance 03 cauchy coefficient estimates",
        30.0,
        &[config(&["cauchy_estimates"], 2, 1, 6, 6, 50)],
    );
    assert_eq!(rows.len(), 50);
}

#[test]
fn acceptance_04_schwartz_vanishing_order_bound() {
    // 50 boundary-normalized series vanishing to order m ∈ {1, 2}:
    // ‖F(X)‖ ≤ ‖[X]‖ᵐ + 1e-9 at strict row contractions.
    let rows = check(
        "acceptance 04 schwartz vanishing order bound",
        60.0,
        &[config(&["schwartz"], 2, 4, 4, 4, 50)],
    );
    assert_eq!(rows.len(), 50);
}

#[test]
fn acceptance_05_derivation_identities_exact() {
    // 200 random polynomial pairs (n ≤ 3, D ≤ 6): insertion vs deletion
    // agreement, the Leibniz rule, and mixed-partial commutation, all exact.
    let rows = check(
        "acceptance 05 derivation identities exact",
        20.0,
        &[
            config(&["derivations"], 3, 1, 6, 6, 200),
            config(&["mixed_partials"], 3, 1, 6, 6, 200),
        ],
    );
    assert_eq!(rows.len(), 200 * 2 + 200);
    for r in &rows {
        assert_eq!(r.slack, 0.0, "{} #{} must be exact", r.quantity, r.instance);
    }
}

#[test]
fn acceptance_06_calculus_matches_cauchy_transform() {
    // f(T) = 𝒞_T(f(S)) to 1e-9 on 100 random (polynomial, tuple) pairs with
    // the tuple's graded data strictly inside the ball, N ≥ D + 1.
    let rows = check(
        "acceptance 06 calculus matches cauchy transform",
        60.0,
        &[config(&["functional_calculus"], 2, 4, 3, 4, 100)],
    );
    assert_eq!(rows.len(), 100);
}

#[test]
fn acceptance_07_cauchy_kernel_bound_and_resolvent() {
    // ‖C_T‖ ≤ 1/(1−‖T‖) and the resolvent difference identity to 1e-10 on
    // 50 instances.
    let rows = check(
        "acceptance 07 cauchy kernel bound and resolvent",
        30.0,
        &[config(&["cauchy_kernel"], 2, 4, 3, 4, 50)],
    );
    assert_eq!(rows.len(), 100);
}

#[test]
fn acceptance_08_poisson_gram_and_reproduction() {
    // KᴴK = I − Φ^{N+1}(I) to 1e-10, and the reproduction defect bound
    // ‖P_T(p(S)) − p(T)‖ ≤ ‖T‖^{2(N−deg p+1)}(1 + ‖p(T)‖) on 50 instances.
    let rows = check(
        "acceptance 08 poisson gram and reproduction",
        60.0,
        &[config(&["poisson"], 2, 3, 4, 5, 50)],
    );
    assert_eq!(rows.len(), 100);
}

#[test]
fn acceptance_09_unitary_equivariance() {
    // 30 random unitaries: substituted level sums agree to 1e-10 for k ≤ 4,
    // and the Cauchy transform commutes with the substitution to 1e-9.
    let rows = check(
        "acceptance 09 unitary equivariance",
        30.0,
        &[config(&["unitary_equivariance"], 3, 3, 3, 4, 30)],
    );
    assert_eq!(rows.len(), 60);
}

#[test]
fn acceptance_10_reconstruction_power_norms() {
    // ‖(Σ S_i ⊗ T_iᴴ)ᵏ‖ = ‖Φᵏ(I)‖^{1/2} to 1e-10 for k ≤ N = 8 at d = 8,
    // computed through structured mat-vecs on the 4088-dimensional space.
    let rows = check(
        "acceptance 10 reconstruction power norms",
        30.0,
        &[config(&["reconstruction"], 2, 8, 3, 8, 5)],
    );
    assert_eq!(rows.len(), 40);
}

#[test]
fn acceptance_11_hardy_means_and_von_neumann() {
    // Riemann brackets of the radial p-mean tighter than 1e-3 at 1000 cells
    // (p ∈ {1, 2, 4}), the p-chain rows, and the von Neumann bound
    // ‖f(T)‖ ≤ (1−‖T‖)^{−1/p}·(upper p-mean) + 1e-9 across 50 instances.
    let mut brackets = config(&["hardy_p"], 2, 1, 4, 4, 3);
    brackets.tolerances.insert("hardy_cells".into(), 1000.0);
    let mut vn = config(&["von_neumann"], 2, 3, 4, 5, 50);
    vn.tolerances.insert("hardy_cells".into(), 150.0);
    let rows = check(
        "acceptance 11 hardy means and von neumann",
        60.0,
        &[brackets, vn],
    );
    assert_eq!(rows.len(), 3 * 3 + 50);
}

#[test]
fn acceptance_12_metric_axioms_and_weierstrass() {
    // Metric axioms on 100 random triples with slack ≥ -1e-12, plus the
    // monotone Weierstrass partial-sum run reaching distance zero.
    let rows = check(
        "acceptance 12 metric axioms and weierstrass",
        30.0,
        &[config(&["metric_rho"], 2, 1, 8, 4, 100)],
    );
    assert_eq!(rows.len(), 100 * 3 + 8);
}

#[test]
fn acceptance_13_conjugate_boundary_recovery() {
    // Functions with real constant term are recovered from their real part
    // through the right-kernel pairing to 1e-9 on 50 instances.
    let rows = check(
        "acceptance 13 conjugate boundary recovery",
        30.0,
        &[config(&["cauchy_conjugate"], 2, 4, 4, 5, 50)],
    );
    assert_eq!(rows.len(), 50);
}

#[test]
fn acceptance_14_symmetrization_census_and_diagonals() {
    // Orbit cardinalities |𝐩|!/𝐩! verified exhaustively for |𝐩| ≤ 8,
    // n ≤ 3, and 50 symmetrized evaluations at commuting diagonal tuples
    // matching the multi-index formula to 1e-12.
    let rows = check(
        "acceptance 14 symmetrization census and diagonals",
        20.0,
        &[config(&["symmetrization"], 3, 6, 4, 4, 50)],
    );
    // 45 multisets at n = 2 (9 totals × (total+1) compositions summed) plus
    // 165 at n = 3, plus the 50 diagonal evaluations.
    assert_eq!(rows.len(), 45 + 165 + 50);
}
