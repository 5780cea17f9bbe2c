//! Acceptance criteria 1 to 10 on the default grid (M = 6, E = 3, L = 30,
//! N = 4096; L = 60 for the minimizing sequence). The battery runs once and
//! each test prints one PASS/FAIL line for its criterion. Expected values are
//! recomputed here from the closed forms, independently of the library.

use std::sync::OnceLock;

use graphnls::verify::{run_battery, Check, VerifyConfig, VerifyReport};

fn report() -> &'static VerifyReport {
    static REPORT: OnceLock<VerifyReport> = OnceLock::new();
    REPORT.get_or_init(|| run_battery(VerifyConfig::default()))
}

fn checks(k: u8) -> Vec<&'static Check> {
    report().checks.iter().filter(|c| c.criterion == k).collect()
}

fn find(k: u8, prefix: &str) -> &'static Check {
    checks(k)
        .into_iter()
        .find(|c| c.name.starts_with(prefix))
        .unwrap_or_else(|| panic!("criterion {k}: no check named {prefix:?}"))
}

fn settle(k: u8, title: &str) {
    let cs = checks(k);
    assert!(!cs.is_empty());
    let passed = cs.iter().all(|c| c.passed);
    println!("criterion {k:>2} [{}] {title}", if passed { "PASS" } else { "FAIL" });
    for c in &cs {
        println!(
            "    {} {}: observed {:.6e}, expected {:.6e}, tolerance {:.1e}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.observed,
            c.expected,
            c.tolerance
        );
    }
    assert!(passed, "criterion {k} failed");
}

fn sesqui(m1: f64, m: f64) -> f64 {
    -m1.powi(3) / 24.0 + (m1 - m).powi(3) / 96.0
}

#[test]
fn criterion_01_half_line_minimum() {
    let c = find(1, "E(phi_2)");
    assert_eq!(c.expected, -1.0 / 3.0);
    assert!((c.observed + 1.0 / 3.0).abs() <= 5e-4 / 3.0);
    let ratio = find(1, "half_soliton_energy_error_ratio").observed;
    assert!((3.5..=4.5).contains(&ratio));
    settle(1, "half-line minimum -m^3/24 with second-order convergence");
}

#[test]
fn criterion_02_line_minimum() {
    let c = find(2, "E2(soliton m=4)");
    assert_eq!(c.expected, -64.0 / 96.0);
    assert!((c.observed + 2.0 / 3.0).abs() <= 5e-4 * 2.0 / 3.0);
    settle(2, "line minimum -m^3/96 via the straightened 2-edge graph");
}

#[test]
fn criterion_03_sesquisoliton_closed_form() {
    for m1 in [0.5, 1.0, 1.5, 2.0] {
        let c = find(3, &format!("E(sesqui m1={m1})"));
        let oracle = sesqui(m1, 6.0);
        assert!((c.expected - oracle).abs() < 1e-14);
        assert!((c.observed - oracle).abs() <= 5e-4 * oracle.abs());
    }
    assert!(find(3, "sesqui energies strictly increasing").passed);
    settle(3, "sesquisoliton energies match the closed form and increase in m1");
}

#[test]
fn criterion_04_infimum_not_attained() {
    assert!(find(4, "gaps strictly positive").passed);
    assert!(find(4, "gaps strictly decreasing").passed);
    let floor = find(4, "energy_floor_margin");
    assert!(floor.observed >= -5e-3);
    // smallest closed-form gap of the demo sequence, m1 = 0.02
    let closed_gap = sesqui(0.02, 6.0) + 6f64.powi(3) / 96.0;
    assert!((find(4, "min gap").observed - closed_gap).abs() < 1e-3);
    settle(4, "gaps to -M^3/96 positive and decreasing; no state below the floor");
}

#[test]
fn criterion_05_comparison_construction() {
    let c = find(5, "max over 200 states");
    assert!(c.observed <= 1e-6);
    settle(5, "comparison sesquisoliton never raises the energy (200 seeded states)");
}

#[test]
fn criterion_06_stationarity_and_multiplier() {
    assert!(find(6, "EL residual at omega").observed <= 1e-3);
    let ratio = find(6, "EL residual ratio").observed;
    assert!((3.5..=4.5).contains(&ratio));
    assert!((find(6, "best_omega(M)").observed - 36.0 / 36.0).abs() <= 1e-3);
    assert!((find(6, "best_omega(M/2)").observed - 9.0 / 36.0).abs() <= 1e-3);
    settle(6, "Euler-Lagrange residual and multiplier M^2/36");
}

#[test]
fn criterion_07_saddle_signature() {
    for eps in [1e-2, 5e-3, 2.5e-3] {
        let c = find(7, &format!("sesquisoliton curve second difference, eps={eps}"));
        assert!(c.observed < 0.0);
    }
    let dil = find(7, "dilation tangent");
    assert!((dil.observed - 2.0).abs() <= 0.2);
    assert!(find(7, "phase direction").observed.abs() <= 1e-6);
    // d^2/dm1^2 of the closed form at m1 = 2: -m1/4 + (m1 - 6)/16
    let curvature = -2.0 / 4.0 + (2.0 - 6.0) / 16.0;
    let fd = find(7, "closed-form curvature");
    assert!((fd.observed - curvature).abs() <= 1e-6);
    settle(7, "negative along the sesquisoliton curve, positive along dilations, flat along the phase");
}

#[test]
fn criterion_08_standing_wave() {
    assert!((find(8, "measured |omega|").observed - 1.0).abs() <= 1e-3);
    assert!(find(8, "pointwise modulus drift").observed <= 1e-6);
    assert!(find(8, "mass drift").observed <= 1e-10);
    assert!(find(8, "relative energy drift").observed <= 1e-6);
    assert!(find(8, "time-reversal").observed <= 1e-6);
    settle(8, "Crank-Nicolson standing wave rotates at omega = 1 and conserves mass and energy");
}

#[test]
fn criterion_09_saddle_escape() {
    assert!(find(9, "asymmetric flow: lowest energy").observed < -1.05);
    assert!((find(9, "symmetric flow: final energy").observed + 1.0).abs() <= 5e-4);
    assert!(find(4, "energy_floor_margin").observed >= -5e-3);
    settle(9, "gradient flow escapes below -1.05 asymmetrically and returns to -1 symmetrically");
}

#[test]
fn criterion_10_property_suites() {
    assert!(find(10, "energy-gradient").observed <= 1e-6);
    assert!(find(10, "Laplacian symmetry").observed <= 1e-12);
    assert!(find(10, "Laplacian <Psi").observed <= 1e-12);
    assert!(find(10, "mass additivity").observed <= 1e-12);
    assert!(find(10, "CSV outputs identical").passed);
    settle(10, "gradient consistency, Laplacian symmetry and sign, mass additivity, determinism");
}

#[test]
fn whole_battery_passes() {
    let failures: Vec<_> = report().failures().map(|c| c.name.clone()).collect();
    assert!(failures.is_empty(), "{failures:?}");
    assert!(report().passed);
}
