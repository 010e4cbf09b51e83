//! Property checks for drive profiles: the running integral must
//! differentiate back to the force and agree with independent quadrature.

use proptest::prelude::*;
use tbdrive_core::drive::DriveProfile;

/// Composite Simpson quadrature of the force, the independent oracle for φ.
fn quadrature(profile: &DriveProfile, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let hi = lo + h;
        let mid = 0.5 * (lo + hi);
        acc += (h / 6.0)
            * (profile.force_at(lo) + 4.0 * profile.force_at(mid) + profile.force_at(hi));
    }
    acc
}

#[test]
fn sinusoid_integral_matches_quadrature() {
    let d = DriveProfile::sinusoid(1.0, 1.0, 0.0);
    for t in [0.3, 1.0, 4.7, 12.0] {
        let exact = d.phi_at(t).unwrap();
        let closed = 1.0 * (1.0 - t.cos());
        let quad = quadrature(&d, 0.0, t, 4000);
        assert!((exact - closed).abs() < 1e-12);
        assert!((exact - quad).abs() < 1e-10, "t={t}: {exact} vs {quad}");
    }
}

/// Quadrature split at the integrand's discontinuities.
fn quadrature_split(profile: &DriveProfile, a: f64, b: f64, cuts: &[f64]) -> f64 {
    let mut nodes = vec![a];
    for &c in cuts {
        if c > a && c < b {
            nodes.push(c);
        }
    }
    nodes.push(b);
    nodes.windows(2).map(|w| quadrature(profile, w[0], w[1], 4000)).sum()
}

#[test]
fn interval_additivity_closed_forms() {
    let (t1, t2) = (0.7, 3.9);
    for d in [DriveProfile::constant(1.3), DriveProfile::sinusoid(0.8, 2.5, 0.3)] {
        let diff = d.phi_at(t2).unwrap() - d.phi_at(t1).unwrap();
        let quad = quadrature(&d, t1, t2, 8000);
        assert!((diff - quad).abs() < 1e-10, "{d:?}: {diff} vs {quad}");
    }
    let pw =
        DriveProfile::piecewise_constant(vec![0.5, 2.0], vec![1.0, -0.5, 2.0]).unwrap();
    let diff = pw.phi_at(t2).unwrap() - pw.phi_at(t1).unwrap();
    let quad = quadrature_split(&pw, t1, t2, &[0.5, 2.0]);
    assert!((diff - quad).abs() < 1e-10, "{diff} vs {quad}");
}

#[test]
fn sampled_integral_is_exact_for_linear_interpolant() {
    let times: Vec<f64> = (0..40).map(|k| 0.25 * k as f64).collect();
    let values: Vec<f64> = times.iter().map(|t| (1.3 * t).sin() + 0.2 * t).collect();
    let d = DriveProfile::sampled(times, values).unwrap();
    for t in [0.1, 2.3, 7.75, 9.9, 12.0] {
        let quad = quadrature(&d, 0.0, t, 20000);
        let exact = d.phi_at(t).unwrap();
        assert!((exact - quad).abs() < 1e-8, "t={t}: {exact} vs {quad}");
    }
}

proptest! {
    #[test]
    fn derivative_recovers_force_sinusoid(
        amp in -3.0..3.0f64,
        omega in 0.1..5.0f64,
        phase in -3.0..3.0f64,
        t in 0.1..20.0f64,
    ) {
        let d = DriveProfile::sinusoid(amp, omega, phase);
        let h = 1e-6;
        let num = (d.phi_at(t + h).unwrap() - d.phi_at(t - h).unwrap()) / (2.0 * h);
        let f = d.force_at(t);
        prop_assert!((num - f).abs() < 1e-6 * (1.0 + f.abs()));
    }

    #[test]
    fn derivative_recovers_force_piecewise(
        v0 in -2.0..2.0f64,
        v1 in -2.0..2.0f64,
        v2 in -2.0..2.0f64,
        t in 0.0..6.0f64,
    ) {
        let d = DriveProfile::piecewise_constant(vec![1.0, 3.0], vec![v0, v1, v2]).unwrap();
        // stay away from the breakpoints where F jumps
        prop_assume!((t - 1.0).abs() > 1e-3 && (t - 3.0).abs() > 1e-3);
        let h = 1e-7;
        let lo = (t - h).max(0.0);
        let num = (d.phi_at(t + h).unwrap() - d.phi_at(lo).unwrap()) / (t + h - lo);
        prop_assert!((num - d.force_at(t)).abs() < 1e-5);
    }

    #[test]
    fn phi_additivity_random_split(
        amp in -2.0..2.0f64,
        omega in 0.2..4.0f64,
        t1 in 0.0..5.0f64,
        dt in 0.0..5.0f64,
    ) {
        let d = DriveProfile::sinusoid(amp, omega, 0.0);
        let t2 = t1 + dt;
        let whole = d.phi_at(t2).unwrap();
        let split = d.phi_at(t1).unwrap() + quadrature(&d, t1, t2, 2000);
        prop_assert!((whole - split).abs() < 1e-8);
    }

    #[test]
    fn phi_starts_at_zero(amp in -2.0..2.0f64, omega in 0.1..4.0f64, phase in -3.0..3.0f64) {
        let d = DriveProfile::sinusoid(amp, omega, phase);
        prop_assert_eq!(d.phi_at(0.0).unwrap(), 0.0);
        let c = DriveProfile::constant(amp);
        prop_assert_eq!(c.phi_at(0.0).unwrap(), 0.0);
    }
}
