//! Plain-text report rendering. Reports are deterministic: no wall-clock
//! data goes into files (timings are printed to stdout only).

use std::fmt::Write as _;

use tbdrive_core::algebra::{CertificationReport, CheckStatus};
use tbdrive_core::drive::DriveProfile;
use tbdrive_core::lattice::{Boundary, LatticeSpec};
use tbdrive_core::propagate::{ComparisonReport, MethodOutcome, PropagationResult};

pub fn describe_boundary(spec: &LatticeSpec) -> String {
    match spec.boundary() {
        Boundary::Dirichlet => format!("dirichlet ({} sites)", spec.dim()),
        Boundary::Periodic => format!("periodic ({} sites)", spec.dim()),
        Boundary::InfiniteWindow { halfwidth } => format!(
            "infinite_window (halfwidth {halfwidth}, {} sites)",
            spec.dim()
        ),
    }
}

pub fn describe_drive(drive: &DriveProfile) -> String {
    match drive {
        DriveProfile::Constant { value } => format!("constant F = {value}"),
        DriveProfile::Sinusoid { amplitude, angular_frequency, phase } => format!(
            "sinusoid A = {amplitude}, omega = {angular_frequency}, phase = {phase}"
        ),
        DriveProfile::PiecewiseConstant { breakpoints, values } => format!(
            "piecewise constant with {} segments over {} breakpoints",
            values.len(),
            breakpoints.len()
        ),
        DriveProfile::Sampled { times, .. } => {
            format!("sampled profile with {} points", times.len())
        }
    }
}

pub fn run_header(
    out: &mut String,
    command: &str,
    spec: &LatticeSpec,
    drive: &DriveProfile,
    t_final: f64,
    dt: f64,
    method: &str,
) {
    let _ = writeln!(out, "tbdrive {command} report");
    let _ = writeln!(out, "boundary: {}", describe_boundary(spec));
    let _ = writeln!(out, "coupling: G = {}", spec.coupling());
    let _ = writeln!(out, "drive: {}", describe_drive(drive));
    let _ = writeln!(out, "time: t_final = {t_final}, dt = {dt}");
    let _ = writeln!(out, "method: {method}");
}

pub fn run_diagnostics(out: &mut String, result: &PropagationResult) {
    let max_norm_err = result
        .diagnostics
        .norm_error
        .iter()
        .fold(0.0_f64, |m, &v| m.max(v));
    let _ = writeln!(out, "max norm deviation: {max_norm_err:.3e}");
    if let Some(layers) = &result.diagnostics.layer_norms {
        let rendered: Vec<String> =
            layers.iter().map(|v| format!("{v:.6e}")).collect();
        let _ = writeln!(out, "terminal layer norms: [{}]", rendered.join(", "));
    }
    for w in &result.diagnostics.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    if result.basis_offset < 0 {
        let leak = tbdrive_core::lattice::edge_leakage(result.terminal_state());
        let _ = writeln!(out, "terminal edge leakage: {leak:.3e}");
    }
}

/// Fixed-width certification table; one line per identity.
pub fn certification_table(reports: &[CertificationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:>7}  {:<36} {:>12}  {:>9}  status",
        "boundary", "n_sites", "identity", "residual", "tolerance"
    );
    for report in reports {
        for check in &report.checks {
            let status = match check.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Note => "note",
            };
            let _ = writeln!(
                out,
                "{:<16} {:>7}  {:<36} {:>12.3e}  {:>9.1e}  {}",
                report.boundary,
                report.n_sites,
                check.name,
                check.residual,
                check.tolerance,
                status
            );
            if !check.detail.is_empty() {
                let _ = writeln!(out, "{:>26}note: {}", "", check.detail);
            }
        }
    }
    out
}

/// Comparison table without runtimes (deterministic file content).
pub fn comparison_table(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20} {:<12} {:>18} {:>16}",
        "method", "status", "terminal_fidelity", "terminal_error"
    );
    for entry in &report.entries {
        match &entry.outcome {
            MethodOutcome::Completed { terminal_fidelity, terminal_error, .. } => {
                let _ = writeln!(
                    out,
                    "{:<20} {:<12} {:>18.12} {:>16.3e}",
                    entry.method.label(),
                    "ok",
                    terminal_fidelity,
                    terminal_error
                );
            }
            MethodOutcome::Inapplicable { reason } => {
                let _ = writeln!(
                    out,
                    "{:<20} {:<12} {:>18} {:>16}",
                    entry.method.label(),
                    "inapplicable",
                    "-",
                    "-"
                );
                let _ = writeln!(out, "    reason: {reason}");
            }
            MethodOutcome::Failed { reason } => {
                let _ = writeln!(
                    out,
                    "{:<20} {:<12} {:>18} {:>16}",
                    entry.method.label(),
                    "failed",
                    "-",
                    "-"
                );
                let _ = writeln!(out, "    reason: {reason}");
            }
        }
    }
    out
}

/// Runtime table for stdout (kept out of the report files so identical
/// configurations produce byte-identical outputs).
pub fn runtime_table(report: &ComparisonReport) -> String {
    let mut out = String::new();
    for entry in &report.entries {
        let _ = writeln!(
            out,
            "{:<20} {:>10.3} ms",
            entry.method.label(),
            entry.runtime_seconds * 1e3
        );
    }
    out
}
