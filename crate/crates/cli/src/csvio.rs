//! CSV writers and readers.
//!
//! One fixed column order per file kind, a single header row, UTF-8, LF line
//! endings, floats printed with 17 significant digits so values round-trip
//! bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use tbdrive_core::observables::ObservableSeries;
use tbdrive_core::propagate::{MethodOutcome, PropagationResult, TiltedEigensystem};
use tbdrive_core::Complex64;

use crate::error::CliError;

/// 17 significant digits: enough for f64 round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::io(&format!("creating {}", parent.display()), e))?;
    }
    let mut f = fs::File::create(path)
        .map_err(|e| CliError::io(&format!("creating {}", path.display()), e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

/// `states.csv`: t, per-site re/im amplitude pairs, norm, mean position.
pub fn write_states_csv(
    path: &Path,
    result: &PropagationResult,
    record_every: usize,
) -> Result<(), CliError> {
    let dim = result.states.first().map(|s| s.dim()).unwrap_or(0);
    let mut out = String::new();
    out.push('t');
    for row in 0..dim {
        let site = result.basis_offset + row as i64;
        let _ = write!(out, ",re_{site},im_{site}");
    }
    out.push_str(",norm,mean_n\n");

    let last = result.time_grid.len() - 1;
    for (idx, (t, state)) in result.time_grid.iter().zip(&result.states).enumerate() {
        if idx % record_every != 0 && idx != last {
            continue;
        }
        out.push_str(&fmt_f64(*t));
        let mut mean = 0.0;
        let mut norm_sq = 0.0;
        for (row, amp) in state.amplitudes().iter().enumerate() {
            let _ = write!(out, ",{},{}", fmt_f64(amp.re), fmt_f64(amp.im));
            let p = amp.norm_sqr();
            norm_sq += p;
            mean += p * (result.basis_offset + row as i64) as f64;
        }
        let _ = writeln!(out, ",{},{}", fmt_f64(norm_sq.sqrt()), fmt_f64(mean));
    }
    write_file(path, &out)
}

/// `observables.csv`: t, per-site occupations, mean position, norm, and the
/// fidelity column when the series carries one.
pub fn write_observables_csv(
    path: &Path,
    series: &ObservableSeries,
    record_every: usize,
) -> Result<(), CliError> {
    let mut out = String::new();
    out.push('t');
    for site in &series.site_indices {
        let _ = write!(out, ",p_{site}");
    }
    out.push_str(",mean_position,norm");
    if series.fidelity_vs.is_some() {
        out.push_str(",fidelity_vs");
    }
    out.push('\n');

    let last = series.time_grid.len() - 1;
    for idx in 0..series.time_grid.len() {
        if idx % record_every != 0 && idx != last {
            continue;
        }
        out.push_str(&fmt_f64(series.time_grid[idx]));
        for p in &series.occupations[idx] {
            let _ = write!(out, ",{}", fmt_f64(*p));
        }
        let _ = write!(
            out,
            ",{},{}",
            fmt_f64(series.mean_position[idx]),
            fmt_f64(series.norm[idx])
        );
        if let Some(f) = &series.fidelity_vs {
            let _ = write!(out, ",{}", fmt_f64(f[idx]));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// `spectrum.csv`: one row per mode with ω, λ, d, and the eigenvector.
pub fn write_spectrum_csv(path: &Path, eig: &TiltedEigensystem) -> Result<(), CliError> {
    let n = eig.n_sites();
    let mut out = String::from("m,omega,lambda,d");
    for site in 1..=n {
        let _ = write!(out, ",v_{site}");
    }
    out.push('\n');
    for mode in 1..=n {
        let _ = write!(
            out,
            "{},{},{},{}",
            mode,
            fmt_f64(eig.omegas()[mode - 1]),
            fmt_f64(eig.eigenvalues()[mode - 1]),
            fmt_f64(eig.norm_coeffs()[mode - 1])
        );
        for v in eig.eigenvector(mode) {
            let _ = write!(out, ",{}", fmt_f64(v));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// `certification.csv`: identity residual table across chains.
pub fn write_certification_csv(
    path: &Path,
    reports: &[tbdrive_core::algebra::CertificationReport],
) -> Result<(), CliError> {
    let mut out = String::from("boundary,n_sites,identity,residual,tolerance,status\n");
    for report in reports {
        for check in &report.checks {
            let status = match check.status {
                tbdrive_core::algebra::CheckStatus::Pass => "pass",
                tbdrive_core::algebra::CheckStatus::Fail => "fail",
                tbdrive_core::algebra::CheckStatus::Note => "note",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                report.boundary,
                report.n_sites,
                check.name,
                fmt_f64(check.residual),
                fmt_f64(check.tolerance),
                status
            );
        }
    }
    write_file(path, &out)
}

/// `comparison.csv`: per-time fidelity of every completed method against the
/// oracle.
pub fn write_comparison_csv(
    path: &Path,
    report: &tbdrive_core::propagate::ComparisonReport,
    record_every: usize,
) -> Result<(), CliError> {
    let completed: Vec<_> = report
        .entries
        .iter()
        .filter_map(|e| match &e.outcome {
            MethodOutcome::Completed { fidelity, .. } => {
                Some((e.method.label(), fidelity))
            }
            _ => None,
        })
        .collect();
    let mut out = String::from("t");
    for (label, _) in &completed {
        let _ = write!(out, ",fidelity_{label}");
    }
    out.push('\n');
    let last = report.time_grid.len() - 1;
    for idx in 0..report.time_grid.len() {
        if idx % record_every != 0 && idx != last {
            continue;
        }
        out.push_str(&fmt_f64(report.time_grid[idx]));
        for (_, fid) in &completed {
            let _ = write!(out, ",{}", fmt_f64(fid[idx]));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// `charge.csv`: time and charge expectation.
pub fn write_charge_csv(
    path: &Path,
    time_grid: &[f64],
    charge: &[f64],
    record_every: usize,
) -> Result<(), CliError> {
    let mut out = String::from("t,charge\n");
    let last = time_grid.len() - 1;
    for idx in 0..time_grid.len() {
        if idx % record_every != 0 && idx != last {
            continue;
        }
        let _ = writeln!(out, "{},{}", fmt_f64(time_grid[idx]), fmt_f64(charge[idx]));
    }
    write_file(path, &out)
}

/// Two-column `time,force` CSV for sampled drives. A header row is optional.
pub fn read_two_column_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let a = cols.next().unwrap_or("").trim();
        let b = cols
            .next()
            .ok_or_else(|| {
                CliError::config(format!(
                    "{} line {}: expected two columns",
                    path.display(),
                    lineno + 1
                ))
            })?
            .trim();
        if lineno == 0 && a.parse::<f64>().is_err() {
            continue; // header row
        }
        let t = a.parse::<f64>().map_err(|_| {
            CliError::config(format!("{} line {}: bad time `{a}`", path.display(), lineno + 1))
        })?;
        let v = b.parse::<f64>().map_err(|_| {
            CliError::config(format!("{} line {}: bad value `{b}`", path.display(), lineno + 1))
        })?;
        times.push(t);
        values.push(v);
    }
    Ok((times, values))
}

/// Parse a `states.csv` back into times and complex amplitude rows.
pub fn read_states_csv(path: &Path) -> Result<(Vec<f64>, Vec<Vec<Complex64>>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::runtime(format!("{} is empty", path.display())))?;
    let cols = header.split(',').count();
    // t + 2·dim amplitude columns + norm + mean_n
    let dim = (cols - 3) / 2;
    let mut times = Vec::new();
    let mut states = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        times.push(vals[0]);
        let amps: Vec<Complex64> = (0..dim)
            .map(|k| Complex64::new(vals[1 + 2 * k], vals[2 + 2 * k]))
            .collect();
        states.push(amps);
    }
    Ok((times, states))
}
