//! Subcommand implementations. Every command writes its files under the
//! `--out` directory and prints a short summary to stdout; timing data never
//! reaches the files.

use std::path::Path;
use std::time::Instant;

use tbdrive_core::algebra::{certify_algebra, CertificationReport};
use tbdrive_core::circuit::{charge_expectation, circuit_to_lattice};
use tbdrive_core::drive::DriveProfile;
use tbdrive_core::lattice::{site_state, LatticeSpec};
use tbdrive_core::matrix::StateVector;
use tbdrive_core::observables::occupations;
use tbdrive_core::propagate::{
    compare_methods, oracle_propagate, series_propagate, su2_propagate, tilted_eigensystem,
    Clock, PropagationResult,
};

use crate::config::{InitialState, MethodChoice, RunConfig, SystemBlock};
use crate::csvio;
use crate::error::CliError;
use crate::report;

struct StdClock(Instant);

impl Clock for StdClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

pub struct Overrides {
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub order: Option<usize>,
}

fn resolve_system(config: &RunConfig) -> (LatticeSpec, DriveProfile, Option<f64>) {
    match &config.system {
        SystemBlock::Lattice(spec) => (*spec, config.drive.clone(), None),
        SystemBlock::Circuit(circuit) => {
            let (spec, force) = circuit_to_lattice(circuit);
            (spec, force, Some(circuit.electron_charge()))
        }
    }
}

fn resolve_initial(spec: &LatticeSpec, initial: &InitialState) -> Result<StateVector, CliError> {
    match initial {
        InitialState::Site(site) => site_state(spec, *site)
            .map_err(|e| CliError::config(format!("[initial_state]: {e}"))),
        InitialState::Amplitudes(amps) => {
            if amps.len() != spec.dim() {
                return Err(CliError::config(format!(
                    "[initial_state] has {} amplitudes but the basis has {} sites",
                    amps.len(),
                    spec.dim()
                )));
            }
            let state = StateVector::from_amplitudes(amps.clone());
            if state.norm() == 0.0 {
                return Err(CliError::config("[initial_state] amplitudes are all zero"));
            }
            Ok(state.normalized())
        }
    }
}

fn run_method(
    method: &MethodChoice,
    spec: &LatticeSpec,
    drive: &DriveProfile,
    psi0: &StateVector,
    t_final: f64,
    dt: f64,
) -> Result<PropagationResult, CliError> {
    let result = match method {
        MethodChoice::Oracle => oracle_propagate(spec, drive, psi0, t_final, dt),
        MethodChoice::Su2 => su2_propagate(spec, drive, psi0, t_final, dt),
        MethodChoice::Series { order } => {
            series_propagate(spec, drive, psi0, t_final, dt, *order)
        }
        MethodChoice::All { .. } => {
            return Err(CliError::config(
                "method `all` is for the compare subcommand; pick oracle, su2, or series",
            ))
        }
    };
    result.map_err(CliError::from_propagate)
}

fn write_run_outputs(
    out_dir: &Path,
    command: &str,
    spec: &LatticeSpec,
    drive: &DriveProfile,
    config: &RunConfig,
    result: &PropagationResult,
    extra_report: &str,
) -> Result<(), CliError> {
    csvio::write_states_csv(&out_dir.join("states.csv"), result, config.record_every)?;
    let obs = occupations(result);
    csvio::write_observables_csv(&out_dir.join("observables.csv"), &obs, config.record_every)?;

    let mut rep = String::new();
    report::run_header(
        &mut rep,
        command,
        spec,
        drive,
        config.time.t_final,
        config.time.dt,
        &config.method.label(),
    );
    report::run_diagnostics(&mut rep, result);
    rep.push_str(extra_report);
    std::fs::write(out_dir.join("report.txt"), rep)
        .map_err(|e| CliError::io("writing report.txt", e))?;
    Ok(())
}

pub fn cmd_simulate(
    config_path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), CliError> {
    let raw = crate::config::parse_file(config_path)?;
    let mut config = raw.run_config()?;
    apply_overrides(&mut config, overrides);
    let (spec, drive, _) = resolve_system(&config);
    let psi0 = resolve_initial(&spec, &config.initial)?;
    let result = run_method(
        &config.method,
        &spec,
        &drive,
        &psi0,
        config.time.t_final,
        config.time.dt,
    )?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io("creating output dir", e))?;
    write_run_outputs(out_dir, "simulate", &spec, &drive, &config, &result, "")?;
    println!(
        "simulate: {} steps written to {}",
        result.time_grid.len(),
        out_dir.display()
    );
    Ok(())
}

pub fn cmd_circuit(
    config_path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), CliError> {
    let raw = crate::config::parse_file(config_path)?;
    if !raw.has_section("circuit") {
        return Err(CliError::config("the circuit subcommand needs a [circuit] section"));
    }
    let mut config = raw.run_config()?;
    apply_overrides(&mut config, overrides);
    let (spec, drive, electron_charge) = resolve_system(&config);
    let qe = electron_charge.expect("circuit block present");
    let psi0 = resolve_initial(&spec, &config.initial)?;
    let result = run_method(
        &config.method,
        &spec,
        &drive,
        &psi0,
        config.time.t_final,
        config.time.dt,
    )?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io("creating output dir", e))?;

    let mut mapping_note = format!(
        "circuit mapping: G = {}, F(t) = q_e*eps(t) with q_e = {}\n",
        spec.coupling(),
        qe
    );
    if let SystemBlock::Circuit(c) = &config.system {
        if c.capacitance().is_some() {
            mapping_note.push_str(
                "capacitance is set: the quadratic charge term q_e^2*N^2/(2C) is exposed as a \
                 diagonal augmentation only; this propagation is pure L-design\n",
            );
        }
    }
    write_run_outputs(out_dir, "circuit", &spec, &drive, &config, &result, &mapping_note)?;
    let charge = charge_expectation(&result, qe);
    csvio::write_charge_csv(
        &out_dir.join("charge.csv"),
        &result.time_grid,
        &charge,
        config.record_every,
    )?;
    println!(
        "circuit: {} steps written to {} (G = {})",
        result.time_grid.len(),
        out_dir.display(),
        spec.coupling()
    );
    Ok(())
}

pub fn cmd_compare(
    config_path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), CliError> {
    let raw = crate::config::parse_file(config_path)?;
    let mut config = raw.run_config()?;
    apply_overrides(&mut config, overrides);
    let (spec, drive, _) = resolve_system(&config);
    let psi0 = resolve_initial(&spec, &config.initial)?;
    let orders: Vec<usize> = match &config.method {
        MethodChoice::All { orders } => orders.clone(),
        MethodChoice::Series { order } => vec![*order],
        _ => vec![0, 1, 2, 3],
    };

    let clock = StdClock(Instant::now());
    let cmp = compare_methods(
        &spec,
        &drive,
        &psi0,
        config.time.t_final,
        config.time.dt,
        &orders,
        &clock,
    )
    .map_err(CliError::from_propagate)?;

    // the oracle run again for the states file: same grid, same values
    let oracle = oracle_propagate(&spec, &drive, &psi0, config.time.t_final, config.time.dt)
        .map_err(CliError::from_propagate)?;

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io("creating output dir", e))?;
    csvio::write_states_csv(&out_dir.join("states.csv"), &oracle, config.record_every)?;
    let obs = occupations(&oracle);
    csvio::write_observables_csv(&out_dir.join("observables.csv"), &obs, config.record_every)?;
    csvio::write_comparison_csv(&out_dir.join("comparison.csv"), &cmp, config.record_every)?;

    let mut rep = String::new();
    report::run_header(
        &mut rep,
        "compare",
        &spec,
        &drive,
        config.time.t_final,
        config.time.dt,
        "all",
    );
    rep.push_str(&report::comparison_table(&cmp));
    std::fs::write(out_dir.join("report.txt"), &rep)
        .map_err(|e| CliError::io("writing report.txt", e))?;

    print!("{}", report::comparison_table(&cmp));
    println!("runtimes:");
    print!("{}", report::runtime_table(&cmp));
    Ok(())
}

pub fn cmd_spectrum(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let raw = crate::config::parse_file(config_path)?;
    let system = raw.system()?;
    let spec = match system {
        SystemBlock::Lattice(spec) => spec,
        SystemBlock::Circuit(_) => {
            return Err(CliError::config(
                "spectrum works on a [lattice] block (the tilted eigenbasis is open-chain)",
            ))
        }
    };
    let eig = tilted_eigensystem(&spec).map_err(CliError::from_propagate)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io("creating output dir", e))?;
    csvio::write_spectrum_csv(&out_dir.join("spectrum.csv"), &eig)?;

    let mut rep = String::new();
    rep.push_str("tbdrive spectrum report\n");
    rep.push_str(&format!("boundary: {}\n", report::describe_boundary(&spec)));
    rep.push_str(&format!("coupling: G = {}\n", spec.coupling()));
    rep.push_str("eigenvalues are drive-independent: lambda_m = 2G cos(m pi/(N+1))\n");
    for (m, lam) in eig.eigenvalues().iter().enumerate() {
        rep.push_str(&format!("lambda_{} = {:.12e}\n", m + 1, lam));
    }
    std::fs::write(out_dir.join("report.txt"), &rep)
        .map_err(|e| CliError::io("writing report.txt", e))?;
    println!("spectrum: {} modes written to {}", eig.n_sites(), out_dir.display());
    Ok(())
}

pub struct AlgebraArgs {
    pub n_min: usize,
    pub n_max: usize,
    pub boundary: String,
}

pub fn cmd_algebra_check(args: &AlgebraArgs, out_dir: &Path) -> Result<(), CliError> {
    if args.n_min > args.n_max {
        return Err(CliError::config(format!(
            "n-min {} exceeds n-max {}",
            args.n_min, args.n_max
        )));
    }
    if args.n_min < 2 {
        return Err(CliError::config("n-min must be at least 2"));
    }

    let mut reports: Vec<CertificationReport> = Vec::new();
    for n in args.n_min..=args.n_max {
        match args.boundary.as_str() {
            "dirichlet" => reports.push(certify_algebra(
                &LatticeSpec::dirichlet(n, 1.0).map_err(|e| CliError::config(format!("{e}")))?,
            )),
            "periodic" => reports.push(certify_algebra(
                &LatticeSpec::periodic(n, 1.0).map_err(|e| CliError::config(format!("{e}")))?,
            )),
            // for windows the range is interpreted as the halfwidth
            "infinite_window" => reports.push(certify_algebra(
                &LatticeSpec::infinite_window(n, 1.0)
                    .map_err(|e| CliError::config(format!("{e}")))?,
            )),
            "all" => {
                reports.push(certify_algebra(&LatticeSpec::dirichlet(n, 1.0).unwrap()));
                reports.push(certify_algebra(&LatticeSpec::periodic(n, 1.0).unwrap()));
                reports.push(certify_algebra(&LatticeSpec::infinite_window(n, 1.0).unwrap()));
            }
            other => {
                return Err(CliError::config(format!(
                    "boundary = {other}: expected dirichlet, periodic, infinite_window, or all"
                )))
            }
        }
    }

    let table = report::certification_table(&reports);
    print!("{table}");
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io("creating output dir", e))?;
    csvio::write_certification_csv(&out_dir.join("certification.csv"), &reports)?;
    std::fs::write(out_dir.join("report.txt"), &table)
        .map_err(|e| CliError::io("writing report.txt", e))?;

    let failed: Vec<&CertificationReport> =
        reports.iter().filter(|r| !r.all_passed()).collect();
    if !failed.is_empty() {
        return Err(CliError::runtime(format!(
            "certification failed for {} chain(s); see {}",
            failed.len(),
            out_dir.join("certification.csv").display()
        )));
    }
    let max = reports.iter().fold(0.0_f64, |m, r| m.max(r.max_residual()));
    println!("all identities pass; max residual {max:.3e}");
    Ok(())
}

fn apply_overrides(config: &mut RunConfig, overrides: &Overrides) {
    config.override_dt(overrides.dt);
    config.override_t_final(overrides.t_final);
    config.override_order(overrides.order);
}
