//! `tbdrive` — config-driven simulation of the driven tight-binding chain.
//!
//! ```text
//! tbdrive simulate      --config run.cfg --out dir [--dt X] [--t-final X] [--order K]
//! tbdrive compare       --config run.cfg --out dir [--dt X] [--t-final X] [--order K]
//! tbdrive algebra-check --n-min 2 --n-max 12 --boundary all --out dir
//! tbdrive spectrum      --config run.cfg --out dir
//! tbdrive circuit       --config run.cfg --out dir [--dt X] [--t-final X] [--order K]
//! ```
//!
//! Exit codes: 0 success, 1 runtime or certification failure, 2 config or
//! usage error, 3 method inapplicable. Identical invocations produce
//! byte-identical output files.







use std::path::PathBuf;
use std::process::ExitCode;

use tbdrive::commands::{self, AlgebraArgs, Overrides};
use tbdrive::error::CliError;

const USAGE: &str = "\
usage: tbdrive <subcommand> [flags]

subcommands:
  simulate       run the configured method, write states/observables/report
  compare        run the oracle plus every applicable method and compare
  algebra-check  certify the operator algebra identities over a site range
  spectrum       dump the tilted eigensystem (omega, lambda, d, vectors)
  circuit        map an L-design circuit onto the chain and simulate it

flags:
  --config <path>    run configuration file (simulate/compare/spectrum/circuit)
  --out <dir>        output directory (all subcommands)
  --dt <x>           override [time] dt
  --t-final <x>      override [time] t_final
  --order <k>        override [method] order
  --n-min <n>        algebra-check: first chain size (default 2)
  --n-max <n>        algebra-check: last chain size (default 12)
  --boundary <b>     algebra-check: dirichlet | periodic | infinite_window | all
";

struct Args {
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    overrides: Overrides,
    n_min: usize,
    n_max: usize,
    boundary: String,
}

fn parse_flags(rest: &[String]) -> Result<Args, CliError> {
    let mut args = Args {
        config: None,
        out: None,
        overrides: Overrides { dt: None, t_final: None, order: None },
        n_min: 2,
        n_max: 12,
        boundary: String::from("all"),
    };
    let mut it = rest.iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| -> Result<String, CliError> {
            it.next()
                .cloned()
                .ok_or_else(|| CliError::config(format!("{name} needs a value")))
        };
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(value("--config")?)),
            "--out" => args.out = Some(PathBuf::from(value("--out")?)),
            "--dt" => {
                args.overrides.dt = Some(parse_num(&value("--dt")?, "--dt")?);
            }
            "--t-final" => {
                args.overrides.t_final = Some(parse_num(&value("--t-final")?, "--t-final")?);
            }
            "--order" => {
                args.overrides.order = Some(parse_int(&value("--order")?, "--order")?);
            }
            "--n-min" => args.n_min = parse_int(&value("--n-min")?, "--n-min")?,
            "--n-max" => args.n_max = parse_int(&value("--n-max")?, "--n-max")?,
            "--boundary" => args.boundary = value("--boundary")?,
            other => {
                return Err(CliError::config(format!("unknown flag `{other}`")));
            }
        }
    }
    Ok(args)
}

fn parse_num(raw: &str, flag: &str) -> Result<f64, CliError> {
    raw.parse::<f64>()
        .map_err(|_| CliError::config(format!("{flag} = {raw}: not a number")))
}

fn parse_int(raw: &str, flag: &str) -> Result<usize, CliError> {
    raw.parse::<usize>()
        .map_err(|_| CliError::config(format!("{flag} = {raw}: not a nonnegative integer")))
}

fn require_config(args: &Args) -> Result<&PathBuf, CliError> {
    args.config
        .as_ref()
        .ok_or_else(|| CliError::config("missing --config <path>"))
}

fn require_out(args: &Args) -> Result<&PathBuf, CliError> {
    args.out
        .as_ref()
        .ok_or_else(|| CliError::config("missing --out <dir>"))
}

fn dispatch() -> Result<(), CliError> {
    let argv: Vec<String> = std::env::args().collect();
    let sub = match argv.get(1) {
        Some(s) => s.as_str(),
        None => {
            return Err(CliError::config("missing subcommand; try `tbdrive --help`"));
        }
    };
    if sub == "--help" || sub == "-h" || sub == "help" {
        print!("{USAGE}");
        return Ok(());
    }
    let args = parse_flags(&argv[2..])?;
    match sub {
        "simulate" => commands::cmd_simulate(require_config(&args)?, require_out(&args)?, &args.overrides),
        "compare" => commands::cmd_compare(require_config(&args)?, require_out(&args)?, &args.overrides),
        "spectrum" => commands::cmd_spectrum(require_config(&args)?, require_out(&args)?),
        "circuit" => commands::cmd_circuit(require_config(&args)?, require_out(&args)?, &args.overrides),
        "algebra-check" => {
            let alg = AlgebraArgs {
                n_min: args.n_min,
                n_max: args.n_max,
                boundary: args.boundary.clone(),
            };
            commands::cmd_algebra_check(&alg, require_out(&args)?)
        }
        other => Err(CliError::config(format!(
            "unknown subcommand `{other}`; try `tbdrive --help`"
        ))),
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
