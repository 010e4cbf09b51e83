//! Run configuration: a flat, sectioned key-value text format.
//!
//! ```text
//! [lattice]                     # or [circuit], never both
//! n_sites = 4
//! boundary = dirichlet          # dirichlet | periodic | infinite_window
//! coupling = 0.1
//! # halfwidth = 40              # required for infinite_window instead of n_sites
//!
//! [drive]
//! kind = constant               # constant | sinusoid | piecewise | sampled
//! value = 1.0
//!
//! [initial_state]
//! site = 2                      # or: amplitudes = re,im, re,im, ...
//!
//! [time]
//! t_final = 5.0
//! dt = 0.001
//!
//! [method]
//! kind = series                 # oracle | su2 | series | all
//! order = 3
//! ```
//!
//! All physics parameters are dimensionless (ħ = 1). Amplitude lists are
//! normalized on input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use tbdrive_core::circuit::CircuitSpec;
use tbdrive_core::drive::DriveProfile;
use tbdrive_core::lattice::LatticeSpec;
use tbdrive_core::Complex64;

use crate::csvio;
use crate::error::CliError;

type Section = BTreeMap<String, String>;

#[derive(Debug, Clone)]
pub struct RawConfig {
    sections: BTreeMap<String, Section>,
    base_dir: PathBuf,
}

pub fn parse_sections(text: &str, base_dir: &Path) -> Result<RawConfig, CliError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| {
                    CliError::config(format!("line {}: unterminated section header", lineno + 1))
                })?
                .trim()
                .to_string();
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let section = current.as_ref().ok_or_else(|| {
            CliError::config(format!("line {}: key outside any [section]", lineno + 1))
        })?;
        sections
            .get_mut(section)
            .expect("section entry created above")
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(RawConfig { sections, base_dir: base_dir.to_path_buf() })
}

pub fn parse_file(path: &Path) -> Result<RawConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    parse_sections(&text, &base)
}

fn get_f64(section: &Section, key: &str, where_: &str) -> Result<f64, CliError> {
    let raw = section
        .get(key)
        .ok_or_else(|| CliError::config(format!("[{where_}] is missing `{key}`")))?;
    raw.parse::<f64>()
        .map_err(|_| CliError::config(format!("[{where_}] {key} = {raw}: not a number")))
}

fn get_usize(section: &Section, key: &str, where_: &str) -> Result<usize, CliError> {
    let raw = section
        .get(key)
        .ok_or_else(|| CliError::config(format!("[{where_}] is missing `{key}`")))?;
    raw.parse::<usize>()
        .map_err(|_| CliError::config(format!("[{where_}] {key} = {raw}: not a nonnegative integer")))
}

fn parse_f64_list(raw: &str, where_: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|tok| tok.trim())
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| CliError::config(format!("[{where_}]: `{tok}` is not a number")))
        })
        .collect()
}

/// Which physical system the run describes.
#[derive(Debug, Clone)]
pub enum SystemBlock {
    Lattice(LatticeSpec),
    Circuit(CircuitSpec),
}

#[derive(Debug, Clone)]
pub enum InitialState {
    Site(i64),
    Amplitudes(Vec<Complex64>),
}

#[derive(Debug, Clone, Copy)]
pub struct TimeBlock {
    pub t_final: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub enum MethodChoice {
    Oracle,
    Su2,
    Series { order: usize },
    All { orders: Vec<usize> },
}

impl MethodChoice {
    pub fn label(&self) -> String {
        match self {
            MethodChoice::Oracle => "oracle".into(),
            MethodChoice::Su2 => "su2".into(),
            MethodChoice::Series { order } => format!("series(order={order})"),
            MethodChoice::All { .. } => "all".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: SystemBlock,
    pub drive: DriveProfile,
    pub initial: InitialState,
    pub time: TimeBlock,
    pub method: MethodChoice,
    pub record_every: usize,
}

impl RawConfig {
    fn section(&self, name: &str) -> Option<&Section> {
        self.sections.get(name)
    }

    pub fn has_section(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }

    /// The `[lattice]` or `[circuit]` block; exactly one must be present.
    pub fn system(&self) -> Result<SystemBlock, CliError> {
        match (self.section("lattice"), self.section("circuit")) {
            (Some(_), Some(_)) => Err(CliError::config(
                "config has both [lattice] and [circuit]; exactly one is allowed",
            )),
            (None, None) => {
                Err(CliError::config("config needs a [lattice] or [circuit] section"))
            }
            (Some(lat), None) => Ok(SystemBlock::Lattice(self.lattice_from(lat)?)),
            (None, Some(cir)) => Ok(SystemBlock::Circuit(self.circuit_from(cir)?)),
        }
    }

    fn lattice_from(&self, section: &Section) -> Result<LatticeSpec, CliError> {
        let boundary = section
            .get("boundary")
            .map(|s| s.as_str())
            .unwrap_or("dirichlet");
        let coupling = get_f64(section, "coupling", "lattice")?;
        let spec = match boundary {
            "dirichlet" => {
                LatticeSpec::dirichlet(get_usize(section, "n_sites", "lattice")?, coupling)
            }
            "periodic" => {
                LatticeSpec::periodic(get_usize(section, "n_sites", "lattice")?, coupling)
            }
            "infinite_window" => LatticeSpec::infinite_window(
                get_usize(section, "halfwidth", "lattice")?,
                coupling,
            ),
            other => {
                return Err(CliError::config(format!(
                    "[lattice] boundary = {other}: expected dirichlet, periodic, or infinite_window"
                )))
            }
        };
        spec.map_err(|e| CliError::config(format!("[lattice]: {e}")))
    }

    fn circuit_from(&self, section: &Section) -> Result<CircuitSpec, CliError> {
        let inductance = get_f64(section, "inductance", "circuit")?;
        let electron_charge = get_f64(section, "electron_charge", "circuit")?;
        let halfwidth = get_usize(section, "basis_halfwidth", "circuit")?;
        let drive = self.drive()?;
        let mut circuit = CircuitSpec::new(inductance, electron_charge, drive, halfwidth)
            .map_err(|e| CliError::config(format!("[circuit]: {e}")))?;
        if section.contains_key("capacitance") {
            circuit = circuit
                .with_capacitance(get_f64(section, "capacitance", "circuit")?)
                .map_err(|e| CliError::config(format!("[circuit]: {e}")))?;
        }
        Ok(circuit)
    }

    /// The `[drive]` block as a force profile (for a circuit this is the
    /// voltage ε(t); the q_e scaling happens in the mapping).
    pub fn drive(&self) -> Result<DriveProfile, CliError> {
        let section = self
            .section("drive")
            .ok_or_else(|| CliError::config("config needs a [drive] section"))?;
        let kind = section
            .get("kind")
            .ok_or_else(|| CliError::config("[drive] is missing `kind`"))?;
        match kind.as_str() {
            "constant" => Ok(DriveProfile::constant(get_f64(section, "value", "drive")?)),
            "sinusoid" => Ok(DriveProfile::sinusoid(
                get_f64(section, "amplitude", "drive")?,
                get_f64(section, "angular_frequency", "drive")?,
                section
                    .get("phase")
                    .map(|s| {
                        s.parse::<f64>().map_err(|_| {
                            CliError::config(format!("[drive] phase = {s}: not a number"))
                        })
                    })
                    .transpose()?
                    .unwrap_or(0.0),
            )),
            "piecewise" => {
                let breaks = parse_f64_list(
                    section.get("breakpoints").map(|s| s.as_str()).unwrap_or(""),
                    "drive",
                )?;
                let values = parse_f64_list(
                    section
                        .get("values")
                        .ok_or_else(|| CliError::config("[drive] is missing `values`"))?,
                    "drive",
                )?;
                DriveProfile::piecewise_constant(breaks, values)
                    .map_err(|e| CliError::config(format!("[drive]: {e}")))
            }
            "sampled" => {
                let rel = section
                    .get("csv")
                    .ok_or_else(|| CliError::config("[drive] sampled kind needs `csv = path`"))?;
                let path = self.base_dir.join(rel);
                let (times, values) = csvio::read_two_column_csv(&path)?;
                DriveProfile::sampled(times, values)
                    .map_err(|e| CliError::config(format!("[drive] {}: {e}", path.display())))
            }
            other => Err(CliError::config(format!(
                "[drive] kind = {other}: expected constant, sinusoid, piecewise, or sampled"
            ))),
        }
    }

    pub fn initial_state(&self) -> Result<InitialState, CliError> {
        let section = self
            .section("initial_state")
            .ok_or_else(|| CliError::config("config needs an [initial_state] section"))?;
        match (section.get("site"), section.get("amplitudes")) {
            (Some(_), Some(_)) => Err(CliError::config(
                "[initial_state] has both `site` and `amplitudes`",
            )),
            (Some(raw), None) => {
                let site = raw.parse::<i64>().map_err(|_| {
                    CliError::config(format!("[initial_state] site = {raw}: not an integer"))
                })?;
                Ok(InitialState::Site(site))
            }
            (None, Some(raw)) => {
                let flat = parse_f64_list(raw, "initial_state")?;
                if flat.len() % 2 != 0 || flat.is_empty() {
                    return Err(CliError::config(
                        "[initial_state] amplitudes must be re,im pairs",
                    ));
                }
                let amps: Vec<Complex64> =
                    flat.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
                Ok(InitialState::Amplitudes(amps))
            }
            (None, None) => Err(CliError::config(
                "[initial_state] needs `site` or `amplitudes`",
            )),
        }
    }

    pub fn time(&self) -> Result<TimeBlock, CliError> {
        let section = self
            .section("time")
            .ok_or_else(|| CliError::config("config needs a [time] section"))?;
        Ok(TimeBlock {
            t_final: get_f64(section, "t_final", "time")?,
            dt: get_f64(section, "dt", "time")?,
        })
    }

    pub fn method(&self) -> Result<MethodChoice, CliError> {
        let section = match self.section("method") {
            Some(s) => s,
            None => return Ok(MethodChoice::Oracle),
        };
        let kind = section.get("kind").map(|s| s.as_str()).unwrap_or("oracle");
        match kind {
            "oracle" => Ok(MethodChoice::Oracle),
            "su2" => Ok(MethodChoice::Su2),
            "series" => Ok(MethodChoice::Series {
                order: get_usize(section, "order", "method")?,
            }),
            "all" => {
                let orders = match section.get("orders") {
                    Some(raw) => parse_f64_list(raw, "method")?
                        .into_iter()
                        .map(|v| v as usize)
                        .collect(),
                    None => vec![0, 1, 2, 3],
                };
                Ok(MethodChoice::All { orders })
            }
            other => Err(CliError::config(format!(
                "[method] kind = {other}: expected oracle, su2, series, or all"
            ))),
        }
    }

    pub fn record_every(&self) -> Result<usize, CliError> {
        match self.section("output").and_then(|s| s.get("record_every")) {
            None => Ok(1),
            Some(raw) => {
                let v = raw.parse::<usize>().map_err(|_| {
                    CliError::config(format!("[output] record_every = {raw}: not an integer"))
                })?;
                if v == 0 {
                    return Err(CliError::config("[output] record_every must be at least 1"));
                }
                Ok(v)
            }
        }
    }

    /// Full run configuration for simulate/compare/circuit.
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        Ok(RunConfig {
            system: self.system()?,
            drive: self.drive()?,
            initial: self.initial_state()?,
            time: self.time()?,
            method: self.method()?,
            record_every: self.record_every()?,
        })
    }
}

impl RunConfig {
    pub fn override_dt(&mut self, dt: Option<f64>) {
        if let Some(dt) = dt {
            self.time.dt = dt;
        }
    }

    pub fn override_t_final(&mut self, t_final: Option<f64>) {
        if let Some(t) = t_final {
            self.time.t_final = t;
        }
    }

    pub fn override_order(&mut self, order: Option<usize>) {
        if let Some(order) = order {
            if let MethodChoice::Series { order: o } = &mut self.method {
                *o = order;
            } else if let MethodChoice::All { orders } = &mut self.method {
                *orders = (0..=order).collect();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn raw(text: &str) -> RawConfig {
        parse_sections(text, Path::new(".")).unwrap()
    }

    #[test]
    fn parses_sections_comments_and_values() {
        let cfg = raw("# top comment\n[lattice]\nn_sites = 4 # trailing\ncoupling = 0.1\nboundary = dirichlet\n\n[drive]\nkind = constant\nvalue = 2.0\n");
        match cfg.system().unwrap() {
            SystemBlock::Lattice(spec) => {
                assert_eq!(spec.dim(), 4);
                assert_eq!(spec.coupling(), 0.1);
            }
            _ => panic!("expected lattice"),
        }
        assert_eq!(cfg.drive().unwrap().force_at(3.0), 2.0);
    }

    #[test]
    fn rejects_both_system_blocks() {
        let cfg = raw("[lattice]\nn_sites = 2\ncoupling = 1.0\n[circuit]\ninductance = 1.0\nelectron_charge = 1.0\nbasis_halfwidth = 2\n[drive]\nkind = constant\nvalue = 0.0\n");
        let err = cfg.system().unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("exactly one"));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_sections("[lattice\nn=2", Path::new(".")).is_err());
        assert!(parse_sections("key = 1", Path::new(".")).is_err());
        assert!(parse_sections("[s]\nnot a pair", Path::new(".")).is_err());
    }

    #[test]
    fn amplitude_lists_parse_in_pairs() {
        let cfg = raw("[initial_state]\namplitudes = 0.6,0, 0,0.8\n");
        match cfg.initial_state().unwrap() {
            InitialState::Amplitudes(a) => {
                assert_eq!(a.len(), 2);
                assert_eq!(a[0].re, 0.6);
                assert_eq!(a[1].im, 0.8);
            }
            _ => panic!("expected amplitudes"),
        }
        let bad = raw("[initial_state]\namplitudes = 1,0,1\n");
        assert!(bad.initial_state().is_err());
        let both = raw("[initial_state]\nsite = 1\namplitudes = 1,0\n");
        assert!(both.initial_state().is_err());
    }

    #[test]
    fn method_kinds_and_orders() {
        let cfg = raw("[method]\nkind = series\norder = 2\n");
        assert!(matches!(cfg.method().unwrap(), MethodChoice::Series { order: 2 }));
        let cfg = raw("[method]\nkind = all\norders = 0, 2\n");
        match cfg.method().unwrap() {
            MethodChoice::All { orders } => assert_eq!(orders, vec![0, 2]),
            _ => panic!(),
        }
        let cfg = raw("");
        assert!(matches!(cfg.method().unwrap(), MethodChoice::Oracle));
        let cfg = raw("[method]\nkind = quantum-leap\n");
        assert!(cfg.method().is_err());
    }

    #[test]
    fn piecewise_drive_parses() {
        let cfg = raw("[drive]\nkind = piecewise\nbreakpoints = 1.0, 2.0\nvalues = 0.5, 1.0, 1.5\n");
        let d = cfg.drive().unwrap();
        assert_eq!(d.force_at(2.5), 1.5);
        assert_eq!(d.force_at(0.0), 0.5);
    }

    #[test]
    fn infinite_window_lattice_needs_halfwidth() {
        let cfg = raw("[lattice]\nboundary = infinite_window\nhalfwidth = 3\ncoupling = -0.5\n");
        match cfg.system().unwrap() {
            SystemBlock::Lattice(spec) => {
                assert_eq!(spec.dim(), 7);
                assert_eq!(spec.basis_offset(), -3);
            }
            _ => panic!(),
        }
        let missing = raw("[lattice]\nboundary = infinite_window\ncoupling = -0.5\n");
        assert!(missing.system().is_err());
    }
}
