//! Discrete-charge mesoscopic circuit front-end.
//!
//! A quantum LC circuit with charge quantized in units of `q_e` lives on the
//! charge eigenbasis `q̂|n⟩ = n·q_e|n⟩`, with ladder operators `Q̂`, `Q̂†`
//! shifting the charge by one quantum. A pure-inductance (L-design) circuit
//! driven by a voltage `ε(t)` has the Hamiltonian
//!
//! ```text
//! Ĥ = -1/(2Lq_e²) (Q̂ + Q̂†) + q_e·ε(t)·N̂        (ħ = 1)
//! ```
//!
//! which is the tight-binding chain with `G = -1/(2Lq_e²)` and
//! `F(t) = q_e·ε(t)` on a charge basis truncated to |n| ≤ M. The mapping
//! here produces exactly those parameters so a circuit simulation and the
//! equivalent lattice simulation feed bitwise-identical matrices to the
//! integrators.

use alloc::vec::Vec;
use core::fmt;

use crate::drive::DriveProfile;
use crate::lattice::LatticeSpec;
use crate::matrix::OperatorMatrix;
use crate::observables::occupations;
use crate::propagate::PropagationResult;

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitError {
    NonPositiveInductance { inductance: f64 },
    NonPositiveCharge { electron_charge: f64 },
    NonPositiveCapacitance { capacitance: f64 },
    ZeroHalfwidth,
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitError::NonPositiveInductance { inductance } => {
                write!(f, "inductance must be positive, got {inductance}")
            }
            CircuitError::NonPositiveCharge { electron_charge } => {
                write!(f, "electron charge must be positive, got {electron_charge}")
            }
            CircuitError::NonPositiveCapacitance { capacitance } => {
                write!(f, "capacitance must be positive, got {capacitance}")
            }
            CircuitError::ZeroHalfwidth => {
                write!(f, "charge-basis halfwidth must be at least 1")
            }
        }
    }
}

impl core::error::Error for CircuitError {}

/// L-design circuit specification (optionally with a capacitor), in ħ = 1
/// units.
#[derive(Clone, Debug)]
pub struct CircuitSpec {
    inductance: f64,
    electron_charge: f64,
    drive_voltage: DriveProfile,
    basis_halfwidth: usize,
    capacitance: Option<f64>,
}

impl CircuitSpec {
    pub fn new(
        inductance: f64,
        electron_charge: f64,
        drive_voltage: DriveProfile,
        basis_halfwidth: usize,
    ) -> Result<Self, CircuitError> {
        if !inductance.is_finite() || inductance <= 0.0 {
            return Err(CircuitError::NonPositiveInductance { inductance });
        }
        if !electron_charge.is_finite() || electron_charge <= 0.0 {
            return Err(CircuitError::NonPositiveCharge { electron_charge });
        }
        if basis_halfwidth == 0 {
            return Err(CircuitError::ZeroHalfwidth);
        }
        Ok(Self {
            inductance,
            electron_charge,
            drive_voltage,
            basis_halfwidth,
            capacitance: None,
        })
    }

    /// Add a capacitor (LC design); used only by [`lc_augmentation`].
    pub fn with_capacitance(mut self, capacitance: f64) -> Result<Self, CircuitError> {
        if !capacitance.is_finite() || capacitance <= 0.0 {
            return Err(CircuitError::NonPositiveCapacitance { capacitance });
        }
        self.capacitance = Some(capacitance);
        Ok(self)
    }

    pub fn inductance(&self) -> f64 {
        self.inductance
    }

    pub fn electron_charge(&self) -> f64 {
        self.electron_charge
    }

    pub fn drive_voltage(&self) -> &DriveProfile {
        &self.drive_voltage
    }

    pub fn basis_halfwidth(&self) -> usize {
        self.basis_halfwidth
    }

    pub fn capacitance(&self) -> Option<f64> {
        self.capacitance
    }
}

/// Map an L-design circuit onto the tight-binding engine:
/// a charge window of 2M+1 states with `G = -1/(2Lq_e²)` and the force
/// profile `F(t) = q_e·ε(t)`.
pub fn circuit_to_lattice(circuit: &CircuitSpec) -> (LatticeSpec, DriveProfile) {
    let g = -1.0 / (2.0 * circuit.inductance * circuit.electron_charge * circuit.electron_charge);
    let spec = LatticeSpec::infinite_window(circuit.basis_halfwidth, g)
        .expect("halfwidth validated at construction");
    let force = circuit.drive_voltage.scaled(circuit.electron_charge);
    (spec, force)
}

/// Capacitor term of an LC design as a diagonal lattice augmentation:
/// `V(q̂) = q̂²/(2C) = q_e²·N̂²/(2C)`. Returns `None` for a pure L design.
///
/// This goes beyond the L-design propagation treatment; it is provided as a
/// one-line diagonal extension of the mapped Hamiltonian.
pub fn lc_augmentation(circuit: &CircuitSpec) -> Option<OperatorMatrix> {
    let c = circuit.capacitance?;
    let m = circuit.basis_halfwidth as i64;
    let qe = circuit.electron_charge;
    let diag: Vec<f64> = (-m..=m)
        .map(|n| {
            let q = qe * n as f64;
            q * q / (2.0 * c)
        })
        .collect();
    Some(OperatorMatrix::from_real_diag(&diag, -m))
}

/// Charge expectation `⟨q̂⟩(t) = q_e · ⟨N̂⟩(t)`, elementwise on the run's
/// mean-position series.
pub fn charge_expectation(result: &PropagationResult, electron_charge: f64) -> Vec<f64> {
    occupations(result)
        .mean_position
        .iter()
        .map(|n| electron_charge * n)
        .collect()
}
