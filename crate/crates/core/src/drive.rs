//! Driving force profiles `F(t)` and their running integral
//! `φ(t) = ∫₀ᵗ F(t′) dt′`.
//!
//! The integral enters every propagator through gauge phases, so it is
//! evaluated in closed form wherever the profile allows it: the only
//! approximation anywhere is the trapezoid rule on sampled data, which is
//! exact for the linear interpolant being integrated.

use alloc::vec::Vec;
use core::fmt;

/// Time-dependent force waveform. Evolution starts at t = 0 and `φ(0) = 0`
/// for every kind.
#[derive(Clone, Debug, PartialEq)]
pub enum DriveProfile {
    Constant {
        value: f64,
    },
    /// `A·sin(ωt + phase)`.
    Sinusoid {
        amplitude: f64,
        angular_frequency: f64,
        phase: f64,
    },
    /// `values[k]` on the k-th interval delimited by `breakpoints`
    /// (`values.len() == breakpoints.len() + 1`).
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// Linear interpolation through `(times[k], values[k])`, clamped to the
    /// end values outside the grid.
    Sampled {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DriveError {
    NegativeTime { t: f64 },
    GridNotIncreasing,
    LengthMismatch { breakpoints: usize, values: usize },
    EmptyGrid,
    NonFiniteParameter,
}

impl fmt::Display for DriveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriveError::NegativeTime { t } => {
                write!(f, "drive integral requested at t = {t} < 0; evolution starts at 0")
            }
            DriveError::GridNotIncreasing => write!(f, "drive grid must be strictly increasing"),
            DriveError::LengthMismatch { breakpoints, values } => write!(
                f,
                "piecewise drive needs breakpoints+1 values, got {breakpoints} breakpoints and {values} values"
            ),
            DriveError::EmptyGrid => write!(f, "sampled drive needs at least one point"),
            DriveError::NonFiniteParameter => write!(f, "drive parameters must be finite"),
        }
    }
}

impl core::error::Error for DriveError {}

fn all_finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl DriveProfile {
    pub fn constant(value: f64) -> Self {
        DriveProfile::Constant { value }
    }

    pub fn sinusoid(amplitude: f64, angular_frequency: f64, phase: f64) -> Self {
        DriveProfile::Sinusoid { amplitude, angular_frequency, phase }
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, DriveError> {
        if values.len() != breakpoints.len() + 1 {
            return Err(DriveError::LengthMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        if !strictly_increasing(&breakpoints) {
            return Err(DriveError::GridNotIncreasing);
        }
        if !all_finite(&breakpoints) || !all_finite(&values) {
            return Err(DriveError::NonFiniteParameter);
        }
        Ok(DriveProfile::PiecewiseConstant { breakpoints, values })
    }

    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self, DriveError> {
        if times.is_empty() {
            return Err(DriveError::EmptyGrid);
        }
        if times.len() != values.len() {
            return Err(DriveError::LengthMismatch {
                breakpoints: times.len(),
                values: values.len(),
            });
        }
        if !strictly_increasing(&times) {
            return Err(DriveError::GridNotIncreasing);
        }
        if !all_finite(&times) || !all_finite(&values) {
            return Err(DriveError::NonFiniteParameter);
        }
        Ok(DriveProfile::Sampled { times, values })
    }

    /// Force value at time `t`.
    pub fn force_at(&self, t: f64) -> f64 {
        match self {
            DriveProfile::Constant { value } => *value,
            DriveProfile::Sinusoid { amplitude, angular_frequency, phase } => {
                amplitude * libm::sin(angular_frequency * t + phase)
            }
            DriveProfile::PiecewiseConstant { breakpoints, values } => {
                let idx = breakpoints.partition_point(|&b| b <= t);
                values[idx]
            }
            DriveProfile::Sampled { times, values } => {
                if t <= times[0] {
                    return values[0];
                }
                if t >= times[times.len() - 1] {
                    return values[values.len() - 1];
                }
                let hi = times.partition_point(|&x| x <= t);
                let (t0, t1) = (times[hi - 1], times[hi]);
                let (v0, v1) = (values[hi - 1], values[hi]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Running integral `φ(t) = ∫₀ᵗ F(t′) dt′` for `t ≥ 0`.
    pub fn phi_at(&self, t: f64) -> Result<f64, DriveError> {
        if t < 0.0 {
            return Err(DriveError::NegativeTime { t });
        }
        Ok(self.phi_unchecked(t))
    }

    /// Same as [`phi_at`](Self::phi_at) without the sign check; used by the
    /// propagators after their grid is validated.
    pub(crate) fn phi_unchecked(&self, t: f64) -> f64 {
        match self {
            DriveProfile::Constant { value } => value * t,
            DriveProfile::Sinusoid { amplitude, angular_frequency, phase } => {
                let w = *angular_frequency;
                if w == 0.0 {
                    amplitude * libm::sin(*phase) * t
                } else {
                    amplitude / w * (libm::cos(*phase) - libm::cos(w * t + phase))
                }
            }
            DriveProfile::PiecewiseConstant { breakpoints, values } => {
                // walk the segment boundaries inside (0, t), then add the
                // final partial segment
                let mut total = 0.0;
                let mut lo = 0.0;
                for (k, &b) in breakpoints.iter().enumerate() {
                    if b <= lo {
                        continue;
                    }
                    if b >= t {
                        break;
                    }
                    total += values[k] * (b - lo);
                    lo = b;
                }
                let idx = breakpoints.partition_point(|&b| b <= lo);
                total + values[idx] * (t - lo)
            }
            DriveProfile::Sampled { times, values } => integrate_clamped_linear(times, values, t),
        }
    }

    /// Copy with the force multiplied by `factor`; `φ` scales with it.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            DriveProfile::Constant { value } => DriveProfile::Constant { value: value * factor },
            DriveProfile::Sinusoid { amplitude, angular_frequency, phase } => {
                DriveProfile::Sinusoid {
                    amplitude: amplitude * factor,
                    angular_frequency: *angular_frequency,
                    phase: *phase,
                }
            }
            DriveProfile::PiecewiseConstant { breakpoints, values } => {
                DriveProfile::PiecewiseConstant {
                    breakpoints: breakpoints.clone(),
                    values: values.iter().map(|v| v * factor).collect(),
                }
            }
            DriveProfile::Sampled { times, values } => DriveProfile::Sampled {
                times: times.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
        }
    }
}

/// Exact integral over [0, t] of the clamp-extended linear interpolant.
fn integrate_clamped_linear(times: &[f64], values: &[f64], t: f64) -> f64 {
    let n = times.len();
    let mut total = 0.0;
    // constant head: [0, times[0]] at values[0], if the grid starts after 0
    if times[0] > 0.0 {
        let hi = t.min(times[0]);
        total += values[0] * hi;
        if t <= times[0] {
            return total;
        }
    }
    // interior trapezoids, clipped to [0, t]
    for k in 0..n.saturating_sub(1) {
        let (t0, t1) = (times[k], times[k + 1]);
        let lo = t0.max(0.0);
        let hi = t1.min(t);
        if hi <= lo {
            if t0 >= t {
                break;
            }
            continue;
        }
        let slope = (values[k + 1] - values[k]) / (t1 - t0);
        let v_lo = values[k] + slope * (lo - t0);
        let v_hi = values[k] + slope * (hi - t0);
        total += 0.5 * (v_lo + v_hi) * (hi - lo);
    }
    // constant tail beyond the last sample
    let t_last = times[n - 1];
    if t > t_last {
        total += values[n - 1] * (t - t_last.max(0.0));
    }
    total
}
