//! Physical observables extracted from propagation results: per-site
//! occupations, mean position, inter-run fidelity, and a Bloch-period
//! estimator for the mean-position series.

use alloc::vec::Vec;
use core::fmt;

use crate::propagate::PropagationResult;

/// Per-time observable table derived from a propagation run.
#[derive(Clone, Debug)]
pub struct ObservableSeries {
    pub time_grid: Vec<f64>,
    /// Site label per column of `occupations`.
    pub site_indices: Vec<i64>,
    /// `|⟨n|ψ(t)⟩|²` per site per time.
    pub occupations: Vec<Vec<f64>>,
    /// `⟨N̂⟩(t) = Σ_n n·p_n(t)`.
    pub mean_position: Vec<f64>,
    /// `‖ψ(t)‖`.
    pub norm: Vec<f64>,
    /// `|⟨ψ_ref(t)|ψ(t)⟩|` against a reference run, when attached.
    pub fidelity_vs: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObservableError {
    GridMismatch,
}

impl fmt::Display for ObservableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableError::GridMismatch => {
                write!(f, "results live on different time grids")
            }
        }
    }
}

impl core::error::Error for ObservableError {}

/// Occupation probabilities, mean position, and norm per grid time.
pub fn occupations(result: &PropagationResult) -> ObservableSeries {
    let dim = result.states.first().map(|s| s.dim()).unwrap_or(0);
    let site_indices: Vec<i64> =
        (0..dim as i64).map(|row| result.basis_offset + row).collect();
    let mut occ = Vec::with_capacity(result.states.len());
    let mut mean = Vec::with_capacity(result.states.len());
    let mut norm = Vec::with_capacity(result.states.len());
    for state in &result.states {
        let p: Vec<f64> = state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        let m: f64 =
            p.iter().zip(&site_indices).map(|(pn, site)| pn * *site as f64).sum();
        occ.push(p);
        mean.push(m);
        norm.push(state.norm());
    }
    ObservableSeries {
        time_grid: result.time_grid.clone(),
        site_indices,
        occupations: occ,
        mean_position: mean,
        norm,
        fidelity_vs: None,
    }
}

/// `|⟨ψ_a(t)|ψ_b(t)⟩|` per grid time. The runs must share a time grid.
pub fn fidelity(
    a: &PropagationResult,
    b: &PropagationResult,
) -> Result<Vec<f64>, ObservableError> {
    if a.time_grid.len() != b.time_grid.len() {
        return Err(ObservableError::GridMismatch);
    }
    for (ta, tb) in a.time_grid.iter().zip(&b.time_grid) {
        if libm::fabs(ta - tb) > 1e-12 {
            return Err(ObservableError::GridMismatch);
        }
    }
    Ok(a.states.iter().zip(&b.states).map(|(x, y)| x.inner(y).norm()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum PeriodError {
    /// The series is constant to within noise; nothing oscillates.
    NoOscillation,
    /// The series does not cover enough of a cycle to locate a period.
    InsufficientSpan,
}

impl fmt::Display for PeriodError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodError::NoOscillation => write!(f, "no oscillation"),
            PeriodError::InsufficientSpan => {
                write!(f, "insufficient span: series shorter than two candidate periods")
            }
        }
    }
}

impl core::error::Error for PeriodError {}

/// Dominant period of the mean-position series.
///
/// Autocorrelation of the mean-centered signal, first plunge below zero to
/// step past the central peak, then the global maximum beyond it with
/// parabolic sub-sample refinement. For a constant force on a wide window
/// the estimate approaches the Bloch period 2π/F.
pub fn bloch_period_estimate(series: &ObservableSeries) -> Result<f64, PeriodError> {
    let x = &series.mean_position;
    let n = x.len();
    if n < 8 {
        return Err(PeriodError::InsufficientSpan);
    }
    let dt = (series.time_grid[n - 1] - series.time_grid[0]) / (n - 1) as f64;

    let mean: f64 = x.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let amplitude = centered.iter().fold(0.0_f64, |m, v| m.max(libm::fabs(*v)));
    if amplitude < 1e-9 * (1.0 + libm::fabs(mean)) {
        return Err(PeriodError::NoOscillation);
    }

    let max_lag = n / 2;
    let acf: Vec<f64> = (0..=max_lag)
        .map(|lag| {
            let mut s = 0.0;
            for i in 0..n - lag {
                s += centered[i] * centered[i + lag];
            }
            s / (n - lag) as f64
        })
        .collect();

    // step past the zero-lag peak
    let first_dip = match acf.iter().position(|&r| r < 0.0) {
        Some(k) => k,
        None => return Err(PeriodError::InsufficientSpan),
    };
    let mut best = first_dip;
    for k in first_dip..=max_lag {
        if acf[k] > acf[best] {
            best = k;
        }
    }
    if best == max_lag || best == first_dip || acf[best] <= 0.0 {
        return Err(PeriodError::InsufficientSpan);
    }

    // parabolic refinement through the peak and its neighbors
    let (ym, y0, yp) = (acf[best - 1], acf[best], acf[best + 1]);
    let denom = ym - 2.0 * y0 + yp;
    let shift = if denom == 0.0 { 0.0 } else { 0.5 * (ym - yp) / denom };
    Ok((best as f64 + shift) * dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::DriveProfile;
    use crate::lattice::{site_state, LatticeSpec};
    use crate::matrix::StateVector;
    use crate::propagate::oracle_propagate;
    use num_complex::Complex64;

    #[test]
    fn occupations_of_basis_state() {
        let spec = LatticeSpec::dirichlet(3, 0.4).unwrap();
        let psi = site_state(&spec, 2).unwrap();
        let run =
            oracle_propagate(&spec, &DriveProfile::constant(0.0), &psi, 0.0, 0.1).unwrap();
        let obs = occupations(&run);
        assert_eq!(obs.occupations[0], alloc::vec![0.0, 1.0, 0.0]);
        assert_eq!(obs.mean_position[0], 2.0);
        assert_eq!(obs.site_indices, alloc::vec![1, 2, 3]);
    }

    #[test]
    fn symmetric_superposition_mean() {
        let spec = LatticeSpec::dirichlet(3, 0.4).unwrap();
        let r = 1.0 / libm::sqrt(2.0);
        let psi = StateVector::from_amplitudes(alloc::vec![
            Complex64::new(r, 0.0),
            Complex64::ZERO,
            Complex64::new(r, 0.0),
        ]);
        let run =
            oracle_propagate(&spec, &DriveProfile::constant(0.0), &psi, 0.0, 0.1).unwrap();
        let obs = occupations(&run);
        assert!((obs.mean_position[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_of_run_with_itself_is_one() {
        let spec = LatticeSpec::dirichlet(3, 0.5).unwrap();
        let psi = site_state(&spec, 1).unwrap();
        let run =
            oracle_propagate(&spec, &DriveProfile::constant(1.0), &psi, 1.0, 1e-2).unwrap();
        let f = fidelity(&run, &run).unwrap();
        for v in f {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fidelity_of_orthogonal_initial_states() {
        let spec = LatticeSpec::dirichlet(3, 0.5).unwrap();
        let a = site_state(&spec, 1).unwrap();
        let b = site_state(&spec, 3).unwrap();
        let drive = DriveProfile::constant(1.0);
        let run_a = oracle_propagate(&spec, &drive, &a, 1.0, 1e-2).unwrap();
        let run_b = oracle_propagate(&spec, &drive, &b, 1.0, 1e-2).unwrap();
        let f = fidelity(&run_a, &run_b).unwrap();
        assert!(f[0] < 1e-14);
    }

    #[test]
    fn fidelity_requires_matching_grids() {
        let spec = LatticeSpec::dirichlet(3, 0.5).unwrap();
        let psi = site_state(&spec, 1).unwrap();
        let drive = DriveProfile::constant(1.0);
        let run_a = oracle_propagate(&spec, &drive, &psi, 1.0, 1e-2).unwrap();
        let run_b = oracle_propagate(&spec, &drive, &psi, 1.0, 2e-2).unwrap();
        assert_eq!(fidelity(&run_a, &run_b), Err(ObservableError::GridMismatch));
    }

    #[test]
    fn period_of_synthetic_cosine() {
        let dt = 0.01;
        let period = 2.0 * core::f64::consts::PI;
        let n = 2000;
        let time_grid: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let mean_position: Vec<f64> = time_grid
            .iter()
            .map(|t| 0.5 + 1.3 * libm::cos(2.0 * core::f64::consts::PI * t / period))
            .collect();
        let series = ObservableSeries {
            time_grid,
            site_indices: alloc::vec![0],
            occupations: alloc::vec![],
            mean_position,
            norm: alloc::vec![],
            fidelity_vs: None,
        };
        let est = bloch_period_estimate(&series).unwrap();
        assert!(
            (est - period).abs() / period < 0.01,
            "estimate {est} vs period {period}"
        );
    }

    #[test]
    fn constant_series_has_no_oscillation() {
        let n = 500;
        let series = ObservableSeries {
            time_grid: (0..n).map(|i| i as f64 * 0.01).collect(),
            site_indices: alloc::vec![0],
            occupations: alloc::vec![],
            mean_position: alloc::vec![3.25; n],
            norm: alloc::vec![],
            fidelity_vs: None,
        };
        assert_eq!(bloch_period_estimate(&series), Err(PeriodError::NoOscillation));
    }

    #[test]
    fn short_series_reports_insufficient_span() {
        // half a cycle only: the autocorrelation never recovers a peak
        let n = 400;
        let dt = 0.01;
        let series = ObservableSeries {
            time_grid: (0..n).map(|i| i as f64 * dt).collect(),
            site_indices: alloc::vec![0],
            occupations: alloc::vec![],
            mean_position: (0..n)
                .map(|i| libm::cos(2.0 * core::f64::consts::PI * i as f64 * dt / 50.0))
                .collect(),
            norm: alloc::vec![],
            fidelity_vs: None,
        };
        assert_eq!(bloch_period_estimate(&series), Err(PeriodError::InsufficientSpan));
    }
}
