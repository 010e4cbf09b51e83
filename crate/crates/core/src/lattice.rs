//! Wannier-basis operators for the driven single-band tight-binding chain.
//!
//! The chain Hamiltonian is `Ĥ(t) = G(K̂ + K̂†) + F(t)N̂`, where `K̂` hops a
//! particle one site down (`K̂|j⟩ = |j-1⟩` where admissible), `K̂†` hops up,
//! and `N̂|j⟩ = j|j⟩` reads the site index. The boundary condition decides
//! which hops are admissible:
//!
//! * Dirichlet — open chain on sites 1..N, no wrap;
//! * Periodic — ring on sites 1..N with `|N+1⟩ = |1⟩`;
//! * InfiniteWindow — a 2M+1-site open window on sites -M..M standing in for
//!   the infinite chain. Convergence in M is the caller's responsibility;
//!   [`edge_leakage`] reports how much amplitude has reached the window edge.
//!
//! Everything here works in ħ = 1 units; `G` and `F` carry inverse time.

use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

use crate::matrix::{OperatorMatrix, StateVector};

pub use crate::matrix::{anticommutator, commutator};

/// Boundary condition of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Open chain, hopping between sites 1..N only.
    Dirichlet,
    /// Ring: site N+1 is identified with site 1.
    Periodic,
    /// Finite open window of 2M+1 sites indexed -M..M, truncating the
    /// infinite chain.
    InfiniteWindow { halfwidth: usize },
}

impl Boundary {
    pub fn label(&self) -> &'static str {
        match self {
            Boundary::Dirichlet => "dirichlet",
            Boundary::Periodic => "periodic",
            Boundary::InfiniteWindow { .. } => "infinite_window",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LatticeError {
    /// Dirichlet/Periodic chains need at least two sites.
    TooFewSites { n_sites: usize },
    /// The window halfwidth must be a positive integer.
    ZeroHalfwidth,
    NonFiniteCoupling,
    SiteOutOfRange { site: i64, first: i64, last: i64 },
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::TooFewSites { n_sites } => {
                write!(f, "chain needs at least 2 sites, got {n_sites}")
            }
            LatticeError::ZeroHalfwidth => {
                write!(f, "infinite-window halfwidth must be at least 1")
            }
            LatticeError::NonFiniteCoupling => write!(f, "coupling must be finite"),
            LatticeError::SiteOutOfRange { site, first, last } => {
                write!(f, "site {site} outside basis range {first}..{last}")
            }
        }
    }
}

impl core::error::Error for LatticeError {}

/// Problem definition: basis size, boundary condition, and hopping strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    n_sites: usize,
    boundary: Boundary,
    coupling: f64,
}

impl LatticeSpec {
    pub fn dirichlet(n_sites: usize, coupling: f64) -> Result<Self, LatticeError> {
        Self::finite(n_sites, Boundary::Dirichlet, coupling)
    }

    pub fn periodic(n_sites: usize, coupling: f64) -> Result<Self, LatticeError> {
        Self::finite(n_sites, Boundary::Periodic, coupling)
    }

    fn finite(n_sites: usize, boundary: Boundary, coupling: f64) -> Result<Self, LatticeError> {
        if n_sites < 2 {
            return Err(LatticeError::TooFewSites { n_sites });
        }
        if !coupling.is_finite() {
            return Err(LatticeError::NonFiniteCoupling);
        }
        Ok(Self { n_sites, boundary, coupling })
    }

    /// Window of 2·`halfwidth`+1 sites indexed -halfwidth..halfwidth.
    pub fn infinite_window(halfwidth: usize, coupling: f64) -> Result<Self, LatticeError> {
        if halfwidth == 0 {
            return Err(LatticeError::ZeroHalfwidth);
        }
        if !coupling.is_finite() {
            return Err(LatticeError::NonFiniteCoupling);
        }
        Ok(Self {
            n_sites: 2 * halfwidth + 1,
            boundary: Boundary::InfiniteWindow { halfwidth },
            coupling,
        })
    }

    /// Basis dimension (N for finite chains, 2M+1 for a window).
    pub fn dim(&self) -> usize {
        self.n_sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Site label of the first basis row: 1 for finite chains, -M for windows.
    pub fn basis_offset(&self) -> i64 {
        match self.boundary {
            Boundary::InfiniteWindow { halfwidth } => -(halfwidth as i64),
            _ => 1,
        }
    }

    /// Storage row of site label `site`.
    pub fn site_row(&self, site: i64) -> Result<usize, LatticeError> {
        let first = self.basis_offset();
        let last = first + self.n_sites as i64 - 1;
        if site < first || site > last {
            return Err(LatticeError::SiteOutOfRange { site, first, last });
        }
        Ok((site - first) as usize)
    }

    pub fn site_indices(&self) -> impl Iterator<Item = i64> + '_ {
        let first = self.basis_offset();
        (0..self.n_sites as i64).map(move |k| first + k)
    }
}

/// Lowering ladder operator `K̂ = Σ |j⟩⟨j+1|` over the admissible hops.
///
/// Dirichlet sums j = 1..N-1, Periodic adds the wrap `|N⟩⟨N+1| = |N⟩⟨1|`,
/// and a window behaves like an open chain on its 2M+1 sites.
pub fn build_ladder_down(spec: &LatticeSpec) -> OperatorMatrix {
    let n = spec.dim();
    let mut k = OperatorMatrix::zeros(n, spec.basis_offset());
    for row in 0..n - 1 {
        k.set(row, row + 1, Complex64::ONE);
    }
    if spec.boundary() == Boundary::Periodic {
        k.set(n - 1, 0, Complex64::ONE);
    }
    k
}

/// Raising ladder operator `K̂† = Σ |j+1⟩⟨j|`, built independently of
/// [`build_ladder_down`] so adjointness is a checkable property rather than a
/// definition.
pub fn build_ladder_up(spec: &LatticeSpec) -> OperatorMatrix {
    let n = spec.dim();
    let mut k = OperatorMatrix::zeros(n, spec.basis_offset());
    for row in 0..n - 1 {
        k.set(row + 1, row, Complex64::ONE);
    }
    if spec.boundary() == Boundary::Periodic {
        k.set(0, n - 1, Complex64::ONE);
    }
    k
}

/// Position/number operator `N̂ = Σ j|j⟩⟨j|` over the basis range.
pub fn build_number(spec: &LatticeSpec) -> OperatorMatrix {
    let diag: Vec<f64> = spec.site_indices().map(|j| j as f64).collect();
    OperatorMatrix::from_real_diag(&diag, spec.basis_offset())
}

/// Hamiltonian `G(K̂ + K̂†) + F·N̂` at a fixed force value.
pub fn build_hamiltonian(spec: &LatticeSpec, force_value: f64) -> OperatorMatrix {
    let hop = build_ladder_down(spec).add(&build_ladder_up(spec));
    hop.scaled_re(spec.coupling())
        .add(&build_number(spec).scaled_re(force_value))
}

/// Unit Wannier state `|site⟩`.
pub fn site_state(spec: &LatticeSpec, site: i64) -> Result<StateVector, LatticeError> {
    let row = spec.site_row(site)?;
    Ok(StateVector::basis_state(spec.dim(), row))
}

/// Probability carried by the two outermost sites.
///
/// On an infinite-window run this is the truncation-quality diagnostic: once
/// it is no longer negligible the window is too small for the drive and time
/// span at hand.
pub fn edge_leakage(psi: &StateVector) -> f64 {
    let a = psi.amplitudes();
    a[0].norm_sqr() + a[a.len() - 1].norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(m: &OperatorMatrix, i: usize, j: usize) -> f64 {
        m.get(i, j).re
    }

    #[test]
    fn ladder_down_dirichlet_three_sites() {
        let spec = LatticeSpec::dirichlet(3, 1.0).unwrap();
        let k = build_ladder_down(&spec);
        // ones at (site 1, site 2) and (site 2, site 3); zero elsewhere
        assert_eq!(re(&k, 0, 1), 1.0);
        assert_eq!(re(&k, 1, 2), 1.0);
        let mut nonzero = 0;
        for e in k.entries() {
            if *e != Complex64::ZERO {
                nonzero += 1;
            }
        }
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn ladder_down_periodic_wraps() {
        let spec = LatticeSpec::periodic(3, 1.0).unwrap();
        let k = build_ladder_down(&spec);
        assert_eq!(re(&k, 0, 1), 1.0);
        assert_eq!(re(&k, 1, 2), 1.0);
        assert_eq!(re(&k, 2, 0), 1.0);
    }

    #[test]
    fn two_site_open_ladder_is_nilpotent() {
        let spec = LatticeSpec::dirichlet(2, 1.0).unwrap();
        let k = build_ladder_down(&spec);
        assert_eq!(k.mul(&k).max_abs(), 0.0);
    }

    #[test]
    fn ladder_up_is_adjoint_of_ladder_down() {
        for spec in [
            LatticeSpec::dirichlet(5, 0.7).unwrap(),
            LatticeSpec::periodic(5, 0.7).unwrap(),
            LatticeSpec::infinite_window(3, 0.7).unwrap(),
        ] {
            let down = build_ladder_down(&spec);
            let up = build_ladder_up(&spec);
            assert_eq!(up.sub(&down.adjoint()).max_abs(), 0.0);
        }
    }

    #[test]
    fn ladder_up_raises_first_site() {
        let spec = LatticeSpec::dirichlet(3, 1.0).unwrap();
        let up = build_ladder_up(&spec);
        let psi = site_state(&spec, 1).unwrap();
        let raised = up.apply(psi.amplitudes());
        assert_eq!(raised[1], Complex64::ONE);
        assert_eq!(raised[0], Complex64::ZERO);
        assert_eq!(raised[2], Complex64::ZERO);
    }

    #[test]
    fn number_operator_diagonals() {
        let spec = LatticeSpec::dirichlet(3, 1.0).unwrap();
        let n = build_number(&spec);
        assert_eq!(re(&n, 0, 0), 1.0);
        assert_eq!(re(&n, 1, 1), 2.0);
        assert_eq!(re(&n, 2, 2), 3.0);

        let window = LatticeSpec::infinite_window(1, 1.0).unwrap();
        let nw = build_number(&window);
        assert_eq!(re(&nw, 0, 0), -1.0);
        assert_eq!(re(&nw, 1, 1), 0.0);
        assert_eq!(re(&nw, 2, 2), 1.0);

        let four = LatticeSpec::dirichlet(4, 1.0).unwrap();
        assert_eq!(build_number(&four).trace().re, 10.0);
    }

    #[test]
    fn hamiltonian_examples() {
        let two = LatticeSpec::dirichlet(2, 1.0).unwrap();
        let h2 = build_hamiltonian(&two, 0.0);
        assert_eq!(re(&h2, 0, 0), 0.0);
        assert_eq!(re(&h2, 0, 1), 1.0);
        assert_eq!(re(&h2, 1, 0), 1.0);
        assert_eq!(re(&h2, 1, 1), 0.0);

        let three = LatticeSpec::dirichlet(3, 0.0).unwrap();
        let h3 = build_hamiltonian(&three, 2.0);
        assert_eq!(re(&h3, 0, 0), 2.0);
        assert_eq!(re(&h3, 1, 1), 4.0);
        assert_eq!(re(&h3, 2, 2), 6.0);
        assert_eq!(re(&h3, 0, 1), 0.0);

        let tri = LatticeSpec::dirichlet(3, 1.0).unwrap();
        let h = build_hamiltonian(&tri, 1.0);
        for i in 0..3 {
            assert_eq!(re(&h, i, i), (i + 1) as f64);
        }
        assert_eq!(re(&h, 0, 1), 1.0);
        assert_eq!(re(&h, 1, 2), 1.0);
        assert_eq!(re(&h, 0, 2), 0.0);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn dirichlet_commutators_exact() {
        for n in 2..=12 {
            let spec = LatticeSpec::dirichlet(n, 1.0).unwrap();
            let k = build_ladder_down(&spec);
            let kd = build_ladder_up(&spec);
            let num = build_number(&spec);

            // [N̂, K̂] = -K̂ and [N̂, K̂†] = K̂†, exactly
            assert_eq!(commutator(&num, &k).add(&k).max_abs(), 0.0);
            assert_eq!(commutator(&num, &kd).sub(&kd).max_abs(), 0.0);

            // [K̂†, K̂] = |N⟩⟨N| - |1⟩⟨1|
            let mut edge = OperatorMatrix::zeros(n, 1);
            edge.set(n - 1, n - 1, Complex64::ONE);
            edge.set(0, 0, -Complex64::ONE);
            assert_eq!(commutator(&kd, &k).sub(&edge).max_abs(), 0.0);

            // nilpotency of order N
            assert_eq!(k.matpow(n as u32).max_abs(), 0.0);
            assert_eq!(kd.matpow(n as u32).max_abs(), 0.0);
        }
    }

    #[test]
    fn infinite_window_commutator_lives_on_edges() {
        let spec = LatticeSpec::infinite_window(4, 1.0).unwrap();
        let k = build_ladder_down(&spec);
        let kd = build_ladder_up(&spec);
        let num = build_number(&spec);
        assert_eq!(commutator(&num, &k).add(&k).max_abs(), 0.0);
        let comm = commutator(&kd, &k);
        let dim = spec.dim();
        for i in 0..dim {
            for j in 0..dim {
                let v = comm.get(i, j);
                if i == 0 && j == 0 {
                    assert_eq!(v.re, -1.0);
                } else if i == dim - 1 && j == dim - 1 {
                    assert_eq!(v.re, 1.0);
                } else {
                    assert_eq!(v, Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(LatticeSpec::dirichlet(1, 1.0).is_err());
        assert!(LatticeSpec::periodic(0, 1.0).is_err());
        assert!(LatticeSpec::infinite_window(0, 1.0).is_err());
        assert!(LatticeSpec::dirichlet(4, f64::NAN).is_err());
        assert!(LatticeSpec::dirichlet(4, f64::INFINITY).is_err());
    }

    #[test]
    fn site_lookup_respects_offsets() {
        let spec = LatticeSpec::infinite_window(2, 1.0).unwrap();
        assert_eq!(spec.site_row(-2).unwrap(), 0);
        assert_eq!(spec.site_row(0).unwrap(), 2);
        assert_eq!(spec.site_row(2).unwrap(), 4);
        assert!(spec.site_row(3).is_err());
        let psi = site_state(&spec, 0).unwrap();
        assert_eq!(psi.amplitudes()[2], Complex64::ONE);
    }
}
