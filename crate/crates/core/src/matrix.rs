//! Dense complex matrices and state vectors over a finite Wannier basis.
//!
//! Every operator in this crate is a small dense square matrix; chains of a
//! few thousand sites are the intended ceiling, so no sparse storage is
//! provided. A matrix remembers the first site index of its basis
//! (`basis_offset`), which is 1 for finite chains and `-M` for a truncated
//! infinite window.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Dense row-major complex square matrix with basis-index metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    basis_offset: i64,
    entries: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize, basis_offset: i64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self { dim, basis_offset, entries: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize, basis_offset: i64) -> Self {
        let mut m = Self::zeros(dim, basis_offset);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diag(diag: &[f64], basis_offset: i64) -> Self {
        let mut m = Self::zeros(diag.len(), basis_offset);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_offset(&self) -> i64 {
        self.basis_offset
    }

    /// Site label of storage row `row` (first row is `basis_offset`).
    pub fn site_index(&self, row: usize) -> i64 {
        self.basis_offset + row as i64
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    fn assert_same_shape(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        assert_eq!(
            self.basis_offset, other.basis_offset,
            "matrices live on different bases"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_shape(other);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self { dim: self.dim, basis_offset: self.basis_offset, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_shape(other);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self { dim: self.dim, basis_offset: self.basis_offset, entries }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        Self { dim: self.dim, basis_offset: self.basis_offset, entries }
    }

    pub fn scaled_re(&self, factor: f64) -> Self {
        self.scaled(Complex64::new(factor, 0.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_shape(other);
        let n = self.dim;
        let mut out = Self::zeros(n, self.basis_offset);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }

    /// `self` to the `k`-th power by repeated multiplication.
    pub fn matpow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim, self.basis_offset);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n, self.basis_offset);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim, "vector length does not match matrix");
        let mut y = vec![Complex64::ZERO; self.dim];
        self.apply_into(x, &mut y);
        y
    }

    /// Matrix-vector product into an existing buffer (overwrites `y`).
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.dim;
        for (i, slot) in y.iter_mut().enumerate() {
            let row = &self.entries[i * n..(i + 1) * n];
            let mut acc = Complex64::ZERO;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *slot = acc;
        }
    }

    /// Largest entry magnitude; the residual norm used by the certification
    /// checks.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0;
        for e in &self.entries {
            let a = e.norm();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for e in &self.entries {
            s += e.norm_sqr();
        }
        libm::sqrt(s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// Entrywise deviation from the conjugate transpose.
    pub fn hermiticity_residual(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }
}

/// `AB - BA`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a.mul(b).sub(&b.mul(a))
}

/// `AB + BA`.
pub fn anticommutator(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a.mul(b).add(&b.mul(a))
}

/// Complex amplitude vector over the Wannier sites.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        assert!(!amplitudes.is_empty(), "state must have at least one amplitude");
        Self { amplitudes }
    }

    /// Basis state with a single unit amplitude at storage row `row`.
    pub fn basis_state(dim: usize, row: usize) -> Self {
        assert!(row < dim, "basis row out of range");
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[row] = Complex64::ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        libm::sqrt(s)
    }

    /// Rescaled copy with unit Euclidean norm.
    ///
    /// Panics on the zero vector.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        let amplitudes = self.amplitudes.iter().map(|a| a / n).collect();
        Self { amplitudes }
    }

    /// Inner product `⟨self|other⟩` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "state dimensions differ");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_and_adjoint() {
        let mut a = OperatorMatrix::zeros(2, 1);
        a.set(0, 1, c(0.0, 1.0));
        let ad = a.adjoint();
        assert_eq!(ad.get(1, 0), c(0.0, -1.0));
        let prod = a.mul(&ad);
        assert_eq!(prod.get(0, 0), c(1.0, 0.0));
        assert_eq!(prod.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn commutator_of_matrix_with_itself_vanishes() {
        let mut a = OperatorMatrix::zeros(3, 1);
        a.set(0, 1, c(2.0, 0.0));
        a.set(2, 0, c(0.0, -1.5));
        assert_eq!(commutator(&a, &a).max_abs(), 0.0);
    }

    #[test]
    fn state_norm_and_inner() {
        let s = StateVector::from_amplitudes(vec![c(3.0, 0.0), c(0.0, 4.0)]);
        assert!((s.norm() - 5.0).abs() < 1e-15);
        let n = s.normalized();
        assert!((n.norm() - 1.0).abs() < 1e-15);
        let e0 = StateVector::basis_state(2, 0);
        let overlap = e0.inner(&n);
        assert!((overlap.re - 0.6).abs() < 1e-15);
    }
}
