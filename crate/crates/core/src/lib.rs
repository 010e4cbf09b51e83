//! Quantum dynamics of the driven single-band tight-binding chain.
//!
//! The chain Hamiltonian `Ĥ(t) = G(K̂ + K̂†) + F(t)N̂` (ħ = 1) is built over
//! a Wannier basis with open (Dirichlet), periodic, or truncated-infinite
//! boundaries. The crate provides
//!
//! * the boundary-dependent operator algebras and their numerical
//!   certification, including the deformed parafermionic realization of the
//!   open chain ([`algebra`]);
//! * arbitrary time-dependent drive profiles with exact running integrals
//!   ([`drive`]);
//! * three propagation routes with cross-validation — a direct RK4 oracle,
//!   an exact su(2) factorized propagator for two- and three-site chains,
//!   and a gauge-transformed eigenbasis series for even open chains
//!   ([`propagate`]);
//! * the discrete-charge mesoscopic-circuit front-end that maps an L-design
//!   circuit onto the chain ([`circuit`]);
//! * occupation, mean-position, fidelity, and Bloch-period observables
//!   ([`observables`]).
//!
//! The crate is `no_std` (with `alloc`); IO, file formats, and the command
//! line live in the companion `tbdrive` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod circuit;
pub mod drive;
pub mod eigen;
pub mod lattice;
pub mod matrix;
pub mod observables;
pub mod propagate;

pub use num_complex::Complex64;
