// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! Block-diagonalization of qubit-plus-environment Hamiltonians through the
//! operator Riccati equation `XVX + XH₊ − H₋X − V† = 0`.
//!
//! The environment is a single bosonic mode truncated at `n_max` quanta.
//! On top of the Riccati machinery the crate provides reduced qubit dynamics,
//! Choi-matrix channel certificates, a real-linear operator algebra for
//! antilinear Riccati solutions, and the parity counterexample showing that a
//! Riccati solution need not be a function of the environment Hamiltonian.
//!
//! Module map:
//!
//! - [`matfun`]: dense kernels (Hermitian eigensolver, matrix functions, Sylvester, norms)
//! - [`fock`]: truncated ladder, number, parity and field operators
//! - [`blockop`]: 2×2 block operators on `H_E ⊕ H_E`, model assembly, partial trace
//! - [`riccati`]: residuals, spectral and Newton solvers, scalar branch, counterexample
//! - [`diagonalize`]: the similarity `S`, block-diagonal form and the evolution operator
//! - [`antilinear`]: real-linear operators, realification and the antilinear evolution formula
//! - [`dynamics`]: reduced states, channels and Bloch trajectories
//! - [`config`] and [`cli`]: JSON run configuration and the `riccati` command-line driver

// Negated comparisons are used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antilinear;
pub mod blockop;
pub mod cli;
pub mod config;
pub mod diagonalize;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod fock;
pub mod matfun;
pub mod riccati;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
