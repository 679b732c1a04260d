// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated single-mode bosonic Fock space.
//!
//! Operators are the top-left `(n_max + 1)²` corner of the infinite matrices
//! in the number basis `|0⟩, …, |n_max⟩`. The corner commutator defect
//! `[a, a†]_{n_max, n_max} = −n_max` is left as is; this keeps `P² = I` and
//! `PHP = −H` exact.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfun::{Flags, Operator};
use crate::C64;

/// Default truncation.
pub const DEFAULT_N_MAX: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Space with twice the truncation, for convergence checks.
    pub fn doubled(&self) -> Self {
        Self {
            n_max: 2 * self.n_max,
        }
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
        }
    }
}

/// Complex coupling `g` of the field operator `H = g* a + g a†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCoupling(pub C64);

impl FieldCoupling {
    pub fn real(g: f64) -> Self {
        Self(C64::new(g, 0.0))
    }
}

/// `a`, with `a[n−1, n] = √n`.
pub fn annihilation(space: FockSpace) -> Operator {
    let d = space.dim();
    let mut m = DMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator::from_parts(m, Flags::default())
}

/// `a†`, with `a†[n+1, n] = √(n+1)`.
pub fn creation(space: FockSpace) -> Operator {
    annihilation(space).adjoint()
}

/// `N = diag(0, 1, …, n_max)`.
pub fn number_operator(space: FockSpace) -> Operator {
    let diag: Vec<f64> = (0..space.dim()).map(|n| n as f64).collect();
    Operator::from_real_diagonal(&diag)
}

/// Bosonic parity `P = diag((−1)ⁿ)`.
pub fn parity(space: FockSpace) -> Operator {
    let diag: Vec<f64> = (0..space.dim())
        .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    Operator::from_real_diagonal(&diag)
}

/// Field operator `H = g* a + g a†`.
pub fn field_operator(space: FockSpace, g: FieldCoupling) -> Operator {
    let d = space.dim();
    let g = g.0;
    let mut m = DMatrix::zeros(d, d);
    for n in 1..d {
        let s = (n as f64).sqrt();
        m[(n - 1, n)] = g.conj() * s;
        m[(n, n - 1)] = g * s;
    }
    Operator::from_parts(
        m,
        Flags {
            hermitian: true,
            unitary: false,
        },
    )
}

/// Fock basis vector `|n⟩` as a column.
pub fn basis_state(space: FockSpace, n: usize) -> Result<nalgebra::DVector<C64>> {
    if n > space.n_max() {
        return Err(Error::DimensionMismatch {
            context: "fock level",
            expected: space.n_max(),
            found: n,
        });
    }
    let mut v = nalgebra::DVector::zeros(space.dim());
    v[n] = C64::new(1.0, 0.0);
    Ok(v)
}
