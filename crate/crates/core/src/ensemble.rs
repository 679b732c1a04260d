// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random matrix ensembles used by the verification suite and tests.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::blockop::BlockOperator;
use crate::matfun::{Flags, Operator};
use crate::C64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix, entries with unit variance.
pub fn complex<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Operator {
    Operator::from_parts(DMatrix::from_fn(d, d, |_, _| gaussian(rng)), Flags::default())
}

/// GUE-like Hermitian matrix `(G + G†)/2`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Operator {
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    Operator::from_parts(
        h,
        Flags {
            hermitian: true,
            unitary: false,
        },
    )
}

/// Complex symmetric matrix, `Vᵀ = V`.
pub fn complex_symmetric<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Operator {
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let v = (&g + g.transpose()) * C64::new(0.5, 0.0);
    Operator::from_parts(v, Flags::default())
}

/// Hermitian block operator `[[H₊, V], [V†, H₋]]` with independent random blocks.
pub fn hermitian_block<R: Rng + ?Sized>(rng: &mut R, d: usize) -> BlockOperator {
    let hp = hermitian(rng, d);
    let hm = hermitian(rng, d);
    let v = complex(rng, d);
    BlockOperator::hermitian_from(hp, v, hm).expect("blocks share a dimension")
}

/// Random pure qubit state vector, normalized.
pub fn qubit_vector<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    let a = gaussian(rng);
    let b = gaussian(rng);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / n, b / n]
}
