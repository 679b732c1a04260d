// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrix kernels.
//!
//! Everything here works on small dense matrices (d ≤ ~130). Functions of
//! Hermitian matrices go through the eigendecomposition; the general Padé
//! exponential is only used for non-normal inputs.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Relative tolerance used for the Hermitian flag check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Absolute floor applied to relative tolerances.
pub const ABS_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    pub hermitian: bool,
    pub unitary: bool,
}

/// Square dense complex matrix with semantic flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
    flags: Flags,
}

impl Operator {
    /// Wraps a square matrix with finite entries. No flags are set.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        Ok(Self {
            mat,
            flags: Flags::default(),
        })
    }

    /// Wraps a matrix and flags it Hermitian after checking
    /// `max|A − A†| ≤ 1e−12 (1 + max|A|)`.
    pub fn hermitian(mat: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(mat)?;
        let defect = op.hermitian_defect();
        if defect > HERMITIAN_TOL * (1.0 + op.max_norm()) {
            return Err(Error::NonHermitianInput { defect });
        }
        op.flags.hermitian = true;
        Ok(op)
    }

    /// Internal constructor for results that are square and finite by construction.
    pub(crate) fn from_parts(mat: DMatrix<C64>, flags: Flags) -> Self {
        debug_assert!(mat.is_square());
        Self { mat, flags }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_parts(
            DMatrix::identity(dim, dim),
            Flags {
                hermitian: true,
                unitary: true,
            },
        )
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_parts(
            DMatrix::zeros(dim, dim),
            Flags {
                hermitian: true,
                unitary: false,
            },
        )
    }

    /// Real diagonal matrix, flagged Hermitian.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self::from_parts(
            DMatrix::from_diagonal(&d),
            Flags {
                hermitian: true,
                unitary: diag.iter().all(|x| x.abs() == 1.0),
            },
        )
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn is_flagged_hermitian(&self) -> bool {
        self.flags.hermitian
    }

    pub fn with_flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.mat.adjoint(), self.flags)
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(self.mat.map(|z| z.conj()), self.flags)
    }

    pub fn transpose(&self) -> Self {
        Self::from_parts(self.mat.transpose(), self.flags)
    }

    pub fn scale(&self, c: C64) -> Self {
        let hermitian = self.flags.hermitian && c.im == 0.0;
        Self::from_parts(
            &self.mat * c,
            Flags {
                hermitian,
                unitary: self.flags.unitary && c.norm() == 1.0,
            },
        )
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Operator) -> Operator {
        &(self * other) + &(other * self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.mat)
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.mat.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max|A − A†|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.mat)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator::from_parts(
            &self.mat + &rhs.mat,
            Flags {
                hermitian: self.flags.hermitian && rhs.flags.hermitian,
                unitary: false,
            },
        )
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator::from_parts(
            &self.mat - &rhs.mat,
            Flags {
                hermitian: self.flags.hermitian && rhs.flags.hermitian,
                unitary: false,
            },
        )
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator::from_parts(
            &self.mat * &rhs.mat,
            Flags {
                hermitian: false,
                unitary: self.flags.unitary && rhs.flags.unitary,
            },
        )
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::from_parts(
            -&self.mat,
            Flags {
                hermitian: self.flags.hermitian,
                unitary: self.flags.unitary,
            },
        )
    }
}

/// Eigendecomposition `A = U Λ U†` of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U f(Λ) U†` for a scalar function of the eigenvalues.
    pub fn apply<F: Fn(f64) -> C64>(&self, f: F) -> DMatrix<C64> {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fj = f(lam);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= fj;
            }
        }
        scaled * u.adjoint()
    }

    /// `‖A − UΛU†‖_F`.
    pub fn reconstruction_error(&self, a: &DMatrix<C64>) -> f64 {
        frobenius(&(a - self.apply(|l| C64::new(l, 0.0))))
    }
}

/// Hermitian eigensolver. The input must pass the Hermitian check whether or
/// not it carries the flag.
pub fn eig_hermitian(a: &Operator) -> Result<SpectralData> {
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL * (1.0 + a.max_norm()) {
        return Err(Error::NonHermitianInput { defect });
    }
    Ok(eig_hermitian_matrix(a.matrix()))
}

/// Eigendecomposition of the Hermitian part `(A + A†)/2` without checks.
pub(crate) fn eig_hermitian_matrix(a: &DMatrix<C64>) -> SpectralData {
    let n = a.nrows();
    if n == 0 {
        return SpectralData {
            eigenvalues: DVector::zeros(0),
            eigenvectors: DMatrix::zeros(0, 0),
        };
    }
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    SpectralData {
        eigenvalues,
        eigenvectors,
    }
}

/// Matrix functions available through [`mat_fn`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatFn {
    /// `exp(−iAt)`
    ExpIt(f64),
    /// `cos(At)`
    CosT(f64),
    /// `sin(At)`
    SinT(f64),
}

impl MatFn {
    pub fn eval(self, lambda: f64) -> C64 {
        match self {
            MatFn::ExpIt(t) => C64::from_polar(1.0, -lambda * t),
            MatFn::CosT(t) => C64::new((lambda * t).cos(), 0.0),
            MatFn::SinT(t) => C64::new((lambda * t).sin(), 0.0),
        }
    }
}

pub fn mat_fn(a: &Operator, f: MatFn) -> Result<Operator> {
    let spec = eig_hermitian(a)?;
    Ok(mat_fn_spectral(&spec, f))
}

pub fn mat_fn_spectral(spec: &SpectralData, f: MatFn) -> Operator {
    let flags = match f {
        MatFn::ExpIt(_) => Flags {
            hermitian: false,
            unitary: true,
        },
        MatFn::CosT(_) | MatFn::SinT(_) => Flags {
            hermitian: true,
            unitary: false,
        },
    };
    Operator::from_parts(spec.apply(|l| f.eval(l)), flags)
}

/// General dense exponential (scaling and squaring with Padé approximants).
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    if m.nrows() == 0 {
        return m.clone();
    }
    m.exp()
}

/// Real dense exponential.
pub fn expm_real(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() == 0 {
        return m.clone();
    }
    m.exp()
}

/// Eigenvalues of a general square complex matrix (complex Schur form).
pub fn eigenvalues_general(m: &DMatrix<C64>) -> Vec<C64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let (_, t) = m.clone().schur().unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Solves `AΔ + ΔB = C` by Kronecker linearization,
/// `(I ⊗ A + Bᵀ ⊗ I) vec(Δ) = vec(C)` with column-major `vec`.
///
/// The spectra of `A` and `−B` must be separated by more than `1e−10` times
/// the larger Frobenius norm of the coefficients.
pub fn solve_sylvester(a: &Operator, b: &Operator, c: &Operator) -> Result<Operator> {
    let n = a.dim();
    for (what, op) in [("sylvester B", b), ("sylvester C", c)] {
        if op.dim() != n {
            return Err(Error::DimensionMismatch {
                context: what,
                expected: n,
                found: op.dim(),
            });
        }
    }
    let ev_a = eigenvalues_general(a.matrix());
    let ev_b = eigenvalues_general(b.matrix());
    let gap = ev_a
        .iter()
        .flat_map(|la| ev_b.iter().map(move |lb| (la + lb).norm()))
        .fold(f64::INFINITY, f64::min);
    let scale = a.frobenius_norm().max(b.frobenius_norm());
    let threshold = (1e-10 * scale).max(ABS_FLOOR);
    if n > 0 && !(gap > threshold) {
        return Err(Error::SingularSylvester { gap, threshold });
    }

    let eye = DMatrix::<C64>::identity(n, n);
    let k = eye.kronecker(a.matrix()) + b.matrix().transpose().kronecker(&eye);
    let rhs = DVector::from_column_slice(c.matrix().as_slice());
    let sol = k.lu().solve(&rhs).ok_or(Error::SingularSylvester {
        gap,
        threshold,
    })?;
    Ok(Operator::from_parts(
        DMatrix::from_column_slice(n, n, sol.as_slice()),
        Flags::default(),
    ))
}

/// Trace norm `Tr √(AA†)`, computed as the sum of singular values.
pub fn trace_norm(a: &Operator) -> f64 {
    if a.dim() == 0 {
        return 0.0;
    }
    a.matrix().clone().svd(false, false).singular_values.sum()
}

/// Inverse with the 2-norm condition number `σ_max / σ_min`.
pub fn invert(a: &Operator) -> Result<(Operator, f64)> {
    let (inv, cond) = invert_matrix(a.matrix())?;
    Ok((Operator::from_parts(inv, Flags::default()), cond))
}

pub(crate) fn invert_matrix(m: &DMatrix<C64>) -> Result<(DMatrix<C64>, f64)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((m.clone(), 1.0));
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(smin > 1e-13 * smax) {
        return Err(Error::SingularMatrix { condition });
    }
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularMatrix { condition })?;
    Ok((inv, condition))
}

pub fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_real(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn unitarity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    frobenius(&(m.adjoint() * m - DMatrix::<C64>::identity(n, n)))
}

/// Principal square root and inverse square root of a Hermitian positive
/// definite matrix.
pub(crate) fn sqrt_and_inv_sqrt(g: &DMatrix<C64>) -> Option<(DMatrix<C64>, DMatrix<C64>, f64)> {
    let spec = eig_hermitian_matrix(g);
    let lmin = spec.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let lmax = spec.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if !(lmin > 0.0) {
        return None;
    }
    let sqrt = spec.apply(|l| C64::new(l.sqrt(), 0.0));
    let inv_sqrt = spec.apply(|l| C64::new(1.0 / l.sqrt(), 0.0));
    Some((sqrt, inv_sqrt, lmax / lmin))
}
