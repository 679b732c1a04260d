// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! Real-linear operators `v ↦ L v + A conj(v)` and their realification.
//!
//! A real-linear map on `Cᵈ` becomes an ordinary real `2d × 2d` matrix acting
//! on `(Re v, Im v)`. Multiplication by `i` turns into `J = [[0, −I], [I, 0]]`,
//! which commutes with the realification of complex-linear maps but not with
//! antilinear ones. That is why, for an antilinear Riccati solution `τ`,
//!
//! `exp(−iHt) = S_τ cos(H_d t) S_{−τ} − i S_τ sin(H_d t) S_{−τ}`
//!
//! holds while `S_τ exp(−iH_d t) S_{−τ}` does not, with `H_d = S_{−τ} H S_τ`.
//!
//! Adjoint convention for the antilinear part: `⟨τ†φ|ψ⟩ = ⟨τψ|φ⟩`, so the
//! adjoint of `v ↦ A conj(v)` is `v ↦ Aᵀ conj(v)`.

use nalgebra::{DMatrix, DVector};

use crate::blockop::BlockOperator;
use crate::error::{Error, Result};
use crate::matfun::{expm, expm_real, frobenius, frobenius_real, invert_matrix, Flags, Operator};
use crate::riccati::{Method, RiccatiProblem, RiccatiSolution};
use crate::C64;

/// Relative tolerance for classifying an operator as linear or antilinear.
pub const PART_TOL: f64 = 1e-12;

/// Relative tolerance for the block-diagonality precondition of [`evolve_antilinear`].
pub const BLOCK_DIAGONAL_TOL: f64 = 1e-9;

fn conj_mat(m: &DMatrix<C64>) -> DMatrix<C64> {
    m.map(|z| z.conj())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearOp {
    l: DMatrix<C64>,
    a: DMatrix<C64>,
}

impl RealLinearOp {
    pub fn new(l: DMatrix<C64>, a: DMatrix<C64>) -> Result<Self> {
        let d = l.nrows();
        for m in [&l, &a] {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.nrows(),
                    cols: m.ncols(),
                });
            }
        }
        if a.nrows() != d {
            return Err(Error::DimensionMismatch {
                context: "antilinear part",
                expected: d,
                found: a.nrows(),
            });
        }
        Ok(Self { l, a })
    }

    pub fn linear(op: &Operator) -> Self {
        let d = op.dim();
        Self {
            l: op.matrix().clone(),
            a: DMatrix::zeros(d, d),
        }
    }

    /// `v ↦ A conj(v)`.
    pub fn antilinear(a: DMatrix<C64>) -> Result<Self> {
        let d = a.nrows();
        Self::new(DMatrix::zeros(d, d), a)
    }

    /// Complex conjugation `K`.
    pub fn conjugation(d: usize) -> Self {
        Self {
            l: DMatrix::zeros(d, d),
            a: DMatrix::identity(d, d),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            l: DMatrix::identity(d, d),
            a: DMatrix::zeros(d, d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            l: DMatrix::zeros(d, d),
            a: DMatrix::zeros(d, d),
        }
    }

    /// Multiplication by the scalar `c` (a complex-linear map).
    pub fn scalar(d: usize, c: C64) -> Self {
        Self {
            l: DMatrix::identity(d, d) * c,
            a: DMatrix::zeros(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn linear_part(&self) -> &DMatrix<C64> {
        &self.l
    }

    pub fn antilinear_part(&self) -> &DMatrix<C64> {
        &self.a
    }

    /// `√(‖L‖²_F + ‖A‖²_F)`.
    pub fn norm(&self) -> f64 {
        frobenius(&self.l).hypot(frobenius(&self.a))
    }

    pub fn is_complex_linear(&self) -> bool {
        frobenius(&self.a) <= PART_TOL * self.norm().max(1.0)
    }

    pub fn is_antilinear(&self) -> bool {
        frobenius(&self.l) <= PART_TOL * self.norm().max(1.0)
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.l * v + &self.a * v.map(|z| z.conj())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RealLinearOp) -> Result<RealLinearOp> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "compose",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, q: &RealLinearOp) -> RealLinearOp {
        RealLinearOp {
            l: &self.l * &q.l + &self.a * conj_mat(&q.a),
            a: &self.l * &q.a + &self.a * conj_mat(&q.l),
        }
    }

    /// `(L†, Aᵀ)`.
    pub fn adjoint(&self) -> RealLinearOp {
        RealLinearOp {
            l: self.l.adjoint(),
            a: self.a.transpose(),
        }
    }

    pub fn add(&self, other: &RealLinearOp) -> RealLinearOp {
        RealLinearOp {
            l: &self.l + &other.l,
            a: &self.a + &other.a,
        }
    }

    pub fn sub(&self, other: &RealLinearOp) -> RealLinearOp {
        RealLinearOp {
            l: &self.l - &other.l,
            a: &self.a - &other.a,
        }
    }

    pub fn scale_real(&self, c: f64) -> RealLinearOp {
        let c = C64::new(c, 0.0);
        RealLinearOp {
            l: &self.l * c,
            a: &self.a * c,
        }
    }

    pub fn realify(&self) -> Realification {
        let d = self.dim();
        let mut r = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                let (l, a) = (self.l[(i, j)], self.a[(i, j)]);
                r[(i, j)] = l.re + a.re;
                r[(i, j + d)] = -l.im + a.im;
                r[(i + d, j)] = l.im + a.im;
                r[(i + d, j + d)] = l.re - a.re;
            }
        }
        Realification { r }
    }
}

/// Real `2d × 2d` matrix acting on `(Re v, Im v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realification {
    pub r: DMatrix<f64>,
}

impl Realification {
    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let d = v.len();
        let x = DVector::from_iterator(2 * d, v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)));
        let y = &self.r * x;
        DVector::from_fn(d, |i, _| C64::new(y[i], y[i + d]))
    }

    /// Inverse map back to `(L, A)`.
    pub fn unrealify(&self) -> RealLinearOp {
        let d = self.dim() / 2;
        let r = &self.r;
        let mut l = DMatrix::zeros(d, d);
        let mut a = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let (p, q, s, u) = (r[(i, j)], r[(i, j + d)], r[(i + d, j)], r[(i + d, j + d)]);
                l[(i, j)] = C64::new(0.5 * (p + u), 0.5 * (s - q));
                a[(i, j)] = C64::new(0.5 * (p - u), 0.5 * (s + q));
            }
        }
        RealLinearOp { l, a }
    }
}

/// `J = [[0, −I], [I, 0]]`, the realification of multiplication by `i` on `Cᵈ`.
pub fn j_matrix(d: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        j[(k, k + d)] = -1.0;
        j[(k + d, k)] = 1.0;
    }
    j
}

/// 2×2 grid of real-linear operators on `H_E ⊕ H_E`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearBlockOp {
    blocks: [[RealLinearOp; 2]; 2],
}

impl RealLinearBlockOp {
    pub fn new(b11: RealLinearOp, b12: RealLinearOp, b21: RealLinearOp, b22: RealLinearOp) -> Result<Self> {
        let d = b11.dim();
        for b in [&b12, &b21, &b22] {
            if b.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: "real-linear block",
                    expected: d,
                    found: b.dim(),
                });
            }
        }
        Ok(Self {
            blocks: [[b11, b12], [b21, b22]],
        })
    }

    pub fn from_block(h: &BlockOperator) -> Self {
        let lift = |i: usize, j: usize| RealLinearOp::linear(h.block(i, j));
        Self {
            blocks: [[lift(0, 0), lift(0, 1)], [lift(1, 0), lift(1, 1)]],
        }
    }

    pub fn dim(&self) -> usize {
        self.blocks[0][0].dim()
    }

    pub fn block(&self, i: usize, j: usize) -> &RealLinearOp {
        &self.blocks[i][j]
    }

    pub fn compose(&self, rhs: &RealLinearBlockOp) -> Result<RealLinearBlockOp> {
        if rhs.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "block compose",
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        let (a, b) = (&self.blocks, &rhs.blocks);
        let entry = |i: usize, j: usize| {
            a[i][0]
                .compose_unchecked(&b[0][j])
                .add(&a[i][1].compose_unchecked(&b[1][j]))
        };
        Ok(Self {
            blocks: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
        })
    }

    pub fn scale_real(&self, c: f64) -> Self {
        let b = &self.blocks;
        Self {
            blocks: [
                [b[0][0].scale_real(c), b[0][1].scale_real(c)],
                [b[1][0].scale_real(c), b[1][1].scale_real(c)],
            ],
        }
    }

    /// The same map as a single real-linear operator on `C^{2d}`, qubit index slow.
    pub fn flatten(&self) -> RealLinearOp {
        let d = self.dim();
        let mut l = DMatrix::zeros(2 * d, 2 * d);
        let mut a = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..2 {
            for j in 0..2 {
                l.view_mut((i * d, j * d), (d, d)).copy_from(&self.blocks[i][j].l);
                a.view_mut((i * d, j * d), (d, d)).copy_from(&self.blocks[i][j].a);
            }
        }
        RealLinearOp { l, a }
    }

    pub fn realify(&self) -> Realification {
        self.flatten().realify()
    }

    /// Norms of blocks (1,2) and (2,1).
    pub fn offdiag_norms(&self) -> (f64, f64) {
        (self.blocks[0][1].norm(), self.blocks[1][0].norm())
    }
}

/// `τVτ + τH₊ − H₋τ − V†` for an antilinear `τ`.
///
/// The linear part of the result collects `τVτ − V†`, the antilinear part
/// collects `τH₊ − H₋τ`.
pub fn antilinear_riccati_residual(p: &RiccatiProblem, tau: &RealLinearOp) -> Result<RealLinearOp> {
    if tau.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "antilinear candidate",
            expected: p.dim(),
            found: tau.dim(),
        });
    }
    if !tau.is_antilinear() {
        return Err(Error::InvalidState("tau must be antilinear".into()));
    }
    let v = RealLinearOp::linear(&p.v);
    let hp = RealLinearOp::linear(&p.h_plus);
    let hm = RealLinearOp::linear(&p.h_minus);
    let vd = RealLinearOp::linear(&p.v.adjoint());
    let tvt = tau.compose_unchecked(&v).compose_unchecked(tau);
    Ok(tvt
        .add(&tau.compose_unchecked(&hp))
        .sub(&hm.compose_unchecked(tau))
        .sub(&vd))
}

/// Complex conjugation as a Riccati candidate; `x` holds the identity matrix
/// of its antilinear part.
pub fn conjugation_solution(p: &RiccatiProblem) -> Result<RiccatiSolution> {
    let d = p.dim();
    let res = antilinear_riccati_residual(p, &RealLinearOp::conjugation(d))?;
    Ok(RiccatiSolution {
        x: Operator::identity(d),
        residual_norm: res.norm(),
        method: Method::Conjugation,
        history: Vec::new(),
    })
}

/// `H = [[H₊, V], [V†, conj(H₊)]]` with complex symmetric `V`, a family for
/// which `τ = K` solves the Riccati equation.
pub fn conjugation_family(h_plus: &Operator, v: &Operator) -> Result<BlockOperator> {
    let sym_defect = frobenius(&(v.matrix() - v.matrix().transpose()));
    if sym_defect > PART_TOL * v.frobenius_norm().max(1.0) {
        return Err(Error::InvalidState(format!(
            "coupling must be complex symmetric (defect {sym_defect:e})"
        )));
    }
    BlockOperator::hermitian_from(h_plus.clone(), v.clone(), h_plus.conj())
}

/// `S_τ = (1/√2) [[I, −τ†], [τ, I]]` and its two-sided inverse
/// `S_{−τ} = √2 diag((I + τ†τ)⁻¹, (I + ττ†)⁻¹) [[I, τ†], [−τ, I]]`.
///
/// For an antiunitary `τ` the normalization reduces to `(1/√2) [[I, τ†], [−τ, I]]`.
pub fn build_s_tau(tau: &RealLinearOp) -> Result<(RealLinearBlockOp, RealLinearBlockOp)> {
    if !tau.is_antilinear() {
        return Err(Error::InvalidState("tau must be antilinear".into()));
    }
    let d = tau.dim();
    let eye = RealLinearOp::identity(d);
    let tau_dag = tau.adjoint();
    let half = std::f64::consts::FRAC_1_SQRT_2;

    let s_tau = RealLinearBlockOp::new(eye.clone(), tau_dag.scale_real(-1.0), tau.clone(), eye.clone())?
        .scale_real(half);

    // τ†τ and ττ† are complex-linear for antilinear τ
    let n_plus = eye.add(&tau_dag.compose_unchecked(tau));
    let n_minus = eye.add(&tau.compose_unchecked(&tau_dag));
    let (inv_plus, _) = invert_matrix(&n_plus.l)?;
    let (inv_minus, _) = invert_matrix(&n_minus.l)?;
    let inv_plus = RealLinearOp::new(inv_plus, DMatrix::zeros(d, d))?;
    let inv_minus = RealLinearOp::new(inv_minus, DMatrix::zeros(d, d))?;
    let norm = RealLinearBlockOp::new(inv_plus, RealLinearOp::zeros(d), RealLinearOp::zeros(d), inv_minus)?;
    let inner = RealLinearBlockOp::new(eye.clone(), tau_dag, tau.scale_real(-1.0), eye)?;
    let s_minus_tau = norm.compose(&inner)?.scale_real(std::f64::consts::SQRT_2);
    Ok((s_tau, s_minus_tau))
}

/// `cos(tM)` and `sin(tM)` for a real square matrix.
///
/// Symmetric inputs go through the real symmetric eigensolver; others through
/// `exp(itM) = cos(tM) + i sin(tM)`.
pub fn real_cos_sin(m: &DMatrix<f64>, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (m.clone(), m.clone());
    }
    let asym = frobenius_real(&(m - m.transpose()));
    if asym <= 1e-12 * frobenius_real(m).max(1.0) {
        let sym = (m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let u = &eig.eigenvectors;
        let fun = |f: &dyn Fn(f64) -> f64| {
            let mut scaled = u.clone();
            for (j, &l) in eig.eigenvalues.iter().enumerate() {
                scaled.column_mut(j).scale_mut(f(l * t));
            }
            scaled * u.transpose()
        };
        (fun(&f64::cos), fun(&f64::sin))
    } else {
        let e = expm(&m.map(|x| C64::new(0.0, x * t)));
        (e.map(|z| z.re), e.map(|z| z.im))
    }
}

/// Realified pieces of the antilinear evolution formula for one `(H, τ)` pair.
#[derive(Debug, Clone)]
pub struct AntilinearPropagator {
    s_tau: DMatrix<f64>,
    s_minus_tau: DMatrix<f64>,
    /// Realification of `H_d = S_{−τ} H S_τ`.
    h_d: DMatrix<f64>,
    /// Realification of `−iH`.
    generator: DMatrix<f64>,
    j: DMatrix<f64>,
}

impl AntilinearPropagator {
    pub fn new(h: &BlockOperator, tau: &RealLinearOp) -> Result<Self> {
        let h = h.clone().into_checked_hermitian()?;
        if tau.dim() != h.dim() {
            return Err(Error::DimensionMismatch {
                context: "tau",
                expected: h.dim(),
                found: tau.dim(),
            });
        }
        let (s_tau, s_minus_tau) = build_s_tau(tau)?;
        let lifted = RealLinearBlockOp::from_block(&h);
        let h_d = s_minus_tau.compose(&lifted)?.compose(&s_tau)?;
        let (upper, lower) = h_d.offdiag_norms();
        let tol = BLOCK_DIAGONAL_TOL * h.frobenius_norm().max(1.0);
        if upper > tol || lower > tol {
            return Err(Error::NotBlockDiagonalizable { upper, lower });
        }
        let d2 = 2 * h.dim();
        let minus_i_h = RealLinearOp::linear(&h.flatten().scale(C64::new(0.0, -1.0)));
        Ok(Self {
            s_tau: s_tau.realify().r,
            s_minus_tau: s_minus_tau.realify().r,
            h_d: h_d.realify().r,
            generator: minus_i_h.realify().r,
            j: j_matrix(d2),
        })
    }

    /// Realified `H_d`.
    pub fn h_d(&self) -> &DMatrix<f64> {
        &self.h_d
    }

    /// `R(S_τ) cos(t R(H_d)) R(S_{−τ}) − J R(S_τ) sin(t R(H_d)) R(S_{−τ})`.
    pub fn at(&self, t: f64) -> Realification {
        let (c, s) = real_cos_sin(&self.h_d, t);
        let cos_part = &self.s_tau * c * &self.s_minus_tau;
        let sin_part = &self.j * (&self.s_tau * s * &self.s_minus_tau);
        Realification { r: cos_part - sin_part }
    }

    /// `R(S_τ) exp(−t J R(H_d)) R(S_{−τ})`, the conjugation that does not reproduce `U_t`.
    pub fn naive_at(&self, t: f64) -> Realification {
        let gen = -(&self.j * &self.h_d) * t;
        Realification {
            r: &self.s_tau * expm_real(&gen) * &self.s_minus_tau,
        }
    }

    /// `exp(t R(−iH))`.
    pub fn direct_at(&self, t: f64) -> Realification {
        Realification {
            r: expm_real(&(&self.generator * t)),
        }
    }

    /// `‖R(S_{−τ}) R(S_τ) − I‖_F`.
    pub fn inverse_defect(&self) -> f64 {
        let n = self.s_tau.nrows();
        frobenius_real(&(&self.s_minus_tau * &self.s_tau - DMatrix::<f64>::identity(n, n)))
    }
}

/// Realified `U_t` from the antilinear formula.
pub fn evolve_antilinear(h: &BlockOperator, tau: &RealLinearOp, t: f64) -> Result<Realification> {
    Ok(AntilinearPropagator::new(h, tau)?.at(t))
}

/// Lifts a complex operator into a [`RealLinearOp`] and returns its realification.
pub fn realify_operator(op: &Operator) -> Realification {
    RealLinearOp::linear(op).realify()
}

/// Inverse of [`realify_operator`] for a complex-linear realification.
pub fn complex_part(r: &Realification) -> Operator {
    Operator::from_parts(r.unrealify().l, Flags::default())
}
