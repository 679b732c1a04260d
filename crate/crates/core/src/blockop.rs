// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! Block operators on `H_E ⊕ H_E`.
//!
//! The total space `C² ⊗ H_E` is ordered with the qubit index slow, so block
//! `(i, j)` of a [`BlockOperator`] is `⟨i| M |j⟩` acting on the environment.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::matfun::{Flags, Operator, HERMITIAN_TOL};
use crate::C64;

pub type Qubit = Matrix2<C64>;

pub fn pauli_x() -> Qubit {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    Matrix2::new(o, l, l, o)
}

pub fn pauli_y() -> Qubit {
    let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    Matrix2::new(o, -i, i, o)
}

pub fn pauli_z() -> Qubit {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    Matrix2::new(l, o, o, -l)
}

fn qubit_hermitian_defect(m: &Qubit) -> f64 {
    (m - m.adjoint()).iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// 2×2 grid of equal-dimension operators.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    blocks: [[Operator; 2]; 2],
    hermitian: bool,
}

impl BlockOperator {
    pub fn new(b11: Operator, b12: Operator, b21: Operator, b22: Operator) -> Result<Self> {
        let d = b11.dim();
        for (what, b) in [("block (1,2)", &b12), ("block (2,1)", &b21), ("block (2,2)", &b22)] {
            if b.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: what,
                    expected: d,
                    found: b.dim(),
                });
            }
        }
        Ok(Self {
            blocks: [[b11, b12], [b21, b22]],
            hermitian: false,
        })
    }

    /// `[[H₊, V], [V†, H₋]]`, flagged Hermitian. `H±` must pass the Hermitian check.
    pub fn hermitian_from(h_plus: Operator, v: Operator, h_minus: Operator) -> Result<Self> {
        let h_plus = Operator::hermitian(h_plus.into_matrix())?;
        let h_minus = Operator::hermitian(h_minus.into_matrix())?;
        let vd = v.adjoint();
        let mut out = Self::new(h_plus, v, vd, h_minus)?;
        out.hermitian = true;
        Ok(out)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            blocks: [
                [Operator::identity(d), Operator::zeros(d)],
                [Operator::zeros(d), Operator::identity(d)],
            ],
            hermitian: true,
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            blocks: [
                [Operator::zeros(d), Operator::zeros(d)],
                [Operator::zeros(d), Operator::zeros(d)],
            ],
            hermitian: true,
        }
    }

    /// Block-diagonal operator `diag(A, B)`.
    pub fn diagonal(a: Operator, b: Operator) -> Result<Self> {
        let d = a.dim();
        let hermitian = a.is_flagged_hermitian() && b.is_flagged_hermitian();
        let mut out = Self::new(a, Operator::zeros(d), Operator::zeros(d), b)?;
        out.hermitian = hermitian;
        Ok(out)
    }

    /// `ρ ⊗ ω`, i.e. blocks `ρ_ij ω`.
    pub fn product(rho: &Qubit, omega: &Operator) -> Self {
        let blk = |i: usize, j: usize| omega.scale(rho[(i, j)]);
        Self {
            blocks: [[blk(0, 0), blk(0, 1)], [blk(1, 0), blk(1, 1)]],
            hermitian: false,
        }
    }

    /// Inverse of [`BlockOperator::flatten`].
    pub fn unflatten(m: &Operator) -> Result<Self> {
        let n = m.dim();
        if !n.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                context: "unflatten (odd dimension)",
                expected: n + 1,
                found: n,
            });
        }
        let d = n / 2;
        let blk = |i: usize, j: usize| {
            Operator::from_parts(
                m.matrix().view((i * d, j * d), (d, d)).into_owned(),
                Flags::default(),
            )
        };
        let mut out = Self::new(blk(0, 0), blk(0, 1), blk(1, 0), blk(1, 1))?;
        out.hermitian = m.is_flagged_hermitian();
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.blocks[0][0].dim()
    }

    pub fn block(&self, i: usize, j: usize) -> &Operator {
        &self.blocks[i][j]
    }

    pub fn b11(&self) -> &Operator {
        &self.blocks[0][0]
    }

    pub fn b12(&self) -> &Operator {
        &self.blocks[0][1]
    }

    pub fn b21(&self) -> &Operator {
        &self.blocks[1][0]
    }

    pub fn b22(&self) -> &Operator {
        &self.blocks[1][1]
    }

    pub fn is_flagged_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Checks the Hermitian structure and sets the flag.
    pub fn into_checked_hermitian(mut self) -> Result<Self> {
        let scale = 1.0 + self.flatten().max_norm();
        let defect = self
            .b11()
            .hermitian_defect()
            .max(self.b22().hermitian_defect())
            .max((self.b21().matrix() - self.b12().matrix().adjoint()).iter().fold(0.0, |a, z| a.max(z.norm())));
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::NonHermitianInput { defect });
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Single `2d × 2d` matrix, qubit index slow.
    pub fn flatten(&self) -> Operator {
        let d = self.dim();
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..2 {
            for j in 0..2 {
                m.view_mut((i * d, j * d), (d, d))
                    .copy_from(self.blocks[i][j].matrix());
            }
        }
        Operator::from_parts(
            m,
            Flags {
                hermitian: self.hermitian,
                unitary: false,
            },
        )
    }

    pub fn adjoint(&self) -> Self {
        let b = &self.blocks;
        Self {
            blocks: [
                [b[0][0].adjoint(), b[1][0].adjoint()],
                [b[0][1].adjoint(), b[1][1].adjoint()],
            ],
            hermitian: self.hermitian,
        }
    }

    pub fn mul(&self, rhs: &BlockOperator) -> Self {
        let (a, b) = (&self.blocks, &rhs.blocks);
        let entry = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        Self {
            blocks: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
            hermitian: false,
        }
    }

    pub fn add(&self, rhs: &BlockOperator) -> Self {
        let (a, b) = (&self.blocks, &rhs.blocks);
        let entry = |i: usize, j: usize| &a[i][j] + &b[i][j];
        Self {
            blocks: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
            hermitian: self.hermitian && rhs.hermitian,
        }
    }

    pub fn sub(&self, rhs: &BlockOperator) -> Self {
        let (a, b) = (&self.blocks, &rhs.blocks);
        let entry = |i: usize, j: usize| &a[i][j] - &b[i][j];
        Self {
            blocks: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
            hermitian: self.hermitian && rhs.hermitian,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let b = &self.blocks;
        Self {
            blocks: [
                [b[0][0].scale(c), b[0][1].scale(c)],
                [b[1][0].scale(c), b[1][1].scale(c)],
            ],
            hermitian: self.hermitian && c.im == 0.0,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .map(|b| b.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Larger Frobenius norm of the two off-diagonal blocks.
    pub fn offdiag_norm(&self) -> f64 {
        self.b12().frobenius_norm().max(self.b21().frobenius_norm())
    }
}

/// Partial trace over the environment: `(i, j) ↦ Tr M_ij`.
pub fn partial_trace(m: &BlockOperator) -> Qubit {
    Matrix2::new(
        m.b11().trace(),
        m.b12().trace(),
        m.b21().trace(),
        m.b22().trace(),
    )
}

/// One product term `s ⊗ B` of the interaction Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerm {
    pub qubit: Qubit,
    pub env: Operator,
}

/// `H = H_Q ⊗ I + I ⊗ H_E + Σ s_k ⊗ B_k`, with the scalar coupling
/// shorthand `α` adding `α σ_x` to `H_Q` (so that `V = α I`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub qubit_h: Qubit,
    pub alpha: f64,
    pub env_h: Operator,
    pub interaction: Vec<InteractionTerm>,
}

impl ModelSpec {
    /// `H± = ±H_field`, `V = α I`: the scalar-coupling setting with `qubit_h = α σ_x`
    /// and interaction `σ_z ⊗ H_field`.
    pub fn scalar_coupling(alpha: f64, h_field: Operator) -> Self {
        let d = h_field.dim();
        Self {
            qubit_h: Qubit::zeros(),
            alpha,
            env_h: Operator::zeros(d),
            interaction: vec![InteractionTerm {
                qubit: pauli_z(),
                env: h_field,
            }],
        }
    }

    /// Pure dephasing `σ_z ⊗ H_field`.
    pub fn dephasing(h_field: Operator) -> Self {
        Self::scalar_coupling(0.0, h_field)
    }

    /// Effective qubit Hamiltonian `H_Q + α σ_x`.
    pub fn effective_qubit_h(&self) -> Qubit {
        self.qubit_h + pauli_x() * C64::new(self.alpha, 0.0)
    }
}

/// Builds the block form of the total Hamiltonian.
pub fn assemble(spec: &ModelSpec, space: FockSpace) -> Result<BlockOperator> {
    let d = space.dim();
    if spec.env_h.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "environment Hamiltonian",
            expected: d,
            found: spec.env_h.dim(),
        });
    }
    let hq = spec.effective_qubit_h();
    let mut defect = qubit_hermitian_defect(&hq).max(spec.env_h.hermitian_defect());
    for term in &spec.interaction {
        if term.env.dim() != d {
            return Err(Error::DimensionMismatch {
                context: "interaction term",
                expected: d,
                found: term.env.dim(),
            });
        }
        defect = defect
            .max(qubit_hermitian_defect(&term.qubit))
            .max(term.env.hermitian_defect());
    }
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput { defect });
    }

    let eye = Operator::identity(d);
    let block = |i: usize, j: usize| {
        let mut acc = eye.scale(hq[(i, j)]);
        if i == j {
            acc = &acc + &spec.env_h;
        }
        for term in &spec.interaction {
            acc = &acc + &term.env.scale(term.qubit[(i, j)]);
        }
        acc
    };
    let b12 = block(0, 1);
    let b21 = b12.adjoint();
    let b11 = Operator::hermitian(block(0, 0).into_matrix())?;
    let b22 = Operator::hermitian(block(1, 1).into_matrix())?;
    let mut out = BlockOperator::new(b11, b12, b21, b22)?;
    out.hermitian = true;
    Ok(out)
}
