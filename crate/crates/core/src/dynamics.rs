// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! Reduced qubit dynamics `Φ_t(ρ₀) = Tr_E[U_t (ρ₀ ⊗ ω) U_t†]`.
//!
//! Choi convention: `choi = Σ_ij E_ij ⊗ Φ(E_ij)`, input index slow and output
//! index fast, so `choi[2i + k, 2j + l] = Φ(E_ij)[k, l]`.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::blockop::{partial_trace, pauli_x, pauli_y, pauli_z, BlockOperator, Qubit};
use crate::diagonalize::{DirectPropagator, RiccatiPropagator};
use crate::error::{Error, Result};
use crate::fock::{basis_state, FockSpace};
use crate::matfun::{eig_hermitian_matrix, frobenius, unitarity_defect, Flags, MatFn, Operator};
use crate::C64;

/// Tolerance on `‖U†U − I‖_F` accepted by [`reduced_state`].
pub const UNITARITY_TOL: f64 = 1e-8;

const STATE_TOL: f64 = 1e-12;
const OUTPUT_TOL: f64 = 1e-10;

fn qubit_hermitian_defect(m: &Qubit) -> f64 {
    (m - m.adjoint()).norm()
}

/// Eigenvalues of the Hermitian part of a 2×2 matrix, ascending.
fn qubit_eigenvalues(m: &Qubit) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - r, mean + r]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    rho: Qubit,
}

impl QubitState {
    pub fn new(rho: Qubit) -> Result<Self> {
        Self::checked(rho, STATE_TOL)
    }

    fn checked(rho: Qubit, tol: f64) -> Result<Self> {
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        let defect = qubit_hermitian_defect(&rho);
        if defect > tol {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lo = qubit_eigenvalues(&rho)[0];
        if lo < -tol.max(1e-12) {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: [C64; 2]) -> Result<Self> {
        let n = psi[0].norm_sqr() + psi[1].norm_sqr();
        if (n - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state vector norm² {n}")));
        }
        let rho = Matrix2::new(
            psi[0] * psi[0].conj(),
            psi[0] * psi[1].conj(),
            psi[1] * psi[0].conj(),
            psi[1] * psi[1].conj(),
        );
        Self::new(rho)
    }

    /// `|0⟩⟨0|`.
    pub fn ground() -> Self {
        Self {
            rho: Matrix2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
        }
    }

    /// `|+⟩⟨+|`.
    pub fn plus() -> Self {
        Self {
            rho: Matrix2::from_element(C64::new(0.5, 0.0)),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: Qubit::identity() * C64::new(0.5, 0.0),
        }
    }

    pub fn matrix(&self) -> &Qubit {
        &self.rho
    }

    /// `(Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)`.
    pub fn bloch(&self) -> [f64; 3] {
        [
            (self.rho * pauli_x()).trace().re,
            (self.rho * pauli_y()).trace().re,
            (self.rho * pauli_z()).trace().re,
        ]
    }

    /// Largest imaginary residue of the three Bloch traces.
    pub fn bloch_imaginary_residue(&self) -> f64 {
        [pauli_x(), pauli_y(), pauli_z()]
            .iter()
            .map(|s| (self.rho * s).trace().im.abs())
            .fold(0.0, f64::max)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }
}

/// How the environment state was built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvKind {
    FockGround,
    Thermal { beta: f64 },
    FockLevel { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    rho: Operator,
    kind: EnvKind,
}

impl EnvState {
    pub fn fock_ground(space: FockSpace) -> Self {
        Self::fock_level(space, 0).expect("level 0 exists")
    }

    pub fn fock_level(space: FockSpace, n: usize) -> Result<Self> {
        let v = basis_state(space, n)?;
        let rho = &v * v.adjoint();
        let kind = if n == 0 { EnvKind::FockGround } else { EnvKind::FockLevel { n } };
        Ok(Self {
            rho: Operator::from_parts(rho, Flags { hermitian: true, unitary: false }),
            kind,
        })
    }

    /// `exp(−βN)/Z` on the truncated space.
    pub fn thermal(space: FockSpace, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Config(format!("beta must be finite and non-negative, got {beta}")));
        }
        let weights: Vec<f64> = (0..space.dim()).map(|n| (-beta * n as f64).exp()).collect();
        let z: f64 = weights.iter().sum();
        let diag: Vec<f64> = weights.iter().map(|w| w / z).collect();
        Ok(Self {
            rho: Operator::from_real_diagonal(&diag),
            kind: EnvKind::Thermal { beta },
        })
    }

    pub fn from_kind(space: FockSpace, kind: EnvKind) -> Result<Self> {
        match kind {
            EnvKind::FockGround => Ok(Self::fock_ground(space)),
            EnvKind::Thermal { beta } => Self::thermal(space, beta),
            EnvKind::FockLevel { n } => Self::fock_level(space, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn matrix(&self) -> &Operator {
        &self.rho
    }

    pub fn kind(&self) -> EnvKind {
        self.kind
    }
}

/// Linear map `M ↦ Tr_E[U (M ⊗ ω) U†]` for any 2×2 `M`.
fn apply_map(u: &BlockOperator, u_dag: &BlockOperator, m: &Qubit, omega: &Operator) -> Qubit {
    partial_trace(&u.mul(&BlockOperator::product(m, omega)).mul(u_dag))
}

fn check_evolution(u: &BlockOperator, omega: &EnvState) -> Result<()> {
    if u.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            context: "environment state",
            expected: u.dim(),
            found: omega.dim(),
        });
    }
    let defect = unitarity_defect(u.flatten().matrix());
    if !(defect <= UNITARITY_TOL) {
        return Err(Error::NonUnitaryEvolution { defect });
    }
    Ok(())
}

/// `Tr_E[U_t (ρ₀ ⊗ ω) U_t†]`.
pub fn reduced_state(u_t: &BlockOperator, rho0: &QubitState, omega: &EnvState) -> Result<QubitState> {
    check_evolution(u_t, omega)?;
    let out = apply_map(u_t, &u_t.adjoint(), &rho0.rho, &omega.rho);
    QubitState::checked(out, OUTPUT_TOL)
}

/// Which route produces `U_t`.
#[derive(Debug, Clone, Copy)]
pub enum Evolution<'a> {
    /// Block-diagonalization with the given Riccati solution.
    Riccati(&'a Operator),
    /// Diagonalization of the flattened Hamiltonian.
    Direct,
}

/// `U_t` generator for either route, with the setup work done once.
#[derive(Debug, Clone)]
pub enum Propagator {
    Riccati(Box<RiccatiPropagator>),
    Direct(DirectPropagator),
}

impl Propagator {
    pub fn new(h: &BlockOperator, evolution: Evolution<'_>) -> Result<Self> {
        Ok(match evolution {
            Evolution::Riccati(x) => Self::Riccati(Box::new(RiccatiPropagator::new(h, x)?)),
            Evolution::Direct => Self::Direct(DirectPropagator::new(h)?),
        })
    }

    pub fn at(&self, t: f64) -> BlockOperator {
        match self {
            Self::Riccati(p) => p.at(t),
            Self::Direct(p) => p.at(t),
        }
    }
}

/// A qubit channel at one time, with its Choi certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub t: f64,
    pub choi: DMatrix<C64>,
    pub min_eigenvalue: f64,
    pub tp_defect: f64,
}

impl Channel {
    /// Builds the certificates from the images `Φ(E_ij)`.
    pub fn from_images(t: f64, images: &[[Qubit; 2]; 2]) -> Self {
        let mut choi = DMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        choi[(2 * i + k, 2 * j + l)] = images[i][j][(k, l)];
                    }
                }
            }
        }
        let min_eigenvalue = eig_hermitian_matrix(&choi).eigenvalues[0];
        let tp_defect = tp_defect(&choi);
        Self {
            t,
            choi,
            min_eigenvalue,
            tp_defect,
        }
    }

    pub fn hermitian_defect(&self) -> f64 {
        frobenius(&(&self.choi - self.choi.adjoint()))
    }

    /// `‖choi − Σ E_ij ⊗ E_ij‖_F`.
    pub fn identity_defect(&self) -> f64 {
        frobenius(&(&self.choi - identity_choi()))
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol
    }

    pub fn is_tp(&self, tol: f64) -> bool {
        self.tp_defect <= tol
    }

    /// `Φ(ρ) = Σ_ij ρ_ij Φ(E_ij)`, read back from the Choi matrix.
    pub fn apply(&self, rho: &Qubit) -> Qubit {
        let mut out = Qubit::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[(k, l)] += rho[(i, j)] * self.choi[(2 * i + k, 2 * j + l)];
                    }
                }
            }
        }
        out
    }
}

/// Choi matrix of the identity channel.
pub fn identity_choi() -> DMatrix<C64> {
    let mut c = DMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            c[(2 * i + i, 2 * j + j)] = C64::new(1.0, 0.0);
        }
    }
    c
}

/// `‖Tr_out(choi) − I‖_F`, tracing out the fast (output) index.
pub fn tp_defect(choi: &DMatrix<C64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let tr = choi[(2 * i, 2 * j)] + choi[(2 * i + 1, 2 * j + 1)];
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (tr - C64::new(target, 0.0)).norm_sqr();
        }
    }
    acc.sqrt()
}

fn matrix_unit(i: usize, j: usize) -> Qubit {
    let mut e = Qubit::zeros();
    e[(i, j)] = C64::new(1.0, 0.0);
    e
}

/// Channel from an already computed `U_t`.
pub fn channel_from_unitary(u_t: &BlockOperator, omega: &EnvState, t: f64) -> Result<Channel> {
    check_evolution(u_t, omega)?;
    let u_dag = u_t.adjoint();
    let img = |i: usize, j: usize| apply_map(u_t, &u_dag, &matrix_unit(i, j), &omega.rho);
    let images = [[img(0, 0), img(0, 1)], [img(1, 0), img(1, 1)]];
    Ok(Channel::from_images(t, &images))
}

pub fn channel_at(h: &BlockOperator, omega: &EnvState, t: f64, evolution: Evolution<'_>) -> Result<Channel> {
    let u = Propagator::new(h, evolution)?.at(t);
    channel_from_unitary(&u, omega, t)
}

/// One sample of a Bloch trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: QubitState,
    pub bloch: [f64; 3],
    pub purity: f64,
}

/// `t_max · k / (steps − 1)` for `k = 0..steps`; a single point `0` when `steps = 1`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidState("time grid has non-finite entries".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidState("time grid must be strictly ascending".into()));
    }
    Ok(())
}

pub fn bloch_trajectory(
    propagator: &Propagator,
    omega: &EnvState,
    rho0: &QubitState,
    t_grid: &[f64],
) -> Result<Vec<TrajectoryPoint>> {
    check_grid(t_grid)?;
    t_grid
        .iter()
        .map(|&t| {
            let state = reduced_state(&propagator.at(t), rho0, omega)?;
            Ok(TrajectoryPoint {
                t,
                bloch: state.bloch(),
                purity: state.purity(),
                state,
            })
        })
        .collect()
}

/// `e^{−2|g|²t²}`, the coherence factor of pure dephasing from the vacuum.
pub fn dephasing_coherence_factor(g: C64, t: f64) -> f64 {
    (-2.0 * g.norm_sqr() * t * t).exp()
}

/// `⟨0| e^{−2i H_f t} |0⟩` evaluated on the truncated space.
pub fn truncated_vacuum_overlap(h_field: &Operator, t: f64) -> Result<C64> {
    let u = crate::matfun::mat_fn(h_field, MatFn::ExpIt(2.0 * t))?;
    Ok(u.matrix()[(0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockop::{assemble, ModelSpec};
    use crate::diagonalize::evolve_direct;
    use crate::ensemble;
    use crate::fock::{field_operator, FieldCoupling};
    use crate::matfun::expm;
    use crate::riccati::{solve_spectral, solve_with_fallback, RiccatiProblem, Selection};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sp(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    fn dephasing(n_max: usize, g: C64) -> BlockOperator {
        let space = sp(n_max);
        assemble(&ModelSpec::dephasing(field_operator(space, FieldCoupling(g))), space).unwrap()
    }

    fn scalar(n_max: usize, alpha: f64) -> BlockOperator {
        let space = sp(n_max);
        assemble(&ModelSpec::scalar_coupling(alpha, field_operator(space, FieldCoupling::real(1.0))), space).unwrap()
    }

    #[test]
    fn qubit_state_validation() {
        assert!(QubitState::new(Qubit::identity()).is_err());
        let bad = Matrix2::new(C64::new(1.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.5, 0.0));
        assert!(QubitState::new(bad).is_err());
        let skew = Matrix2::new(C64::new(0.5, 0.0), C64::new(0.1, 0.0), C64::new(-0.1, 0.0), C64::new(0.5, 0.0));
        assert!(QubitState::new(skew).is_err());
        assert_eq!(QubitState::plus().bloch(), [1.0, 0.0, 0.0]);
        assert_eq!(QubitState::ground().bloch(), [0.0, 0.0, 1.0]);
        assert_eq!(QubitState::maximally_mixed().purity(), 0.5);
        let s = QubitState::pure([C64::new(0.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert_eq!(s.bloch(), [0.0, 0.0, -1.0]);
    }

    #[test]
    fn env_states_are_normalized() {
        let space = sp(10);
        for kind in [EnvKind::FockGround, EnvKind::Thermal { beta: 0.7 }, EnvKind::FockLevel { n: 3 }, EnvKind::Thermal { beta: 0.0 }] {
            let w = EnvState::from_kind(space, kind).unwrap();
            assert!((w.matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert_eq!(w.matrix().hermitian_defect(), 0.0);
            assert!(eig_hermitian_matrix(w.matrix().matrix()).eigenvalues[0] >= -1e-12);
        }
        assert_eq!(EnvState::fock_level(space, 0).unwrap().kind(), EnvKind::FockGround);
        assert!(EnvState::fock_level(space, 11).is_err());
        assert!(EnvState::thermal(space, -1.0).is_err());
        // thermal oracle: geometric weights
        let w = EnvState::thermal(space, 1.0).unwrap();
        let ratio = w.matrix().matrix()[(1, 1)].re / w.matrix().matrix()[(0, 0)].re;
        assert!((ratio - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn reduced_state_at_zero_time() {
        let h = scalar(6, 0.5);
        let omega = EnvState::thermal(sp(6), 0.4).unwrap();
        let rho0 = QubitState::pure([C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let out = reduced_state(&evolve_direct(&h, 0.0).unwrap(), &rho0, &omega).unwrap();
        assert!((out.matrix() - rho0.matrix()).norm() <= 1e-12);
    }

    #[test]
    fn reduced_state_guards() {
        let omega = EnvState::fock_ground(sp(4));
        let rho0 = QubitState::plus();
        let u = BlockOperator::identity(3);
        assert!(matches!(reduced_state(&u, &rho0, &omega), Err(Error::DimensionMismatch { .. })));
        let u = BlockOperator::identity(5).scale(C64::new(1.1, 0.0));
        assert!(matches!(reduced_state(&u, &rho0, &omega), Err(Error::NonUnitaryEvolution { .. })));
    }

    #[test]
    fn dephasing_populations_and_coherence() {
        let g = C64::new(0.8, 0.3);
        let h = dephasing(32, g);
        let omega = EnvState::fock_ground(sp(32));
        let rho0 = QubitState::pure([C64::new(0.6, 0.0), C64::new(0.48, 0.64)]).unwrap();
        let prop = Propagator::new(&h, Evolution::Direct).unwrap();
        let t_max = 1.5 / g.norm();
        let grid = uniform_grid(t_max, 16);
        let traj = bloch_trajectory(&prop, &omega, &rho0, &grid).unwrap();
        let c0 = rho0.matrix()[(0, 1)].norm();
        for p in &traj {
            let r = p.state.matrix();
            assert!((r[(0, 0)] - rho0.matrix()[(0, 0)]).norm() <= 1e-10);
            assert!((r[(1, 1)] - rho0.matrix()[(1, 1)]).norm() <= 1e-10);
            // oracle: vacuum overlap of a displacement by 2gt
            let expect = c0 * (-2.0 * g.norm_sqr() * p.t * p.t).exp();
            assert!((r[(0, 1)].norm() - expect).abs() <= 1e-6, "t={}", p.t);
            assert!(p.purity >= 0.5 - 1e-10 && p.purity <= 1.0 + 1e-10);
            assert!(p.state.bloch_imaginary_residue() <= 1e-10);
        }
    }

    #[test]
    fn vacuum_overlap_matches_pade_on_larger_space() {
        let g = C64::new(1.0, 0.0);
        for t in [0.2, 0.9, 1.5] {
            let small = truncated_vacuum_overlap(&field_operator(sp(32), FieldCoupling(g)), t).unwrap();
            let big = field_operator(sp(96), FieldCoupling(g));
            let m = big.matrix() * C64::new(0.0, -2.0 * t);
            let oracle = expm(&m)[(0, 0)];
            assert!((small - oracle).norm() < 1e-8);
            assert!((oracle.norm() - dephasing_coherence_factor(g, t)).abs() < 1e-10);
        }
    }

    #[test]
    fn excited_state_is_fixed_in_dephasing() {
        let h = dephasing(12, C64::new(1.0, 0.0));
        let omega = EnvState::fock_ground(sp(12));
        let rho0 = QubitState::pure([C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let prop = Propagator::new(&h, Evolution::Direct).unwrap();
        for p in bloch_trajectory(&prop, &omega, &rho0, &[0.0, 0.5, 1.0]).unwrap() {
            assert!((p.bloch[2] - 1.0).abs() < 1e-12);
        }
        let mixed = QubitState::maximally_mixed();
        for p in bloch_trajectory(&prop, &omega, &mixed, &[0.0, 0.7, 2.0]).unwrap() {
            assert!(p.bloch.iter().all(|b| b.abs() < 1e-12));
        }
        let single = bloch_trajectory(&prop, &omega, &QubitState::plus(), &[0.0]).unwrap();
        assert_eq!(single.len(), 1);
        assert!((single[0].bloch[0] - 1.0).abs() < 1e-12);
        assert!(bloch_trajectory(&prop, &omega, &mixed, &[1.0, 0.5]).is_err());
        assert!(bloch_trajectory(&prop, &omega, &mixed, &[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn identity_channel_at_zero() {
        let h = scalar(5, 0.5);
        let omega = EnvState::thermal(sp(5), 0.3).unwrap();
        let ch = channel_at(&h, &omega, 0.0, Evolution::Direct).unwrap();
        assert!(ch.identity_defect() <= 1e-10);
        assert!((ch.min_eigenvalue).abs() < 1e-12);
        assert!(ch.tp_defect <= 1e-12);
        assert_eq!(tp_defect(&identity_choi()), 0.0);
    }

    #[test]
    fn channel_certificates_and_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (n_max, alpha) in [(4, 0.5), (8, 1.2)] {
            let h = scalar(n_max, alpha);
            let p = RiccatiProblem::from_block(&h).unwrap();
            let x = solve_spectral(&p, Selection::LowerHalf).unwrap().x;
            for omega in [EnvState::fock_ground(sp(n_max)), EnvState::thermal(sp(n_max), 0.5).unwrap()] {
                for t in [0.1, 1.0, 3.0] {
                    let a = channel_at(&h, &omega, t, Evolution::Riccati(&x)).unwrap();
                    let b = channel_at(&h, &omega, t, Evolution::Direct).unwrap();
                    assert!(a.min_eigenvalue >= -1e-9 && b.min_eigenvalue >= -1e-9);
                    assert!(a.tp_defect <= 1e-10 && b.tp_defect <= 1e-10);
                    assert!(a.hermitian_defect() <= 1e-10);
                    assert!(frobenius(&(&a.choi - &b.choi)) <= 1e-8);
                    // the Choi matrix reproduces the reduced state
                    let psi = ensemble::qubit_vector(&mut rng);
                    let rho0 = QubitState::pure(psi).unwrap();
                    let direct = reduced_state(&evolve_direct(&h, t).unwrap(), &rho0, &omega).unwrap();
                    assert!((b.apply(rho0.matrix()) - direct.matrix()).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn random_block_hamiltonian_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let h = ensemble::hermitian_block(&mut rng, 6);
        let omega = EnvState::thermal(sp(5), 0.2).unwrap();
        for t in [0.3, 2.0] {
            let ch = channel_at(&h, &omega, t, Evolution::Direct).unwrap();
            assert!(ch.is_cp(1e-9) && ch.is_tp(1e-10));
        }
    }

    #[test]
    fn dephasing_riccati_path_uses_zero_solution() {
        let h = dephasing(8, C64::new(1.0, 0.0));
        let p = RiccatiProblem::from_block(&h).unwrap();
        assert!(solve_spectral(&p, Selection::LowerHalf).is_err());
        let sol = solve_with_fallback(&p, Selection::LowerHalf, 1e-12).unwrap();
        assert_eq!(sol.residual_norm, 0.0);
        assert_eq!(sol.x.frobenius_norm(), 0.0);
        let omega = EnvState::fock_ground(sp(8));
        let a = channel_at(&h, &omega, 0.8, Evolution::Riccati(&sol.x)).unwrap();
        let b = channel_at(&h, &omega, 0.8, Evolution::Direct).unwrap();
        assert!(frobenius(&(&a.choi - &b.choi)) <= 1e-10);
    }

    #[test]
    fn grid() {
        assert_eq!(uniform_grid(2.0, 1), vec![0.0]);
        assert_eq!(uniform_grid(2.0, 3), vec![0.0, 1.0, 2.0]);
    }
}
