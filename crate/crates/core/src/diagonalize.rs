// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! Block-diagonalization `S⁻¹ H S = diag(Z₊, Z₋)` with
//! `S = [[I, −X†], [X, I]]`, `Z₊ = H₊ + VX`, `Z₋ = H₋ − V†X†`, and the
//! evolution operator `U_t = S diag(e^{−iZ₊t}, e^{−iZ₋t}) S⁻¹`.
//!
//! `Z±` are in general not Hermitian. For an exact solution they are similar
//! to Hermitian matrices through the Gram matrices of the two graph bases,
//! `Z₊ = G₊^{−½} K₊ G₊^{½}` with `G₊ = I + X†X` (and `G₋ = I + XX†`), so the
//! exponentials are taken from the spectral data of `K±`. When `K±` is not
//! Hermitian (the candidate is not a solution) or `G±` is badly conditioned,
//! the general Padé exponential is used instead.

use nalgebra::DMatrix;

use crate::blockop::BlockOperator;
use crate::error::Result;
use crate::matfun::{
    eig_hermitian_matrix, eigenvalues_general, expm, frobenius, invert, sqrt_and_inv_sqrt, Flags,
    Operator, SpectralData,
};
use crate::riccati::{residual, RiccatiProblem};
use crate::C64;

/// Relative Riccati residual above which [`DiagonalizationResult::residual_warning`] is set.
pub const RESIDUAL_WARN: f64 = 1e-8;

/// Gram conditioning above which the Hermitian similarity route is abandoned.
pub const GRAM_CONDITION_LIMIT: f64 = 1e10;

/// `S = [[I, −X†], [X, I]]`.
pub fn build_s(x: &Operator) -> BlockOperator {
    let d = x.dim();
    BlockOperator::new(Operator::identity(d), -&x.adjoint(), x.clone(), Operator::identity(d))
        .expect("square blocks of one dimension")
}

#[derive(Debug, Clone)]
pub struct DiagonalizationResult {
    pub s: BlockOperator,
    pub s_inv: BlockOperator,
    pub z_plus: Operator,
    pub z_minus: Operator,
    /// `S⁻¹ H S`.
    pub transformed: BlockOperator,
    /// Larger Frobenius norm of the off-diagonal blocks of `S⁻¹ H S`.
    pub offdiag_norm: f64,
    /// `σ_max / σ_min` of the flattened `S`.
    pub s_condition: f64,
    /// `‖XVX + XH₊ − H₋X − V†‖_F`.
    pub residual_norm: f64,
    /// Set when the residual exceeds `1e−8 ‖H‖_F`; results are still returned for diagnosis.
    pub residual_warning: bool,
}

impl DiagonalizationResult {
    /// Eigenvalues of `Z₊` followed by those of `Z₋`.
    pub fn block_spectrum(&self) -> Vec<C64> {
        let mut ev = eigenvalues_general(self.z_plus.matrix());
        ev.extend(eigenvalues_general(self.z_minus.matrix()));
        ev
    }
}

pub fn block_diagonalize(h: &BlockOperator, x: &Operator) -> Result<DiagonalizationResult> {
    let p = RiccatiProblem::from_block(h)?;
    let residual_norm = residual(&p, x)?.frobenius_norm();
    let s = build_s(x);
    let (s_inv_flat, s_condition) = invert(&s.flatten())?;
    let s_inv = BlockOperator::unflatten(&s_inv_flat)?;
    let transformed = s_inv.mul(h).mul(&s);
    let z_plus = &p.h_plus + &(&p.v * x);
    let z_minus = &p.h_minus - &(&p.v.adjoint() * &x.adjoint());
    Ok(DiagonalizationResult {
        offdiag_norm: transformed.offdiag_norm(),
        residual_warning: residual_norm > RESIDUAL_WARN * h.frobenius_norm(),
        s,
        s_inv,
        z_plus,
        z_minus,
        transformed,
        s_condition,
        residual_norm,
    })
}

/// How `exp(−iZt)` is evaluated for one diagonal block.
#[derive(Debug, Clone)]
enum BlockExp {
    /// `Z = G^{−½} K G^{½}` with Hermitian `K = U Λ U†`.
    Similar {
        left: DMatrix<C64>,
        right: DMatrix<C64>,
        spectral: SpectralData,
    },
    Dense(DMatrix<C64>),
}

impl BlockExp {
    fn new(z: &Operator, gram: &DMatrix<C64>) -> Self {
        if let Some((sqrt, inv_sqrt, cond)) = sqrt_and_inv_sqrt(gram) {
            if cond <= GRAM_CONDITION_LIMIT {
                let k = &sqrt * z.matrix() * &inv_sqrt;
                let defect = frobenius(&(&k - k.adjoint()));
                if defect <= 1e-10 * frobenius(&k).max(1.0) {
                    let spectral = eig_hermitian_matrix(&k);
                    return BlockExp::Similar {
                        left: inv_sqrt,
                        right: sqrt,
                        spectral,
                    };
                }
            }
        }
        BlockExp::Dense(z.matrix().clone())
    }

    fn at(&self, t: f64) -> DMatrix<C64> {
        match self {
            BlockExp::Similar {
                left,
                right,
                spectral,
            } => left * spectral.apply(|l| C64::from_polar(1.0, -l * t)) * right,
            BlockExp::Dense(z) => expm(&(z * C64::new(0.0, -t))),
        }
    }

    fn is_similarity(&self) -> bool {
        matches!(self, BlockExp::Similar { .. })
    }
}

/// Precomputed `U_t = S diag(e^{−iZ₊t}, e^{−iZ₋t}) S⁻¹`, evaluated on demand.
#[derive(Debug, Clone)]
pub struct RiccatiPropagator {
    diag: DiagonalizationResult,
    plus: BlockExp,
    minus: BlockExp,
}

impl RiccatiPropagator {
    pub fn new(h: &BlockOperator, x: &Operator) -> Result<Self> {
        let diag = block_diagonalize(h, x)?;
        let xm = x.matrix();
        let d = x.dim();
        let eye = DMatrix::<C64>::identity(d, d);
        let g_plus = &eye + xm.adjoint() * xm;
        let g_minus = &eye + xm * xm.adjoint();
        let plus = BlockExp::new(&diag.z_plus, &g_plus);
        let minus = BlockExp::new(&diag.z_minus, &g_minus);
        Ok(Self { diag, plus, minus })
    }

    pub fn diagonalization(&self) -> &DiagonalizationResult {
        &self.diag
    }

    /// True when both blocks use the Hermitian similarity route.
    pub fn uses_similarity(&self) -> bool {
        self.plus.is_similarity() && self.minus.is_similarity()
    }

    pub fn at(&self, t: f64) -> BlockOperator {
        if t == 0.0 {
            return BlockOperator::identity(self.diag.z_plus.dim());
        }
        let inner = BlockOperator::diagonal(
            Operator::from_parts(self.plus.at(t), Flags::default()),
            Operator::from_parts(self.minus.at(t), Flags::default()),
        )
        .expect("blocks share a dimension");
        self.diag.s.mul(&inner).mul(&self.diag.s_inv)
    }
}

/// `U_t` through the Riccati block-diagonalization.
pub fn evolve_riccati(h: &BlockOperator, x: &Operator, t: f64) -> Result<BlockOperator> {
    Ok(RiccatiPropagator::new(h, x)?.at(t))
}

/// `U_t = exp(−i t flatten(H))` by direct diagonalization of the flattened Hamiltonian.
#[derive(Debug, Clone)]
pub struct DirectPropagator {
    spectral: SpectralData,
}

impl DirectPropagator {
    pub fn new(h: &BlockOperator) -> Result<Self> {
        let spectral = crate::matfun::eig_hermitian(&h.flatten())?;
        Ok(Self { spectral })
    }

    pub fn at(&self, t: f64) -> BlockOperator {
        if t == 0.0 {
            return BlockOperator::identity(self.spectral.dim() / 2);
        }
        let u = self.spectral.apply(|l| C64::from_polar(1.0, -l * t));
        BlockOperator::unflatten(&Operator::from_parts(u, Flags::default()))
            .expect("even dimension")
    }

    pub fn eigenvalues(&self) -> &nalgebra::DVector<f64> {
        &self.spectral.eigenvalues
    }
}

pub fn evolve_direct(h: &BlockOperator, t: f64) -> Result<BlockOperator> {
    Ok(DirectPropagator::new(h)?.at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockop::{assemble, ModelSpec};
    use crate::ensemble;
    use crate::fock::{field_operator, parity, FieldCoupling, FockSpace};
    use crate::riccati::{solve_spectral, Selection};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sorted_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v
    }

    fn rel_diff(a: &BlockOperator, b: &BlockOperator) -> f64 {
        a.sub(b).frobenius_norm() / b.frobenius_norm()
    }

    #[test]
    fn s_of_zero_is_identity() {
        let s = build_s(&Operator::zeros(3));
        assert_eq!(s.flatten().matrix(), &DMatrix::identity(6, 6));
    }

    #[test]
    fn s_of_parity() {
        let p = parity(FockSpace::new(3).unwrap());
        let s = build_s(&p);
        assert_eq!(s.b12().matrix(), (-&p).matrix());
        assert_eq!(s.b21().matrix(), p.matrix());
        let sd = s.adjoint();
        assert_eq!(sd.b12().matrix(), p.matrix());
        assert_eq!(sd.b21().matrix(), (-&p).matrix());
    }

    #[test]
    fn gram_identity_of_s() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = ensemble::complex(&mut rng, 5);
        let s = build_s(&x);
        let sds = s.adjoint().mul(&s);
        let xm = x.matrix();
        let eye = DMatrix::<C64>::identity(5, 5);
        assert!(frobenius(&(sds.b11().matrix() - (&eye + xm.adjoint() * xm))) < 1e-10);
        assert!(frobenius(&(sds.b22().matrix() - (&eye + xm * xm.adjoint()))) < 1e-10);
        assert!(sds.offdiag_norm() < 1e-10);
    }

    #[test]
    fn zero_coupling_is_already_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = BlockOperator::hermitian_from(
            ensemble::hermitian(&mut rng, 4),
            Operator::zeros(4),
            ensemble::hermitian(&mut rng, 4),
        )
        .unwrap();
        let r = block_diagonalize(&h, &Operator::zeros(4)).unwrap();
        assert_eq!(r.offdiag_norm, 0.0);
        assert_eq!(r.z_plus.matrix(), h.b11().matrix());
        assert_eq!(r.z_minus.matrix(), h.b22().matrix());
    }

    #[test]
    fn parity_block_diagonalizes_scalar_coupling() {
        let space = FockSpace::new(8).unwrap();
        let hf = field_operator(space, FieldCoupling::real(1.0));
        let alpha = 0.5;
        let h = assemble(&ModelSpec::scalar_coupling(alpha, hf.clone()), space).unwrap();
        let p = parity(space);
        let r = block_diagonalize(&h, &p).unwrap();
        let ap = p.scale_real(alpha);
        assert!(frobenius(&(r.z_plus.matrix() - (&hf + &ap).matrix())) < 1e-14);
        assert!(frobenius(&(r.z_minus.matrix() + (&hf + &ap).matrix())) < 1e-14);
        // oracle: hand-assembled S = [[I, −P], [P, I]], S⁻¹ = S†/2 since P² = I
        let s = BlockOperator::new(Operator::identity(9), -&p, p.clone(), Operator::identity(9)).unwrap();
        let hand = s.adjoint().scale(C64::new(0.5, 0.0)).mul(&h).mul(&s);
        assert!(hand.offdiag_norm() < 1e-13);
        assert!(r.offdiag_norm < 1e-12 * h.frobenius_norm());
        assert!(!r.residual_warning);
        assert!((r.s_condition - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_solution_diagonalizes_random_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = ensemble::hermitian_block(&mut rng, 16);
        let p = RiccatiProblem::from_block(&h).unwrap();
        let x = solve_spectral(&p, Selection::LowerHalf).unwrap().x;
        let r = block_diagonalize(&h, &x).unwrap();
        let scale = h.frobenius_norm();
        assert!(r.offdiag_norm <= 1e-9 * scale);
        let flat = sorted_re(
            crate::riccati::sorted_spectrum(&h.flatten())
                .into_iter()
                .map(|l| C64::new(l, 0.0))
                .collect(),
        );
        let blocks = sorted_re(r.block_spectrum());
        for (a, b) in flat.iter().zip(&blocks) {
            assert!((a - b).norm() <= 1e-8 * scale.max(1.0));
        }
        let ss = r.s.flatten().matrix() * r.s_inv.flatten().matrix();
        assert!(frobenius(&(ss - DMatrix::identity(32, 32))) <= 1e-9 * r.s_condition);
    }

    #[test]
    fn perturbed_candidate_sets_warning() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = ensemble::hermitian_block(&mut rng, 6);
        let p = RiccatiProblem::from_block(&h).unwrap();
        let x = solve_spectral(&p, Selection::LowerHalf).unwrap().x;
        let bad = &x + &ensemble::complex(&mut rng, 6).scale_real(1e-3);
        let r = block_diagonalize(&h, &bad).unwrap();
        assert!(r.residual_warning);
        assert!(r.offdiag_norm > 1e-6);
        let prop = RiccatiPropagator::new(&h, &bad).unwrap();
        assert!(!prop.uses_similarity());
    }

    #[test]
    fn evolution_at_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = ensemble::hermitian_block(&mut rng, 4);
        let x = solve_spectral(&RiccatiProblem::from_block(&h).unwrap(), Selection::LowerHalf).unwrap().x;
        let u = evolve_riccati(&h, &x, 0.0).unwrap();
        assert!(u.sub(&BlockOperator::identity(4)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn riccati_evolution_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for d in [3, 8] {
            let h = ensemble::hermitian_block(&mut rng, d);
            let x = solve_spectral(&RiccatiProblem::from_block(&h).unwrap(), Selection::LowerHalf).unwrap().x;
            let prop = RiccatiPropagator::new(&h, &x).unwrap();
            assert!(prop.uses_similarity());
            let direct = DirectPropagator::new(&h).unwrap();
            for t in [0.1, 1.0, 10.0] {
                let u = prop.at(t);
                assert!(rel_diff(&u, &direct.at(t)) <= 1e-8, "d={d} t={t}");
                assert!(u.flatten().unitarity_defect() <= 1e-8 * (2 * d) as f64);
            }
            let (t1, t2) = (0.4, 1.3);
            let lhs = prop.at(t1).mul(&prop.at(t2));
            assert!(rel_diff(&lhs, &prop.at(t1 + t2)) <= 1e-8);
        }
    }

    #[test]
    fn dense_fallback_still_exponentiates() {
        // a non-solution candidate: the propagator is S e^{−iZt} S⁻¹ with the
        // wrong Z, but the dense route must still agree with expm of that product.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = ensemble::hermitian_block(&mut rng, 3);
        let x = ensemble::complex(&mut rng, 3).scale_real(0.1);
        let prop = RiccatiPropagator::new(&h, &x).unwrap();
        let diag = prop.diagonalization();
        let z = BlockOperator::diagonal(diag.z_plus.clone(), diag.z_minus.clone()).unwrap();
        let gen = diag.s.mul(&z).mul(&diag.s_inv).flatten();
        let oracle = expm(&(gen.matrix() * C64::new(0.0, -0.7)));
        assert!(frobenius(&(prop.at(0.7).flatten().matrix() - oracle)) < 1e-10);
    }
}
