// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! The operator Riccati equation `XVX + XH₊ − H₋X − V† = 0`.
//!
//! A solution `X` makes the columns of `[I; X]` span an invariant subspace of
//! `[[H₊, V], [V†, H₋]]`. [`solve_spectral`] builds `X` from an eigenvector
//! bundle, [`solve_newton`] refines a guess with Sylvester steps, and the
//! scalar-coupling helpers cover `H± = ±H`, `V = αI`, where
//! `αX² + XH + HX − α = 0` and its commuting reduction `αX² + 2HX − α = 0`
//! are not equivalent: the parity operator solves the first only.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::blockop::BlockOperator;
use crate::error::{Error, Result};
use crate::fock::{field_operator, parity, FieldCoupling, FockSpace};
use crate::matfun::{
    eig_hermitian, invert_matrix, solve_sylvester, Flags, Operator, ABS_FLOOR,
};
use crate::C64;

/// Largest admissible condition number of the top eigenvector block `U1`.
pub const GRAPH_CONDITION_LIMIT: f64 = 1e12;

/// Default Newton iteration budget.
pub const DEFAULT_MAX_ITER: usize = 50;

/// `H₊`, `H₋` Hermitian and a coupling `V`, all `d × d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiProblem {
    pub h_plus: Operator,
    pub h_minus: Operator,
    pub v: Operator,
}

impl RiccatiProblem {
    pub fn new(h_plus: Operator, h_minus: Operator, v: Operator) -> Result<Self> {
        let d = h_plus.dim();
        for (what, op) in [("h_minus", &h_minus), ("v", &v)] {
            if op.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: what,
                    expected: d,
                    found: op.dim(),
                });
            }
        }
        let h_plus = Operator::hermitian(h_plus.into_matrix())?;
        let h_minus = Operator::hermitian(h_minus.into_matrix())?;
        Ok(Self { h_plus, h_minus, v })
    }

    /// Reads `H₊ = b11`, `V = b12`, `H₋ = b22`. `b21` is assumed to be `V†`.
    pub fn from_block(h: &BlockOperator) -> Result<Self> {
        Self::new(h.b11().clone(), h.b22().clone(), h.b12().clone())
    }

    /// The scalar-coupling problem `H₊ = H`, `H₋ = −H`, `V = αI`.
    pub fn scalar_coupling(h: &Operator, alpha: f64) -> Result<Self> {
        Self::new(
            h.clone(),
            -h,
            Operator::identity(h.dim()).scale_real(alpha),
        )
    }

    pub fn dim(&self) -> usize {
        self.h_plus.dim()
    }

    pub fn to_block(&self) -> BlockOperator {
        BlockOperator::hermitian_from(self.h_plus.clone(), self.v.clone(), self.h_minus.clone())
            .expect("validated at construction")
    }

    /// `‖[[H₊, V], [V†, H₋]]‖_F`, the scale for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.to_block().frobenius_norm()
    }

    /// Newton tolerance default, `1e−12 ‖flatten‖_F` with an absolute floor.
    pub fn default_tol(&self) -> f64 {
        (1e-12 * self.scale()).max(ABS_FLOOR)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Newton,
    Parity,
    /// Antilinear complex conjugation `τ = K`; `x` holds the matrix of the antilinear part.
    Conjugation,
    AnalyticBranch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    pub x: Operator,
    pub residual_norm: f64,
    pub method: Method,
    /// Residual norms of the Newton iterates, starting with the initial guess.
    pub history: Vec<f64>,
}

/// Which `d` eigenvalues of the flattened Hamiltonian span the graph subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    #[default]
    #[serde(alias = "lower")]
    LowerHalf,
    #[serde(alias = "upper")]
    UpperHalf,
}

/// `XVX + XH₊ − H₋X − V†`.
pub fn residual(p: &RiccatiProblem, x: &Operator) -> Result<Operator> {
    if x.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "riccati candidate",
            expected: p.dim(),
            found: x.dim(),
        });
    }
    let (x, v) = (x.matrix(), p.v.matrix());
    let r = x * v * x + x * p.h_plus.matrix() - p.h_minus.matrix() * x - v.adjoint();
    Ok(Operator::from_parts(r, Flags::default()))
}

fn residual_norm(p: &RiccatiProblem, x: &Operator) -> f64 {
    residual(p, x).map(|r| r.frobenius_norm()).unwrap_or(f64::INFINITY)
}

/// Graph-subspace solution `X = U2 U1⁻¹` from the selected half of the
/// eigenvectors of the flattened Hamiltonian.
pub fn solve_spectral(p: &RiccatiProblem, selection: Selection) -> Result<RiccatiSolution> {
    let d = p.dim();
    let flat = p.to_block().flatten();
    let spec = eig_hermitian(&flat)?;
    let ev = &spec.eigenvalues;

    let spread = ev.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let boundary_gap = ev[d] - ev[d - 1];
    let threshold = (1e-10 * spread).max(ABS_FLOOR);
    if !(boundary_gap > threshold) {
        return Err(Error::GraphConditionFailed {
            reason: format!(
                "degenerate eigenvalues at the half-spectrum boundary (gap {boundary_gap:e})"
            ),
        });
    }

    let first = match selection {
        Selection::LowerHalf => 0,
        Selection::UpperHalf => d,
    };
    let bundle = spec.eigenvectors.columns(first, d);
    let u1 = bundle.rows(0, d).into_owned();
    let u2 = bundle.rows(d, d).into_owned();
    let (u1_inv, cond) = invert_matrix(&u1).map_err(|_| Error::GraphConditionFailed {
        reason: "top block of the eigenvector bundle is singular".into(),
    })?;
    if cond > GRAPH_CONDITION_LIMIT {
        return Err(Error::GraphConditionFailed {
            reason: format!("cond(U1) = {cond:e} exceeds {GRAPH_CONDITION_LIMIT:e}"),
        });
    }
    let x = Operator::from_parts(u2 * u1_inv, Flags::default());
    let residual_norm = residual_norm(p, &x);
    Ok(RiccatiSolution {
        x,
        residual_norm,
        method: Method::Spectral,
        history: Vec::new(),
    })
}

/// Newton iteration: each step solves
/// `(X_k V − H₋) Δ + Δ (V X_k + H₊) = −R(X_k)`.
pub fn solve_newton(
    p: &RiccatiProblem,
    x0: &Operator,
    tol: f64,
    max_iter: usize,
) -> Result<RiccatiSolution> {
    let mut x = x0.clone();
    let mut r = residual(p, &x)?;
    let mut history = vec![r.frobenius_norm()];
    for _ in 0..max_iter {
        if history.last().copied().unwrap_or(f64::INFINITY) <= tol {
            break;
        }
        let left = &(&x * &p.v) - &p.h_minus;
        let right = &(&p.v * &x) + &p.h_plus;
        let delta = solve_sylvester(&left, &right, &(-&r))?;
        x = &x + &delta;
        r = residual(p, &x)?;
        history.push(r.frobenius_norm());
    }
    let residual_norm = *history.last().expect("nonempty");
    if !(residual_norm <= tol) {
        return Err(Error::MaxIterations {
            iterations: history.len() - 1,
            residual: residual_norm,
        });
    }
    Ok(RiccatiSolution {
        x: Operator::from_parts(x.into_matrix(), Flags::default()),
        residual_norm,
        method: Method::Newton,
        history,
    })
}

/// Spectral solve, falling back to Newton from `X = 0` when the graph
/// condition fails (for instance `V = 0` with interlaced block spectra, where
/// `X = 0` is exact but no half of the spectrum spans its graph).
///
/// The spectral error is returned if Newton does not converge either.
pub fn solve_with_fallback(p: &RiccatiProblem, selection: Selection, tol: f64) -> Result<RiccatiSolution> {
    match solve_spectral(p, selection) {
        Err(err @ Error::GraphConditionFailed { .. }) => {
            solve_newton(p, &Operator::zeros(p.dim()), tol, DEFAULT_MAX_ITER).map_err(|_| err)
        }
        other => other,
    }
}

/// Root selector for the scalar quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Root of `αh² + 2λh − α = 0`, `h = (−λ ± √(λ² + α²)) / α`.
///
/// The root whose closed form would cancel is taken from the other one
/// through `h₊ h₋ = −1`.
pub fn scalar_branch(lambda: f64, alpha: f64, branch: Branch) -> Result<f64> {
    if alpha == 0.0 {
        return Err(Error::ZeroAlpha);
    }
    let s = branch.sign();
    let r = lambda.hypot(alpha);
    if s * lambda <= 0.0 {
        Ok((-lambda + s * r) / alpha)
    } else {
        Ok(alpha / (lambda + s * r))
    }
}

/// `αX² + XH + HX − α`.
pub fn residual_symmetric(h: &Operator, x: &Operator, alpha: f64) -> Operator {
    let (xm, hm) = (x.matrix(), h.matrix());
    let n = h.dim();
    let a = C64::new(alpha, 0.0);
    let r = xm * xm * a + xm * hm + hm * xm - DMatrix::<C64>::identity(n, n) * a;
    Operator::from_parts(r, Flags::default())
}

/// `αX² + 2HX − α`.
pub fn residual_quadratic(h: &Operator, x: &Operator, alpha: f64) -> Operator {
    let (xm, hm) = (x.matrix(), h.matrix());
    let n = h.dim();
    let a = C64::new(alpha, 0.0);
    let r = xm * xm * a + hm * xm * C64::new(2.0, 0.0) - DMatrix::<C64>::identity(n, n) * a;
    Operator::from_parts(r, Flags::default())
}

/// `X = f(H)` with `f = scalar_branch(·, α, branch)` applied on the spectrum,
/// one branch for all eigenvalues. The stored residual is that of
/// `αX² + XH + HX − α`.
pub fn analytic_solution(h: &Operator, alpha: f64, branch: Branch) -> Result<RiccatiSolution> {
    if alpha == 0.0 {
        return Err(Error::ZeroAlpha);
    }
    let spec = eig_hermitian(h)?;
    // alpha ≠ 0 so the branch is total
    let x = spec.apply(|l| C64::new(scalar_branch(l, alpha, branch).unwrap(), 0.0));
    let x = Operator::from_parts(
        x,
        Flags {
            hermitian: true,
            unitary: false,
        },
    );
    let residual_norm = residual_symmetric(h, &x, alpha).frobenius_norm();
    Ok(RiccatiSolution {
        x,
        residual_norm,
        method: Method::AnalyticBranch,
        history: Vec::new(),
    })
}

/// Parity `P` as a solution of the scalar-coupling problem built on the field operator.
pub fn parity_solution(space: FockSpace, g: FieldCoupling, alpha: f64) -> RiccatiSolution {
    let h = field_operator(space, g);
    let x = parity(space);
    let residual_norm = residual_symmetric(&h, &x, alpha).frobenius_norm();
    RiccatiSolution {
        x,
        residual_norm,
        method: Method::Parity,
        history: Vec::new(),
    }
}

/// Threshold for the `solves_*` booleans of the counterexample report.
pub const COUNTEREXAMPLE_TOL: f64 = 1e-12;

/// Residuals of the parity operator against both scalar-coupling forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub n_max: usize,
    pub g: [f64; 2],
    pub alpha: f64,
    /// `‖H‖_F` of the field operator.
    pub h_norm: f64,
    /// `‖αP² + PH + HP − α‖_F`.
    pub r11: f64,
    /// `‖αP² + 2HP − α‖_F`.
    pub r12: f64,
    /// `‖[P, H]‖_F`.
    pub commutator_norm: f64,
    pub solves_symmetric_form: bool,
    pub solves_quadratic_form: bool,
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn counterexample_report(space: FockSpace, g: FieldCoupling, alpha: f64) -> CounterexampleReport {
    let h = field_operator(space, g);
    let p = parity(space);
    let r11 = residual_symmetric(&h, &p, alpha).frobenius_norm();
    let r12 = residual_quadratic(&h, &p, alpha).frobenius_norm();
    let commutator_norm = p.commutator(&h).frobenius_norm();
    let h_norm = h.frobenius_norm();
    let degenerate = h_norm == 0.0;
    CounterexampleReport {
        n_max: space.n_max(),
        g: [g.0.re, g.0.im],
        alpha,
        h_norm,
        r11,
        r12,
        commutator_norm,
        solves_symmetric_form: r11 <= COUNTEREXAMPLE_TOL,
        solves_quadratic_form: r12 <= COUNTEREXAMPLE_TOL,
        degenerate,
        note: degenerate.then(|| "degenerate: H=0".to_string()),
    }
}

/// `‖I + X_a† X_b‖_F`, zero when the graph subspaces of `X_a` and `X_b` are
/// orthogonal complements.
pub fn graph_overlap(xa: &Operator, xb: &Operator) -> f64 {
    let n = xa.dim();
    crate::matfun::frobenius(&(DMatrix::<C64>::identity(n, n) + xa.matrix().adjoint() * xb.matrix()))
}

/// Sorted eigenvalues of a Hermitian operator, as a plain vector.
#[cfg(test)]
pub(crate) fn sorted_spectrum(h: &Operator) -> Vec<f64> {
    crate::matfun::eig_hermitian_matrix(h.matrix()).eigenvalues.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(n_max: usize, g: f64) -> (FockSpace, Operator) {
        let space = FockSpace::new(n_max).unwrap();
        (space, field_operator(space, FieldCoupling::real(g)))
    }

    fn random_problem(rng: &mut ChaCha8Rng, d: usize) -> RiccatiProblem {
        RiccatiProblem::from_block(&ensemble::hermitian_block(rng, d)).unwrap()
    }

    #[test]
    fn residual_at_zero_is_minus_v_dagger() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_problem(&mut rng, 4);
        let r = residual(&p, &Operator::zeros(4)).unwrap();
        assert_eq!(r.matrix(), &(-p.v.adjoint().matrix()));
        assert!(matches!(residual(&p, &Operator::zeros(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn parity_solves_scalar_coupling_exactly() {
        let (space, h) = field(16, 1.0);
        let p = RiccatiProblem::scalar_coupling(&h, 0.5).unwrap();
        let r = residual(&p, &parity(space)).unwrap();
        assert!(r.matrix().iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn spectral_zero_coupling_gives_zero() {
        let space = FockSpace::new(4).unwrap();
        let n = crate::fock::number_operator(space);
        let hp = &n - &Operator::identity(5).scale_real(10.0);
        let hm = &n + &Operator::identity(5).scale_real(10.0);
        let p = RiccatiProblem::new(hp, hm, Operator::zeros(5)).unwrap();
        let sol = solve_spectral(&p, Selection::LowerHalf).unwrap();
        assert!(sol.x.frobenius_norm() < 1e-14);
        assert!(sol.residual_norm < 1e-14);
        // the other half has no graph representation
        assert!(matches!(
            solve_spectral(&p, Selection::UpperHalf),
            Err(Error::GraphConditionFailed { .. })
        ));
    }

    #[test]
    fn spectral_on_scalar_coupling_problem() {
        let (_, h) = field(8, 1.0);
        let p = RiccatiProblem::scalar_coupling(&h, 0.5).unwrap();
        for sel in [Selection::LowerHalf, Selection::UpperHalf] {
            let sol = solve_spectral(&p, sel).unwrap();
            assert!(sol.residual_norm <= 1e-10, "{sel:?}: {}", sol.residual_norm);
            let recomputed = residual(&p, &sol.x).unwrap().frobenius_norm();
            assert!((recomputed - sol.residual_norm).abs() <= 1e-12);
        }
    }

    #[test]
    fn spectral_one_by_one_matches_quadratic_formula() {
        for (lambda, alpha) in [(0.0, 1.0), (0.75, 1.0), (-2.0, 0.3), (3.0, -1.5)] {
            let p = RiccatiProblem::new(
                Operator::from_real_diagonal(&[lambda]),
                Operator::from_real_diagonal(&[-lambda]),
                Operator::from_real_diagonal(&[alpha]),
            )
            .unwrap();
            let x = solve_spectral(&p, Selection::LowerHalf).unwrap().x.matrix()[(0, 0)];
            // oracle: both roots of αx² + 2λx − α
            let disc = (4.0 * lambda * lambda + 4.0 * alpha * alpha).sqrt();
            let roots = [(-2.0 * lambda + disc) / (2.0 * alpha), (-2.0 * lambda - disc) / (2.0 * alpha)];
            assert!(x.im.abs() < 1e-14);
            assert!(roots.iter().any(|r| (x.re - r).abs() < 1e-12), "{lambda} {alpha} {x}");
            let matches_branch = [Branch::Plus, Branch::Minus]
                .iter()
                .any(|&b| (scalar_branch(lambda, alpha, b).unwrap() - x.re).abs() < 1e-12);
            assert!(matches_branch);
        }
    }

    #[test]
    fn spectral_rejects_degenerate_boundary() {
        let p = RiccatiProblem::new(Operator::zeros(3), Operator::zeros(3), Operator::zeros(3)).unwrap();
        assert!(matches!(
            solve_spectral(&p, Selection::LowerHalf),
            Err(Error::GraphConditionFailed { .. })
        ));
    }

    #[test]
    fn spectral_random_residuals_and_complementary_halves() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for d in [2, 4, 8] {
            let p = random_problem(&mut rng, d);
            let lo = solve_spectral(&p, Selection::LowerHalf).unwrap();
            let hi = solve_spectral(&p, Selection::UpperHalf).unwrap();
            assert!(lo.residual_norm <= 1e-10 * p.scale());
            assert!(hi.residual_norm <= 1e-10 * p.scale());
            assert!(graph_overlap(&hi.x, &lo.x) <= 1e-9 * (1.0 + lo.x.frobenius_norm() * hi.x.frobenius_norm()));
        }
    }

    #[test]
    fn newton_from_exact_solution_takes_no_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_problem(&mut rng, 5);
        let exact = solve_spectral(&p, Selection::LowerHalf).unwrap();
        let sol = solve_newton(&p, &exact.x, 1e-9 * p.scale(), 10).unwrap();
        assert_eq!(sol.history.len(), 1);
        assert_eq!(sol.x.matrix(), exact.x.matrix());
    }

    #[test]
    fn newton_quadratic_convergence_from_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_problem(&mut rng, 8);
        let exact = solve_spectral(&p, Selection::LowerHalf).unwrap();
        let x0 = &exact.x + &ensemble::complex(&mut rng, 8).scale_real(1e-3);
        let sol = solve_newton(&p, &x0, p.default_tol(), DEFAULT_MAX_ITER).unwrap();
        let h = &sol.history;
        assert!(h.len() >= 3, "{h:?}");
        // r_{k+1} ≤ C r_k² on the steps above the rounding floor
        for w in h.windows(2).filter(|w| w[1] > 1e3 * p.default_tol()) {
            assert!(w[1] <= 1e3 * w[0] * w[0], "{h:?}");
        }
        assert!(sol.residual_norm <= p.default_tol());
    }

    #[test]
    fn newton_from_zero_on_dominant_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 6;
        let shift = Operator::identity(d).scale_real(8.0);
        let hp = &ensemble::hermitian(&mut rng, d) + &shift;
        let hm = &ensemble::hermitian(&mut rng, d) - &shift;
        let v = ensemble::complex(&mut rng, d).scale_real(0.5);
        let p = RiccatiProblem::new(hp, hm, v).unwrap();
        let sol = solve_newton(&p, &Operator::zeros(d), 1e-10, 20).unwrap();
        assert!(sol.history.len() <= 21);
        assert!(sol.residual_norm <= 1e-10);
    }

    #[test]
    fn newton_reports_budget_exhaustion() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = random_problem(&mut rng, 4);
        let err = solve_newton(&p, &Operator::zeros(4), 0.0, 2).unwrap_err();
        assert!(matches!(err, Error::MaxIterations { iterations: 2, .. }) || matches!(err, Error::SingularSylvester { .. }));
    }

    #[test]
    fn scalar_branch_values() {
        assert_eq!(scalar_branch(0.0, 1.0, Branch::Plus).unwrap(), 1.0);
        assert!((scalar_branch(0.75, 1.0, Branch::Plus).unwrap() - 0.5).abs() < 1e-15);
        assert!((scalar_branch(0.75, 1.0, Branch::Minus).unwrap() + 2.0).abs() < 1e-15);
        assert_eq!(scalar_branch(1.0, 0.0, Branch::Plus), Err(Error::ZeroAlpha));
    }

    #[test]
    fn scalar_branch_substitution_and_vieta() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let lambda: f64 = rng.random_range(-10.0..10.0);
            let alpha: f64 = rng.random_range(0.1..5.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            let hp = scalar_branch(lambda, alpha, Branch::Plus).unwrap();
            let hm = scalar_branch(lambda, alpha, Branch::Minus).unwrap();
            for h in [hp, hm] {
                let q = alpha * h * h + 2.0 * lambda * h - alpha;
                assert!(q.abs() <= 1e-12 * (1.0 + alpha.abs() + lambda.abs()) * (1.0 + h * h), "{lambda} {alpha} {h}");
            }
            assert!((hp * hm + 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn analytic_solution_one_by_one() {
        let sol = analytic_solution(&Operator::from_real_diagonal(&[0.0]), 1.0, Branch::Plus).unwrap();
        assert!((sol.x.matrix()[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(analytic_solution(&Operator::identity(2), 0.0, Branch::Plus).unwrap_err(), Error::ZeroAlpha);
    }

    #[test]
    fn analytic_solution_solves_both_forms() {
        let (_, h) = field(8, 1.0);
        for branch in [Branch::Plus, Branch::Minus] {
            let sol = analytic_solution(&h, 0.5, branch).unwrap();
            assert!(residual_symmetric(&h, &sol.x, 0.5).frobenius_norm() <= 1e-10);
            assert!(residual_quadratic(&h, &sol.x, 0.5).frobenius_norm() <= 1e-10);
            assert!(sol.x.commutator(&h).frobenius_norm() <= 1e-10 * h.frobenius_norm());
            let p = RiccatiProblem::scalar_coupling(&h, 0.5).unwrap();
            let stored = residual(&p, &sol.x).unwrap().frobenius_norm();
            assert!((stored - sol.residual_norm).abs() <= 1e-12);
        }
    }

    #[test]
    fn commuting_candidates_have_equal_residuals() {
        let (_, h) = field(6, 0.8);
        let x = &(&h * &h) + &Operator::identity(7).scale_real(0.3);
        let a = residual_symmetric(&h, &x, 0.4).frobenius_norm();
        let b = residual_quadratic(&h, &x, 0.4).frobenius_norm();
        assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn counterexample_standard_case() {
        let space = FockSpace::new(32).unwrap();
        let rep = counterexample_report(space, FieldCoupling::real(1.0), 0.5);
        assert_eq!(rep.r11, 0.0);
        let expected = 2.0 * 1056f64.sqrt();
        assert!((rep.r12 - expected).abs() <= 1e-10 * expected);
        assert!((rep.r12 - 64.99).abs() < 0.01);
        assert!((rep.commutator_norm - expected).abs() <= 1e-10 * expected);
        assert!(rep.solves_symmetric_form && !rep.solves_quadratic_form && !rep.degenerate);
        assert!(rep.note.is_none());
    }

    #[test]
    fn counterexample_limits() {
        let space = FockSpace::new(10).unwrap();
        let rep = counterexample_report(space, FieldCoupling::real(1.0), 0.0);
        assert_eq!(rep.r11, 0.0);
        assert!((rep.r12 - 2.0 * rep.h_norm).abs() <= 1e-12 * rep.h_norm);

        let rep = counterexample_report(space, FieldCoupling::real(0.0), 0.5);
        assert_eq!((rep.r11, rep.r12, rep.commutator_norm), (0.0, 0.0, 0.0));
        assert!(rep.degenerate);
        assert_eq!(rep.note.as_deref(), Some("degenerate: H=0"));
    }

    #[test]
    fn parity_solution_residual() {
        let sol = parity_solution(FockSpace::new(12).unwrap(), FieldCoupling(C64::new(0.2, 0.9)), 0.7);
        assert_eq!(sol.method, Method::Parity);
        assert_eq!(sol.residual_norm, 0.0);
    }
}
