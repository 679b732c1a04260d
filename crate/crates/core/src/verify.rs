// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! Invariant suite run by `riccati verify`.
//!
//! Every check records a measured value against a pinned tolerance. Model
//! checks run on the configured Hamiltonian; kernel checks use seeded random
//! inputs sized from the configuration.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::antilinear::{conjugation_family, AntilinearPropagator, RealLinearOp};
use crate::blockop::{partial_trace, BlockOperator};
use crate::config::RunConfig;
use crate::diagonalize::{block_diagonalize, DirectPropagator, RiccatiPropagator};
use crate::dynamics::{channel_from_unitary, reduced_state};
use crate::ensemble;
use crate::error::Result;
use crate::fock::{field_operator, parity};
use crate::matfun::{frobenius, mat_fn, solve_sylvester, MatFn, Operator};
use crate::riccati::{counterexample_report, solve_newton, solve_with_fallback, RiccatiProblem, DEFAULT_MAX_ITER};
use crate::C64;

/// How a check compares its value with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass when `value ≤ tolerance`.
    AtMost,
    /// Pass when `value ≥ tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// `None` when the check could not be evaluated.
    pub value: Option<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub n_max: usize,
    pub seed: u64,
    pub perturb: f64,
    pub all_pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Default)]
struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn push(&mut self, name: &str, value: Result<f64>, tolerance: f64, comparison: Comparison) {
        let (value, error) = match value {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(format!("{}: {e}", e.kind()))),
        };
        let pass = match (value, comparison) {
            (Some(v), Comparison::AtMost) => v <= tolerance,
            (Some(v), Comparison::AtLeast) => v >= tolerance,
            (None, _) => false,
        };
        self.checks.push(Check {
            name: name.to_string(),
            value: value.filter(|v| v.is_finite()),
            tolerance,
            comparison,
            pass,
            error,
        });
    }

    fn at_most(&mut self, name: &str, value: Result<f64>, tolerance: f64) {
        self.push(name, value, tolerance, Comparison::AtMost);
    }

    fn at_least(&mut self, name: &str, value: Result<f64>, tolerance: f64) {
        self.push(name, value, tolerance, Comparison::AtLeast);
    }
}

fn rel(a: f64, scale: f64) -> f64 {
    a / scale.max(1.0)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs the suite. `perturb` adds `perturb · max(‖X‖_F, 1)` of a unit-norm
/// random matrix to the Riccati solution before the downstream checks.
pub fn run(cfg: &RunConfig, perturb: f64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut s = Suite::default();
    let space = cfg.space()?;
    let h = cfg.hamiltonian()?;
    let omega = cfg.env_state()?;
    let rho0 = cfg.initial_state()?;
    let h_norm = h.frobenius_norm();
    let kd = space.dim().min(16);

    // matfun
    let a = ensemble::hermitian(&mut rng, kd);
    s.at_most(
        "matfun.exp_unitarity",
        mat_fn(&a, MatFn::ExpIt(1.3)).map(|u| u.unitarity_defect()),
        1e-10,
    );
    let sa = ensemble::hermitian(&mut rng, kd);
    let sb = &ensemble::hermitian(&mut rng, kd) + &Operator::identity(kd).scale_real(3.0 * kd as f64);
    let sc = ensemble::complex(&mut rng, kd);
    let sa = &sa + &Operator::identity(kd).scale_real(3.0 * kd as f64);
    s.at_most(
        "matfun.sylvester_residual",
        solve_sylvester(&sa, &sb, &sc).map(|x| rel((&(&(&sa * &x) + &(&x * &sb)) - &sc).frobenius_norm(), sc.frobenius_norm())),
        1e-10,
    );

    // fock
    let hf = field_operator(space, cfg.coupling());
    let p = parity(space);
    s.at_most("fock.parity_anticommutes_field", Ok(p.anticommutator(&hf).frobenius_norm()), 0.0);
    let n = space.n_max() as f64;
    let norm_oracle = cfg.coupling().0.norm() * (n * (n + 1.0)).sqrt();
    s.at_most("fock.field_norm", Ok((hf.frobenius_norm() - norm_oracle).abs()), 1e-10 * norm_oracle.max(1.0));

    // blockop
    s.at_most(
        "blockop.flatten_roundtrip",
        BlockOperator::unflatten(&h.flatten()).map(|b| b.sub(&h).frobenius_norm()),
        0.0,
    );
    let product = BlockOperator::product(rho0.matrix(), omega.matrix());
    s.at_most(
        "blockop.partial_trace_product",
        Ok((partial_trace(&product) - rho0.matrix()).norm()),
        1e-12,
    );

    // riccati on the configured model
    let problem = RiccatiProblem::from_block(&h)?;
    let scale = problem.scale();
    let solution = solve_with_fallback(&problem, cfg.selection, problem.default_tol());
    let x = match &solution {
        Ok(sol) => {
            let mut x = sol.x.clone();
            if perturb != 0.0 {
                let e = ensemble::complex(&mut rng, x.dim());
                let e = e.scale_real(perturb * x.frobenius_norm().max(1.0) / e.frobenius_norm());
                x = &x + &e;
            }
            Some(x)
        }
        Err(_) => None,
    };
    s.at_most(
        "riccati.residual_relative",
        solution.clone().map(|sol| rel(sol.residual_norm, scale)),
        cfg.tol.max(1e-10),
    );
    let report = counterexample_report(space, cfg.coupling(), cfg.model.alpha);
    s.at_most("riccati.counterexample_r11", Ok(report.r11), 1e-12);
    s.at_most(
        "riccati.counterexample_r12_vs_2h",
        Ok(rel((report.r12 - 2.0 * report.h_norm).abs(), 2.0 * report.h_norm)),
        1e-10,
    );
    let rp = ensemble::hermitian_block(&mut rng, kd.min(8));
    let rprob = RiccatiProblem::from_block(&rp)?;
    let newton = crate::riccati::solve_spectral(&rprob, cfg.selection).and_then(|sol| {
        let kick = ensemble::complex(&mut rng, sol.x.dim());
        let kick = kick.scale_real(1e-3 / kick.frobenius_norm());
        solve_newton(&rprob, &(&sol.x + &kick), rprob.default_tol(), DEFAULT_MAX_ITER)
    });
    s.at_most(
        "riccati.newton_from_perturbed",
        newton.map(|sol| rel(sol.residual_norm, rprob.scale())),
        1e-12,
    );

    // diagonalize on the configured model
    let x_err = || solution.clone().map(|_| ()).unwrap_err();
    let with_x = |f: &dyn Fn(&Operator) -> Result<f64>| -> Result<f64> {
        match &x {
            Some(x) => f(x),
            None => Err(x_err()),
        }
    };
    s.at_most(
        "diagonalize.offdiag_relative",
        with_x(&|x| block_diagonalize(&h, x).map(|d| rel(d.offdiag_norm, h_norm))),
        1e-9,
    );
    let direct = DirectPropagator::new(&h)?;
    s.at_most(
        "diagonalize.spectrum_match",
        with_x(&|x| {
            let d = block_diagonalize(&h, x)?;
            let mut blocks = d.block_spectrum();
            let imag = blocks.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            blocks.sort_by(|a, b| a.re.total_cmp(&b.re));
            let re: Vec<f64> = blocks.iter().map(|z| z.re).collect();
            let flat: Vec<f64> = direct.eigenvalues().iter().copied().collect();
            Ok(max_abs_diff(&re, &flat).max(imag))
        }),
        1e-8,
    );
    let times = [0.1, 1.0, 10.0];
    let riccati_prop = x.as_ref().map(|x| RiccatiPropagator::new(&h, x));
    let with_prop = |f: &dyn Fn(&RiccatiPropagator) -> f64| -> Result<f64> {
        match &riccati_prop {
            Some(Ok(p)) => Ok(f(p)),
            Some(Err(e)) => Err(e.clone()),
            None => Err(x_err()),
        }
    };
    s.at_most(
        "diagonalize.evolution_equivalence",
        with_prop(&|p| {
            times
                .iter()
                .map(|&t| {
                    let ud = direct.at(t).flatten();
                    rel((&p.at(t).flatten() - &ud).frobenius_norm(), ud.frobenius_norm())
                })
                .fold(0.0, f64::max)
        }),
        1e-8,
    );
    s.at_most(
        "diagonalize.unitarity",
        with_prop(&|p| times.iter().map(|&t| p.at(t).flatten().unitarity_defect()).fold(0.0, f64::max)),
        1e-8,
    );
    s.at_most(
        "diagonalize.group_law",
        with_prop(&|p| {
            let lhs = p.at(0.4).mul(&p.at(0.7)).flatten();
            let rhs = p.at(1.1).flatten();
            rel((&lhs - &rhs).frobenius_norm(), rhs.frobenius_norm())
        }),
        1e-8,
    );

    // antilinear on a member of the conjugation family
    let ad = kd.min(8);
    let fam = conjugation_family(&ensemble::hermitian(&mut rng, ad), &ensemble::complex_symmetric(&mut rng, ad))?;
    let ap = AntilinearPropagator::new(&fam, &RealLinearOp::conjugation(ad));
    s.at_most("antilinear.s_tau_inverse", ap.as_ref().map(|p| p.inverse_defect()).map_err(Clone::clone), 1e-12);
    let formula = ap.as_ref().map_err(Clone::clone).map(|p| {
        [0.1, 1.0, 5.0]
            .iter()
            .map(|&t| {
                let d = p.direct_at(t).r;
                let scale = crate::matfun::frobenius_real(&d);
                crate::matfun::frobenius_real(&(p.at(t).r - &d)) / scale
            })
            .fold(0.0, f64::max)
    });
    s.at_most("antilinear.cos_sin_formula", formula, 1e-8);
    let naive = ap
        .as_ref()
        .map_err(Clone::clone)
        .map(|p| crate::matfun::frobenius_real(&(p.naive_at(1.0).r - p.direct_at(1.0).r)));
    s.at_least("antilinear.naive_formula_gap", naive, 1e-3);
    let hp = ensemble::complex(&mut rng, ad);
    let hq = ensemble::complex(&mut rng, ad);
    let op1 = RealLinearOp::new(hp.matrix().clone(), hq.matrix().clone())?;
    let op2 = RealLinearOp::new(hq.matrix().clone(), hp.matrix().adjoint())?;
    let prod = op1.compose(&op2)?.realify().r;
    let expect: DMatrix<f64> = op1.realify().r * op2.realify().r;
    s.at_most(
        "antilinear.realify_homomorphism",
        Ok(rel(crate::matfun::frobenius_real(&(prod - &expect)), crate::matfun::frobenius_real(&expect))),
        1e-12,
    );

    // dynamics on the configured model
    let t_probe = [0.0, 0.5 * cfg.t_max, cfg.t_max];
    let mut min_eig = f64::INFINITY;
    let mut max_tp: f64 = 0.0;
    let mut identity = 0.0;
    let mut path: Result<f64> = with_prop(&|_| 0.0);
    let mut trace: f64 = 0.0;
    for &t in &t_probe {
        let ud = direct.at(t);
        let cd = channel_from_unitary(&ud, &omega, t)?;
        min_eig = min_eig.min(cd.min_eigenvalue);
        max_tp = max_tp.max(cd.tp_defect);
        if t == 0.0 {
            identity = cd.identity_defect();
        }
        let rho = reduced_state(&ud, &rho0, &omega)?;
        trace = trace.max((rho.matrix().trace() - C64::new(1.0, 0.0)).norm());
        if let (Ok(acc), Some(Ok(p))) = (&path, &riccati_prop) {
            let dev = channel_from_unitary(&p.at(t), &omega, t).map(|cr| frobenius(&(&cr.choi - &cd.choi)));
            path = dev.map(|d| d.max(*acc));
        }
    }
    s.at_least("dynamics.choi_min_eigenvalue", Ok(min_eig), -1e-9);
    s.at_most("dynamics.tp_defect", Ok(max_tp), 1e-10);
    s.at_most("dynamics.identity_channel_at_zero", Ok(identity), 1e-10);
    s.at_most("dynamics.trace_preservation", Ok(trace), 1e-10);
    s.at_most("dynamics.path_equivalence", path, 1e-8);

    let all_pass = s.checks.iter().all(|c| c.pass);
    Ok(Report {
        n_max: cfg.n_max,
        seed: cfg.seed,
        perturb,
        all_pass,
        checks: s.checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_model_passes() {
        let report = run(&RunConfig::scalar_coupling(0.5, 8), 0.0).unwrap();
        for c in &report.checks {
            assert!(c.pass, "{c:?}");
        }
        assert!(report.all_pass);
    }

    #[test]
    fn smallest_space_passes() {
        let report = run(&RunConfig::scalar_coupling(0.5, 1), 0.0).unwrap();
        assert!(report.all_pass, "{:?}", report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }

    #[test]
    fn perturbation_breaks_offdiag() {
        let report = run(&RunConfig::scalar_coupling(0.5, 8), 1e-3).unwrap();
        assert!(!report.all_pass);
        let off = report.checks.iter().find(|c| c.name == "diagonalize.offdiag_relative").unwrap();
        assert!(!off.pass);
        let kernel = report.checks.iter().find(|c| c.name == "matfun.exp_unitarity").unwrap();
        assert!(kernel.pass);
    }
}
