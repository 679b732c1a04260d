// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON run configuration.
//!
//! Complex numbers are `[re, im]` pairs. A qubit operator is four reals
//! `[h00, h11, re h01, im h01]`, the Hermitian matrix `[[h00, h01], [h01*, h11]]`.
//! Unknown keys are rejected at every level.
//!
//! ```json
//! {
//!   "model": {
//!     "qubit_h": [0, 0, 0, 0],
//!     "alpha": 0.5,
//!     "g": [1, 0],
//!     "interaction": [{ "qubit": [1, -1, 0, 0], "env": "field" }]
//!   },
//!   "n_max": 32,
//!   "omega": { "kind": "fock_ground" },
//!   "t_max": 2.0,
//!   "steps": 41
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blockop::{assemble, BlockOperator, InteractionTerm, ModelSpec, Qubit};
use crate::dynamics::{EnvKind, EnvState, QubitState};
use crate::error::{Error, Result};
use crate::fock::{field_operator, number_operator, parity, FieldCoupling, FockSpace, DEFAULT_N_MAX};
use crate::matfun::Operator;
use crate::riccati::Selection;
use crate::C64;

/// Named environment operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvOp {
    Zero,
    Identity,
    /// `g* a + g a†` with the model's `g`.
    Field,
    Number,
    Parity,
}

impl EnvOp {
    pub fn build(self, space: FockSpace, g: FieldCoupling) -> Operator {
        match self {
            EnvOp::Zero => Operator::zeros(space.dim()),
            EnvOp::Identity => Operator::identity(space.dim()),
            EnvOp::Field => field_operator(space, g),
            EnvOp::Number => number_operator(space),
            EnvOp::Parity => parity(space),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvTerm {
    pub op: EnvOp,
    pub coeff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    /// Hermitian qubit factor in the `[h00, h11, re h01, im h01]` convention.
    pub qubit: [f64; 4],
    pub env: EnvOp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub qubit_h: [f64; 4],
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_g")]
    pub g: [f64; 2],
    #[serde(default)]
    pub env_h: Vec<EnvTerm>,
    #[serde(default)]
    pub interaction: Vec<InteractionConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMode {
    Riccati,
    Direct,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_omega")]
    pub omega: EnvKind,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub selection: Selection,
    #[serde(default)]
    pub evolution: EvolutionMode,
    #[serde(default)]
    pub seed: u64,
    /// Initial pure qubit state `[[re, im], [re, im]]`; `|+⟩` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<[[f64; 2]; 2]>,
}

fn default_g() -> [f64; 2] {
    [1.0, 0.0]
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

fn default_omega() -> EnvKind {
    EnvKind::FockGround
}

fn default_t_max() -> f64 {
    2.0
}

fn default_steps() -> usize {
    41
}

fn default_tol() -> f64 {
    1e-10
}

pub fn qubit_from_reals(q: [f64; 4]) -> Qubit {
    Qubit::new(
        C64::new(q[0], 0.0),
        C64::new(q[2], q[3]),
        C64::new(q[2], -q[3]),
        C64::new(q[1], 0.0),
    )
}

impl RunConfig {
    /// `H± = ±H_field`, `V = αI` with `g = 1`, vacuum environment.
    pub fn scalar_coupling(alpha: f64, n_max: usize) -> Self {
        Self {
            model: ModelConfig {
                qubit_h: [0.0; 4],
                alpha,
                g: default_g(),
                env_h: Vec::new(),
                interaction: vec![InteractionConfig {
                    qubit: [1.0, -1.0, 0.0, 0.0],
                    env: EnvOp::Field,
                }],
            },
            n_max,
            omega: default_omega(),
            t_max: default_t_max(),
            steps: default_steps(),
            tol: default_tol(),
            selection: Selection::default(),
            evolution: EvolutionMode::default(),
            seed: 0,
            rho0: None,
        }
    }

    /// Pure dephasing `σ_z ⊗ H_field`.
    pub fn dephasing(n_max: usize) -> Self {
        Self::scalar_coupling(0.0, n_max)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_max < 1 {
            return bad("n_max must be at least 1".into());
        }
        if self.steps < 1 {
            return bad("steps must be at least 1".into());
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return bad(format!("t_max must be finite and non-negative, got {}", self.t_max));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!("tol must be finite and positive, got {}", self.tol));
        }
        let m = &self.model;
        let mut reals: Vec<f64> = m.qubit_h.to_vec();
        reals.push(m.alpha);
        reals.extend(m.g);
        reals.extend(m.env_h.iter().map(|t| t.coeff));
        reals.extend(m.interaction.iter().flat_map(|t| t.qubit));
        if reals.iter().any(|x| !x.is_finite()) {
            return bad("model parameters must be finite".into());
        }
        match self.omega {
            EnvKind::Thermal { beta } if !(beta.is_finite() && beta >= 0.0) => {
                return bad(format!("beta must be finite and non-negative, got {beta}"));
            }
            EnvKind::FockLevel { n } if n > self.n_max => {
                return bad(format!("fock level {n} exceeds n_max {}", self.n_max));
            }
            _ => {}
        }
        if let Some(psi) = self.rho0 {
            let n: f64 = psi.iter().map(|z| z[0] * z[0] + z[1] * z[1]).sum();
            if !(n.is_finite() && n > 0.0) {
                return bad("rho0 must be a nonzero finite state vector".into());
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<FockSpace> {
        FockSpace::new(self.n_max)
    }

    pub fn coupling(&self) -> FieldCoupling {
        FieldCoupling(C64::new(self.model.g[0], self.model.g[1]))
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        let space = self.space()?;
        let g = self.coupling();
        let d = space.dim();
        let mut env_h = Operator::zeros(d);
        for term in &self.model.env_h {
            env_h = &env_h + &term.op.build(space, g).scale_real(term.coeff);
        }
        let interaction = self
            .model
            .interaction
            .iter()
            .map(|t| InteractionTerm {
                qubit: qubit_from_reals(t.qubit),
                env: t.env.build(space, g),
            })
            .collect();
        Ok(ModelSpec {
            qubit_h: qubit_from_reals(self.model.qubit_h),
            alpha: self.model.alpha,
            env_h,
            interaction,
        })
    }

    pub fn hamiltonian(&self) -> Result<BlockOperator> {
        assemble(&self.model_spec()?, self.space()?)
    }

    pub fn env_state(&self) -> Result<EnvState> {
        EnvState::from_kind(self.space()?, self.omega)
    }

    /// Initial qubit state, normalizing `rho0` when given.
    pub fn initial_state(&self) -> Result<QubitState> {
        match self.rho0 {
            None => Ok(QubitState::plus()),
            Some(psi) => {
                let a = C64::new(psi[0][0], psi[0][1]);
                let b = C64::new(psi[1][0], psi[1][1]);
                let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
                QubitState::pure([a / n, b / n])
            }
        }
    }

    /// True for `σ_z ⊗ H_field` alone with a vacuum environment, where the
    /// coherence factor `e^{−2|g|²t²}` is known in closed form.
    pub fn is_pure_dephasing(&self) -> bool {
        let m = &self.model;
        m.qubit_h == [0.0; 4]
            && m.alpha == 0.0
            && m.env_h.iter().all(|t| t.coeff == 0.0 || t.op == EnvOp::Zero)
            && m.interaction.len() == 1
            && m.interaction[0].env == EnvOp::Field
            && m.interaction[0].qubit == [1.0, -1.0, 0.0, 0.0]
            && self.omega == EnvKind::FockGround
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockop::pauli_z;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_json_str(r#"{"model": {}}"#).unwrap();
        assert_eq!(cfg.n_max, 32);
        assert_eq!(cfg.omega, EnvKind::FockGround);
        assert_eq!(cfg.selection, Selection::LowerHalf);
        assert_eq!(cfg.evolution, EvolutionMode::Both);
        assert_eq!(cfg.model.g, [1.0, 0.0]);
        assert_eq!(cfg.hamiltonian().unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in [
            r#"{"model": {}, "nmax": 3}"#,
            r#"{"model": {"beta": 1}}"#,
            r#"{"model": {"interaction": [{"qubit": [1,0,0,0], "env": "field", "x": 1}]}}"#,
            r#"{"model": {}, "omega": {"kind": "thermal", "beta": 1, "extra": 2}}"#,
            r#"{"model": {"env_h": [{"op": "photon", "coeff": 1}]}}"#,
        ] {
            assert!(matches!(RunConfig::from_json_str(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn invalid_values_rejected() {
        for text in [
            r#"{"model": {}, "n_max": 0}"#,
            r#"{"model": {}, "steps": 0}"#,
            r#"{"model": {}, "t_max": -1}"#,
            r#"{"model": {}, "tol": 0}"#,
            r#"{"model": {}, "n_max": 3, "omega": {"kind": "fock_level", "n": 4}}"#,
            r#"{"model": {}, "rho0": [[0,0],[0,0]]}"#,
        ] {
            assert!(RunConfig::from_json_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn selection_accepts_short_names() {
        let cfg = RunConfig::from_json_str(r#"{"model": {}, "selection": "upper"}"#).unwrap();
        assert_eq!(cfg.selection, Selection::UpperHalf);
        let cfg = RunConfig::from_json_str(r#"{"model": {}, "selection": "lower_half"}"#).unwrap();
        assert_eq!(cfg.selection, Selection::LowerHalf);
    }

    #[test]
    fn scalar_coupling_blocks() {
        let cfg = RunConfig::scalar_coupling(0.5, 4);
        let h = cfg.hamiltonian().unwrap();
        let hf = field_operator(FockSpace::new(4).unwrap(), FieldCoupling::real(1.0));
        assert_eq!(h.b11().matrix(), hf.matrix());
        assert_eq!(h.b22().matrix(), (-&hf).matrix());
        assert_eq!(h.b12().matrix(), Operator::identity(5).scale_real(0.5).matrix());
        assert_eq!(qubit_from_reals([1.0, -1.0, 0.0, 0.0]), pauli_z());
        assert!(RunConfig::dephasing(4).is_pure_dephasing());
        assert!(!cfg.is_pure_dephasing());
    }

    #[test]
    fn qubit_convention() {
        let q = qubit_from_reals([0.1, 0.2, 0.3, 0.4]);
        assert_eq!(q[(0, 1)], C64::new(0.3, 0.4));
        assert_eq!(q[(1, 0)], C64::new(0.3, -0.4));
        assert_eq!(q, q.adjoint());
    }

    #[test]
    fn initial_state_normalized() {
        let mut cfg = RunConfig::dephasing(2);
        cfg.rho0 = Some([[3.0, 0.0], [0.0, 4.0]]);
        let s = cfg.initial_state().unwrap();
        assert!((s.matrix()[(0, 0)].re - 0.36).abs() < 1e-15);
        assert_eq!(RunConfig::dephasing(2).initial_state().unwrap(), QubitState::plus());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e3..1e3f64, Just(0.0), Just(-0.0), 1e-300..1e-250f64]
    }

    fn env_op() -> impl Strategy<Value = EnvOp> {
        prop_oneof![
            Just(EnvOp::Zero),
            Just(EnvOp::Identity),
            Just(EnvOp::Field),
            Just(EnvOp::Number),
            Just(EnvOp::Parity)
        ]
    }

    fn config() -> impl Strategy<Value = RunConfig> {
        let model = (
            prop::array::uniform4(finite()),
            finite(),
            prop::array::uniform2(finite()),
            prop::collection::vec((env_op(), finite()).prop_map(|(op, coeff)| EnvTerm { op, coeff }), 0..3),
            prop::collection::vec(
                (prop::array::uniform4(finite()), env_op()).prop_map(|(qubit, env)| InteractionConfig { qubit, env }),
                0..3,
            ),
        )
            .prop_map(|(qubit_h, alpha, g, env_h, interaction)| ModelConfig {
                qubit_h,
                alpha,
                g,
                env_h,
                interaction,
            });
        let omega = prop_oneof![
            Just(EnvKind::FockGround),
            (0.0..10.0f64).prop_map(|beta| EnvKind::Thermal { beta }),
            (0usize..=1).prop_map(|n| EnvKind::FockLevel { n }),
        ];
        let selection = prop_oneof![Just(Selection::LowerHalf), Just(Selection::UpperHalf)];
        let evolution = prop_oneof![Just(EvolutionMode::Riccati), Just(EvolutionMode::Direct), Just(EvolutionMode::Both)];
        let rho0 = prop::option::of((0.1..1.0f64, finite(), finite(), finite()).prop_map(|(a, b, c, d)| [[a, b], [c, d]]));
        (
            model,
            1usize..64,
            omega,
            (0.0..100.0f64, 1usize..1000, 1e-15..1e-3f64),
            selection,
            evolution,
            any::<u64>(),
            rho0,
        )
            .prop_map(|(model, n_max, omega, (t_max, steps, tol), selection, evolution, seed, rho0)| RunConfig {
                model,
                n_max,
                omega,
                t_max,
                steps,
                tol,
                selection,
                evolution,
                seed,
                rho0,
            })
    }

    proptest! {
        #[test]
        fn round_trip(cfg in config()) {
            cfg.validate().unwrap();
            let text = cfg.to_json_pretty();
            let back = RunConfig::from_json_str(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            let compact = serde_json::to_string(&back).unwrap();
            prop_assert_eq!(RunConfig::from_json_str(&compact).unwrap(), cfg);
        }
    }
}
