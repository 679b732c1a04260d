// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! The `riccati` command-line driver.
//!
//! Exit codes: 0 ok, 1 invariant failure, 2 configuration error, 3 solver
//! failure. Errors are printed to stdout as `{"error": kind, "message": ...}`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::config::{EvolutionMode, RunConfig};
use crate::diagonalize::block_diagonalize;
use crate::dynamics::{
    bloch_trajectory, channel_from_unitary, dephasing_coherence_factor, uniform_grid, Evolution, Propagator,
    TrajectoryPoint,
};
use crate::error::Error;
use crate::matfun::frobenius;
use crate::riccati::{
    counterexample_report, solve_newton, solve_spectral, solve_with_fallback, RiccatiProblem, RiccatiSolution, Selection,
    DEFAULT_MAX_ITER,
};
use crate::verify;
use crate::C64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Path deviation allowed between the Riccati and direct evolutions.
pub const PATH_TOL: f64 = 1e-8;
/// Tolerance of the closed-form dephasing comparison.
pub const ANALYTIC_TOL: f64 = 1e-6;

pub const CSV_HEADER: &str = "t,rho00_re,rho01_re,rho01_im,rho11_re,bloch_x,bloch_y,bloch_z,purity";

#[derive(Debug, Parser)]
#[command(name = "riccati", version, about = "Riccati block-diagonalization and reduced qubit dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Riccati equation and report the block-diagonal form.
    Solve(CommonArgs),
    /// Reduced qubit trajectory as CSV plus a JSON summary.
    Evolve(CommonArgs),
    /// Choi matrices and CP/TP certificates on the time grid.
    Channel(CommonArgs),
    /// Parity residuals against both scalar-coupling forms.
    Counterexample(CommonArgs),
    /// Run the invariant suite.
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectionArg {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvolutionArg {
    Riccati,
    Direct,
    Both,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file (CSV for evolve, JSON otherwise). Written atomically.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fock truncation (overrides the config).
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Final time of the grid.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of grid points, including t = 0.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Relative residual tolerance for the Riccati solve.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Half of the spectrum assigned to Z₊.
    #[arg(long, value_enum)]
    pub selection: Option<SelectionArg>,
    /// Propagator route; `both` also reports the path deviation.
    #[arg(long, value_enum)]
    pub evolution: Option<EvolutionArg>,
    /// Relative perturbation added to the Riccati solution (verify only).
    #[arg(long, default_value_t = 0.0)]
    pub perturb: f64,
    /// Seed for randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl CommonArgs {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::from_path(&self.config)?;
        if let Some(n) = self.nmax {
            cfg.n_max = n;
        }
        if let Some(t) = self.tmax {
            cfg.t_max = t;
        }
        if let Some(s) = self.steps {
            cfg.steps = s;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(s) = self.selection {
            cfg.selection = match s {
                SelectionArg::Lower => Selection::LowerHalf,
                SelectionArg::Upper => Selection::UpperHalf,
            };
        }
        if let Some(e) = self.evolution {
            cfg.evolution = match e {
                EvolutionArg::Riccati => EvolutionMode::Riccati,
                EvolutionArg::Direct => EvolutionMode::Direct,
                EvolutionArg::Both => EvolutionMode::Both,
            };
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if !self.perturb.is_finite() {
            return Err(Error::Config("perturb must be finite".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::NonHermitianInput { .. }
        | Error::NonFiniteEntries
        | Error::NotSquare { .. }
        | Error::DimensionMismatch { .. } => EXIT_CONFIG,
        Error::NonUnitaryEvolution { .. } | Error::InvalidState(_) => EXIT_INVARIANT,
        _ => EXIT_SOLVER,
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// What a command produced: the primary output, an optional side report and
/// the exit code.
struct Outcome {
    primary: String,
    summary: Option<String>,
    code: i32,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn solver_for(cfg: &RunConfig, p: &RiccatiProblem) -> Result<RiccatiSolution, Error> {
    solve_with_fallback(p, cfg.selection, (cfg.tol * p.scale()).max(p.default_tol()))
}

fn cmd_solve(cfg: &RunConfig) -> Result<Outcome, Error> {
    let h = cfg.hamiltonian()?;
    let p = RiccatiProblem::from_block(&h)?;
    let scale = p.scale();
    let mut sol = solve_spectral(&p, cfg.selection)?;
    let mut refined = false;
    let target = (cfg.tol * scale).max(p.default_tol());
    if sol.residual_norm > target {
        sol = solve_newton(&p, &sol.x, target, DEFAULT_MAX_ITER)?;
        refined = true;
    }
    let d = block_diagonalize(&h, &sol.x)?;
    let mut zp = crate::matfun::eigenvalues_general(d.z_plus.matrix());
    let mut zm = crate::matfun::eigenvalues_general(d.z_minus.matrix());
    zp.sort_by(|a, b| a.re.total_cmp(&b.re));
    zm.sort_by(|a, b| a.re.total_cmp(&b.re));
    let report = json!({
        "command": "solve",
        "n_max": cfg.n_max,
        "dim": p.dim(),
        "selection": cfg.selection,
        "method": sol.method,
        "refined": refined,
        "residual_norm": sol.residual_norm,
        "relative_residual": sol.residual_norm / scale.max(1.0),
        "offdiag_norm": d.offdiag_norm,
        "s_condition": d.s_condition,
        "residual_warning": d.residual_warning,
        "x_norm": sol.x.frobenius_norm(),
        "spectrum_z_plus": zp.into_iter().map(pair).collect::<Vec<_>>(),
        "spectrum_z_minus": zm.into_iter().map(pair).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        primary: to_json(&report),
        summary: None,
        code: EXIT_OK,
    })
}

fn fmt17(x: f64) -> String {
    // 17 significant digits, plain decimal point
    format!("{x:.16e}")
}

fn csv_row(p: &TrajectoryPoint) -> String {
    let r = p.state.matrix();
    [
        p.t,
        r[(0, 0)].re,
        r[(0, 1)].re,
        r[(0, 1)].im,
        r[(1, 1)].re,
        p.bloch[0],
        p.bloch[1],
        p.bloch[2],
        p.purity,
    ]
    .iter()
    .map(|&x| fmt17(x))
    .collect::<Vec<_>>()
    .join(",")
}

struct Routes {
    riccati: Option<(Propagator, RiccatiSolution)>,
    direct: Option<Propagator>,
}

fn routes(cfg: &RunConfig) -> Result<(crate::blockop::BlockOperator, Routes), Error> {
    let h = cfg.hamiltonian()?;
    let riccati = match cfg.evolution {
        EvolutionMode::Riccati | EvolutionMode::Both => {
            let p = RiccatiProblem::from_block(&h)?;
            let sol = solver_for(cfg, &p)?;
            Some((Propagator::new(&h, Evolution::Riccati(&sol.x))?, sol))
        }
        EvolutionMode::Direct => None,
    };
    let direct = match cfg.evolution {
        EvolutionMode::Direct | EvolutionMode::Both => Some(Propagator::new(&h, Evolution::Direct)?),
        EvolutionMode::Riccati => None,
    };
    Ok((h, Routes { riccati, direct }))
}

fn cmd_evolve(cfg: &RunConfig) -> Result<Outcome, Error> {
    let (_, routes) = routes(cfg)?;
    let omega = cfg.env_state()?;
    let rho0 = cfg.initial_state()?;
    let grid = uniform_grid(cfg.t_max, cfg.steps);

    let riccati_rows = match &routes.riccati {
        Some((prop, _)) => Some(bloch_trajectory(prop, &omega, &rho0, &grid)?),
        None => None,
    };
    let direct_rows = match &routes.direct {
        Some(prop) => Some(bloch_trajectory(prop, &omega, &rho0, &grid)?),
        None => None,
    };
    let max_path_deviation = match (&riccati_rows, &direct_rows) {
        (Some(a), Some(b)) => Some(
            a.iter()
                .zip(b)
                .map(|(x, y)| (x.state.matrix() - y.state.matrix()).norm())
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    let rows = riccati_rows.or(direct_rows).expect("at least one route");

    let mut csv = String::with_capacity(rows.len() * 200);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for p in &rows {
        csv.push_str(&csv_row(p));
        csv.push('\n');
    }

    let analytic = cfg.is_pure_dephasing().then(|| {
        let c0 = rho0.matrix()[(0, 1)].norm();
        rows.iter()
            .map(|p| (p.state.matrix()[(0, 1)].norm() - c0 * dephasing_coherence_factor(cfg.coupling().0, p.t)).abs())
            .fold(0.0, f64::max)
    });
    let min_purity = rows.iter().map(|p| p.purity).fold(f64::INFINITY, f64::min);
    let max_trace_defect = rows
        .iter()
        .map(|p| (p.state.matrix().trace() - C64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);

    let path_ok = max_path_deviation.is_none_or(|d| d <= PATH_TOL);
    let summary = json!({
        "command": "evolve",
        "rows": rows.len(),
        "n_max": cfg.n_max,
        "t_max": cfg.t_max,
        "steps": cfg.steps,
        "evolution": cfg.evolution,
        "seed": cfg.seed,
        "riccati_method": routes.riccati.as_ref().map(|(_, s)| s.method),
        "riccati_residual": routes.riccati.as_ref().map(|(_, s)| s.residual_norm),
        "max_path_deviation": max_path_deviation,
        "path_tolerance": PATH_TOL,
        "analytic_coherence_max_deviation": analytic,
        "min_purity": min_purity,
        "max_trace_defect": max_trace_defect,
    });
    Ok(Outcome {
        primary: csv,
        summary: Some(to_json(&summary)),
        code: if path_ok { EXIT_OK } else { EXIT_INVARIANT },
    })
}

fn choi_json(choi: &nalgebra::DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..choi.nrows())
        .map(|i| (0..choi.ncols()).map(|j| pair(choi[(i, j)])).collect())
        .collect()
}

fn cmd_channel(cfg: &RunConfig) -> Result<Outcome, Error> {
    let (_, routes) = routes(cfg)?;
    let omega = cfg.env_state()?;
    let grid = uniform_grid(cfg.t_max, cfg.steps);
    let mut entries = Vec::with_capacity(grid.len());
    let mut all_cp = true;
    let mut all_tp = true;
    let mut max_dev: Option<f64> = None;
    for &t in &grid {
        let primary = match (&routes.riccati, &routes.direct) {
            (Some((p, _)), _) => channel_from_unitary(&p.at(t), &omega, t)?,
            (None, Some(p)) => channel_from_unitary(&p.at(t), &omega, t)?,
            (None, None) => unreachable!("at least one route"),
        };
        if let (Some(_), Some(dp)) = (&routes.riccati, &routes.direct) {
            let other = channel_from_unitary(&dp.at(t), &omega, t)?;
            let dev = frobenius(&(&primary.choi - &other.choi));
            max_dev = Some(max_dev.unwrap_or(0.0).max(dev));
        }
        let cp = primary.is_cp(1e-9);
        let tp = primary.is_tp(1e-10);
        all_cp &= cp;
        all_tp &= tp;
        entries.push(json!({
            "t": t,
            "min_eigenvalue": primary.min_eigenvalue,
            "tp_defect": primary.tp_defect,
            "cp": cp,
            "tp": tp,
            "choi": choi_json(&primary.choi),
        }));
    }
    let path_ok = max_dev.is_none_or(|d| d <= PATH_TOL);
    let report = json!({
        "command": "channel",
        "choi_convention": "choi = sum_ij E_ij (x) Phi(E_ij); input index slow, output index fast; choi[2i+k][2j+l] = Phi(E_ij)[k][l]",
        "n_max": cfg.n_max,
        "evolution": cfg.evolution,
        "all_cp": all_cp,
        "all_tp": all_tp,
        "max_path_deviation": max_dev,
        "channels": entries,
    });
    Ok(Outcome {
        primary: to_json(&report),
        summary: None,
        code: if all_cp && all_tp && path_ok { EXIT_OK } else { EXIT_INVARIANT },
    })
}

fn cmd_counterexample(cfg: &RunConfig) -> Result<Outcome, Error> {
    let report = counterexample_report(cfg.space()?, cfg.coupling(), cfg.model.alpha);
    Ok(Outcome {
        primary: to_json(&report),
        summary: None,
        code: EXIT_OK,
    })
}

fn cmd_verify(cfg: &RunConfig, perturb: f64) -> Result<Outcome, Error> {
    let report = verify::run(cfg, perturb)?;
    Ok(Outcome {
        primary: to_json(&report),
        summary: None,
        code: if report.all_pass { EXIT_OK } else { EXIT_INVARIANT },
    })
}

fn error_json(err: &Error) -> String {
    to_json(&json!({ "error": err.kind(), "message": err.to_string() }))
}

/// Parses `args` (including the program name) and runs the command.
/// Reports go to `stdout`, secondary output to `stderr`; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_CONFIG;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    let args = match &cli.command {
        Command::Solve(a) | Command::Evolve(a) | Command::Channel(a) | Command::Counterexample(a) | Command::Verify(a) => a,
    };
    let result = args.load().and_then(|cfg| match &cli.command {
        Command::Solve(_) => cmd_solve(&cfg),
        Command::Evolve(_) => cmd_evolve(&cfg),
        Command::Channel(_) => cmd_channel(&cfg),
        Command::Counterexample(_) => cmd_counterexample(&cfg),
        Command::Verify(_) => cmd_verify(&cfg, args.perturb),
    });
    let outcome = match result {
        Ok(o) => o,
        Err(err) => {
            let _ = stdout.write_all(error_json(&err).as_bytes());
            return exit_code(&err);
        }
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = write_atomic(path, outcome.primary.as_bytes()) {
                let err = Error::Config(format!("cannot write {}: {e}", path.display()));
                let _ = stdout.write_all(error_json(&err).as_bytes());
                return EXIT_CONFIG;
            }
            if let Some(summary) = &outcome.summary {
                let _ = stdout.write_all(summary.as_bytes());
            }
        }
        None => {
            let _ = stdout.write_all(outcome.primary.as_bytes());
            if let Some(summary) = &outcome.summary {
                let _ = stderr.write_all(summary.as_bytes());
            }
        }
    }
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        let s = fmt17(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt17(-2.5), "-2.5000000000000000e0");
        let digits = fmt17(std::f64::consts::PI).split('e').next().unwrap().replace(['.', '-'], "").len();
        assert_eq!(digits, 17);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::GraphConditionFailed { reason: "x".into() }), EXIT_SOLVER);
        assert_eq!(exit_code(&Error::NonUnitaryEvolution { defect: 1.0 }), EXIT_INVARIANT);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
