// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

//! C ABI over `riccati-core`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free`. Every fallible call returns an [`RqsStatus`]; on failure
//! the message is available from [`rqs_last_error_message`] on the same thread.
//! Complex matrices cross the boundary row-major with interleaved `re, im`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use riccati_core::blockop::BlockOperator;
use riccati_core::config::{EvolutionMode, RunConfig};
use riccati_core::dynamics::{channel_from_unitary, reduced_state, EnvState, Evolution, Propagator, QubitState};
use riccati_core::fock::{FieldCoupling, FockSpace};
use riccati_core::riccati::{counterexample_report, solve_with_fallback, RiccatiProblem, RiccatiSolution};
use riccati_core::Error;

/// Result code of every fallible call. `RQS_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    BufferTooSmall = 3,
    Config = 4,
    InvalidInput = 5,
    SolverFailed = 6,
    InvariantViolated = 7,
    Panic = 8,
}

impl From<&Error> for RqsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config(_) => RqsStatus::Config,
            Error::NonHermitianInput { .. }
            | Error::NonFiniteEntries
            | Error::NotSquare { .. }
            | Error::DimensionMismatch { .. }
            | Error::ZeroAlpha
            | Error::InvalidState(_) => RqsStatus::InvalidInput,
            Error::SingularSylvester { .. }
            | Error::SingularMatrix { .. }
            | Error::GraphConditionFailed { .. }
            | Error::MaxIterations { .. } => RqsStatus::SolverFailed,
            Error::NotBlockDiagonalizable { .. } | Error::NonUnitaryEvolution { .. } => RqsStatus::InvariantViolated,
        }
    }
}

/// A validated run configuration with its Hamiltonian, environment state and propagator.
pub struct RqsModel {
    cfg: RunConfig,
    h: BlockOperator,
    omega: EnvState,
    rho0: QubitState,
    solution: Option<RiccatiSolution>,
    propagator: Propagator,
}

/// A Riccati solution `X` for a model.
pub struct RqsSolution {
    inner: RiccatiSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: RqsStatus, msg: impl Into<String>) -> RqsStatus {
    set_error(msg.into());
    status
}

fn fail_core(e: Error) -> RqsStatus {
    let status = RqsStatus::from(&e);
    fail(status, format!("{}: {e}", e.kind()))
}

fn guard(f: impl FnOnce() -> RqsStatus) -> RqsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(RqsStatus::Panic, "internal panic"))
}

fn build_model(json: &str) -> Result<RqsModel, Error> {
    let cfg = RunConfig::from_json_str(json)?;
    let h = cfg.hamiltonian()?;
    let omega = cfg.env_state()?;
    let rho0 = cfg.initial_state()?;
    let (solution, propagator) = match cfg.evolution {
        EvolutionMode::Direct => (None, Propagator::new(&h, Evolution::Direct)?),
        EvolutionMode::Riccati | EvolutionMode::Both => {
            let p = RiccatiProblem::from_block(&h)?;
            let sol = solve_with_fallback(&p, cfg.selection, cfg.tol * p.scale())?;
            let prop = Propagator::new(&h, Evolution::Riccati(&sol.x))?;
            (Some(sol), prop)
        }
    };
    Ok(RqsModel { cfg, h, omega, rho0, solution, propagator })
}

fn write_complex(src: impl Iterator<Item = Complex64>, out: *mut f64, len: usize, needed: usize) -> RqsStatus {
    if out.is_null() {
        return fail(RqsStatus::NullPointer, "output buffer is null");
    }
    if len < needed {
        return fail(RqsStatus::BufferTooSmall, format!("buffer holds {len} doubles, {needed} needed"));
    }
    // SAFETY: caller guarantees `out` points to `len` writable doubles.
    let buf = unsafe { std::slice::from_raw_parts_mut(out, len) };
    for (k, z) in src.enumerate() {
        buf[2 * k] = z.re;
        buf[2 * k + 1] = z.im;
    }
    RqsStatus::Ok
}

/// Parses a JSON run configuration and builds a model.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rqs_model_from_json(json: *const c_char, out: *mut *mut RqsModel) -> RqsStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(RqsStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(RqsStatus::InvalidUtf8, "configuration is not valid UTF-8");
        };
        match build_model(text) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(m));
                RqsStatus::Ok
            }
            Err(e) => fail_core(e),
        }
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from [`rqs_model_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rqs_model_free(model: *mut RqsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Environment dimension `n_max + 1`, or 0 for a null model.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rqs_model_dim(model: *const RqsModel) -> usize {
    model.as_ref().map_or(0, |m| m.h.dim())
}

/// Copies the model's Riccati solution into a new handle.
/// Fails with `RQS_STATUS_SOLVER_FAILED` when the model was built with direct evolution only.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rqs_solve(model: *const RqsModel, out: *mut *mut RqsSolution) -> RqsStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return fail(RqsStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        match &m.solution {
            Some(sol) => {
                *out = Box::into_raw(Box::new(RqsSolution { inner: sol.clone() }));
                RqsStatus::Ok
            }
            None => fail(RqsStatus::SolverFailed, "model uses direct evolution; no Riccati solution was computed"),
        }
    })
}

/// Releases a solution. Null is ignored.
///
/// # Safety
/// `sol` must come from [`rqs_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rqs_solution_free(sol: *mut RqsSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Dimension of `X`, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rqs_solution_dim(sol: *const RqsSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.inner.x.dim())
}

/// Frobenius norm of the Riccati residual at `X`, or NaN for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rqs_solution_residual(sol: *const RqsSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.inner.residual_norm)
}

/// Writes `X` row-major as `2·d²` doubles.
///
/// # Safety
/// `sol` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rqs_solution_x(sol: *const RqsSolution, out: *mut f64, len: usize) -> RqsStatus {
    guard(|| {
        let Some(s) = sol.as_ref() else {
            return fail(RqsStatus::NullPointer, "null solution");
        };
        let x = s.inner.x.matrix();
        let d = x.nrows();
        write_complex((0..d * d).map(|k| x[(k / d, k % d)]), out, len, 2 * d * d)
    })
}

/// Reduced qubit state at time `t` from the configured initial state and environment,
/// written as 8 doubles (2×2, row-major, interleaved).
///
/// # Safety
/// `model` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rqs_reduced_state(model: *const RqsModel, t: f64, out: *mut f64, len: usize) -> RqsStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(RqsStatus::NullPointer, "null model");
        };
        if !t.is_finite() {
            return fail(RqsStatus::InvalidInput, "time must be finite");
        }
        match reduced_state(&m.propagator.at(t), &m.rho0, &m.omega) {
            Ok(rho) => {
                let r = rho.matrix();
                write_complex((0..4).map(|k| r[(k / 2, k % 2)]), out, len, 8)
            }
            Err(e) => fail_core(e),
        }
    })
}

/// Choi matrix of the reduced channel at time `t`, written as 32 doubles
/// (4×4, row-major, interleaved, `choi[2i+k, 2j+l] = Φ(|i⟩⟨j|)[k, l]`).
/// `min_eigenvalue` and `tp_defect` may be null.
///
/// # Safety
/// `model` must be a live handle, `out` must point to `len` writable doubles and
/// the optional outputs must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn rqs_channel(
    model: *const RqsModel,
    t: f64,
    out: *mut f64,
    len: usize,
    min_eigenvalue: *mut f64,
    tp_defect: *mut f64,
) -> RqsStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(RqsStatus::NullPointer, "null model");
        };
        if !t.is_finite() {
            return fail(RqsStatus::InvalidInput, "time must be finite");
        }
        let ch = match channel_from_unitary(&m.propagator.at(t), &m.omega, t) {
            Ok(ch) => ch,
            Err(e) => return fail_core(e),
        };
        let status = write_complex((0..16).map(|k| ch.choi[(k / 4, k % 4)]), out, len, 32);
        if status == RqsStatus::Ok {
            if let Some(p) = min_eigenvalue.as_mut() {
                *p = ch.min_eigenvalue;
            }
            if let Some(p) = tp_defect.as_mut() {
                *p = ch.tp_defect;
            }
        }
        status
    })
}

/// Residuals of the parity operator in the scalar-coupling model
/// (`r11` symmetric form, `r12` quadratic form).
///
/// # Safety
/// `r11` and `r12` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rqs_counterexample(
    n_max: usize,
    g_re: f64,
    g_im: f64,
    alpha: f64,
    r11: *mut f64,
    r12: *mut f64,
) -> RqsStatus {
    guard(|| {
        if r11.is_null() || r12.is_null() {
            return fail(RqsStatus::NullPointer, "null output");
        }
        if !(g_re.is_finite() && g_im.is_finite() && alpha.is_finite()) {
            return fail(RqsStatus::InvalidInput, "parameters must be finite");
        }
        let space = match FockSpace::new(n_max) {
            Ok(s) => s,
            Err(e) => return fail_core(e),
        };
        let rep = counterexample_report(space, FieldCoupling(Complex64::new(g_re, g_im)), alpha);
        *r11 = rep.r11;
        *r12 = rep.r12;
        RqsStatus::Ok
    })
}

/// Seed recorded in the model's configuration.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rqs_model_seed(model: *const RqsModel) -> u64 {
    model.as_ref().map_or(0, |m| m.cfg.seed)
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn rqs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rqs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
