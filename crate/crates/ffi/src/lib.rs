//! C ABI over `ncol`. Objects are opaque heap handles released with the
//! matching `_free`; every call returns an [`NcolStatus`] and writes results
//! through out-pointers.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ncol::central::{collinear3, ngon, CentralConfiguration};
use ncol::io::ConfigFile;
use ncol::mcgehee::{homothetic_initial, integrate_el, SimOptions, Trajectory};
use ncol::morse::{default_shifts, morse_witnesses, Profile, QuadOptions};
use ncol::spectral::{collinear_threshold, ngon_threshold, smallest_eigenvalue};
use ncol::{Alpha, NcolError};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NotCentral = 4,
    NoConvergence = 5,
    IntegrationFailure = 6,
    OutOfRange = 7,
    NumericFailure = 8,
    Panic = 99,
}

impl From<&NcolError> for NcolStatus {
    fn from(e: &NcolError) -> Self {
        use NcolError::*;
        match e {
            InvalidAlpha(_) | InvalidMass(_) | InvalidN(_) | DimensionMismatch(_) | ZeroConfiguration
            | RejectedInitialData(_) | OverlappingSupports(_) => NcolStatus::InvalidArgument,
            Parse(_) | Io(_) => NcolStatus::ParseError,
            NotCentral(_) | NotTangent(_) | NotHomographic(_) => NcolStatus::NotCentral,
            NoConvergence { .. } | ConvergedToCollision(_) | BracketFailure { .. } => NcolStatus::NoConvergence,
            StepFailure { .. } | EllipsoidDrift { .. } | NonCollapsing(_) => NcolStatus::IntegrationFailure,
            SupportOutOfRange { .. } | InsufficientHorizon(_) => NcolStatus::OutOfRange,
            _ => NcolStatus::NumericFailure,
        }
    }
}

/// A verified central configuration.
pub struct NcolConfig(CentralConfiguration);

/// Stored states of a reduced collision run.
pub struct NcolTrajectory(Trajectory);

fn guard<F: FnOnce() -> Result<(), NcolStatus>>(f: F) -> NcolStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NcolStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => NcolStatus::Panic,
    }
}

fn lift<T>(r: ncol::Result<T>) -> Result<T, NcolStatus> {
    r.map_err(|e| NcolStatus::from(&e))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), NcolStatus> {
    if out.is_null() {
        return Err(NcolStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, NcolStatus> {
    p.as_ref().ok_or(NcolStatus::NullPointer)
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ncol_status_str(status: NcolStatus) -> *const c_char {
    let s: &'static CStr = match status {
        NcolStatus::Ok => c"ok",
        NcolStatus::NullPointer => c"null pointer",
        NcolStatus::InvalidArgument => c"invalid argument",
        NcolStatus::ParseError => c"parse error",
        NcolStatus::NotCentral => c"not a central configuration",
        NcolStatus::NoConvergence => c"no convergence",
        NcolStatus::IntegrationFailure => c"integration failure",
        NcolStatus::OutOfRange => c"out of range",
        NcolStatus::NumericFailure => c"numeric failure",
        NcolStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Symmetric collinear configuration with masses (m1, m2, m1).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_config_collinear3(m1: f64, m2: f64, alpha: f64, out: *mut *mut NcolConfig) -> NcolStatus {
    guard(|| {
        let cc = lift(Alpha::new(alpha).and_then(|a| collinear3(m1, m2, a)))?;
        put(out, Box::into_raw(Box::new(NcolConfig(cc))))
    })
}

/// Regular N-gon with unit masses in dimension `dim`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_config_ngon(n: usize, alpha: f64, dim: usize, out: *mut *mut NcolConfig) -> NcolStatus {
    guard(|| {
        let cc = lift(Alpha::new(alpha).and_then(|a| ngon(n, a, dim)))?;
        put(out, Box::into_raw(Box::new(NcolConfig(cc))))
    })
}

/// Parses and verifies a configuration JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_config_from_json(json: *const c_char, out: *mut *mut NcolConfig) -> NcolStatus {
    guard(|| {
        if json.is_null() {
            return Err(NcolStatus::NullPointer);
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| NcolStatus::ParseError)?;
        let cc = lift(ConfigFile::read(text.as_bytes()).and_then(|c| c.to_central()))?;
        put(out, Box::into_raw(Box::new(NcolConfig(cc))))
    })
}

/// # Safety
/// `cfg` must come from an `ncol_config_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ncol_config_free(cfg: *mut NcolConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Potential level, centrality residual, body count and dimension.
///
/// # Safety
/// `cfg` must be a live handle; out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_config_info(
    cfg: *const NcolConfig,
    b: *mut f64,
    residual: *mut f64,
    n: *mut usize,
    dim: *mut usize,
) -> NcolStatus {
    guard(|| {
        let cc = &get(cfg)?.0;
        put(b, cc.b)?;
        put(residual, cc.residual)?;
        put(n, cc.n())?;
        put(dim, cc.dim())
    })
}

/// Copies the flattened positions into `buf` (length at least N·dim).
///
/// # Safety
/// `cfg` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ncol_config_positions(cfg: *const NcolConfig, buf: *mut f64, len: usize) -> NcolStatus {
    guard(|| {
        let flat = get(cfg)?.0.s0.flat();
        if buf.is_null() {
            return Err(NcolStatus::NullPointer);
        }
        if len < flat.len() {
            return Err(NcolStatus::OutOfRange);
        }
        std::ptr::copy_nonoverlapping(flat.as_ptr(), buf, flat.len());
        Ok(())
    })
}

/// Smallest constrained Hessian eigenvalue, the criterion margin and
/// whether the margin is negative.
///
/// # Safety
/// `cfg` must be a live handle; out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_spectral(
    cfg: *const NcolConfig,
    mu1: *mut f64,
    margin: *mut f64,
    satisfied: *mut bool,
) -> NcolStatus {
    guard(|| {
        let r = lift(smallest_eigenvalue(&get(cfg)?.0))?;
        put(mu1, r.mu1)?;
        put(margin, r.margin)?;
        put(satisfied, r.satisfied)
    })
}

/// Threshold exponent of the equal-mass collinear inequality.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_collinear_threshold(out: *mut f64) -> NcolStatus {
    guard(|| {
        let t = lift(collinear_threshold())?;
        put(out, t.alpha_star.ok_or(NcolStatus::NoConvergence)?)
    })
}

/// Threshold exponent of the polygon inequality.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_ngon_threshold(n: usize, out: *mut f64) -> NcolStatus {
    guard(|| {
        let t = lift(ngon_threshold(n))?;
        put(out, t.alpha_star.ok_or(NcolStatus::NoConvergence)?)
    })
}

/// Homothetic collision at energy `h` from ρ = 1, integrated for `tau_max`
/// (stopping at ρ < `rho_min` when positive).
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_simulate_homothetic(
    cfg: *const NcolConfig,
    h: f64,
    tau_max: f64,
    rho_min: f64,
    out: *mut *mut NcolTrajectory,
) -> NcolStatus {
    guard(|| {
        let cc = &get(cfg)?.0;
        if !(tau_max > 0.0) {
            return Err(NcolStatus::InvalidArgument);
        }
        let opts = SimOptions { tau_max, rho_min: (rho_min > 0.0).then_some(rho_min), ..Default::default() };
        let init = lift(homothetic_initial(cc, h, 1.0))?;
        let traj = lift(integrate_el(&init, &cc.masses, cc.alpha, &opts))?;
        put(out, Box::into_raw(Box::new(NcolTrajectory(traj))))
    })
}

/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncol_trajectory_len(traj: *const NcolTrajectory, out: *mut usize) -> NcolStatus {
    guard(|| put(out, get(traj)?.0.len()))
}

/// τ, ρ, ρ′ and λ1 of stored state `i`.
///
/// # Safety
/// `traj` must be a live handle; out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_trajectory_state(
    traj: *const NcolTrajectory,
    i: usize,
    tau: *mut f64,
    rho: *mut f64,
    rho_prime: *mut f64,
    lambda1: *mut f64,
) -> NcolStatus {
    guard(|| {
        let t = &get(traj)?.0;
        if i >= t.len() {
            return Err(NcolStatus::OutOfRange);
        }
        put(tau, t.tau[i])?;
        put(rho, t.rho(i))?;
        put(rho_prime, t.rho_prime(i))?;
        put(lambda1, t.lambda1(i))
    })
}

/// # Safety
/// `traj` must come from `ncol_simulate_homothetic` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ncol_trajectory_free(traj: *mut NcolTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Witness count of the default bump family (flat-top, width 20) along the
/// zero-energy homothetic collision, and the total Q.
///
/// # Safety
/// `cfg` must be a live handle; out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncol_morse_witnesses(
    cfg: *const NcolConfig,
    bumps: usize,
    witnesses: *mut usize,
    q: *mut f64,
) -> NcolStatus {
    guard(|| {
        let cc = &get(cfg)?.0;
        let rep = lift(smallest_eigenvalue(cc))?;
        let (l1, l2) = (1.0, 21.0);
        let shifts = default_shifts(bumps, l1, l2, 0.0);
        let horizon = shifts.last().copied().unwrap_or(0.0) + l2 + 1.0;
        let init = lift(homothetic_initial(cc, 0.0, 1.0))?;
        let opts = SimOptions { tau_max: horizon, rho_min: None, ..Default::default() };
        let traj = lift(integrate_el(&init, &cc.masses, cc.alpha, &opts))?;
        let r = lift(morse_witnesses(&traj, &rep.eigvec, &shifts, l1, l2, Profile::default(), &QuadOptions::default()))?;
        put(witnesses, r.witnesses)?;
        put(q, r.q)
    })
}
