//! C ABI over `chemdyn`.
//!
//! Objects are opaque handles created by `chemdyn_*` constructors and
//! released with the matching `*_free`. Every fallible call returns a
//! [`ChemdynStatus`]; on failure `chemdyn_last_error()` describes it.
//! Strings returned to the caller are freed with `chemdyn_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use chemdyn::catalog;
use chemdyn::crn::{canonical_crn, fuse};
use chemdyn::error::Error;
use chemdyn::lce::{default_tau, lce_qr, LceOptions, LceSeries};
use chemdyn::polysys::PolySystem;
use chemdyn::rational::{parse_rational, qi};
use chemdyn::sim::{integrate, IntegratorOptions, Trajectory};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChemdynStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    UnknownId = 4,
    NotChemical = 5,
    RankCollapse = 6,
    Dimension = 7,
    Io = 8,
    /// The run stopped before `t_end`; the partial result is still returned.
    Diverged = 9,
    Panic = 10,
}

/// A polynomial system.
pub struct ChemdynSystem(PolySystem);

/// Sampled solution of a system.
pub struct ChemdynTrajectory(Trajectory);

/// Finite-time Lyapunov exponents, one row per window.
pub struct ChemdynLce(LceSeries);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ChemdynStatus {
    match e {
        Error::Dimension { .. } => ChemdynStatus::Dimension,
        Error::Argument(_) => ChemdynStatus::InvalidArgument,
        Error::Parse(_) | Error::Json(_) => ChemdynStatus::Parse,
        Error::NotChemical { .. } => ChemdynStatus::NotChemical,
        Error::UnknownId(_) => ChemdynStatus::UnknownId,
        Error::RankCollapse { .. } => ChemdynStatus::RankCollapse,
        Error::Io(_) => ChemdynStatus::Io,
    }
}

struct Fail(ChemdynStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Run `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<ChemdynStatus, Fail>) -> ChemdynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            ChemdynStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(ChemdynStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(ChemdynStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn opt_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message for the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn chemdyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Instantiate a catalog entry. `eps` and `mu` (decimal or `p/q`) may be
/// null to take the entry's defaults.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_system_from_catalog(
    id: *const c_char,
    eps: *const c_char,
    mu: *const c_char,
    out: *mut *mut ChemdynSystem,
) -> ChemdynStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let id = str_arg(id, "id")?;
        let defaults = catalog::default_params(id)?;
        let (eps, mu) = (opt_str(eps, "eps")?, opt_str(mu, "mu")?);
        let (e, m) = match (&defaults, eps, mu) {
            (None, None, None) => (qi(1), qi(1)),
            (None, _, _) => {
                return Err(Fail(ChemdynStatus::InvalidArgument, format!("`{id}` takes no parameters")));
            }
            (Some((de, dm)), e, m) => (
                e.map(parse_rational).transpose()?.unwrap_or_else(|| de.clone()),
                m.map(parse_rational).transpose()?.unwrap_or_else(|| dm.clone()),
            ),
        };
        put(out, ChemdynSystem(catalog::instantiate(id, &e, &m)?));
        Ok(ChemdynStatus::Ok)
    })
}

/// Parse a system file (JSON text).
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_system_from_json(json: *const c_char, out: *mut *mut ChemdynSystem) -> ChemdynStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, ChemdynSystem(PolySystem::from_json(str_arg(json, "json")?)?));
        Ok(ChemdynStatus::Ok)
    })
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_system_free(s: *mut ChemdynSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_system_dim(s: *const ChemdynSystem) -> usize {
    s.as_ref().map_or(0, |s| s.0.dim())
}

/// System file text. Free with `chemdyn_string_free`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_system_to_json(s: *const ChemdynSystem, out: *mut *mut c_char) -> ChemdynStatus {
    guard(|| {
        let s = obj(s, "system")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_string(s.0.to_json());
        Ok(ChemdynStatus::Ok)
    })
}

/// Complexity label such as `(10,3)`. Free with `chemdyn_string_free`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_system_complexity(s: *const ChemdynSystem, out: *mut *mut c_char) -> ChemdynStatus {
    guard(|| {
        let s = obj(s, "system")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_string(s.0.complexity().label());
        Ok(ChemdynStatus::Ok)
    })
}

/// Sets `*chemical` to 1 or 0.
///
/// # Safety
/// `s` must be a live handle; `chemical` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_system_is_chemical(s: *const ChemdynSystem, chemical: *mut c_int) -> ChemdynStatus {
    guard(|| {
        let s = obj(s, "system")?;
        if chemical.is_null() {
            return Err(null("chemical"));
        }
        *chemical = c_int::from(s.0.is_chemical().0);
        Ok(ChemdynStatus::Ok)
    })
}

/// Vector field at `x` (length `n`) into `f` (length `n`).
///
/// # Safety
/// `x` and `f` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_system_evaluate(
    s: *const ChemdynSystem,
    x: *const f64,
    n: usize,
    f: *mut f64,
) -> ChemdynStatus {
    guard(|| {
        let s = obj(s, "system")?;
        let x = slice_arg(x, n, "x")?;
        if f.is_null() {
            return Err(null("f"));
        }
        let v = s.0.evaluate(x)?;
        std::slice::from_raw_parts_mut(f, n).copy_from_slice(&v);
        Ok(ChemdynStatus::Ok)
    })
}

/// Canonical reaction network (fused when `fused` is nonzero) in text form.
/// Fails with `NOT_CHEMICAL` for non-chemical systems.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_system_crn(s: *const ChemdynSystem, fused: c_int, out: *mut *mut c_char) -> ChemdynStatus {
    guard(|| {
        let s = obj(s, "system")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = canonical_crn(&s.0)?;
        let c = if fused != 0 { fuse(&c)? } else { c };
        *out = to_c_string(c.render());
        Ok(ChemdynStatus::Ok)
    })
}

fn options(x0: &[f64], rtol: f64, atol: f64) -> IntegratorOptions {
    let mut o = IntegratorOptions::scaled_for(x0);
    if rtol > 0.0 {
        o.rtol = rtol;
    }
    if atol > 0.0 {
        o.atol = atol;
    }
    o
}

/// Integrate from `x0` over `[0, t_end]` with `samples` equally spaced
/// outputs. Non-positive `rtol`/`atol` select the defaults. On `DIVERGED`
/// `*out` still holds the samples up to the stop.
///
/// # Safety
/// `x0` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_simulate(
    s: *const ChemdynSystem,
    x0: *const f64,
    n: usize,
    t_end: f64,
    samples: usize,
    rtol: f64,
    atol: f64,
    out: *mut *mut ChemdynTrajectory,
) -> ChemdynStatus {
    guard(|| {
        let s = obj(s, "system")?;
        let x0 = slice_arg(x0, n, "x0")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = integrate(&s.0, x0, t_end, samples, &options(x0, rtol, atol))?;
        let status = match &t.divergence {
            Some(d) => {
                set_error(&format!("integration stopped at t = {} ({:?})", d.t, d.reason));
                ChemdynStatus::Diverged
            }
            None => ChemdynStatus::Ok,
        };
        put(out, ChemdynTrajectory(t));
        Ok(status)
    })
}

/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_trajectory_free(t: *mut ChemdynTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of samples.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_trajectory_len(t: *const ChemdynTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.0.times.len())
}

/// Sample `k`: its time into `*time` and its state into `x` (length `n`).
///
/// # Safety
/// `time` must be writable and `x` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_trajectory_sample(
    t: *const ChemdynTrajectory,
    k: usize,
    time: *mut f64,
    x: *mut f64,
    n: usize,
) -> ChemdynStatus {
    guard(|| {
        let t = &obj(t, "trajectory")?.0;
        row(&t.times, &t.states, k, time, x, n)
    })
}

unsafe fn row(times: &[f64], rows: &[Vec<f64>], k: usize, time: *mut f64, x: *mut f64, n: usize) -> Result<ChemdynStatus, Fail> {
    let Some(r) = rows.get(k) else {
        return Err(Fail(ChemdynStatus::InvalidArgument, format!("row {k} out of range ({} rows)", rows.len())));
    };
    if r.len() != n {
        return Err(Error::Dimension { expected: r.len(), got: n }.into());
    }
    if time.is_null() || x.is_null() {
        return Err(null("output"));
    }
    *time = times[k];
    std::slice::from_raw_parts_mut(x, n).copy_from_slice(r);
    Ok(ChemdynStatus::Ok)
}

/// Lyapunov exponents by repeated QR over windows of length `tau`
/// (non-positive selects the default). Rows hold the exponents in
/// descending order.
///
/// # Safety
/// `x0` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_lce(
    s: *const ChemdynSystem,
    x0: *const f64,
    n: usize,
    t_end: f64,
    tau: f64,
    out: *mut *mut ChemdynLce,
) -> ChemdynStatus {
    guard(|| {
        let s = obj(s, "system")?;
        let x0 = slice_arg(x0, n, "x0")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let tau = if tau > 0.0 { tau } else { default_tau(&s.0, x0)? };
        let opts = LceOptions { integrator: options(x0, 0.0, 0.0), ..Default::default() };
        let l = lce_qr(&s.0, x0, t_end, tau, &opts)?;
        let status = match &l.divergence {
            Some(d) => {
                set_error(&format!("trajectory stopped at t = {} ({:?})", d.t, d.reason));
                ChemdynStatus::Diverged
            }
            None => ChemdynStatus::Ok,
        };
        put(out, ChemdynLce(l));
        Ok(status)
    })
}

/// # Safety
/// `l` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_lce_free(l: *mut ChemdynLce) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Number of windows.
///
/// # Safety
/// `l` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_lce_len(l: *const ChemdynLce) -> usize {
    l.as_ref().map_or(0, |l| l.0.times.len())
}

/// Window `k`: its end time into `*time` and the exponents into `lambdas`.
///
/// # Safety
/// `time` must be writable and `lambdas` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_lce_row(
    l: *const ChemdynLce,
    k: usize,
    time: *mut f64,
    lambdas: *mut f64,
    n: usize,
) -> ChemdynStatus {
    guard(|| {
        let l = &obj(l, "lce")?.0;
        row(&l.times, &l.lambdas, k, time, lambdas, n)
    })
}
