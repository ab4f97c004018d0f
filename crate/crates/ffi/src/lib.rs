//! C interface to `brst-core`.
//!
//! Every function returns a [`BrstStatus`] code. On failure the message is
//! available from [`brst_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function; strings returned through
//! `char **` must be released with [`brst_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use brst_core::diffpoly::{euler_operator, parse, parse_params};
use brst_core::solver::{evaluate_functional, evolve, soliton_initial, GhostProfile};
use brst_core::{verify, Error, EvolutionSystem, FieldState};

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrstStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    UnknownName = 5,
    Singularity = 6,
    BlowUp = 7,
    StabilityViolation = 8,
    SymbolicFailure = 9,
    Io = 10,
    Panic = 11,
}

/// Opaque evolution system.
pub struct BrstSystem(EvolutionSystem);

/// Opaque grid state.
pub struct BrstState(FieldState);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BrstStatus {
    match e {
        Error::Parse { .. } => BrstStatus::ParseError,
        Error::Argument(_) | Error::NotNumeric(_) => BrstStatus::InvalidArgument,
        Error::UnknownSystem(_) | Error::UnknownCheck(_) | Error::UnknownDensity(_) => BrstStatus::UnknownName,
        Error::MissingRule(_) | Error::UnknownTimeDerivative(_) => BrstStatus::SymbolicFailure,
        Error::Singularity(_) => BrstStatus::Singularity,
        Error::BlowUp { .. } => BrstStatus::BlowUp,
        Error::Cfl { .. } => BrstStatus::StabilityViolation,
        Error::Io(_) | Error::Json(_) => BrstStatus::Io,
    }
}

struct Fail(BrstStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult = Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> BrstStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BrstStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BrstStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(BrstStatus::NullPointer, format!("null pointer: {what}"))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(BrstStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` is null or points to a live value of type `T`.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn out_string(out: *mut *mut c_char, s: String) -> FfiResult {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| Fail(BrstStatus::InvalidArgument, "result contains NUL".into()))?;
    // SAFETY: checked non-null above; the caller owns the slot.
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn out_box<T>(out: *mut *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: checked non-null above.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn brst_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn brst_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` is null or was returned through a `char **` out-parameter of this
/// library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn brst_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a catalog system. `params` may be null or empty.
///
/// # Safety
/// String arguments are null or NUL-terminated; `out` is a valid slot.
#[no_mangle]
pub unsafe extern "C" fn brst_system_new(
    name: *const c_char,
    params: *const c_char,
    out: *mut *mut BrstSystem,
) -> BrstStatus {
    guard(|| {
        let name = text(name, "name")?;
        let params = if params.is_null() { "" } else { text(params, "params")? };
        let sys = brst_core::build_system(name, &parse_params(params)?)?;
        out_box(out, BrstSystem(sys))
    })
}

/// Builds a system from a JSON manifest.
///
/// # Safety
/// `json` is NUL-terminated; `out` is a valid slot.
#[no_mangle]
pub unsafe extern "C" fn brst_system_from_json(json: *const c_char, out: *mut *mut BrstSystem) -> BrstStatus {
    guard(|| {
        let sys = EvolutionSystem::from_json(text(json, "json")?)?;
        out_box(out, BrstSystem(sys))
    })
}

/// JSON manifest of a system.
///
/// # Safety
/// `system` is a live handle; `out` is a valid slot.
#[no_mangle]
pub unsafe extern "C" fn brst_system_to_json(system: *const BrstSystem, out: *mut *mut c_char) -> BrstStatus {
    guard(|| {
        let sys = handle(system, "system")?;
        out_string(out, sys.0.to_json()?)
    })
}

/// # Safety
/// `system` is null or a handle from this library not freed before.
#[no_mangle]
pub unsafe extern "C" fn brst_system_free(system: *mut BrstSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Empty state on a periodic grid of `n` points over `[0, length)`.
///
/// # Safety
/// `out` is a valid slot.
#[no_mangle]
pub unsafe extern "C" fn brst_state_new(length: f64, n: usize, out: *mut *mut BrstState) -> BrstStatus {
    guard(|| out_box(out, BrstState(FieldState::new(length, n)?)))
}

/// Built-in soliton data (`kdv` or `mkdv`) with the ghost set to `d_x` of
/// the field.
///
/// # Safety
/// `system` is a live handle; `out` is a valid slot.
#[no_mangle]
pub unsafe extern "C" fn brst_state_soliton(
    system: *const BrstSystem,
    k: f64,
    x0: f64,
    length: f64,
    n: usize,
    out: *mut *mut BrstState,
) -> BrstStatus {
    guard(|| {
        let sys = handle(system, "system")?;
        out_box(out, BrstState(soliton_initial(&sys.0, k, x0, length, n, &GhostProfile::Derivative)?))
    })
}

/// Sets (or replaces) a field from `len` values.
///
/// # Safety
/// `state` is a live handle; `values` points to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn brst_state_set_field(
    state: *mut BrstState,
    name: *const c_char,
    values: *const f64,
    len: usize,
) -> BrstStatus {
    guard(|| {
        let st = state.as_mut().ok_or_else(|| null("state"))?;
        let name = text(name, "name")?;
        if values.is_null() {
            return Err(null("values"));
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        st.0 = st.0.clone().with_field(name, v)?;
        Ok(())
    })
}

/// Copies a field into `out`, which must hold `len` = grid size doubles.
///
/// # Safety
/// `state` is a live handle; `out` points to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn brst_state_get_field(
    state: *const BrstState,
    name: *const c_char,
    out: *mut f64,
    len: usize,
) -> BrstStatus {
    guard(|| {
        let st = handle(state, "state")?;
        let v = st.0.field(text(name, "name")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len != v.len() {
            return Err(Fail(BrstStatus::InvalidArgument, format!("buffer holds {len} values, grid has {}", v.len())));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), out, len);
        Ok(())
    })
}

/// Grid size and current time.
///
/// # Safety
/// `state` is a live handle; `n` and `t` are null or valid.
#[no_mangle]
pub unsafe extern "C" fn brst_state_info(state: *const BrstState, n: *mut usize, t: *mut f64) -> BrstStatus {
    guard(|| {
        let st = handle(state, "state")?;
        if let Some(n) = n.as_mut() {
            *n = st.0.n;
        }
        if let Some(t) = t.as_mut() {
            *t = st.0.t;
        }
        Ok(())
    })
}

/// # Safety
/// `state` is null or a handle from this library not freed before.
#[no_mangle]
pub unsafe extern "C" fn brst_state_free(state: *mut BrstState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Integrates `state` to `t_end` with step `dt` and returns the final state
/// as a new handle.
///
/// # Safety
/// Handles are live; `out` is a valid slot.
#[no_mangle]
pub unsafe extern "C" fn brst_evolve(
    system: *const BrstSystem,
    state: *const BrstState,
    t_end: f64,
    dt: f64,
    out: *mut *mut BrstState,
) -> BrstStatus {
    guard(|| {
        let sys = handle(system, "system")?;
        let st = handle(state, "state")?;
        let traj = evolve(&st.0, &sys.0, t_end, dt, usize::MAX, &[])?;
        out_box(out, BrstState(traj.last().clone()))
    })
}

/// Integral of a named density of `system` on `state`.
///
/// # Safety
/// Handles are live; `density` is NUL-terminated; `out` is valid.
#[no_mangle]
pub unsafe extern "C" fn brst_functional(
    system: *const BrstSystem,
    density: *const c_char,
    state: *const BrstState,
    out: *mut f64,
) -> BrstStatus {
    guard(|| {
        let sys = handle(system, "system")?;
        let st = handle(state, "state")?;
        let d = sys.0.density(text(density, "density")?)?;
        let v = evaluate_functional(d, &st.0)?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Runs a named check (or `all`), writing the JSON reports to `out_json`
/// and `1` or `0` to `passed`.
///
/// # Safety
/// `check` is NUL-terminated; `out_json` and `passed` are valid.
#[no_mangle]
pub unsafe extern "C" fn brst_verify(
    check: *const c_char,
    out_json: *mut *mut c_char,
    passed: *mut c_int,
) -> BrstStatus {
    guard(|| {
        let name = text(check, "check")?;
        let reports = if name == "all" { verify::run_all()? } else { verify::run_check(name)? };
        let ok = reports.iter().all(|r| r.passed());
        *passed.as_mut().ok_or_else(|| null("passed"))? = c_int::from(ok);
        out_string(out_json, serde_json::to_string(&reports).map_err(Error::from)?)
    })
}

/// Variational derivative of `density` with respect to the even `field`.
///
/// # Safety
/// Strings are NUL-terminated; `out` is a valid slot.
#[no_mangle]
pub unsafe extern "C" fn brst_euler(density: *const c_char, field: *const c_char, out: *mut *mut c_char) -> BrstStatus {
    guard(|| {
        let d = parse(text(density, "density")?)?;
        out_string(out, euler_operator(&d, text(field, "field")?)?.to_string())
    })
}
