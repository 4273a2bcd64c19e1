//! C ABI for the plemden lab.
//!
//! Every entry point returns a [`PlemdenStatus`]; on failure the message is
//! available from [`plemden_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their `_free` function. Strings returned
//! as `char *` are owned by the caller and released with [`plemden_string_free`].

use plemden::exponents::{classify_liouville, critical_exponent, ExtReal, FClass};
use plemden::geometry::ManifoldModel;
use plemden::run::{run, RunConfig, RunOutput};
use plemden::LabError;
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlemdenStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Usage = 3,
    Input = 4,
    Domain = 5,
    Singular = 6,
    Precondition = 7,
    Numerical = 8,
    Capability = 9,
    Panic = 10,
}

impl From<&LabError> for PlemdenStatus {
    fn from(e: &LabError) -> Self {
        match e {
            LabError::Domain(_) => PlemdenStatus::Domain,
            LabError::Singular { .. } => PlemdenStatus::Singular,
            LabError::Precondition(_) => PlemdenStatus::Precondition,
            LabError::Input(_) => PlemdenStatus::Input,
            LabError::Numerical { .. } => PlemdenStatus::Numerical,
            LabError::Capability(_) => PlemdenStatus::Capability,
            LabError::Usage(_) => PlemdenStatus::Usage,
        }
    }
}

/// A finished run: its JSON report and any CSV data.
pub struct PlemdenReport {
    out: RunOutput,
}

/// A model manifold.
pub struct PlemdenModel {
    model: ManifoldModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: PlemdenStatus, msg: impl Into<String>) -> PlemdenStatus {
    set_error(msg);
    status
}

fn lab(e: LabError) -> PlemdenStatus {
    fail((&e).into(), e.to_string())
}

/// Runs `body` with panics turned into `PLEMDEN_STATUS_PANIC`.
fn guard(body: impl FnOnce() -> PlemdenStatus) -> PlemdenStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(PlemdenStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, PlemdenStatus> {
    if s.is_null() {
        return Err(fail(PlemdenStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(PlemdenStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn plemden_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn plemden_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn plemden_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the experiment described by a JSON run configuration.
///
/// Check failures are part of the report and still return `PLEMDEN_STATUS_OK`;
/// a malformed configuration returns `PLEMDEN_STATUS_USAGE`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plemden_run_json(config_json: *const c_char, out: *mut *mut PlemdenReport) -> PlemdenStatus {
    guard(|| {
        if out.is_null() {
            return fail(PlemdenStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let text = match read_str(config_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match RunConfig::from_json(text).and_then(|c| run(&c)) {
            Ok(o) => {
                *out = Box::into_raw(Box::new(PlemdenReport { out: o }));
                PlemdenStatus::Ok
            }
            Err(e) => lab(e),
        }
    })
}

/// 1 if every check passed, 0 if not, -1 for a NULL handle.
///
/// # Safety
/// `r` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn plemden_report_pass(r: *const PlemdenReport) -> c_int {
    match r.as_ref() {
        Some(r) => c_int::from(r.out.report.pass),
        None => -1,
    }
}

/// The report as JSON; free with `plemden_string_free`. NULL for a NULL handle.
///
/// # Safety
/// `r` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn plemden_report_json(r: *const PlemdenReport) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| into_c(r.out.report.to_json()))
}

/// CSV data of the run, or NULL when the experiment produces none.
///
/// # Safety
/// `r` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn plemden_report_csv(r: *const PlemdenReport) -> *mut c_char {
    r.as_ref()
        .and_then(|r| r.out.csv.clone())
        .map_or(ptr::null_mut(), into_c)
}

/// # Safety
/// `r` must be NULL or a live report handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn plemden_report_free(r: *mut PlemdenReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Liouville verdict for `-lap_p u = u^alpha` on a noncompact manifold with
/// nonnegative Ricci curvature, as JSON.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plemden_classify_power(n: usize, p: f64, alpha: f64, out_json: *mut *mut c_char) -> PlemdenStatus {
    guard(|| {
        if out_json.is_null() {
            return fail(PlemdenStatus::NullPointer, "null output pointer");
        }
        *out_json = ptr::null_mut();
        match classify_liouville(n, p, alpha, &FClass::pure_power()) {
            Ok(v) => {
                *out_json = into_c(serde_json::to_string(&v).expect("verdicts serialize"));
                PlemdenStatus::Ok
            }
            Err(e) => lab(e),
        }
    })
}

/// `((n+1)p - n)/(n-p)^+`; writes `INFINITY` when `p >= n`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plemden_critical_exponent(n: usize, p: f64, out: *mut f64) -> PlemdenStatus {
    guard(|| {
        if out.is_null() {
            return fail(PlemdenStatus::NullPointer, "null output pointer");
        }
        match critical_exponent(n, p) {
            Ok(ExtReal::Finite(x)) => {
                *out = x;
                PlemdenStatus::Ok
            }
            Ok(ExtReal::PosInf) => {
                *out = f64::INFINITY;
                PlemdenStatus::Ok
            }
            Err(e) => lab(e),
        }
    })
}

/// Creates a named model: "euclidean", "sphere" or "hyperbolic".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plemden_model_new(name: *const c_char, dim: usize, kappa: f64, out: *mut *mut PlemdenModel) -> PlemdenStatus {
    guard(|| {
        if out.is_null() {
            return fail(PlemdenStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ManifoldModel::named(name, dim, kappa) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(PlemdenModel { model }));
                PlemdenStatus::Ok
            }
            Err(e) => lab(e),
        }
    })
}

/// Volume of the geodesic ball of `radius` about the pole.
///
/// # Safety
/// `m` must be a live model handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plemden_model_ball_volume(m: *const PlemdenModel, radius: f64, out: *mut f64) -> PlemdenStatus {
    guard(|| {
        let Some(m) = m.as_ref() else {
            return fail(PlemdenStatus::NullPointer, "null model handle");
        };
        if out.is_null() {
            return fail(PlemdenStatus::NullPointer, "null output pointer");
        }
        match m.model.ball_volume(radius) {
            Ok(v) => {
                *out = v;
                PlemdenStatus::Ok
            }
            Err(e) => lab(e),
        }
    })
}

/// Largest radius of the model (`INFINITY` when noncompact).
///
/// # Safety
/// `m` must be NULL or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn plemden_model_r_max(m: *const PlemdenModel) -> f64 {
    m.as_ref().map_or(f64::NAN, |m| m.model.r_max())
}

/// # Safety
/// `m` must be NULL or a live model handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn plemden_model_free(m: *mut PlemdenModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}
