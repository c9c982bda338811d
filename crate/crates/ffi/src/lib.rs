//! C interface to `fvx`.
//!
//! Problems are opaque handles built from the JSON problem format. Every
//! call returns an [`FvxStatus`]; results come back as heap strings owned by
//! the caller and released with [`fvx_string_free`]. On failure
//! [`fvx_last_error`] describes the error raised on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fvx::lpformat::{parse_lp, write_lp};
use fvx::problem::{Method, Problem, ProblemFile};
use fvx::FvxError;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FvxStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    NullOrInvalidArgument = 1,
    /// The problem document or LP text was rejected.
    InvalidInput = 2,
    /// Every point is forbidden, or no distinct assignment exists.
    Infeasible = 3,
    /// Verification ran and found a disagreement.
    VerificationFailed = 4,
    /// The method does not apply to this problem.
    IncompatibleMethod = 5,
    /// The instance is too large to enumerate.
    GuardExceeded = 6,
    /// Any other library error.
    Failed = 7,
    /// A panic was caught at the boundary.
    Panic = 8,
}

/// Opaque problem handle.
pub struct FvxProblem {
    file: ProblemFile,
    problem: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &FvxError) -> FvxStatus {
    match e {
        FvxError::InvalidField { .. } | FvxError::LpParse { .. } | FvxError::DimensionMismatch { .. } => {
            FvxStatus::InvalidInput
        }
        FvxError::AllForbidden => FvxStatus::Infeasible,
        FvxError::IncompatibleMethod { .. } => FvxStatus::IncompatibleMethod,
        FvxError::GuardExceeded(_) => FvxStatus::GuardExceeded,
        _ => FvxStatus::Failed,
    }
}

fn guard(f: impl FnOnce() -> Result<FvxStatus, FvxStatus>) -> FvxStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) | Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            FvxStatus::Panic
        }
    }
}

fn fail(e: FvxError) -> FvxStatus {
    set_error(&e.to_string());
    status_of(&e)
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, FvxStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(FvxStatus::NullOrInvalidArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        FvxStatus::NullOrInvalidArgument
    })
}

unsafe fn handle<'a>(p: *const FvxProblem) -> Result<&'a FvxProblem, FvxStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null problem handle");
        FvxStatus::NullOrInvalidArgument
    })
}

unsafe fn method(p: &FvxProblem, name: *const c_char) -> Result<Method, FvxStatus> {
    if name.is_null() {
        return Ok(p.problem.default_method());
    }
    text(name)?.parse::<Method>().map_err(fail)
}

unsafe fn emit(out: *mut *mut c_char, s: String) -> Result<(), FvxStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(FvxStatus::NullOrInvalidArgument);
    }
    *out = CString::new(s).map_err(|_| FvxStatus::Failed)?.into_raw();
    Ok(())
}

unsafe fn check_out(out: *mut *mut c_char) -> Result<(), FvxStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(FvxStatus::NullOrInvalidArgument);
    }
    *out = ptr::null_mut();
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

/// Parses a problem document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fvx_problem_from_json(json: *const c_char, out: *mut *mut FvxProblem) -> FvxStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return Err(FvxStatus::NullOrInvalidArgument);
        }
        *out = ptr::null_mut();
        let file = ProblemFile::parse(text(json)?).map_err(fail)?;
        let problem = file.resolve().map_err(fail)?;
        *out = Box::into_raw(Box::new(FvxProblem { file, problem }));
        Ok(FvxStatus::Ok)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `p` must come from [`fvx_problem_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fvx_problem_free(p: *mut FvxProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Dimension of the problem, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fvx_problem_dim(p: *const FvxProblem) -> usize {
    p.as_ref().map_or(0, |p| p.problem.dim())
}

/// Solves the problem; writes `{status, value, vertex, oracle_calls}`.
/// An infeasible problem returns [`FvxStatus::Infeasible`] with the report.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fvx_solve(p: *const FvxProblem, out: *mut *mut c_char) -> FvxStatus {
    guard(|| {
        check_out(out)?;
        let p = handle(p)?;
        let report = p.problem.solve().map_err(fail)?;
        let infeasible = report.status != "optimal";
        emit(out, to_json(&report))?;
        Ok(if infeasible { FvxStatus::Infeasible } else { FvxStatus::Ok })
    })
}

/// The `k` best allowed vertices; `k == 0` uses the `k` of the document.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fvx_kbest(p: *const FvxProblem, k: usize, out: *mut *mut c_char) -> FvxStatus {
    guard(|| {
        check_out(out)?;
        let p = handle(p)?;
        let k = p.problem.k((k > 0).then_some(k)).map_err(fail)?;
        let report = p.problem.kbest(k).map_err(fail)?;
        emit(out, to_json(&report))?;
        Ok(FvxStatus::Ok)
    })
}

/// All-different over the slots of the document.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fvx_alldiff(p: *const FvxProblem, out: *mut *mut c_char) -> FvxStatus {
    guard(|| {
        check_out(out)?;
        let p = handle(p)?;
        let report = p.problem.alldiff().map_err(fail)?;
        let infeasible = report.status != "optimal";
        emit(out, to_json(&report))?;
        Ok(if infeasible { FvxStatus::Infeasible } else { FvxStatus::Ok })
    })
}

/// Compiles to LP text. `method_name` may be null for the default builder.
///
/// # Safety
/// `p` must be a live handle; `method_name` null or NUL-terminated; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn fvx_compile(p: *const FvxProblem, method_name: *const c_char, out: *mut *mut c_char) -> FvxStatus {
    guard(|| {
        check_out(out)?;
        let p = handle(p)?;
        let m = method(p, method_name)?;
        let system = p.problem.compile(m).map_err(fail)?;
        emit(out, write_lp(&system, Some(&p.file.to_json())))?;
        Ok(FvxStatus::Ok)
    })
}

/// Compiles with `method_name` (null for the default) and verifies the result.
///
/// # Safety
/// As [`fvx_compile`].
#[no_mangle]
pub unsafe extern "C" fn fvx_verify(
    p: *const FvxProblem,
    method_name: *const c_char,
    trials: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> FvxStatus {
    guard(|| {
        check_out(out)?;
        let p = handle(p)?;
        let m = method(p, method_name)?;
        let system = p.problem.compile(m).map_err(fail)?;
        let report = p.problem.verify(&system, trials, seed).map_err(fail)?;
        emit(out, to_json(&report))?;
        Ok(if report.passed() { FvxStatus::Ok } else { FvxStatus::VerificationFailed })
    })
}

/// Verifies LP text that embeds its problem document.
///
/// # Safety
/// `lp` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fvx_verify_lp(lp: *const c_char, trials: usize, seed: u64, out: *mut *mut c_char) -> FvxStatus {
    guard(|| {
        check_out(out)?;
        let file = parse_lp(text(lp)?).map_err(fail)?;
        let doc = file
            .problem
            .ok_or_else(|| fail(FvxError::InvalidField {
                field: "problem".into(),
                message: "the LP text carries no problem line".into(),
            }))?;
        let problem = Problem::parse(&doc).map_err(fail)?;
        let report = problem.verify(&file.system, trials, seed).map_err(fail)?;
        emit(out, to_json(&report))?;
        Ok(if report.passed() { FvxStatus::Ok } else { FvxStatus::VerificationFailed })
    })
}

/// Allowed vertices, one per line, sorted.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fvx_enumerate(p: *const FvxProblem, out: *mut *mut c_char) -> FvxStatus {
    guard(|| {
        check_out(out)?;
        let p = handle(p)?;
        let lines = p.problem.enumerate().map_err(fail)?;
        let mut s = lines.join("\n");
        if !s.is_empty() {
            s.push('\n');
        }
        emit(out, s)?;
        Ok(FvxStatus::Ok)
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fvx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fvx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn fvx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
