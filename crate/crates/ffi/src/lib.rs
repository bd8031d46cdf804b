//! C ABI over `ioacheck`: opaque instance and report handles, status codes, and a
//! thread-local last-error message. Strings returned to C are freed with
//! `ioa_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ioacheck::algdata::{load_instance, parse_instance, save_instance, AlgError, AlgebraInstance};
use ioacheck::cli::{braiding_text, gen_example, run_checks, RunConfig, SUITES};
use ioacheck::report::{RunReport, Status};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IoaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    Io = 5,
    UnknownSuite = 6,
    BadArgument = 7,
    Internal = 8,
}

/// Per-axiom outcome, for `ioa_report_count`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IoaCheckStatus {
    Pass = 0,
    Fail = 1,
    Skipped = 2,
}

/// A loaded, validated algebra instance.
pub struct IoaInstance {
    inner: AlgebraInstance,
}

/// The outcome of a check run.
pub struct IoaReport {
    inner: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn fail(code: IoaStatus, msg: impl Into<String>) -> IoaStatus {
    set_error(msg);
    code
}

fn guard(f: impl FnOnce() -> IoaStatus) -> IoaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(IoaStatus::Internal, "panic inside ioacheck"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, IoaStatus> {
    if p.is_null() {
        return Err(fail(IoaStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(IoaStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn alg_status(e: &AlgError) -> IoaStatus {
    match e {
        AlgError::Parse { .. } | AlgError::Num(_) => IoaStatus::Parse,
        AlgError::Io(_) => IoaStatus::Io,
        _ => IoaStatus::Invalid,
    }
}

unsafe fn put_instance(out: *mut *mut IoaInstance, r: Result<AlgebraInstance, AlgError>) -> IoaStatus {
    match r {
        Ok(inst) => {
            *out = Box::into_raw(Box::new(IoaInstance { inner: inst }));
            IoaStatus::Ok
        }
        Err(e) => fail(alg_status(&e), e.to_string()),
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> IoaStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            IoaStatus::Ok
        }
        Err(_) => fail(IoaStatus::Internal, "string contains NUL"),
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn ioa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|c| c.as_ptr()).unwrap_or(ptr::null()))
}

/// Loads and validates an instance file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_instance_load(path: *const c_char, out: *mut *mut IoaInstance) -> IoaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IoaStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let p = match str_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        put_instance(out, load_instance(Path::new(p)))
    })
}

/// Parses and validates instance text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_instance_parse(text: *const c_char, out: *mut *mut IoaInstance) -> IoaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IoaStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let t = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        put_instance(out, parse_instance(t))
    })
}

/// Generated example: `kind` is "trivial" or "abelian"; `params` is a space-separated list
/// such as "Z2 q=1/4" (may be NULL for trivial).
///
/// # Safety
/// String arguments must be NUL-terminated or NULL where allowed; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_instance_generate(kind: *const c_char, params: *const c_char, out: *mut *mut IoaInstance) -> IoaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IoaStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let k = match str_arg(kind) {
            Ok(k) => k,
            Err(s) => return s,
        };
        let ps: Vec<String> = if params.is_null() {
            Vec::new()
        } else {
            match str_arg(params) {
                Ok(p) => p.split_whitespace().map(String::from).collect(),
                Err(s) => return s,
            }
        };
        match gen_example(k, &ps) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(IoaInstance { inner: inst }));
                IoaStatus::Ok
            }
            Err(e) => fail(IoaStatus::BadArgument, e),
        }
    })
}

/// # Safety
/// `inst` must come from an `ioa_instance_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ioa_instance_free(inst: *mut IoaInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_instance_num_colors(inst: *const IoaInstance, out: *mut usize) -> IoaStatus {
    guard(|| match (inst.as_ref(), out.is_null()) {
        (Some(i), false) => {
            *out = i.inner.ncolors();
            IoaStatus::Ok
        }
        _ => fail(IoaStatus::NullPointer, "null handle or output"),
    })
}

/// Cyclotomic order N of the coefficient field.
///
/// # Safety
/// `inst` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_instance_order(inst: *const IoaInstance, out: *mut u32) -> IoaStatus {
    guard(|| match (inst.as_ref(), out.is_null()) {
        (Some(i), false) => {
            *out = i.inner.order;
            IoaStatus::Ok
        }
        _ => fail(IoaStatus::NullPointer, "null handle or output"),
    })
}

/// Instance in the textual file format; free with `ioa_string_free`.
///
/// # Safety
/// `inst` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_instance_save(inst: *const IoaInstance, out: *mut *mut c_char) -> IoaStatus {
    guard(|| match (inst.as_ref(), out.is_null()) {
        (Some(i), false) => put_string(out, save_instance(&i.inner)),
        _ => fail(IoaStatus::NullPointer, "null handle or output"),
    })
}

/// Braiding matrices derived from F and Omega, as text; free with `ioa_string_free`.
///
/// # Safety
/// `inst` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_derive_braiding(inst: *const IoaInstance, out: *mut *mut c_char) -> IoaStatus {
    guard(|| match (inst.as_ref(), out.is_null()) {
        (Some(i), false) => match braiding_text(&i.inner) {
            Ok(t) => put_string(out, t),
            Err(e) => fail(IoaStatus::Invalid, e),
        },
        _ => fail(IoaStatus::NullPointer, "null handle or output"),
    })
}

/// Runs suites. `suites` is a comma-separated list of suite names, or NULL for all;
/// `jobs` = 0 uses the default thread pool.
///
/// # Safety
/// `inst` must be a live handle; `suites` NUL-terminated or NULL; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_check(inst: *const IoaInstance, suites: *const c_char, window: i64, jobs: usize, out: *mut *mut IoaReport) -> IoaStatus {
    guard(|| {
        if out.is_null() {
            return fail(IoaStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(i) = inst.as_ref() else { return fail(IoaStatus::NullPointer, "null instance") };
        if window < 1 {
            return fail(IoaStatus::BadArgument, "window must be at least 1");
        }
        let mut cfg = RunConfig::all(window);
        if !suites.is_null() {
            let s = match str_arg(suites) {
                Ok(s) => s,
                Err(e) => return e,
            };
            let names: Vec<String> = s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
            if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
                return fail(IoaStatus::UnknownSuite, format!("unknown suite `{}`", bad));
            }
            cfg.suites = names;
        }
        cfg.jobs = (jobs > 0).then_some(jobs);
        match run_checks(&i.inner, "ffi", &cfg) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(IoaReport { inner: r }));
                IoaStatus::Ok
            }
            Err(e) => fail(IoaStatus::Internal, e),
        }
    })
}

/// # Safety
/// `rep` must come from `ioa_check` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ioa_report_free(rep: *mut IoaReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// 1 when no axiom failed, else 0.
///
/// # Safety
/// `rep` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_report_passed(rep: *const IoaReport, out: *mut i32) -> IoaStatus {
    guard(|| match (rep.as_ref(), out.is_null()) {
        (Some(r), false) => {
            *out = i32::from(r.inner.passed());
            IoaStatus::Ok
        }
        _ => fail(IoaStatus::NullPointer, "null handle or output"),
    })
}

/// Number of axiom results with the given status, over all suites.
///
/// # Safety
/// `rep` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_report_count(rep: *const IoaReport, status: IoaCheckStatus, out: *mut usize) -> IoaStatus {
    guard(|| match (rep.as_ref(), out.is_null()) {
        (Some(r), false) => {
            let s = match status {
                IoaCheckStatus::Pass => Status::Pass,
                IoaCheckStatus::Fail => Status::Fail,
                IoaCheckStatus::Skipped => Status::Skipped,
            };
            *out = r.inner.suites.iter().map(|x| x.count(s)).sum();
            IoaStatus::Ok
        }
        _ => fail(IoaStatus::NullPointer, "null handle or output"),
    })
}

/// Structured report; free with `ioa_string_free`.
///
/// # Safety
/// `rep` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_report_json(rep: *const IoaReport, out: *mut *mut c_char) -> IoaStatus {
    guard(|| match (rep.as_ref(), out.is_null()) {
        (Some(r), false) => put_string(out, r.inner.to_json()),
        _ => fail(IoaStatus::NullPointer, "null handle or output"),
    })
}

/// Human-readable report; free with `ioa_string_free`.
///
/// # Safety
/// `rep` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ioa_report_text(rep: *const IoaReport, out: *mut *mut c_char) -> IoaStatus {
    guard(|| match (rep.as_ref(), out.is_null()) {
        (Some(r), false) => put_string(out, r.inner.to_text()),
        _ => fail(IoaStatus::NullPointer, "null handle or output"),
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ioa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
