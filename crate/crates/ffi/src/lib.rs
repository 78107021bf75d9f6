//! C ABI over the `mcmrep` engine.
//!
//! Problems are opaque handles. Every report comes back as a JSON string
//! owned by the caller and released with [`mcm_string_free`]. Functions
//! return an [`McmStatus`]; on failure the structured error JSON is
//! available from [`mcm_last_error`] until the next call on this thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mcmrep::cli;
use mcmrep::problem::{parse_problem, parse_problem_str, Problem};
use mcmrep::Error;

/// Result codes. `Input` and `Computation` mirror CLI exit codes 2 and 1.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McmStatus {
    Ok = 0,
    Computation = 1,
    Input = 2,
    NullArgument = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// Opaque parsed problem.
pub struct McmProblem {
    inner: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(json: String) {
    let c = CString::new(json).unwrap_or_else(|_| CString::new("{}").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: &Error) -> McmStatus {
    set_error(cli::error_json(e).to_string());
    if cli::exit_code(e) == 2 {
        McmStatus::Input
    } else {
        McmStatus::Computation
    }
}

fn simple_fail(status: McmStatus, kind: &str, message: &str) -> McmStatus {
    set_error(
        serde_json::json!({ "schema": "mcmrep.error/1", "kind": kind, "message": message })
            .to_string(),
    );
    status
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, McmStatus> {
    if p.is_null() {
        return Err(simple_fail(
            McmStatus::NullArgument,
            "null_argument",
            "null pointer argument",
        ));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        simple_fail(
            McmStatus::InvalidUtf8,
            "invalid_utf8",
            "argument is not UTF-8",
        )
    })
}

fn guard(f: impl FnOnce() -> McmStatus) -> McmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => simple_fail(McmStatus::Panic, "panic", "internal panic"),
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> McmStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            McmStatus::Ok
        }
        Err(_) => simple_fail(
            McmStatus::Computation,
            "computation",
            "report contains a NUL byte",
        ),
    }
}

unsafe fn report(
    problem: *const McmProblem,
    out: *mut *mut c_char,
    f: impl FnOnce(&Problem) -> Result<cli::Outcome, Error>,
) -> McmStatus {
    if problem.is_null() || out.is_null() {
        return simple_fail(
            McmStatus::NullArgument,
            "null_argument",
            "null pointer argument",
        );
    }
    *out = ptr::null_mut();
    match f(&(*problem).inner) {
        Ok(o) => put_string(out, o.report.to_string()),
        Err(e) => fail(&e),
    }
}

unsafe fn install(out: *mut *mut McmProblem, r: Result<Problem, Error>) -> McmStatus {
    match r {
        Ok(p) => {
            *out = Box::into_raw(Box::new(McmProblem { inner: p }));
            McmStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mcm_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}

/// Structured error JSON for the last failed call on this thread, or NULL.
/// The pointer stays valid until the next call into the library.
#[no_mangle]
pub extern "C" fn mcm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a problem from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mcm_problem_from_str(
    toml: *const c_char,
    out: *mut *mut McmProblem,
) -> McmStatus {
    guard(|| {
        if out.is_null() {
            return simple_fail(
                McmStatus::NullArgument,
                "null_argument",
                "null pointer argument",
            );
        }
        *out = ptr::null_mut();
        match str_arg(toml) {
            Ok(s) => install(out, parse_problem_str(s)),
            Err(st) => st,
        }
    })
}

/// Parses a problem file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mcm_problem_from_file(
    path: *const c_char,
    out: *mut *mut McmProblem,
) -> McmStatus {
    guard(|| {
        if out.is_null() {
            return simple_fail(
                McmStatus::NullArgument,
                "null_argument",
                "null pointer argument",
            );
        }
        *out = ptr::null_mut();
        match str_arg(path) {
            Ok(s) => install(out, parse_problem(std::path::Path::new(s))),
            Err(st) => st,
        }
    })
}

/// Releases a problem handle. NULL is ignored.
///
/// # Safety
/// `problem` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mcm_problem_free(problem: *mut McmProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mcm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of named modules in the problem, or 0 for NULL.
///
/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcm_problem_module_count(problem: *const McmProblem) -> usize {
    if problem.is_null() {
        0
    } else {
        (*problem).inner.modules.len()
    }
}

/// Equation system report (`mcmrep.equations/1`).
///
/// # Safety
/// Pointers must be valid; `framing` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mcm_equations_json(
    problem: *const McmProblem,
    framing: *const c_char,
    out: *mut *mut c_char,
) -> McmStatus {
    guard(|| match str_arg(framing) {
        Ok(fr) => report(problem, out, |p| cli::equations(p, fr)),
        Err(s) => s,
    })
}

/// Tangent report (`mcmrep.tangent/1`).
///
/// # Safety
/// Pointers must be valid; `module` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mcm_tangent_json(
    problem: *const McmProblem,
    module: *const c_char,
    crosscheck: bool,
    out: *mut *mut c_char,
) -> McmStatus {
    guard(|| match str_arg(module) {
        Ok(m) => report(problem, out, |p| cli::tangent(p, m, crosscheck)),
        Err(s) => s,
    })
}

/// Ext¹ window report (`mcmrep.ext/1`) over internal degrees `lo..=hi`.
///
/// # Safety
/// Pointers must be valid; names NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mcm_ext1_json(
    problem: *const McmProblem,
    source: *const c_char,
    target: *const c_char,
    lo: i64,
    hi: i64,
    out: *mut *mut c_char,
) -> McmStatus {
    guard(|| {
        let (s, t) = match (str_arg(source), str_arg(target)) {
            (Ok(s), Ok(t)) => (s, t),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        if lo > hi {
            return fail(&Error::Input(format!("empty window {lo}:{hi}")));
        }
        report(problem, out, |p| cli::ext(p, s, t, Some((lo, hi))))
    })
}

/// Module statistics report (`mcmrep.stats/1`).
///
/// # Safety
/// Pointers must be valid; `module` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mcm_stats_json(
    problem: *const McmProblem,
    module: *const c_char,
    out: *mut *mut c_char,
) -> McmStatus {
    guard(|| match str_arg(module) {
        Ok(m) => report(problem, out, |p| cli::stats(p, m)),
        Err(s) => s,
    })
}

/// Gap splitting report (`mcmrep.split/1`).
///
/// # Safety
/// Pointers must be valid; `module` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mcm_split_json(
    problem: *const McmProblem,
    module: *const c_char,
    out: *mut *mut c_char,
) -> McmStatus {
    guard(|| match str_arg(module) {
        Ok(m) => report(problem, out, |p| cli::split(p, m)),
        Err(s) => s,
    })
}

/// Rigid class report (`mcmrep.classify/1`).
///
/// # Safety
/// Pointers must be valid; `framing` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mcm_classify_json(
    problem: *const McmProblem,
    framing: *const c_char,
    samples: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> McmStatus {
    guard(|| match str_arg(framing) {
        Ok(fr) => report(problem, out, |p| cli::classify(p, fr, samples, seed)),
        Err(s) => s,
    })
}

/// Writes the catalog of a curve singularity as problem-file TOML.
///
/// # Safety
/// `name` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mcm_ade_problem_toml(
    name: *const c_char,
    n: u32,
    p: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> McmStatus {
    guard(|| {
        if out.is_null() {
            return simple_fail(
                McmStatus::NullArgument,
                "null_argument",
                "null pointer argument",
            );
        }
        *out = ptr::null_mut();
        let nm = match str_arg(name) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match cli::ade(nm, n, p, seed) {
            Ok((text, _)) => put_string(out, text),
            Err(e) => fail(&e),
        }
    })
}
