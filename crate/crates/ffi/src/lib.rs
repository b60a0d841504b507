//! C ABI over the compliance engine.
//!
//! A `DaontSession` is an opaque handle created by `daont_session_new` and
//! released by `daont_session_free`. Every fallible call returns a
//! `DaontStatus`; on failure, `daont_last_error_message` describes the error
//! for the calling thread. Strings returned through out-parameters are owned
//! by the caller and must be released with `daont_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use daont_core::corpus;
use daont_core::engine::{EditMode, EngineError};
use daont_core::rules::{render_report, ReportFormat};
use daont_core::Session;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DaontStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnknownGraph = 4,
    UnknownRule = 5,
    UnknownFixture = 6,
    UnsupportedQuery = 7,
    EvalError = 8,
    Panic = 9,
}

/// Opaque session handle.
pub struct DaontSession {
    inner: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(DaontStatus, String);

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let status = match &e {
            EngineError::UnknownGraph(_) | EngineError::UnknownVersion(..) => DaontStatus::UnknownGraph,
            EngineError::UnknownRule(_) => DaontStatus::UnknownRule,
            EngineError::Parse { .. } => DaontStatus::ParseError,
            EngineError::Query(d) if d.unsupported_construct().is_some() => DaontStatus::UnsupportedQuery,
            EngineError::Query(_) => DaontStatus::ParseError,
            EngineError::Eval(_) => DaontStatus::EvalError,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DaontStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DaontStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DaontStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(DaontStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(DaontStatus::InvalidUtf8, format!("`{name}`: {e}")))
}

unsafe fn session_arg<'a>(p: *const DaontSession) -> Result<&'a Session, Failure> {
    p.as_ref()
        .map(|s| &s.inner)
        .ok_or_else(|| Failure(DaontStatus::NullArgument, "`session` is null".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) {
    if !out.is_null() {
        *out = value;
    }
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(DaontStatus::NullArgument, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|e| Failure(DaontStatus::EvalError, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Creates a session with the built-in rule catalogue.
#[no_mangle]
pub extern "C" fn daont_session_new() -> *mut DaontSession {
    catch_unwind(|| Box::into_raw(Box::new(DaontSession { inner: Session::new() }))).unwrap_or(ptr::null_mut())
}

/// # Safety
/// `session` must come from `daont_session_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn daont_session_free(session: *mut DaontSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Registers schema plus `turtle` under `graph_id`. `version_out` may be null.
///
/// # Safety
/// Pointers must be valid; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn daont_load_turtle(
    session: *const DaontSession,
    graph_id: *const c_char,
    turtle: *const c_char,
    version_out: *mut u64,
) -> DaontStatus {
    guard(|| {
        let s = session_arg(session)?;
        let id = str_arg(graph_id, "graph_id")?;
        let text = str_arg(turtle, "turtle")?;
        let v = s.load_contracts(id, &[text])?;
        write_out(version_out, v);
        Ok(())
    })
}

/// Registers a built-in fixture under its own name.
///
/// # Safety
/// Pointers must be valid; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn daont_load_fixture(
    session: *const DaontSession,
    name: *const c_char,
    version_out: *mut u64,
) -> DaontStatus {
    guard(|| {
        let s = session_arg(session)?;
        let name = str_arg(name, "name")?;
        let source = corpus::fixture_source(name).map_err(|e| Failure(DaontStatus::UnknownFixture, e.to_string()))?;
        let v = s.load_contracts(name, &[source])?;
        write_out(version_out, v);
        Ok(())
    })
}

/// Runs a check and writes the JSON report to `json_out`. `rules_csv` may be
/// null to run every rule.
///
/// # Safety
/// Pointers must be valid; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn daont_check(
    session: *const DaontSession,
    graph_id: *const c_char,
    rules_csv: *const c_char,
    infer: bool,
    json_out: *mut *mut c_char,
) -> DaontStatus {
    guard(|| {
        let s = session_arg(session)?;
        let id = str_arg(graph_id, "graph_id")?;
        let rules: Option<Vec<String>> = if rules_csv.is_null() {
            None
        } else {
            let csv = str_arg(rules_csv, "rules_csv")?;
            Some(csv.split(',').map(str::trim).filter(|r| !r.is_empty()).map(String::from).collect())
        };
        let report = s.run_check(id, rules.as_deref(), infer)?;
        write_string(json_out, render_report(&report, ReportFormat::Json))
    })
}

/// Evaluates `query` and writes the solutions as a JSON array.
///
/// # Safety
/// Pointers must be valid; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn daont_query(
    session: *const DaontSession,
    graph_id: *const c_char,
    query: *const c_char,
    json_out: *mut *mut c_char,
) -> DaontStatus {
    guard(|| {
        let s = session_arg(session)?;
        let id = str_arg(graph_id, "graph_id")?;
        let text = str_arg(query, "query")?;
        let solutions = s.query(id, text)?;
        let json = serde_json::to_string(&solutions).map_err(|e| Failure(DaontStatus::EvalError, e.to_string()))?;
        write_string(json_out, json)
    })
}

/// Adds (or, when `remove` is true, removes) the triples of a Turtle
/// fragment. The graph's prefixes are in scope.
///
/// # Safety
/// Pointers must be valid; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn daont_apply_facts(
    session: *const DaontSession,
    graph_id: *const c_char,
    turtle: *const c_char,
    remove: bool,
    version_out: *mut u64,
) -> DaontStatus {
    guard(|| {
        let s = session_arg(session)?;
        let id = str_arg(graph_id, "graph_id")?;
        let text = str_arg(turtle, "turtle")?;
        let mode = if remove { EditMode::Remove } else { EditMode::Add };
        let v = s.apply_fragment(id, text, mode)?;
        write_out(version_out, v);
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn daont_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn daont_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn daont_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
