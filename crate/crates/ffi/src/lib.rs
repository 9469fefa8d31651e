//! C bindings for the engine: opaque handles, status codes, JSON results.
//!
//! Conventions, mirrored in the generated `include/empdb.h`:
//!
//! * Every fallible function returns an [`EmpdbStatus`]; `EMPDB_STATUS_OK`
//!   is zero. On failure, [`empdb_last_error`] holds a message that stays
//!   valid on the calling thread until the next failure there.
//! * Handles (`EmpdbProgram`, `EmpdbCompiled`) are opaque; release them
//!   with their `_free` function. Freeing null is a no-op.
//! * Strings returned through out-parameters are NUL-terminated UTF-8 owned
//!   by the caller; release them with [`empdb_string_free`]. Structured
//!   results (verdicts, query answers) come back as JSON documents.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use empdb::compiler::{compile, CompiledProgram};
use empdb::consistency::check_consistency;
use empdb::model::EmpiricalProgram;
use empdb::query::{answer, Query};
use empdb::render::{render_answer_json, render_check_json};
use empdb::syntax::{parse_artifact, parse_program, parse_query, render_artifact, render_program};
use empdb::{Error, Mode};

/// Result of every fallible call. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpdbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The text failed to parse; see `empdb_last_error`.
    ParseError = 3,
    /// The program parsed but breaks a structural rule.
    InvalidProgram = 4,
    /// Compilation outgrew its configured budget.
    CapExceeded = 5,
    /// A query's applicable clauses contradict each other.
    ConflictingEvidence = 6,
    /// Any other engine failure; see `empdb_last_error`.
    EngineError = 7,
    /// An internal invariant broke; the call had no effect.
    Panic = 8,
}

/// How a consistency check turns ground models into count bounds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpdbMode {
    /// One lower bound per predicate of each ground model.
    Paper = 0,
    /// One lower bound per full constant description; catches more.
    Strict = 1,
}

impl From<EmpdbMode> for Mode {
    fn from(mode: EmpdbMode) -> Mode {
        match mode {
            EmpdbMode::Paper => Mode::Paper,
            EmpdbMode::Strict => Mode::Strict,
        }
    }
}

/// A parsed program. Opaque.
pub struct EmpdbProgram(EmpiricalProgram);

/// A compiled program ready for queries. Opaque.
pub struct EmpdbCompiled(CompiledProgram);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let owned = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("unrepresentable error message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
}

fn fail(status: EmpdbStatus, message: &str) -> EmpdbStatus {
    set_last_error(message);
    status
}

fn fail_with(err: &Error) -> EmpdbStatus {
    let status = match err {
        Error::Parse { .. } => EmpdbStatus::ParseError,
        Error::Invalid(_) => EmpdbStatus::InvalidProgram,
        Error::CapExceeded(_) => EmpdbStatus::CapExceeded,
        Error::EmptyIntersection(_) => EmpdbStatus::ConflictingEvidence,
        _ => EmpdbStatus::EngineError,
    };
    fail(status, &err.to_string())
}

/// Read a required C string argument.
///
/// # Safety
/// `text` must be null or a NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, EmpdbStatus> {
    if text.is_null() {
        return Err(fail(EmpdbStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| fail(EmpdbStatus::InvalidUtf8, "input is not valid UTF-8"))
}

fn give_string(text: String, out: *mut *mut c_char) -> EmpdbStatus {
    match CString::new(text) {
        Ok(owned) => {
            unsafe { *out = owned.into_raw() };
            EmpdbStatus::Ok
        }
        Err(_) => fail(EmpdbStatus::EngineError, "result contains a NUL byte"),
    }
}

fn guarded(body: impl FnOnce() -> EmpdbStatus) -> EmpdbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(EmpdbStatus::Panic, "internal panic; the call had no effect"),
    }
}

/// The message of the last failure on this thread, or null if none.
/// Valid until the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn empdb_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |owned| owned.as_ptr())
    })
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `text` must have come from this library's out-parameters, unfreed.
#[no_mangle]
pub unsafe extern "C" fn empdb_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Parse program text into a handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn empdb_program_parse(
    text: *const c_char,
    out: *mut *mut EmpdbProgram,
) -> EmpdbStatus {
    guarded(|| {
        if out.is_null() {
            return fail(EmpdbStatus::NullArgument, "null out-parameter");
        }
        let text = match read_str(text) {
            Ok(text) => text,
            Err(status) => return status,
        };
        match parse_program(text) {
            Ok(program) => {
                *out = Box::into_raw(Box::new(EmpdbProgram(program)));
                EmpdbStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Release a program handle. Null is a no-op.
///
/// # Safety
/// `program` must have come from `empdb_program_parse`, unfreed.
#[no_mangle]
pub unsafe extern "C" fn empdb_program_free(program: *mut EmpdbProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Render a program back to its canonical text.
///
/// # Safety
/// `program` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn empdb_program_render(
    program: *const EmpdbProgram,
    out: *mut *mut c_char,
) -> EmpdbStatus {
    guarded(|| {
        if program.is_null() || out.is_null() {
            return fail(EmpdbStatus::NullArgument, "null argument");
        }
        give_string(render_program(&(*program).0), out)
    })
}

/// Decide consistency; the verdict arrives as a JSON document with keys
/// `kind`, `mode`, and (when consistent) `witness` and `model`.
///
/// # Safety
/// `program` must be a live handle; `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn empdb_check_json(
    program: *const EmpdbProgram,
    mode: EmpdbMode,
    out_json: *mut *mut c_char,
) -> EmpdbStatus {
    guarded(|| {
        if program.is_null() || out_json.is_null() {
            return fail(EmpdbStatus::NullArgument, "null argument");
        }
        let program = &(*program).0;
        match check_consistency(program, mode.into()) {
            Ok(report) => give_string(
                render_check_json(&report, &program.predicates).to_string(),
                out_json,
            ),
            Err(err) => fail_with(&err),
        }
    })
}

/// Chain the program's empirical clauses to a fixpoint.
///
/// # Safety
/// `program` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn empdb_compile(
    program: *const EmpdbProgram,
    out: *mut *mut EmpdbCompiled,
) -> EmpdbStatus {
    guarded(|| {
        if program.is_null() || out.is_null() {
            return fail(EmpdbStatus::NullArgument, "null argument");
        }
        match compile(&(*program).0) {
            Ok(compiled) => {
                *out = Box::into_raw(Box::new(EmpdbCompiled(compiled)));
                EmpdbStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Release a compiled handle. Null is a no-op.
///
/// # Safety
/// `compiled` must have come from this library, unfreed.
#[no_mangle]
pub unsafe extern "C" fn empdb_compiled_free(compiled: *mut EmpdbCompiled) {
    if !compiled.is_null() {
        drop(Box::from_raw(compiled));
    }
}

/// Serialize a compiled program to its text artifact.
///
/// # Safety
/// `compiled` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn empdb_compiled_serialize(
    compiled: *const EmpdbCompiled,
    out: *mut *mut c_char,
) -> EmpdbStatus {
    guarded(|| {
        if compiled.is_null() || out.is_null() {
            return fail(EmpdbStatus::NullArgument, "null argument");
        }
        give_string(render_artifact(&(*compiled).0), out)
    })
}

/// Load a compiled program from artifact text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn empdb_compiled_parse(
    text: *const c_char,
    out: *mut *mut EmpdbCompiled,
) -> EmpdbStatus {
    guarded(|| {
        if out.is_null() {
            return fail(EmpdbStatus::NullArgument, "null out-parameter");
        }
        let text = match read_str(text) {
            Ok(text) => text,
            Err(status) => return status,
        };
        match parse_artifact(text) {
            Ok(compiled) => {
                *out = Box::into_raw(Box::new(EmpdbCompiled(compiled)));
                EmpdbStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Answer a query like `"~White(clyde)"`; the answer arrives as a JSON
/// document with key `kind` and, for evidence-based answers, `results`
/// holding one `{cluster, lo, hi}` entry per reference class.
///
/// # Safety
/// `compiled` must be a live handle; `query` a NUL-terminated string;
/// `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn empdb_query_json(
    compiled: *const EmpdbCompiled,
    query: *const c_char,
    out_json: *mut *mut c_char,
) -> EmpdbStatus {
    guarded(|| {
        if compiled.is_null() || out_json.is_null() {
            return fail(EmpdbStatus::NullArgument, "null argument");
        }
        let query = match read_str(query) {
            Ok(query) => query,
            Err(status) => return status,
        };
        let compiled = &(*compiled).0;
        let preds = &compiled.source.predicates;
        let (property, subject) = match parse_query(query, preds) {
            Ok(parsed) => parsed,
            Err(err) => return fail_with(&err),
        };
        match answer(compiled, &Query { subject, property }) {
            Ok(ans) => give_string(render_answer_json(&ans, preds).to_string(), out_json),
            Err(err) => fail_with(&err),
        }
    })
}
