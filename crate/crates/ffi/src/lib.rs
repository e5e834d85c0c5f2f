//! C ABI over the famalg workspace runner.
//!
//! A workspace is loaded from JSON into an opaque handle, commands run against it,
//! and reports come back as JSON strings owned by the library.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use famalg::commands::{run_commands, run_workspace, CommandRequest, RunReport};
use famalg::workspace::Workspace;

/// Opaque workspace handle.
pub struct FamWorkspace {
    inner: Workspace,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamStatus {
    Ok = 0,
    /// The report was produced but at least one verdict failed.
    VerdictFailed = 1,
    /// Malformed JSON, unknown object, missing argument.
    Usage = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> FamStatus) -> FamStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {msg}"));
            FamStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FamStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(FamStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|e| {
        set_error(format!("invalid UTF-8: {e}"));
        FamStatus::InvalidUtf8
    })
}

unsafe fn emit(report: famalg::Result<RunReport>, out: *mut *mut c_char) -> FamStatus {
    match report {
        Ok(r) => {
            let status = if r.passed { FamStatus::Ok } else { FamStatus::VerdictFailed };
            match CString::new(r.to_json()) {
                Ok(s) => {
                    *out = s.into_raw();
                    status
                }
                Err(e) => {
                    set_error(e.to_string());
                    FamStatus::InvalidUtf8
                }
            }
        }
        Err(e) => {
            set_error(e.to_string());
            FamStatus::Usage
        }
    }
}

/// Parses a workspace from a JSON document. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fam_workspace_from_json(json: *const c_char, out: *mut *mut FamWorkspace) -> FamStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return FamStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Workspace::from_json_str(text) {
            Ok(ws) => {
                *out = Box::into_raw(Box::new(FamWorkspace { inner: ws }));
                FamStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                FamStatus::Usage
            }
        }
    })
}

/// Loads a workspace from a file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fam_workspace_from_path(path: *const c_char, out: *mut *mut FamWorkspace) -> FamStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return FamStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let path = match read_str(path) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Workspace::from_path(path) {
            Ok(ws) => {
                *out = Box::into_raw(Box::new(FamWorkspace { inner: ws }));
                FamStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                FamStatus::Usage
            }
        }
    })
}

/// Number of named objects in the workspace, or 0 for a null handle.
///
/// # Safety
/// `ws` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fam_workspace_object_count(ws: *const FamWorkspace) -> usize {
    ws.as_ref().map_or(0, |w| w.inner.objects().len())
}

/// Runs the commands listed in the workspace file. `*report` receives the report JSON
/// for `FAM_STATUS_OK` and `FAM_STATUS_VERDICT_FAILED`, otherwise NULL.
///
/// # Safety
/// `ws` must be a handle from this library and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fam_workspace_run(ws: *mut FamWorkspace, report: *mut *mut c_char) -> FamStatus {
    guard(|| {
        if ws.is_null() || report.is_null() {
            set_error("null pointer argument");
            return FamStatus::NullPointer;
        }
        *report = ptr::null_mut();
        emit(run_workspace(&mut (*ws).inner), report)
    })
}

/// Runs one command, given as a JSON object such as
/// `{"cmd": "validate", "object": "R"}`, or an array of them.
/// Constructed objects stay in the workspace.
///
/// # Safety
/// `ws` must be a handle from this library, `command` a NUL-terminated string and
/// `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fam_workspace_run_command(
    ws: *mut FamWorkspace,
    command: *const c_char,
    report: *mut *mut c_char,
) -> FamStatus {
    guard(|| {
        if ws.is_null() || report.is_null() {
            set_error("null pointer argument");
            return FamStatus::NullPointer;
        }
        *report = ptr::null_mut();
        let text = match read_str(command) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let reqs: Vec<CommandRequest> = match serde_json::from_str::<serde_json::Value>(text) {
            Ok(serde_json::Value::Array(items)) => match items.into_iter().map(serde_json::from_value).collect() {
                Ok(r) => r,
                Err(e) => {
                    set_error(format!("command: {e}"));
                    return FamStatus::Usage;
                }
            },
            Ok(v) => match serde_json::from_value(v) {
                Ok(r) => vec![r],
                Err(e) => {
                    set_error(format!("command: {e}"));
                    return FamStatus::Usage;
                }
            },
            Err(e) => {
                set_error(format!("command: {e}"));
                return FamStatus::Usage;
            }
        };
        emit(run_commands(&mut (*ws).inner, &reqs), report)
    })
}

/// Message for the last failing call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn fam_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn fam_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Frees a workspace handle. NULL is ignored.
///
/// # Safety
/// `ws` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn fam_workspace_free(ws: *mut FamWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fam_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
