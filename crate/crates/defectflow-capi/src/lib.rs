//! C ABI for the dipole-removal library.
//!
//! Documents cross the boundary as UTF-8 JSON strings in the same schema
//! the command line uses; parsed documents live behind the opaque
//! [`DfDocument`] handle.  Every fallible call reports through a status
//! code plus a per-thread error message:
//!
//! ```c
//! DfDocument *doc = df_document_parse(json_text);
//! if (!doc) { fprintf(stderr, "%s\n", df_last_error()); return 1; }
//! DfDocument *clean = df_pipeline_run(doc, 1e-9);
//! char *out = df_document_to_json(clean);
//! ...
//! df_string_free(out);
//! df_document_free(clean);
//! df_document_free(doc);
//! ```
//!
//! Strings returned as `char *` are owned by the caller and must be
//! released with [`df_string_free`]; `const char *` returns stay owned by
//! the library.  Handles must be released with [`df_document_free`].  All
//! functions may be called from any thread; the error message is kept per
//! thread and stays valid until that thread's next call into the library.

use std::cell::RefCell;
use std::ffi::{CStr, CString};

use libc::c_char;

use defectflow::error::Error;
use defectflow::io;
use defectflow::lattice::{self, EnergyProfile};
use defectflow::removal::X0Rule;
use serde_json::Value;

/// An opaque parsed document (lattice, values, report, ... as fields).
pub struct DfDocument {
    value: Value,
}

/// Status of a call, mirroring the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DfStatus {
    /// The call succeeded.
    Ok = 0,
    /// A documented hypothesis or precondition refused the input.
    Refused = 2,
    /// Malformed input or an internal inconsistency.
    Invalid = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

fn store_error(e: &Error) -> DfStatus {
    let msg = CString::new(e.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
    match e.exit_code() {
        2 => DfStatus::Refused,
        _ => DfStatus::Invalid,
    }
}

fn store_message(msg: &str) -> DfStatus {
    store_error(&Error::InvalidInput(msg.into()))
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn df_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or NULL when the
/// last call succeeded.  The pointer stays valid until this thread's next
/// call into the library; do not free it.
#[no_mangle]
pub extern "C" fn df_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |msg| msg.as_ptr())
    })
}

/// Parse a JSON document.  Returns NULL on failure (see
/// [`df_last_error`]); release the handle with [`df_document_free`].
///
/// # Safety
///
/// `json` must point to a NUL-terminated string that remains valid for the
/// duration of the call.
#[no_mangle]
pub unsafe extern "C" fn df_document_parse(json: *const c_char) -> *mut DfDocument {
    clear_error();
    if json.is_null() {
        store_message("json must not be NULL");
        return std::ptr::null_mut();
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            store_message("json must be valid UTF-8");
            return std::ptr::null_mut();
        }
    };
    match serde_json::from_str::<Value>(text) {
        Ok(value) => Box::into_raw(Box::new(DfDocument { value })),
        Err(e) => {
            store_error(&Error::from(e));
            std::ptr::null_mut()
        }
    }
}

/// Serialize a document back to pretty-printed JSON.  Returns NULL on
/// failure; release the string with [`df_string_free`].
///
/// # Safety
///
/// `doc` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn df_document_to_json(doc: *const DfDocument) -> *mut c_char {
    clear_error();
    if doc.is_null() {
        store_message("doc must not be NULL");
        return std::ptr::null_mut();
    }
    let text = match serde_json::to_string_pretty(&(*doc).value) {
        Ok(t) => t,
        Err(e) => {
            store_error(&Error::from(e));
            return std::ptr::null_mut();
        }
    };
    match CString::new(text) {
        Ok(s) => s.into_raw(),
        Err(_) => {
            store_message("document contains an interior NUL");
            std::ptr::null_mut()
        }
    }
}

/// Release a document handle.  NULL is ignored.
///
/// # Safety
///
/// `doc` must be NULL or a handle from this library that has not already
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn df_document_free(doc: *mut DfDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Release a string returned by this library.  NULL is ignored.
///
/// # Safety
///
/// `s` must be NULL or a string returned by this library that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn df_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn run_pipeline(
    doc: *const DfDocument,
    tolerance: f64,
    rule: X0Rule,
) -> *mut DfDocument {
    clear_error();
    if doc.is_null() {
        store_message("doc must not be NULL");
        return std::ptr::null_mut();
    }
    match io::run_pipeline_document(&(*doc).value, tolerance, rule) {
        Ok((value, _, _)) => Box::into_raw(Box::new(DfDocument { value })),
        Err(e) => {
            store_error(&e);
            std::ptr::null_mut()
        }
    }
}

/// Run dipole removal on a document carrying a complex (or lattice) and
/// `"values"`.  Returns a new document with the rebuilt values and a
/// `"report"` field, or NULL on failure; a refused hypothesis leaves the
/// reason in [`df_last_error`].  Release the handle with
/// [`df_document_free`].
///
/// # Safety
///
/// `doc` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn df_pipeline_run(
    doc: *const DfDocument,
    tolerance: f64,
) -> *mut DfDocument {
    run_pipeline(doc, tolerance, X0Rule::LowestId)
}

/// Like [`df_pipeline_run`], but randomizes the placement of the kept
/// charge (winding ±1 only) with the given seed.
///
/// # Safety
///
/// `doc` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn df_pipeline_run_seeded(
    doc: *const DfDocument,
    tolerance: f64,
    seed: u64,
) -> *mut DfDocument {
    run_pipeline(doc, tolerance, X0Rule::Seeded(seed))
}

unsafe fn lattice_and_values(
    doc: *const DfDocument,
) -> Result<(lattice::LatticeDomain, defectflow::forms::VertexFunction), DfStatus> {
    if doc.is_null() {
        return Err(store_message("doc must not be NULL"));
    }
    let value = &(*doc).value;
    if !io::has_lattice(value) {
        return Err(store_message(
            "this call needs a lattice document (\"epsilon\" and \"cells\")",
        ));
    }
    let dom = io::lattice_from_value(value).map_err(|e| store_error(&e))?;
    let u = io::values_from_value(value).map_err(|e| store_error(&e))?;
    Ok((dom, u))
}

fn parse_profile(profile: *const c_char) -> Result<EnergyProfile, DfStatus> {
    if profile.is_null() {
        return Err(store_message("profile must not be NULL"));
    }
    let name = unsafe { CStr::from_ptr(profile) }
        .to_str()
        .map_err(|_| store_message("profile must be valid UTF-8"))?;
    match name {
        "sd" => Ok(EnergyProfile::sd()),
        "xy" => Ok(EnergyProfile::xy()),
        _ => Err(store_message(&format!(
            "unknown profile \"{name}\"; use \"sd\" or \"xy\""
        ))),
    }
}

/// Total bond energy of a lattice document under the named profile
/// (`"sd"` or `"xy"`), written to `*out`.
///
/// # Safety
///
/// `doc` must be a live handle from this library, `profile` a
/// NUL-terminated string, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn df_energy(
    doc: *const DfDocument,
    profile: *const c_char,
    out: *mut f64,
) -> DfStatus {
    clear_error();
    if out.is_null() {
        return store_message("out must not be NULL");
    }
    let p = match parse_profile(profile) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let (dom, u) = match lattice_and_values(doc) {
        Ok(pair) => pair,
        Err(status) => return status,
    };
    match lattice::energy(&u, &dom, &p) {
        Ok(e) => {
            *out = e;
            DfStatus::Ok
        }
        Err(e) => store_error(&e),
    }
}

/// Relax a lattice document's values by `sweeps` local sweeps under the
/// named profile, keeping the boundary fixed.  Returns a new document, or
/// NULL on failure.
///
/// # Safety
///
/// `doc` must be a live handle from this library and `profile` a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn df_relax(
    doc: *const DfDocument,
    profile: *const c_char,
    sweeps: u32,
) -> *mut DfDocument {
    clear_error();
    let p = match parse_profile(profile) {
        Ok(p) => p,
        Err(_) => return std::ptr::null_mut(),
    };
    let (dom, u) = match lattice_and_values(doc) {
        Ok(pair) => pair,
        Err(_) => return std::ptr::null_mut(),
    };
    match lattice::relax(&u, &dom, &p, sweeps as usize) {
        Ok(relaxed) => {
            let mut value = (*doc).value.clone();
            let obj = value.as_object_mut().unwrap();
            obj.insert("values".into(), io::values_to_value(&relaxed));
            obj.remove("report");
            Box::into_raw(Box::new(DfDocument { value }))
        }
        Err(e) => {
            store_error(&e);
            std::ptr::null_mut()
        }
    }
}

/// Count the charges of a lattice document's values: `*out_total` gets the
/// signed total, `*out_cells` the number of carrying cells.
///
/// # Safety
///
/// `doc` must be a live handle from this library; `out_total` and
/// `out_cells` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn df_total_charge(
    doc: *const DfDocument,
    out_total: *mut i64,
    out_cells: *mut usize,
) -> DfStatus {
    clear_error();
    if out_total.is_null() || out_cells.is_null() {
        return store_message("out_total and out_cells must not be NULL");
    }
    let (dom, u) = match lattice_and_values(doc) {
        Ok(pair) => pair,
        Err(status) => return status,
    };
    match lattice::vorticity(&u, &dom) {
        Ok(m) => {
            *out_total = m.total();
            *out_cells = m.support_len();
            DfStatus::Ok
        }
        Err(e) => store_error(&e),
    }
}
