//! C ABI over the trustspectra library.
//!
//! All functions return a `ts_status` code; results come back through out
//! pointers holding opaque handles or malloc-free C strings. The last error
//! message is kept per thread and read with [`ts_last_error_message`].

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::ptr;

use trustspectra::concepts::decompose_edge;
use trustspectra::model::{
    extract_block, greedy_complete_block, ingest_scores, InputFormat, ScoreTable,
};
use trustspectra::recommend::rank_trustees;
use trustspectra::spectral::{svd, SpectralDecomposition, SvdMethod};
use trustspectra::Error;

/// Result code of every API call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ts_status {
    /// Success.
    TS_OK = 0,
    /// Malformed or inconsistent input data.
    TS_ERR_DATA = 2,
    /// Iteration cap exceeded without convergence.
    TS_ERR_CONVERGENCE = 3,
    /// Invalid argument (bad enum value, non-UTF-8 string, ...).
    TS_ERR_INVALID = 4,
    /// A required pointer was null.
    TS_ERR_NULL = 5,
}

/// Input format selector for the parse/load calls.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ts_format {
    /// Header row of trustor ids, one row per trustee; empty cells missing.
    TS_FORMAT_WIDE_CSV = 0,
    /// `trustor,trustee,rating` triples.
    TS_FORMAT_LONG_CSV = 1,
    /// JSON document with `subjects`, `objects`, and `cells`.
    TS_FORMAT_JSON = 2,
}

/// Decomposition method selector.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ts_method {
    TS_METHOD_GOLUB_KAHAN = 0,
    TS_METHOD_JACOBI = 1,
}

/// Opaque parsed score table.
pub struct ts_table(ScoreTable);

/// Opaque spectral decomposition of a complete block.
pub struct ts_decomposition(SpectralDecomposition);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(err: &Error) -> ts_status {
    match err.exit_code() {
        3 => ts_status::TS_ERR_CONVERGENCE,
        _ => ts_status::TS_ERR_DATA,
    }
}

fn fail(err: Error) -> ts_status {
    set_error(&err.to_string());
    status_of(&err)
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string or null.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, ts_status> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(ts_status::TS_ERR_NULL);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        ts_status::TS_ERR_INVALID
    })
}

/// # Safety
/// `ptrs` must point to `len` valid strings, or be null with `len == 0`.
unsafe fn read_str_array(
    ptrs: *const *const c_char,
    len: usize,
) -> Result<Option<Vec<String>>, ts_status> {
    if ptrs.is_null() {
        return if len == 0 {
            Ok(None)
        } else {
            set_error("null id array with nonzero length");
            Err(ts_status::TS_ERR_NULL)
        };
    }
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        out.push(read_str(*ptrs.add(i))?.to_string());
    }
    Ok(Some(out))
}

fn to_format(format: ts_format) -> InputFormat {
    match format {
        ts_format::TS_FORMAT_WIDE_CSV => InputFormat::WideCsv,
        ts_format::TS_FORMAT_LONG_CSV => InputFormat::LongCsv,
        ts_format::TS_FORMAT_JSON => InputFormat::Json,
    }
}

fn give_table(table: ScoreTable, out: *mut *mut ts_table) -> ts_status {
    unsafe { *out = Box::into_raw(Box::new(ts_table(table))) };
    ts_status::TS_OK
}

fn give_string(s: String, out: *mut *mut c_char) -> ts_status {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            ts_status::TS_OK
        }
        Err(_) => {
            set_error("result contained an interior NUL byte");
            ts_status::TS_ERR_INVALID
        }
    }
}

/// Parses a score table from an in-memory document.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_table_parse(
    text: *const c_char,
    format: ts_format,
    out: *mut *mut ts_table,
) -> ts_status {
    if out.is_null() {
        set_error("null out pointer");
        return ts_status::TS_ERR_NULL;
    }
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match ingest_scores(text.as_bytes(), to_format(format)) {
        Ok(t) => give_table(t, out),
        Err(e) => fail(e),
    }
}

/// Parses a score table from a file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_table_load(
    path: *const c_char,
    format: ts_format,
    out: *mut *mut ts_table,
) -> ts_status {
    if out.is_null() {
        set_error("null out pointer");
        return ts_status::TS_ERR_NULL;
    }
    let path = match read_str(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) => return fail(Error::Io(e)),
    };
    match ingest_scores(file, to_format(format)) {
        Ok(t) => give_table(t, out),
        Err(e) => fail(e),
    }
}

/// Frees a table handle. Null is ignored.
///
/// # Safety
/// `table` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ts_table_free(table: *mut ts_table) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Decomposes a complete block of the table. Passing null `rows`/`cols`
/// (with zero lengths) selects the largest complete block greedily.
///
/// # Safety
/// Pointer arguments must satisfy the conventions above.
#[no_mangle]
pub unsafe extern "C" fn ts_decompose(
    table: *const ts_table,
    rows: *const *const c_char,
    n_rows: usize,
    cols: *const *const c_char,
    n_cols: usize,
    tol: f64,
    method: ts_method,
    out: *mut *mut ts_decomposition,
) -> ts_status {
    if table.is_null() || out.is_null() {
        set_error("null handle or out pointer");
        return ts_status::TS_ERR_NULL;
    }
    let table = &(*table).0;
    let rows = match read_str_array(rows, n_rows) {
        Ok(r) => r,
        Err(s) => return s,
    };
    let cols = match read_str_array(cols, n_cols) {
        Ok(c) => c,
        Err(s) => return s,
    };
    let block = match (rows, cols) {
        (Some(r), Some(c)) => extract_block(table, &r, &c),
        (None, None) => {
            greedy_complete_block(table).and_then(|(r, c)| extract_block(table, &r, &c))
        }
        _ => {
            set_error("rows and cols must be given together");
            return ts_status::TS_ERR_INVALID;
        }
    };
    let block = match block {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    let method = match method {
        ts_method::TS_METHOD_GOLUB_KAHAN => SvdMethod::GolubKahan,
        ts_method::TS_METHOD_JACOBI => SvdMethod::Jacobi,
    };
    match svd(&block, tol, method) {
        Ok(d) => {
            *out = Box::into_raw(Box::new(ts_decomposition(d)));
            ts_status::TS_OK
        }
        Err(e) => fail(e),
    }
}

/// Frees a decomposition handle. Null is ignored.
///
/// # Safety
/// `d` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ts_decomposition_free(d: *mut ts_decomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of retained concepts; 0 for a null handle.
///
/// # Safety
/// `d` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_rank(d: *const ts_decomposition) -> usize {
    if d.is_null() {
        0
    } else {
        (*d).0.rank()
    }
}

/// Copies the singular weights into `out` (capacity `cap`).
///
/// # Safety
/// `out` must point to at least `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ts_lambdas(
    d: *const ts_decomposition,
    out: *mut f64,
    cap: usize,
) -> ts_status {
    if d.is_null() || out.is_null() {
        set_error("null handle or out pointer");
        return ts_status::TS_ERR_NULL;
    }
    let lambdas = (*d).0.lambdas();
    if cap < lambdas.len() {
        set_error("output buffer too small for rank");
        return ts_status::TS_ERR_INVALID;
    }
    ptr::copy_nonoverlapping(lambdas.as_ptr(), out, lambdas.len());
    ts_status::TS_OK
}

/// Serializes the decomposition to JSON. Free with [`ts_string_free`].
///
/// # Safety
/// `d` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_to_json(
    d: *const ts_decomposition,
    out: *mut *mut c_char,
) -> ts_status {
    if d.is_null() || out.is_null() {
        set_error("null handle or out pointer");
        return ts_status::TS_ERR_NULL;
    }
    give_string((*d).0.to_json(), out)
}

/// Per-concept contributions of one rating, as JSON. Free with
/// [`ts_string_free`].
///
/// # Safety
/// Pointer arguments must satisfy the conventions above.
#[no_mangle]
pub unsafe extern "C" fn ts_edge_json(
    d: *const ts_decomposition,
    subject: *const c_char,
    object: *const c_char,
    out: *mut *mut c_char,
) -> ts_status {
    if d.is_null() || out.is_null() {
        set_error("null handle or out pointer");
        return ts_status::TS_ERR_NULL;
    }
    let subject = match read_str(subject) {
        Ok(s) => s,
        Err(s) => return s,
    };
    let object = match read_str(object) {
        Ok(o) => o,
        Err(s) => return s,
    };
    match decompose_edge(&(*d).0, subject, object) {
        Ok(edge) => give_string(serde_json::to_string(&edge).unwrap(), out),
        Err(e) => fail(e),
    }
}

/// Trustee ranking for a subject under a 1-based concept, as JSON. Free
/// with [`ts_string_free`].
///
/// # Safety
/// Pointer arguments must satisfy the conventions above.
#[no_mangle]
pub unsafe extern "C" fn ts_recommend_json(
    d: *const ts_decomposition,
    subject: *const c_char,
    concept: usize,
    out: *mut *mut c_char,
) -> ts_status {
    if d.is_null() || out.is_null() {
        set_error("null handle or out pointer");
        return ts_status::TS_ERR_NULL;
    }
    let subject = match read_str(subject) {
        Ok(s) => s,
        Err(s) => return s,
    };
    match rank_trustees(&(*d).0, subject, concept) {
        Ok(rec) => give_string(serde_json::to_string(&rec).unwrap(), out),
        Err(e) => fail(e),
    }
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the most recent error on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
