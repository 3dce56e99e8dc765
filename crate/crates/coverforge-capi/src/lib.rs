//! C ABI for the coverforge library: opaque tower handles, status codes,
//! and string outputs allocated by Rust.
//!
//! Ownership rules: every `CfTower` returned through an out-parameter must
//! be released with [`cf_tower_free`], and every `char*` with
//! [`cf_string_free`]. Failure details are available per thread through
//! [`cf_last_error_message`] until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use coverforge::analysis::{self, VerdictStatus};
use coverforge::digraph::ArrowId;
use coverforge::dynamics::{itinerary, Thread};
use coverforge::format;
use coverforge::generate::{odometer_cover, ostrowski_cover, ContinuedFraction};
use coverforge::tower::{validate_tower, CoverTower};
use coverforge::translate;

/// Opaque handle to a cover tower.
pub struct CfTower(CoverTower);

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CfStatus {
    /// Success; for verdict-producing calls, the property is verified.
    CfOk = 0,
    /// Input text failed to parse.
    CfParseError = 1,
    /// The object violates its invariants, or the verdict is refuted.
    CfInvalid = 2,
    /// The truncation is too shallow to decide.
    CfUndecided = 3,
    /// A null pointer or out-of-range argument.
    CfBadArgument = 4,
    /// Any other failure; see cf_last_error_message.
    CfError = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: impl Into<String>) {
    let text = CString::new(message.into()).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn cf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

fn string_out(text: String, out: *mut *mut c_char) -> CfStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CfStatus::CfBadArgument;
    }
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            CfStatus::CfOk
        }
        Err(_) => {
            set_error("output contained an interior NUL byte");
            CfStatus::CfError
        }
    }
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a `cf_*` call and not freed before.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Frees a tower handle.
///
/// # Safety
/// `t` must have been returned by a `cf_tower_*` constructor and not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_free(t: *mut CfTower) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

unsafe fn tower_ref<'a>(t: *const CfTower) -> Option<&'a CoverTower> {
    t.as_ref().map(|h| &h.0)
}

/// Parses a tower document.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_parse(text: *const c_char, out: *mut *mut CfTower) -> CfStatus {
    if text.is_null() || out.is_null() {
        set_error("null argument");
        return CfStatus::CfBadArgument;
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        set_error("input is not valid UTF-8");
        return CfStatus::CfParseError;
    };
    match format::parse_tower(text) {
        Ok(t) => {
            *out = Box::into_raw(Box::new(CfTower(t)));
            CfStatus::CfOk
        }
        Err(e) => {
            set_error(e.to_string());
            *out = ptr::null_mut();
            CfStatus::CfParseError
        }
    }
}

/// Builds the two-loop weighted cover of a continued fraction.
///
/// # Safety
/// `quotients` must point to `len` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_ostrowski(
    quotients: *const u64,
    len: usize,
    depth: usize,
    out: *mut *mut CfTower,
) -> CfStatus {
    if quotients.is_null() || out.is_null() || len == 0 {
        set_error("null or empty argument");
        return CfStatus::CfBadArgument;
    }
    let slice = std::slice::from_raw_parts(quotients, len);
    let cf = match ContinuedFraction::new(slice.to_vec()) {
        Ok(cf) => cf,
        Err(e) => {
            set_error(e.to_string());
            return CfStatus::CfBadArgument;
        }
    };
    if depth > cf.len() {
        set_error("depth exceeds the number of partial quotients");
        return CfStatus::CfBadArgument;
    }
    *out = Box::into_raw(Box::new(CfTower(ostrowski_cover(&cf, depth))));
    CfStatus::CfOk
}

/// Builds the single-loop tower wrapping `wraps[n]` times at level `n + 1`.
///
/// # Safety
/// `wraps` must point to `len` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_odometer(
    wraps: *const u64,
    len: usize,
    depth: usize,
    out: *mut *mut CfTower,
) -> CfStatus {
    if wraps.is_null() || out.is_null() || len == 0 {
        set_error("null or empty argument");
        return CfStatus::CfBadArgument;
    }
    let slice = std::slice::from_raw_parts(wraps, len);
    if depth > len || slice.iter().any(|&q| q < 2) {
        set_error("wraps must all be >= 2 and cover the requested depth");
        return CfStatus::CfBadArgument;
    }
    *out = Box::into_raw(Box::new(CfTower(odometer_cover(slice, depth))));
    CfStatus::CfOk
}

/// Number of levels above the base.
///
/// # Safety
/// `t` must be a live tower handle.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_depth(t: *const CfTower) -> usize {
    tower_ref(t).map_or(0, |t| t.depth())
}

/// Checks the cover axioms; `CfOk` for a legal tower.
///
/// # Safety
/// `t` must be a live tower handle.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_validate(t: *const CfTower) -> CfStatus {
    let Some(t) = tower_ref(t) else {
        set_error("null tower");
        return CfStatus::CfBadArgument;
    };
    let report = validate_tower(t);
    if report.is_legal() {
        CfStatus::CfOk
    } else {
        set_error(report.to_string());
        CfStatus::CfInvalid
    }
}

/// Prints the canonical tower document.
///
/// # Safety
/// `t` must be a live tower handle; `out` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_print(t: *const CfTower, out: *mut *mut c_char) -> CfStatus {
    let Some(t) = tower_ref(t) else {
        set_error("null tower");
        return CfStatus::CfBadArgument;
    };
    string_out(format::print_tower(t), out)
}

/// Emits graph-description text for `level`, or all levels when `level < 0`.
///
/// # Safety
/// `t` must be a live tower handle; `out` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_to_dot(
    t: *const CfTower,
    level: c_int,
    out: *mut *mut c_char,
) -> CfStatus {
    let Some(t) = tower_ref(t) else {
        set_error("null tower");
        return CfStatus::CfBadArgument;
    };
    let level = if level < 0 {
        None
    } else if (level as usize) <= t.depth() {
        Some(level as usize)
    } else {
        set_error("level out of range");
        return CfStatus::CfBadArgument;
    };
    string_out(coverforge::dot::tower_to_dot(t, level), out)
}

/// Writes the weight vector of one level into `buf` and reports the count.
///
/// # Safety
/// `buf` must hold `buf_len` writable values; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_weights(
    t: *const CfTower,
    level: usize,
    buf: *mut u64,
    buf_len: usize,
    written: *mut usize,
) -> CfStatus {
    let Some(t) = tower_ref(t) else {
        set_error("null tower");
        return CfStatus::CfBadArgument;
    };
    if buf.is_null() || written.is_null() {
        set_error("null output buffer");
        return CfStatus::CfBadArgument;
    }
    match t.weights_vector(level) {
        Ok(w) => {
            if w.len() > buf_len {
                set_error("buffer too small");
                return CfStatus::CfBadArgument;
            }
            let out = std::slice::from_raw_parts_mut(buf, w.len());
            out.copy_from_slice(&w);
            *written = w.len();
            CfStatus::CfOk
        }
        Err(e) => {
            set_error(e.to_string());
            CfStatus::CfError
        }
    }
}

fn verdict_status(v: &VerdictStatus) -> CfStatus {
    match v {
        VerdictStatus::Verified { .. } => CfStatus::CfOk,
        VerdictStatus::Refuted => CfStatus::CfInvalid,
        VerdictStatus::NotDecidedUpTo { .. } => CfStatus::CfUndecided,
    }
}

/// Chain transitivity of the truncation.
///
/// # Safety
/// `t` must be a live tower handle.
#[no_mangle]
pub unsafe extern "C" fn cf_analyze_chain_transitive(t: *const CfTower) -> CfStatus {
    let Some(t) = tower_ref(t) else {
        set_error("null tower");
        return CfStatus::CfBadArgument;
    };
    let v = analysis::check_chain_transitive(t);
    set_error(v.details.clone());
    verdict_status(&v.status)
}

/// Minimality at `level`; on `CfOk` the witness level is stored.
///
/// # Safety
/// `t` must be a live tower handle; `witness` may be null.
#[no_mangle]
pub unsafe extern "C" fn cf_analyze_minimal(
    t: *const CfTower,
    level: usize,
    cycle_budget: usize,
    witness: *mut usize,
) -> CfStatus {
    let Some(t) = tower_ref(t) else {
        set_error("null tower");
        return CfStatus::CfBadArgument;
    };
    if level >= t.depth() {
        set_error("level out of range");
        return CfStatus::CfBadArgument;
    }
    match analysis::check_minimal(t, level, cycle_budget) {
        Ok(v) => {
            if let VerdictStatus::Verified { witness_level } = v.status {
                if !witness.is_null() {
                    *witness = witness_level;
                }
            }
            set_error(v.details.clone());
            verdict_status(&v.status)
        }
        Err(e) => {
            set_error(e.to_string());
            CfStatus::CfError
        }
    }
}

/// Itinerary of `steps` symbols starting at position `offset` of the given
/// deepest-level arrow.
///
/// # Safety
/// `t` must be a live tower handle; `out` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_itinerary(
    t: *const CfTower,
    top_arrow: usize,
    offset: u64,
    steps: usize,
    out: *mut *mut c_char,
) -> CfStatus {
    let Some(t) = tower_ref(t) else {
        set_error("null tower");
        return CfStatus::CfBadArgument;
    };
    let top = t.level(t.depth());
    if top_arrow >= top.arrow_count() || offset >= top.weight(ArrowId(top_arrow)) {
        set_error("starting arrow or offset out of range");
        return CfStatus::CfBadArgument;
    }
    let start = Thread::from_top(t, ArrowId(top_arrow), offset);
    match itinerary(t, &start, steps) {
        Ok(word) => string_out(word, out),
        Err(e) => {
            set_error(e.to_string());
            CfStatus::CfUndecided
        }
    }
}

/// Reads an S-adic system off single-vertex levels and prints its document.
///
/// # Safety
/// `t` must be a live tower handle; `out` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn cf_tower_to_sadic(t: *const CfTower, out: *mut *mut c_char) -> CfStatus {
    let Some(t) = tower_ref(t) else {
        set_error("null tower");
        return CfStatus::CfBadArgument;
    };
    match translate::cover_to_sadic(t) {
        Ok(s) => string_out(format::print_sadic(&s), out),
        Err(e) => {
            set_error(e.to_string());
            CfStatus::CfInvalid
        }
    }
}
