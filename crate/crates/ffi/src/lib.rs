//! C ABI over `heffter-core`.
//!
//! Objects are opaque handles created by `*_parse` / `*_build` and released
//! with the matching `*_free`. Every fallible call returns a
//! [`HeffterStatus`]; on failure the message is available from
//! [`heffter_last_error`] until the next call on the same thread. Strings
//! returned through out-parameters are owned by the caller and must be
//! released with [`heffter_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use heffter_core::bounds::{evaluate_bound, BoundQuery, TheoremId};
use heffter_core::embedding::{build_embedding, genus_formula, report, CombinatorialEmbedding};
use heffter_core::heffter::{is_globally_simple, validate_heffter};
use heffter_core::knight::{OrientationPair, Torus};
use heffter_core::pfarray::PartiallyFilledArray;
use heffter_core::Error;

/// Result code of every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeffterStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    NotCompatible = 5,
    Hypothesis = 6,
    Domain = 7,
    Budget = 8,
    Failed = 9,
    Panic = 10,
}

/// Opaque handle to a partially filled array.
pub struct HeffterArray(PartiallyFilledArray);

/// Opaque handle to a rotation system.
pub struct HeffterEmbedding(CombinatorialEmbedding);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(HeffterStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => HeffterStatus::Parse,
            Error::NotCompatible(_) => HeffterStatus::NotCompatible,
            Error::Hypothesis(_) => HeffterStatus::Hypothesis,
            Error::Domain(_) => HeffterStatus::Domain,
            Error::Budget { .. } => HeffterStatus::Budget,
            Error::Parameters(_)
            | Error::OrientationLength { .. }
            | Error::SubgroupOrder { .. }
            | Error::ModulusMismatch { .. }
            | Error::ModulusDiffers(..) => HeffterStatus::InvalidArgument,
            _ => HeffterStatus::Failed,
        };
        Fail(status, e.to_string())
    }
}

fn set_error(msg: Option<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default()));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HeffterStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            HeffterStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("internal panic".into()));
            HeffterStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(HeffterStatus::NullPointer, "null pointer argument".into())
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn cstr<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail(HeffterStatus::InvalidUtf8, e.to_string()))
}

unsafe fn signs(p: *const i8, len: usize) -> Result<Vec<i8>, Fail> {
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len).to_vec())
}

fn owned_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|e| Fail(HeffterStatus::Failed, e.to_string()))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn heffter_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses an array from its text form (`v=.. t=.. m=.. n=..` header, then
/// comma separated rows with empty fields for empty cells).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn heffter_array_parse(text: *const c_char, out: *mut *mut HeffterArray) -> HeffterStatus {
    guard(|| {
        let a = PartiallyFilledArray::parse(cstr(text)?)?;
        put(out, Box::into_raw(Box::new(HeffterArray(a))))
    })
}

/// # Safety
/// `a` must come from [`heffter_array_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn heffter_array_free(a: *mut HeffterArray) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `a` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn heffter_array_dims(
    a: *const HeffterArray,
    rows: *mut usize,
    cols: *mut usize,
    v: *mut u32,
    t: *mut u32,
) -> HeffterStatus {
    guard(|| {
        let a = &get(a)?.0;
        put(rows, a.rows())?;
        put(cols, a.cols())?;
        put(v, a.modulus())?;
        put(t, a.subgroup_order())
    })
}

/// Writes whether the array is a Heffter array.
///
/// # Safety
/// `a` must be a live handle and `pass` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn heffter_array_validate(a: *const HeffterArray, pass: *mut bool) -> HeffterStatus {
    guard(|| put(pass, validate_heffter(&get(a)?.0)?.pass))
}

/// Full validation report as JSON.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn heffter_array_validate_json(a: *const HeffterArray, out: *mut *mut c_char) -> HeffterStatus {
    guard(|| {
        let rep = validate_heffter(&get(a)?.0)?;
        put(out, owned_string(serde_json::to_string(&rep).map_err(|e| Fail(HeffterStatus::Failed, e.to_string()))?)?)
    })
}

/// # Safety
/// `a` must be a live handle and `simple` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn heffter_array_globally_simple(a: *const HeffterArray, simple: *mut bool) -> HeffterStatus {
    guard(|| put(simple, is_globally_simple(&get(a)?.0)))
}

/// Writes whether the orientation pair `(r, c)` (entries ±1) solves the
/// crazy knight's tour on the array's skeleton.
///
/// # Safety
/// `a` must be a live handle, `r` and `c` must point to `r_len` and `c_len`
/// bytes, and `solution` must be valid.
#[no_mangle]
pub unsafe extern "C" fn heffter_tour_is_solution(
    a: *const HeffterArray,
    r: *const i8,
    r_len: usize,
    c: *const i8,
    c_len: usize,
    solution: *mut bool,
) -> HeffterStatus {
    guard(|| {
        let a = &get(a)?.0;
        let pair = OrientationPair::new(signs(r, r_len)?, signs(c, c_len)?)?;
        if pair.r.len() != a.rows() {
            return Err(Error::OrientationLength { expected: a.rows(), got: pair.r.len() }.into());
        }
        if pair.c.len() != a.cols() {
            return Err(Error::OrientationLength { expected: a.cols(), got: pair.c.len() }.into());
        }
        put(solution, Torus::new(&a.skeleton())?.is_solution(&pair)?)
    })
}

/// Builds the rotation system induced by the orientation pair.
/// Fails with `NOT_COMPATIBLE` when the pair is not a tour solution.
///
/// # Safety
/// As for [`heffter_tour_is_solution`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn heffter_embedding_build(
    a: *const HeffterArray,
    r: *const i8,
    r_len: usize,
    c: *const i8,
    c_len: usize,
    out: *mut *mut HeffterEmbedding,
) -> HeffterStatus {
    guard(|| {
        let pair = OrientationPair::new(signs(r, r_len)?, signs(c, c_len)?)?;
        let emb = build_embedding(&get(a)?.0, &pair)?;
        put(out, Box::into_raw(Box::new(HeffterEmbedding(emb))))
    })
}

/// # Safety
/// `e` must come from [`heffter_embedding_build`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn heffter_embedding_free(e: *mut HeffterEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Face census of the embedding as JSON.
///
/// # Safety
/// `a` must be the array `e` was built from; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn heffter_embedding_report_json(
    a: *const HeffterArray,
    e: *const HeffterEmbedding,
    out: *mut *mut c_char,
) -> HeffterStatus {
    guard(|| {
        let rep = report(&get(a)?.0, &get(e)?.0)?;
        put(out, owned_string(serde_json::to_string(&rep).map_err(|e| Fail(HeffterStatus::Failed, e.to_string()))?)?)
    })
}

/// Genus from the Euler characteristic of the traced faces.
///
/// # Safety
/// `a` must be the array `e` was built from; `genus` must be valid.
#[no_mangle]
pub unsafe extern "C" fn heffter_embedding_genus(
    a: *const HeffterArray,
    e: *const HeffterEmbedding,
    genus: *mut i64,
) -> HeffterStatus {
    guard(|| put(genus, report(&get(a)?.0, &get(e)?.0)?.genus_euler))
}

/// Closed-form genus of a biembedding of an `H_t(m,n;h,k)`.
///
/// # Safety
/// `genus` must be valid.
#[no_mangle]
pub unsafe extern "C" fn heffter_genus_formula(m: u64, n: u64, k: u64, t: u64, genus: *mut i64) -> HeffterStatus {
    guard(|| put(genus, genus_formula(m, n, k, t)?))
}

/// Evaluates a lower bound by theorem name (for example `"CDY"` or
/// `"PropK7"`) and writes the result as JSON. `subgroup_t` is ignored when 0.
///
/// # Safety
/// `theorem` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn heffter_bounds_json(
    theorem: *const c_char,
    n: u64,
    k: u64,
    subgroup_t: u64,
    out: *mut *mut c_char,
) -> HeffterStatus {
    guard(|| {
        let id: TheoremId = cstr(theorem)?.parse()?;
        let mut q = BoundQuery::new(id, n, k);
        if subgroup_t > 0 {
            q = q.subgroup_t(subgroup_t);
        }
        let res = evaluate_bound(&q)?;
        put(out, owned_string(serde_json::to_string(&res).map_err(|e| Fail(HeffterStatus::Failed, e.to_string()))?)?)
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn heffter_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
