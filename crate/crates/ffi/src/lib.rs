//! C interface to `skewtor`.
//!
//! Objects live behind opaque handles that the caller frees with the matching
//! `*_free` function. Every fallible call returns a [`SkewtorStatus`]; on a
//! non-zero status `skewtor_last_error` describes the failure for the calling
//! thread. Strings handed out by the library are freed with
//! `skewtor_string_free`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use skewtor::catalog::{self, CatalogEntry};
use skewtor::checks::{all_pass, verify_model};
use skewtor::clifford::bianchi_clifford_check;
use skewtor::curvature::CurvatureOperator;
use skewtor::homogeneous::{HomogeneousModel, ModelJson};
use skewtor::torsion::{classify, sigma_t};
use skewtor::{Error, Multivector, ToleranceConfig};

/// Status codes. Values 2 to 5 match the exit codes of the command-line tool.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkewtorStatus {
    Ok = 0,
    /// Computation failed for a reason other than those below.
    Failed = 1,
    InvalidInput = 2,
    UnsupportedDim = 3,
    UnknownCatalog = 4,
    Constraint = 5,
    NullPointer = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

/// Tolerances; pass NULL wherever one is accepted to use the defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SkewtorTolerance {
    pub eps_coeff: f64,
    pub eps_rank: f64,
}

/// A multivector (homogeneous exterior form).
pub struct SkewtorMultivector(Multivector);

/// A reductive homogeneous model.
pub struct SkewtorModel(HomogeneousModel);

/// A built catalog entry.
pub struct SkewtorCatalogEntry(CatalogEntry);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    let c = CString::new(s).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> SkewtorStatus {
    match err.exit_code() {
        2 => SkewtorStatus::InvalidInput,
        3 => SkewtorStatus::UnsupportedDim,
        4 => SkewtorStatus::UnknownCatalog,
        5 => SkewtorStatus::Constraint,
        _ => SkewtorStatus::Failed,
    }
}

struct Fail(SkewtorStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(SkewtorStatus::InvalidInput, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SkewtorStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SkewtorStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            SkewtorStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(SkewtorStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SkewtorStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(SkewtorStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn tolerance(p: *const SkewtorTolerance) -> Result<ToleranceConfig, Fail> {
    match p.as_ref() {
        None => Ok(ToleranceConfig::default()),
        Some(t) => ToleranceConfig::new(t.eps_coeff, t.eps_rank).map_err(|e| Fail(SkewtorStatus::InvalidInput, e.to_string())),
    }
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SkewtorStatus::NullPointer, "output pointer is NULL".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SkewtorStatus::NullPointer, "output pointer is NULL".into()));
    }
    let c = CString::new(s).map_err(|_| Fail(SkewtorStatus::Failed, "string contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write_flag(out: *mut c_int, v: bool) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SkewtorStatus::NullPointer, "output pointer is NULL".into()));
    }
    *out = c_int::from(v);
    Ok(())
}

fn json_string<T: serde::Serialize>(v: &T) -> Result<String, Fail> {
    serde_json::to_string(v).map_err(|e| Fail(SkewtorStatus::Failed, e.to_string()))
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn skewtor_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The caller owns
/// the returned string.
///
/// # Safety
/// Free the result with `skewtor_string_free`.
#[no_mangle]
pub unsafe extern "C" fn skewtor_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn skewtor_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses multivector JSON (`{"dim": n, "terms": [{"idx": [..], "c": x}]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_multivector_from_json(
    json: *const c_char,
    out: *mut *mut SkewtorMultivector,
) -> SkewtorStatus {
    guard(|| {
        let s = read_str(json, "json")?;
        let m: Multivector = serde_json::from_str(s)?;
        write_out(out, SkewtorMultivector(m))
    })
}

/// # Safety
/// `m` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn skewtor_multivector_free(m: *mut SkewtorMultivector) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Ambient dimension, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skewtor_multivector_dim(m: *const SkewtorMultivector) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Degree of the form; -1 for NULL, the zero form or mixed degrees.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skewtor_multivector_grade(m: *const SkewtorMultivector) -> c_int {
    m.as_ref().and_then(|m| m.0.grade()).map_or(-1, |g| g as c_int)
}

/// # Safety
/// `m` must be a live handle; `out` must be writable. Free the string with `skewtor_string_free`.
#[no_mangle]
pub unsafe extern "C" fn skewtor_multivector_to_json(m: *const SkewtorMultivector, out: *mut *mut c_char) -> SkewtorStatus {
    guard(|| {
        let m = deref(m, "multivector")?;
        write_string(out, json_string(&m.0)?)
    })
}

/// The 4-form σ_T of a 3-form.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_sigma_t(t: *const SkewtorMultivector, out: *mut *mut SkewtorMultivector) -> SkewtorStatus {
    guard(|| {
        let t = deref(t, "torsion")?;
        write_out(out, SkewtorMultivector(sigma_t(&t.0)?))
    })
}

/// Classification report of a 3-form, as JSON.
///
/// # Safety
/// `t` must be a live handle, `tol` NULL or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_classify_json(
    t: *const SkewtorMultivector,
    tol: *const SkewtorTolerance,
    out: *mut *mut c_char,
) -> SkewtorStatus {
    guard(|| {
        let t = deref(t, "torsion")?;
        let tol = tolerance(tol)?;
        let rep = classify(&t.0, &tol)?;
        write_string(out, json_string(&rep)?)
    })
}

/// Clifford form of the first Bianchi identity: is T² + R a scalar?
/// `curvature_json` is `{"basis": "lex-eij", "matrix": [[..]]}`.
///
/// # Safety
/// `t` must be a live handle, `curvature_json` a NUL-terminated string,
/// `tol` NULL or valid, `is_scalar` and `residual` writable (`residual` may be NULL).
#[no_mangle]
pub unsafe extern "C" fn skewtor_bianchi_clifford(
    t: *const SkewtorMultivector,
    curvature_json: *const c_char,
    tol: *const SkewtorTolerance,
    is_scalar: *mut c_int,
    residual: *mut f64,
) -> SkewtorStatus {
    guard(|| {
        let t = deref(t, "torsion")?;
        let r: CurvatureOperator = serde_json::from_str(read_str(curvature_json, "curvature_json")?)?;
        let tol = tolerance(tol)?;
        let c = bianchi_clifford_check(&t.0, &r, &tol)?;
        write_flag(is_scalar, c.is_scalar)?;
        if !residual.is_null() {
            *residual = c.max_residual;
        }
        Ok(())
    })
}

/// Builds a catalog family. `params_json` is NULL or an object of numbers,
/// e.g. `{"gamma": 0.75}`.
///
/// # Safety
/// `name` must be a NUL-terminated string, `params_json` NULL or one,
/// `tol` NULL or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_catalog_build(
    name: *const c_char,
    params_json: *const c_char,
    tol: *const SkewtorTolerance,
    out: *mut *mut SkewtorCatalogEntry,
) -> SkewtorStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let params: BTreeMap<String, f64> = if params_json.is_null() {
            BTreeMap::new()
        } else {
            serde_json::from_str(read_str(params_json, "params_json")?)?
        };
        let tol = tolerance(tol)?;
        write_out(out, SkewtorCatalogEntry(catalog::build(name, &params, &tol)?))
    })
}

/// # Safety
/// `e` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn skewtor_catalog_entry_free(e: *mut SkewtorCatalogEntry) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// 1 if every structural and expected-value check passed, 0 if not, -1 for NULL.
///
/// # Safety
/// `e` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skewtor_catalog_entry_passed(e: *const SkewtorCatalogEntry) -> c_int {
    e.as_ref().map_or(-1, |e| c_int::from(e.0.all_pass()))
}

/// Full entry (parameters, torsion, curvature, model, checks) as JSON.
///
/// # Safety
/// `e` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_catalog_entry_to_json(e: *const SkewtorCatalogEntry, out: *mut *mut c_char) -> SkewtorStatus {
    guard(|| {
        let e = deref(e, "entry")?;
        write_string(out, json_string(&e.0.to_json())?)
    })
}

/// Torsion form of the entry as a new handle.
///
/// # Safety
/// `e` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_catalog_entry_torsion(
    e: *const SkewtorCatalogEntry,
    out: *mut *mut SkewtorMultivector,
) -> SkewtorStatus {
    guard(|| {
        let e = deref(e, "entry")?;
        write_out(out, SkewtorMultivector(e.0.torsion.clone()))
    })
}

/// Homogeneous model of the entry as a new handle. Fails with `Failed` when
/// the family has no model attached.
///
/// # Safety
/// `e` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_catalog_entry_model(e: *const SkewtorCatalogEntry, out: *mut *mut SkewtorModel) -> SkewtorStatus {
    guard(|| {
        let e = deref(e, "entry")?;
        let m = e.0.model.clone().ok_or_else(|| Fail(SkewtorStatus::Failed, format!("entry '{}' has no model", e.0.name)))?;
        write_out(out, SkewtorModel(m))
    })
}

/// Parses model JSON (the `model` object of a catalog entry).
///
/// # Safety
/// `json` must be a NUL-terminated string, `tol` NULL or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_model_from_json(
    json: *const c_char,
    tol: *const SkewtorTolerance,
    out: *mut *mut SkewtorModel,
) -> SkewtorStatus {
    guard(|| {
        let j: ModelJson = serde_json::from_str(read_str(json, "json")?)?;
        let tol = tolerance(tol)?;
        write_out(out, SkewtorModel(HomogeneousModel::from_json(&j, &tol)?))
    })
}

/// # Safety
/// `m` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn skewtor_model_free(m: *mut SkewtorModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_model_to_json(m: *const SkewtorModel, out: *mut *mut c_char) -> SkewtorStatus {
    guard(|| {
        let m = deref(m, "model")?;
        write_string(out, json_string(&m.0.to_json())?)
    })
}

/// Runs the model checks. Writes 1/0 to `passed` and, if `report` is not
/// NULL, the per-check JSON array.
///
/// # Safety
/// `m` must be a live handle, `tol` NULL or valid, `passed` writable,
/// `report` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn skewtor_model_verify(
    m: *const SkewtorModel,
    tol: *const SkewtorTolerance,
    passed: *mut c_int,
    report: *mut *mut c_char,
) -> SkewtorStatus {
    guard(|| {
        let m = deref(m, "model")?;
        let tol = tolerance(tol)?;
        let checks = verify_model(&m.0, &tol)?;
        write_flag(passed, all_pass(&checks))?;
        if !report.is_null() {
            write_string(report, json_string(&checks)?)?;
        }
        Ok(())
    })
}
