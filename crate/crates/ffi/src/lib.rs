//! C interface to `branched-rough`.
//!
//! Every call returns a [`BrpStatus`]; on failure `brp_last_error` gives a
//! message for the calling thread. Handles are opaque and owned by the caller
//! until passed to the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use branched_rough::fields::PolyVectorField;
use branched_rough::harness::check_algebra;
use branched_rough::path::PLPath;
use branched_rough::rde::{self, lift_bv, solve_euler, BranchedRoughPath};
use branched_rough::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// A truncated branched rough path with `f64` coefficients.
pub struct BrpRoughPath(BranchedRoughPath<f64>);

/// Polynomial vector fields `f_1, …, f_d` on `ℝ^e`.
pub struct BrpField(PolyVectorField<f64>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Fail(BrpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) | Error::Json(_) => BrpStatus::Parse,
            Error::ZeroConstantTerm
            | Error::NotGroupLike { .. }
            | Error::SingularDegree { .. }
            | Error::DomainExit { .. }
            | Error::ToleranceNotReached { .. }
            | Error::TooFewLevels { .. } => BrpStatus::Numerical,
            _ => BrpStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BrpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BrpStatus::Ok,
        Ok(Err(Fail(s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("panic inside branched-rough");
            BrpStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(BrpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(BrpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn json_arg(s: *const c_char, what: &str) -> Result<serde_json::Value, Fail> {
    serde_json::from_str(str_arg(s, what)?).map_err(|e| Fail(BrpStatus::Parse, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Fail> {
    h.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call; never null.
#[no_mangle]
pub extern "C" fn brp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Canonical lift of the piecewise-linear path through `n_points` points of
/// `ℝ^dim`, stored row-major in `values`. `times` may be null for the grid
/// `0, 1, …, n_points − 1`.
///
/// # Safety
/// `values` must hold `n_points * dim` doubles and `times`, if non-null,
/// `n_points` doubles.
#[no_mangle]
pub unsafe extern "C" fn brp_lift(
    times: *const f64,
    values: *const f64,
    n_points: usize,
    dim: usize,
    p: f64,
    out: *mut *mut BrpRoughPath,
) -> BrpStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        if n_points == 0 || dim == 0 {
            return Err(Fail(BrpStatus::InvalidArgument, "need at least one point and dim ≥ 1".into()));
        }
        let flat = std::slice::from_raw_parts(values, n_points * dim);
        let t = if times.is_null() {
            (0..n_points).map(|i| i as f64).collect()
        } else {
            std::slice::from_raw_parts(times, n_points).to_vec()
        };
        let x = PLPath::new(t, flat.chunks(dim).map(<[f64]>::to_vec).collect())?;
        let rp = lift_bv(&x, p)?;
        put(out, Box::into_raw(Box::new(BrpRoughPath(rp))), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn brp_rough_path_from_json(json: *const c_char, out: *mut *mut BrpRoughPath) -> BrpStatus {
    guard(|| {
        let rp = BranchedRoughPath::<f64>::from_json(&json_arg(json, "json")?)?;
        put(out, Box::into_raw(Box::new(BrpRoughPath(rp))), "out")
    })
}

/// Serializes a rough path; free the string with `brp_string_free`.
///
/// # Safety
/// `path` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn brp_rough_path_to_json(path: *const BrpRoughPath, out: *mut *mut c_char) -> BrpStatus {
    guard(|| {
        let text = handle(path, "path")?.0.to_json().to_string();
        put(out, CString::new(text).unwrap_or_default().into_raw(), "out")
    })
}

/// Number of grid points, or 0 for a null handle.
///
/// # Safety
/// `path` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn brp_rough_path_len(path: *const BrpRoughPath) -> usize {
    path.as_ref().map_or(0, |p| p.0.len())
}

/// `‖X‖_{p-var}` over the whole grid.
///
/// # Safety
/// `path` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn brp_p_variation(path: *const BrpRoughPath, p: f64, out: *mut f64) -> BrpStatus {
    guard(|| {
        let x = &handle(path, "path")?.0;
        if !(p >= 1.0) {
            return Err(Fail(BrpStatus::InvalidArgument, format!("p = {p} must be at least 1")));
        }
        put(out, rde::p_variation(x, p, 0, x.len() - 1), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn brp_field_from_json(json: *const c_char, out: *mut *mut BrpField) -> BrpStatus {
    guard(|| {
        let f = PolyVectorField::<f64>::from_json(&json_arg(json, "json")?)?;
        put(out, Box::into_raw(Box::new(BrpField(f))), "out")
    })
}

/// Euler scheme on the full grid of `path`, writing the terminal value into
/// `out_end`, which holds `out_len ≥ e` doubles.
///
/// # Safety
/// Handles must be live; `xi` holds `xi_len` doubles and `out_end` holds
/// `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn brp_solve_euler(
    path: *const BrpRoughPath,
    field: *const BrpField,
    xi: *const f64,
    xi_len: usize,
    out_end: *mut f64,
    out_len: usize,
) -> BrpStatus {
    guard(|| {
        let x = &handle(path, "path")?.0;
        let f = &handle(field, "field")?.0;
        if xi.is_null() {
            return Err(null("xi"));
        }
        if out_end.is_null() {
            return Err(null("out_end"));
        }
        if out_len < f.state_dim() {
            return Err(Fail(BrpStatus::BufferTooSmall, format!("out_len {out_len} < e = {}", f.state_dim())));
        }
        let r = solve_euler(x, f, std::slice::from_raw_parts(xi, xi_len), &[])?;
        std::slice::from_raw_parts_mut(out_end, out_len)[..r.end().len()].copy_from_slice(r.end());
        Ok(())
    })
}

/// Runs the algebra identity suite at truncation `n` with `d` labels.
/// `out_pass` receives 1 if every check passed and 0 otherwise; `out_report`
/// may be null, otherwise it receives a JSON report to free with
/// `brp_string_free`.
///
/// # Safety
/// `out_pass` must be valid for writes; `out_report` null or valid.
#[no_mangle]
pub unsafe extern "C" fn brp_check_algebra(
    n: usize,
    d: usize,
    seed: u64,
    out_pass: *mut i32,
    out_report: *mut *mut c_char,
) -> BrpStatus {
    guard(|| {
        if out_pass.is_null() {
            return Err(null("out_pass"));
        }
        let r = check_algebra(n, d, seed)?;
        if !out_report.is_null() {
            let text = serde_json::to_string(&r).map_err(|e| Fail(BrpStatus::Parse, e.to_string()))?;
            out_report.write(CString::new(text).unwrap_or_default().into_raw());
        }
        out_pass.write(i32::from(r.pass()));
        Ok(())
    })
}

/// # Safety
/// `path` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn brp_rough_path_free(path: *mut BrpRoughPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn brp_field_free(field: *mut BrpField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn brp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

