//! C ABI over `thermoshift`.
//!
//! Shifts and potentials are opaque handles built from the same JSON spec
//! files the CLI reads. Every fallible call returns a [`TsStatus`]; on
//! failure the message is kept per thread and read with [`ts_last_error`].
//! Strings returned through `char **` belong to the caller and are released
//! with [`ts_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use thermoshift::cocycle::singular_values;
use thermoshift::pressure::{gurevich_series, log_partition_series, pressure_report, PressureOptions};
use thermoshift::{Error, ShiftSpace, WeightSystem};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    BudgetExceeded = 4,
    ConditionFailed = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Opaque shift space.
pub struct TsShift(ShiftSpace);

/// Opaque weight system.
pub struct TsPotential(WeightSystem);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn fail(status: TsStatus, msg: impl Into<String>) -> TsStatus {
    set_error(msg);
    status
}

fn from_lib(e: Error) -> TsStatus {
    let status = match e {
        Error::BudgetExceeded { .. } => TsStatus::BudgetExceeded,
        Error::Condition(_) => TsStatus::ConditionFailed,
        _ => TsStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

/// Run `f`, mapping library errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), TsStatus>) -> TsStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(TsStatus::Internal, "panic inside thermoshift"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, TsStatus> {
    if p.is_null() {
        return Err(fail(TsStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TsStatus::InvalidUtf8, "argument is not UTF-8"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, TsStatus> {
    p.as_ref()
        .ok_or_else(|| fail(TsStatus::NullArgument, format!("null {what} handle")))
}

fn check_out<T>(p: *mut T) -> Result<(), TsStatus> {
    if p.is_null() {
        Err(fail(TsStatus::NullArgument, "null output pointer"))
    } else {
        Ok(())
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a shift from a JSON shift spec.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_shift_from_json(json: *const c_char, out: *mut *mut TsShift) -> TsStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let shift = ShiftSpace::from_json(read_str(json)?).map_err(from_lib)?;
        *out = Box::into_raw(Box::new(TsShift(shift)));
        Ok(())
    })
}

/// # Safety
/// `shift` must come from [`ts_shift_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_shift_free(shift: *mut TsShift) {
    if !shift.is_null() {
        drop(Box::from_raw(shift));
    }
}

/// Build a weight system from a JSON potential spec.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_potential_from_json(
    json: *const c_char,
    out: *mut *mut TsPotential,
) -> TsStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let ws = WeightSystem::from_json(read_str(json)?).map_err(from_lib)?;
        *out = Box::into_raw(Box::new(TsPotential(ws)));
        Ok(())
    })
}

/// # Safety
/// `potential` must come from [`ts_potential_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_potential_free(potential: *mut TsPotential) {
    if !potential.is_null() {
        drop(Box::from_raw(potential));
    }
}

/// `|B_n|`. Counts above `UINT64_MAX` give `BUDGET_EXCEEDED`.
///
/// # Safety
/// `shift` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_count_words(shift: *const TsShift, n: usize, out: *mut u64) -> TsStatus {
    guard(|| {
        check_out(out)?;
        let s = deref(shift, "shift")?;
        let c = s.0.count_words(n).map_err(from_lib)?;
        *out = u64::try_from(c).map_err(|_| fail(TsStatus::BudgetExceeded, format!("|B_{n}| = {c} overflows uint64")))?;
        Ok(())
    })
}

unsafe fn write_series(values: Vec<f64>, out: *mut f64, len: usize) -> Result<(), TsStatus> {
    check_out(out)?;
    if len < values.len() {
        return Err(fail(
            TsStatus::BufferTooSmall,
            format!("need {} values, buffer holds {len}", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// `log Z_n` for `n = 1..=n_max` into `out[0..n_max]`.
///
/// # Safety
/// Handles must be live; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ts_log_partition(
    shift: *const TsShift,
    potential: *const TsPotential,
    n_max: usize,
    out: *mut f64,
    out_len: usize,
) -> TsStatus {
    guard(|| {
        let s = deref(shift, "shift")?;
        let p = deref(potential, "potential")?;
        let v = log_partition_series(&p.0, &s.0, n_max).map_err(from_lib)?;
        write_series(v, out, out_len)
    })
}

/// `log Z_n(F, anchor)` for `n = 1..=n_max`; `-inf` where no cycle exists.
///
/// # Safety
/// Handles must be live; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ts_gurevich(
    shift: *const TsShift,
    potential: *const TsPotential,
    anchor: u32,
    n_max: usize,
    out: *mut f64,
    out_len: usize,
) -> TsStatus {
    guard(|| {
        let s = deref(shift, "shift")?;
        let p = deref(potential, "potential")?;
        let v = gurevich_series(&p.0, &s.0, anchor, n_max).map_err(from_lib)?;
        write_series(v, out, out_len)
    })
}

/// Full pressure report as JSON; free with [`ts_string_free`].
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_pressure_report_json(
    shift: *const TsShift,
    potential: *const TsPotential,
    n_max: usize,
    out: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let s = deref(shift, "shift")?;
        let p = deref(potential, "potential")?;
        let opts = PressureOptions {
            n_max,
            ..Default::default()
        };
        let r = pressure_report(&p.0, &s.0, &opts).map_err(from_lib)?;
        let text = serde_json::to_string(&r).map_err(|e| fail(TsStatus::Internal, e.to_string()))?;
        *out = CString::new(text)
            .map_err(|e| fail(TsStatus::Internal, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// Singular values of the row-major `d × d` matrix `a`, largest first,
/// into `out[0..d]`. `d` is 2 or 3.
///
/// # Safety
/// `a` must hold `d * d` doubles and `out` `d` doubles.
#[no_mangle]
pub unsafe extern "C" fn ts_singular_values(a: *const f64, d: usize, out: *mut f64) -> TsStatus {
    guard(|| {
        if a.is_null() {
            return Err(fail(TsStatus::NullArgument, "null matrix"));
        }
        check_out(out)?;
        if !(2..=3).contains(&d) {
            return Err(fail(TsStatus::InvalidInput, format!("d = {d}; only 2 and 3 are supported")));
        }
        let m = std::slice::from_raw_parts(a, d * d);
        let s = singular_values(m, d).map_err(from_lib)?;
        ptr::copy_nonoverlapping(s.as_ptr(), out, d);
        Ok(())
    })
}
