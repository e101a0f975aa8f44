use std::ffi::{CStr, CString};
use std::ptr;

use thermoshift_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ts_last_error()) }.to_string_lossy().into_owned()
}

struct Handles {
    shift: *mut TsShift,
    potential: *mut TsPotential,
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            ts_shift_free(self.shift);
            ts_potential_free(self.potential);
        }
    }
}

fn golden_zero() -> Handles {
    let mut shift = ptr::null_mut();
    let mut potential = ptr::null_mut();
    unsafe {
        let s = cstr(r#"{"alphabet_size": 2, "builtin": "golden-mean"}"#);
        assert_eq!(ts_shift_from_json(s.as_ptr(), &mut shift), TsStatus::Ok);
        let p = cstr(r#"{"type": "additive-cylinder", "depth": 1, "values": {}}"#);
        assert_eq!(ts_potential_from_json(p.as_ptr(), &mut potential), TsStatus::Ok);
    }
    Handles { shift, potential }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ts_version()) }.to_str().unwrap();
    assert_eq!(v, thermoshift::VERSION);
}

#[test]
fn counts_and_partition_sums() {
    let h = golden_zero();
    let mut count = 0u64;
    assert_eq!(unsafe { ts_count_words(h.shift, 5, &mut count) }, TsStatus::Ok);
    assert_eq!(count, 13);

    let mut z = [0.0f64; 6];
    assert_eq!(unsafe { ts_log_partition(h.shift, h.potential, 6, z.as_mut_ptr(), z.len()) }, TsStatus::Ok);
    let fib = [2.0f64, 3.0, 5.0, 8.0, 13.0, 21.0];
    for (a, b) in z.iter().zip(fib) {
        assert!((a - b.ln()).abs() < 1e-12);
    }

    let mut g = [0.0f64; 4];
    assert_eq!(unsafe { ts_gurevich(h.shift, h.potential, 2, 4, g.as_mut_ptr(), g.len()) }, TsStatus::Ok);
    assert_eq!(g[0], f64::NEG_INFINITY);
    // Cycles through 2 of length n: the (2,2) entry of A^n.
    for (a, b) in g[1..].iter().zip([1.0f64, 1.0, 2.0]) {
        assert!((a - b.ln()).abs() < 1e-12);
    }
}

#[test]
fn short_buffer_is_reported() {
    let h = golden_zero();
    let mut z = [0.0f64; 2];
    let s = unsafe { ts_log_partition(h.shift, h.potential, 5, z.as_mut_ptr(), z.len()) };
    assert_eq!(s, TsStatus::BufferTooSmall);
    assert!(last_error().contains("need 5"));
}

#[test]
fn pressure_report_round_trips() {
    let h = golden_zero();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ts_pressure_report_json(h.shift, h.potential, 30, &mut out) }, TsStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { ts_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let lo = v["p_best"]["lower"].as_f64().unwrap();
    let hi = v["p_best"]["upper"].as_f64().unwrap();
    let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!(lo <= log_phi && log_phi <= hi);
}

#[test]
fn errors_carry_messages() {
    let mut shift = ptr::null_mut();
    let bad = cstr(r#"{"alphabet_size": 2, "edgez": []}"#);
    assert_eq!(unsafe { ts_shift_from_json(bad.as_ptr(), &mut shift) }, TsStatus::InvalidInput);
    assert!(shift.is_null());
    assert!(last_error().contains("edgez"));

    assert_eq!(unsafe { ts_shift_from_json(ptr::null(), &mut shift) }, TsStatus::NullArgument);
    let mut count = 0u64;
    assert_eq!(unsafe { ts_count_words(ptr::null(), 3, &mut count) }, TsStatus::NullArgument);

    let big = cstr(r#"{"alphabet_size": 9, "full": true}"#);
    assert_eq!(unsafe { ts_shift_from_json(big.as_ptr(), &mut shift) }, TsStatus::Ok);
    assert_eq!(unsafe { ts_count_words(shift, 40, &mut count) }, TsStatus::BudgetExceeded);
    unsafe { ts_shift_free(shift) };

    let h = golden_zero();
    let mut count = 0u64;
    assert_eq!(unsafe { ts_count_words(h.shift, 2, &mut count) }, TsStatus::Ok);
    assert_eq!(last_error(), "");
}

#[test]
fn singular_values_of_shear() {
    let a = [1.0, 1.0, 0.0, 1.0];
    let mut s = [0.0; 2];
    assert_eq!(unsafe { ts_singular_values(a.as_ptr(), 2, s.as_mut_ptr()) }, TsStatus::Ok);
    let r5 = 5f64.sqrt();
    assert!((s[0] - (1.0 + r5) / 2.0).abs() < 1e-12);
    assert!((s[1] - (r5 - 1.0) / 2.0).abs() < 1e-12);
    assert_eq!(unsafe { ts_singular_values(a.as_ptr(), 4, s.as_mut_ptr()) }, TsStatus::InvalidInput);
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "thermoshift.h"

int main(void) {
    TsShift *s = NULL;
    TsPotential *p = NULL;
    if (ts_shift_from_json("{\"alphabet_size\": 3, \"full\": true}", &s) != TS_STATUS_OK) return 1;
    if (ts_potential_from_json("{\"type\": \"preimage-count\"}", &p) != TS_STATUS_OK) return 2;
    uint64_t n = 0;
    if (ts_count_words(s, 4, &n) != TS_STATUS_OK || n != 81) return 3;
    double z[3];
    if (ts_log_partition(s, p, 3, z, 3) != TS_STATUS_OK) return 4;
    if (fabs(z[2] - 3.0 * log(3.0)) > 1e-12) return 5;
    if (ts_shift_from_json("{", &s) != TS_STATUS_INVALID_INPUT || ts_last_error()[0] == '\0') return 6;
    ts_shift_free(s);
    ts_potential_free(p);
    printf("%s\n", ts_version());
    return 0;
}
"#;

/// Compile and run a C client against the generated header and static
/// library. Skipped when no C compiler or static archive is available.
#[test]
fn c_client_links_and_runs() {
    let deps = std::env::current_exe().unwrap();
    let profile_dir = deps.parent().unwrap().parent().unwrap();
    let archive = profile_dir.join("libthermoshift_ffi.a");
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    if !archive.exists() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or {}", archive.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let exe = dir.path().join("client");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = std::process::Command::new("cc")
        .arg(&src)
        .arg(format!("-I{include}"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to compile");
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C client exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), thermoshift::VERSION);
}
