// SPDX-License-Identifier: Apache-2.0

use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use bqf_sieve_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bqf_last_error()) }.to_string_lossy().into_owned()
}

const CIRCLE: BqfForm = BqfForm { a: 1, b: 0, c: 1 };

#[test]
fn kronecker_and_reduce() {
    let mut k = 0;
    assert_eq!(unsafe { bqf_kronecker(-4, 3, &mut k) }, BqfStatus::Ok);
    assert_eq!(k, -1);
    assert_eq!(unsafe { bqf_kronecker(0, 0, &mut k) }, BqfStatus::InvalidArgument);

    let mut r = BqfForm { a: 0, b: 0, c: 0 };
    assert_eq!(unsafe { bqf_reduce(BqfForm { a: 1, b: 5, c: 7 }, &mut r) }, BqfStatus::Ok);
    assert_eq!(r, BqfForm { a: 1, b: 1, c: 1 });
    assert_eq!(unsafe { bqf_reduce(BqfForm { a: 1, b: 0, c: -1 }, &mut r) }, BqfStatus::InvalidForm);
    assert!(last_error().contains("positive definite"));
    assert_eq!(unsafe { bqf_reduce(CIRCLE, ptr::null_mut()) }, BqfStatus::NullPointer);
}

#[test]
fn class_set_handle() {
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { bqf_class_set_new(23, &mut set) }, BqfStatus::Ok);
    assert_eq!(unsafe { bqf_class_set_len(set) }, 3);
    assert_eq!(unsafe { bqf_class_set_w(set) }, 2);
    let mut f = BqfForm { a: 0, b: 0, c: 0 };
    assert_eq!(unsafe { bqf_class_set_get(set, 1, &mut f) }, BqfStatus::Ok);
    assert_eq!(f, BqfForm { a: 2, b: -1, c: 3 });
    assert_eq!(unsafe { bqf_class_set_get(set, 3, &mut f) }, BqfStatus::InvalidArgument);
    unsafe { bqf_class_set_free(set) };
    unsafe { bqf_class_set_free(ptr::null_mut()) };
    assert_eq!(unsafe { bqf_class_set_len(ptr::null()) }, 0);

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { bqf_class_set_new(5, &mut bad) }, BqfStatus::NotDiscriminant);
    assert!(bad.is_null());
}

#[test]
fn counts() {
    let mut n = 0u64;
    assert_eq!(unsafe { bqf_r_f(CIRCLE, 25, &mut n) }, BqfStatus::Ok);
    assert_eq!(n, 12);
    assert_eq!(unsafe { bqf_count_a(CIRCLE, 10.0, &mut n) }, BqfStatus::Ok);
    assert_eq!(n, 37);
    assert_eq!(unsafe { bqf_pi_f(CIRCLE, 100.0, &mut n) }, BqfStatus::Ok);
    assert_eq!(n, 12);
    assert_eq!(unsafe { bqf_count_a(CIRCLE, -1.0, &mut n) }, BqfStatus::InvalidArgument);
    assert_eq!(unsafe { bqf_pi_f(BqfForm { a: 2, b: 2, c: 2 }, 10.0, &mut n) }, BqfStatus::InvalidForm);
}

#[test]
fn l_values_and_sieve() {
    let mut lv = BqfLValues { l1: 0.0, l1_prime: 0.0, error_bound: 0.0 };
    assert_eq!(unsafe { bqf_l_values(4, &mut lv) }, BqfStatus::Ok);
    assert!((lv.l1 - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert_eq!(unsafe { bqf_l_values(6, &mut lv) }, BqfStatus::NotDiscriminant);

    let mut s = BqfSieveSummary { z: 0.0, j: 0.0, main: 0.0, upper_bound: 0.0, upper_bound_true: 0.0, exact_interval_count: 0 };
    assert_eq!(unsafe { bqf_selberg(CIRCLE, 2e4, 1e4, 10.0, 0.25, 0.2, &mut s) }, BqfStatus::Ok);
    assert_eq!(s.z, 10.0);
    assert!(s.upper_bound_true >= s.exact_interval_count as f64);
    assert_eq!(unsafe { bqf_selberg(CIRCLE, 1e4, 1.0, 0.0, 0.25, 0.2, &mut s) }, BqfStatus::InvalidArgument);
}

#[test]
fn header_declares_every_symbol() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bqf_sieve.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for name in [
        "bqf_last_error",
        "bqf_kronecker",
        "bqf_reduce",
        "bqf_class_set_new",
        "bqf_class_set_len",
        "bqf_class_set_w",
        "bqf_class_set_get",
        "bqf_class_set_free",
        "bqf_r_f",
        "bqf_count_a",
        "bqf_pi_f",
        "bqf_l_values",
        "bqf_selberg",
        "typedef struct BqfClassSet BqfClassSet;",
        "BQF_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bqf_sieve.h");
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    assert!(status.success());
}
