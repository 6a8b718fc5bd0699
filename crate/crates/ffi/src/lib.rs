// SPDX-License-Identifier: Apache-2.0

//! C ABI over `bqf_sieve`.
//!
//! Every function returns a [`BqfStatus`] and writes its result through an
//! out pointer. On failure the message is available from
//! [`bqf_last_error`] on the same thread. Panics are caught at the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bqf_sieve::arith::kronecker;
use bqf_sieve::character::l_values;
use bqf_sieve::forms::{enumerate_class_set, Form, FormClassSet};
use bqf_sieve::lattice::{count_a, r_f, EllipseWindow};
use bqf_sieve::sieve::{pi_f, selberg_upper_bound, SieveParams};
use bqf_sieve::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BqfStatus {
    Ok = 0,
    InvalidForm = 1,
    NotDiscriminant = 2,
    NotSquarefree = 3,
    InvalidArgument = 4,
    VacuousBound = 5,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BqfForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BqfLValues {
    pub l1: f64,
    pub l1_prime: f64,
    pub error_bound: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BqfSieveSummary {
    pub z: f64,
    pub j: f64,
    pub main: f64,
    pub upper_bound: f64,
    pub upper_bound_true: f64,
    pub exact_interval_count: u64,
}

/// Opaque list of reduced primitive forms of one discriminant.
pub struct BqfClassSet {
    inner: FormClassSet,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BqfStatus {
    match e {
        Error::NotPositiveDefinite { .. } | Error::NotReduced { .. } | Error::NotPrimitive { .. } => {
            BqfStatus::InvalidForm
        }
        Error::NotDiscriminant(_) => BqfStatus::NotDiscriminant,
        Error::NotSquarefree(_) => BqfStatus::NotSquarefree,
        Error::VacuousBound(_) => BqfStatus::VacuousBound,
        Error::KroneckerZeroZero | Error::InvalidArgument(_) => BqfStatus::InvalidArgument,
    }
}

fn fail(status: BqfStatus, msg: &str) -> BqfStatus {
    set_error(msg);
    status
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), BqfStatus>) -> BqfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BqfStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(BqfStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: bqf_sieve::Result<T>) -> Result<T, BqfStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

fn non_null<T>(p: *const T) -> Result<(), BqfStatus> {
    if p.is_null() {
        Err(fail(BqfStatus::NullPointer, "null pointer argument"))
    } else {
        Ok(())
    }
}

fn to_form(f: BqfForm) -> Result<Form, BqfStatus> {
    lift(Form::new(f.a, f.b, f.c))
}

/// Message of the last failure on this thread. Valid until the next call
/// into this library from the same thread.
#[no_mangle]
pub extern "C" fn bqf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Kronecker symbol `(m / n)`.
///
/// # Safety
/// `out` must be valid for a write of one `int32_t`.
#[no_mangle]
pub unsafe extern "C" fn bqf_kronecker(m: i64, n: i64, out: *mut i32) -> BqfStatus {
    guard(|| {
        non_null(out)?;
        let v = lift(kronecker(m, n))?;
        unsafe { *out = v as i32 };
        Ok(())
    })
}

/// The reduced form properly equivalent to `f`.
///
/// # Safety
/// `out` must be valid for a write of one `BqfForm`.
#[no_mangle]
pub unsafe extern "C" fn bqf_reduce(f: BqfForm, out: *mut BqfForm) -> BqfStatus {
    guard(|| {
        non_null(out)?;
        let r = to_form(f)?.reduce();
        unsafe { *out = BqfForm { a: r.a, b: r.b, c: r.c } };
        Ok(())
    })
}

/// Enumerates the reduced primitive forms of discriminant `-d`. Free the
/// handle with [`bqf_class_set_free`].
///
/// # Safety
/// `out` must be valid for a write of one pointer.
#[no_mangle]
pub unsafe extern "C" fn bqf_class_set_new(d: u64, out: *mut *mut BqfClassSet) -> BqfStatus {
    guard(|| {
        non_null(out)?;
        let inner = lift(enumerate_class_set(d))?;
        unsafe { *out = Box::into_raw(Box::new(BqfClassSet { inner })) };
        Ok(())
    })
}

/// Class number `h`; 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle from [`bqf_class_set_new`].
#[no_mangle]
pub unsafe extern "C" fn bqf_class_set_len(set: *const BqfClassSet) -> usize {
    unsafe { set.as_ref() }.map_or(0, |s| s.inner.h)
}

/// Number of units `w`; 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle from [`bqf_class_set_new`].
#[no_mangle]
pub unsafe extern "C" fn bqf_class_set_w(set: *const BqfClassSet) -> u32 {
    unsafe { set.as_ref() }.map_or(0, |s| s.inner.w)
}

/// The `index`-th form in lexicographic order.
///
/// # Safety
/// `set` must be a live handle and `out` valid for one `BqfForm`.
#[no_mangle]
pub unsafe extern "C" fn bqf_class_set_get(set: *const BqfClassSet, index: usize, out: *mut BqfForm) -> BqfStatus {
    guard(|| {
        non_null(set)?;
        non_null(out)?;
        let s = unsafe { &*set };
        let f = s
            .inner
            .forms
            .get(index)
            .ok_or_else(|| fail(BqfStatus::InvalidArgument, &format!("index {index} out of range")))?;
        unsafe { *out = BqfForm { a: f.a, b: f.b, c: f.c } };
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a handle from [`bqf_class_set_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bqf_class_set_free(set: *mut BqfClassSet) {
    if !set.is_null() {
        drop(unsafe { Box::from_raw(set) });
    }
}

/// Number of `(u, v)` with `f(u, v) = n`.
///
/// # Safety
/// `out` must be valid for a write of one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn bqf_r_f(f: BqfForm, n: u64, out: *mut u64) -> BqfStatus {
    guard(|| {
        non_null(out)?;
        let v = r_f(&to_form(f)?, n);
        unsafe { *out = v };
        Ok(())
    })
}

/// Lattice points with `f(u, v) <= x`, origin included.
///
/// # Safety
/// `out` must be valid for a write of one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn bqf_count_a(f: BqfForm, x: f64, out: *mut u64) -> BqfStatus {
    guard(|| {
        non_null(out)?;
        let w = lift(EllipseWindow::new(to_form(f)?, x))?;
        unsafe { *out = count_a(&w) };
        Ok(())
    })
}

/// Primes `p <= x` represented by `f`.
///
/// # Safety
/// `out` must be valid for a write of one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn bqf_pi_f(f: BqfForm, x: f64, out: *mut u64) -> BqfStatus {
    guard(|| {
        non_null(out)?;
        let v = lift(pi_f(&to_form(f)?, x))?;
        unsafe { *out = v };
        Ok(())
    })
}

/// `L(1, chi)` and `L'(1, chi)` for `chi = (-d / .)`.
///
/// # Safety
/// `out` must be valid for a write of one `BqfLValues`.
#[no_mangle]
pub unsafe extern "C" fn bqf_l_values(d: u64, out: *mut BqfLValues) -> BqfStatus {
    guard(|| {
        non_null(out)?;
        let lv = lift(l_values(d))?;
        unsafe { *out = BqfLValues { l1: lv.l1, l1_prime: lv.l1_prime, error_bound: lv.error_bound } };
        Ok(())
    })
}

/// Selberg upper bound for `x - y < f <= x`. Pass `z <= 0` for the default
/// sifting variable.
///
/// # Safety
/// `out` must be valid for a write of one `BqfSieveSummary`.
#[no_mangle]
pub unsafe extern "C" fn bqf_selberg(
    f: BqfForm,
    x: f64,
    y: f64,
    z: f64,
    phi: f64,
    epsilon: f64,
    out: *mut BqfSieveSummary,
) -> BqfStatus {
    guard(|| {
        non_null(out)?;
        let mut params = lift(SieveParams::new(to_form(f)?, x, y, phi, epsilon))?;
        if z > 0.0 {
            params = params.with_z(z);
        }
        let r = lift(selberg_upper_bound(&params))?;
        unsafe {
            *out = BqfSieveSummary {
                z: params.z,
                j: r.j,
                main: r.main,
                upper_bound: r.upper_bound,
                upper_bound_true: r.upper_bound_true,
                exact_interval_count: r.exact_interval_count,
            }
        };
        Ok(())
    })
}
