use std::ffi::{CStr, CString};
use std::ptr;

use ndtrace_ffi::*;

fn c(re: f64, im: f64) -> NdtComplex {
    NdtComplex { re, im }
}

fn last_error() -> String {
    let p = ndt_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn sech2() -> *mut NdtCoefficients {
    let mut cs = ptr::null_mut();
    assert_eq!(unsafe { ndt_coefficients_sech2(2, -2.0, &mut cs) }, NdtStatus::Ok);
    assert!(!cs.is_null());
    cs
}

/// `(κ−1)/(κ+1)` with `κ = √(−z)`.
fn sech2_delta(z: NdtComplex) -> (f64, f64) {
    let k = num_complex::Complex64::new(-z.re, -z.im).sqrt();
    let d = (k - 1.0) / (k + 1.0);
    (d.re, d.im)
}

#[test]
fn roots_of_second_order() {
    let mut roots = [NdtComplex::default(); 2];
    let mut n = 0;
    let st = unsafe { ndt_roots(2, c(-4.0, 0.0), roots.as_mut_ptr(), 2, &mut n) };
    assert_eq!(st, NdtStatus::Ok);
    assert_eq!(n, 1);
    assert!((roots[0].re - 2.0).abs() < 1e-14 && roots[0].im.abs() < 1e-14);
    assert!((roots[1].re + 2.0).abs() < 1e-14);
}

#[test]
fn small_buffer_and_null_pointers() {
    let mut roots = [NdtComplex::default(); 2];
    let mut n = 0;
    let st = unsafe { ndt_roots(3, c(0.0, 1.0), roots.as_mut_ptr(), 2, &mut n) };
    assert_eq!(st, NdtStatus::BufferTooSmall);
    assert!(last_error().contains('3'));
    let st = unsafe { ndt_roots(3, c(0.0, 1.0), ptr::null_mut(), 3, &mut n) };
    assert_eq!(st, NdtStatus::NullPointer);
    let mut d = NdtComplex::default();
    assert_eq!(unsafe { ndt_normalized_wronskian(ptr::null(), c(-1.0, 1.0), 0.0, &mut d) }, NdtStatus::NullPointer);
}

#[test]
fn spectral_point_is_reported() {
    let cs = sech2();
    let mut d = NdtComplex::default();
    let st = unsafe { ndt_normalized_wronskian(cs, c(2.0, 0.0), 0.0, &mut d) };
    assert_eq!(st, NdtStatus::SpectralPoint);
    assert!(!last_error().is_empty());
    // a successful call clears the message
    let st = unsafe { ndt_normalized_wronskian(cs, c(-4.0, 0.0), 0.0, &mut d) };
    assert_eq!(st, NdtStatus::Ok);
    assert!(ndt_last_error_message().is_null());
    unsafe { ndt_coefficients_free(cs) };
}

#[test]
fn wronskian_matches_closed_form() {
    let cs = sech2();
    for z in [c(-4.0, 0.0), c(-1.0, 2.0), c(3.0, -1.0)] {
        let mut d = NdtComplex::default();
        assert_eq!(unsafe { ndt_normalized_wronskian(cs, z, 0.7, &mut d) }, NdtStatus::Ok);
        let (re, im) = sech2_delta(z);
        assert!((d.re - re).hypot(d.im - im) < 1e-8, "{d:?} vs {re} {im}");
    }
    unsafe { ndt_coefficients_free(cs) };
}

#[test]
fn determinant_and_reports() {
    let cs = sech2();
    let z = c(-2.25, 0.0);
    let mut det = NdtComplex::default();
    let mut est = 0.0;
    assert_eq!(unsafe { ndt_fredholm_determinant(cs, z, &mut det, &mut est) }, NdtStatus::Ok);
    assert!((det.re - 0.2).abs() < 1e-6 && det.im.abs() < 1e-8);
    assert_eq!(unsafe { ndt_fredholm_determinant(cs, z, &mut det, ptr::null_mut()) }, NdtStatus::Ok);

    let mut rep = NdtReport::default();
    assert_eq!(unsafe { ndt_det_identity_check(cs, z, &mut rep) }, NdtStatus::Ok);
    assert!(rep.rel_err < 1e-6);
    assert_eq!(unsafe { ndt_trace_check(cs, c(-1.0, 1.0), 0.0, &mut rep) }, NdtStatus::Ok);
    assert!(rep.rel_err < 1e-6, "{rep:?}");
    unsafe { ndt_coefficients_free(cs) };
}

#[test]
fn eigenvalue_count() {
    let cs = sech2();
    let mut count = -1;
    assert_eq!(unsafe { ndt_eig_count(cs, c(-1.0, 0.0), 0.5, &mut count) }, NdtStatus::Ok);
    assert_eq!(count, 1);
    assert_eq!(unsafe { ndt_eig_count(cs, c(-3.0, 0.0), 0.5, &mut count) }, NdtStatus::Ok);
    assert_eq!(count, 0);
    assert_eq!(unsafe { ndt_eig_count(cs, c(-1.0, 0.0), -1.0, &mut count) }, NdtStatus::InvalidArgument);
    unsafe { ndt_coefficients_free(cs) };
}

#[test]
fn json_presets_and_cutoff() {
    let json = CString::new(r#"{"name": "bump", "radius": 1.5, "amplitudes": [1.0, [0.0, 0.5]]}"#).unwrap();
    let mut cs = ptr::null_mut();
    assert_eq!(unsafe { ndt_coefficients_from_json(3, json.as_ptr(), &mut cs) }, NdtStatus::Ok);
    let mut order = 0;
    assert_eq!(unsafe { ndt_coefficients_order(cs, &mut order) }, NdtStatus::Ok);
    assert_eq!(order, 3);
    let mut cut = ptr::null_mut();
    assert_eq!(unsafe { ndt_coefficients_cutoff(cs, 0.5, &mut cut) }, NdtStatus::Ok);
    let mut rep = NdtReport::default();
    assert_eq!(unsafe { ndt_trace_check(cut, c(1.0, 1.0), 0.0, &mut rep) }, NdtStatus::Ok);
    assert!(rep.rel_err < 1e-5, "{rep:?}");
    unsafe {
        ndt_coefficients_free(cut);
        ndt_coefficients_free(cs);
        ndt_coefficients_free(ptr::null_mut());
    }

    let bad = CString::new(r#"{"name": "lorentzian"}"#).unwrap();
    let mut cs = ptr::null_mut();
    assert_eq!(unsafe { ndt_coefficients_from_json(2, bad.as_ptr(), &mut cs) }, NdtStatus::InvalidArgument);
    assert!(cs.is_null());
    assert!(last_error().contains("preset"));
}

#[test]
fn unsupported_determinant() {
    let json = CString::new(r#"{"name": "gaussian", "sigma": 1.0, "amplitudes": [0.5, 0.3]}"#).unwrap();
    let mut cs = ptr::null_mut();
    assert_eq!(unsafe { ndt_coefficients_from_json(2, json.as_ptr(), &mut cs) }, NdtStatus::Ok);
    let mut det = NdtComplex::default();
    assert_eq!(unsafe { ndt_fredholm_determinant(cs, c(-1.0, 1.0), &mut det, ptr::null_mut()) }, NdtStatus::Unsupported);
    unsafe { ndt_coefficients_free(cs) };
}
