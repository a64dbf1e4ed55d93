//! C ABI over `ndtrace`.
//!
//! Coefficients live behind the opaque `NdtCoefficients` handle. Every
//! function returns an `NdtStatus`; on failure the message is available from
//! `ndt_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ndtrace::fundmat::DeltaEvaluator;
use ndtrace::verify::{self, Circle, FredholmOptions, VerificationReport};
use ndtrace::{compute_roots, CoefficientSet, Error, PresetSpec, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NdtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// `z` lies on the essential spectrum.
    SpectralPoint = 3,
    Unsupported = 4,
    /// `z` is too close to an eigenvalue.
    NearSingular = 5,
    NumericalFailure = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NdtComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for NdtComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<NdtComplex> for C64 {
    fn from(z: NdtComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Both sides of a checked identity.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NdtReport {
    pub lhs: NdtComplex,
    pub rhs: NdtComplex,
    pub abs_err: f64,
    pub rel_err: f64,
    pub truncation_estimate: f64,
    pub runtime: f64,
}

impl From<&VerificationReport> for NdtReport {
    fn from(r: &VerificationReport) -> Self {
        Self {
            lhs: r.lhs.into(),
            rhs: r.rhs.into(),
            abs_err: r.abs_err,
            rel_err: r.rel_err,
            truncation_estimate: r.truncation_estimate,
            runtime: r.runtime,
        }
    }
}

/// Opaque coefficient set.
pub struct NdtCoefficients(CoefficientSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> NdtStatus {
    match err {
        Error::SpectralPoint { .. } => NdtStatus::SpectralPoint,
        Error::InvalidPreset(_) | Error::InvalidArgument(_) | Error::Config(_) => NdtStatus::InvalidArgument,
        Error::UnsupportedCoefficients(_) => NdtStatus::Unsupported,
        Error::NearSingular { .. } => NdtStatus::NearSingular,
        _ => NdtStatus::NumericalFailure,
    }
}

struct Fail(NdtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn run(f: impl FnOnce() -> Result<(), Fail>) -> NdtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NdtStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            NdtStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(NdtStatus::NullPointer, "null pointer argument".into())
}

unsafe fn handle<'a>(cs: *const NdtCoefficients) -> Result<&'a CoefficientSet, Fail> {
    cs.as_ref().map(|h| &h.0).ok_or_else(null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

fn boxed(cs: CoefficientSet) -> *mut NdtCoefficients {
    Box::into_raw(Box::new(NdtCoefficients(cs)))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ndt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds coefficients of order `order` from a JSON preset such as
/// `{"name": "sech2", "lambda": -2}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_cs` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ndt_coefficients_from_json(order: usize, json: *const c_char, out_cs: *mut *mut NdtCoefficients) -> NdtStatus {
    run(|| {
        if json.is_null() {
            return Err(null());
        }
        let dst = out(out_cs)?;
        let text = CStr::from_ptr(json).to_str().map_err(|e| Fail(NdtStatus::InvalidArgument, e.to_string()))?;
        let spec: PresetSpec = serde_json::from_str(text).map_err(|e| Fail(NdtStatus::InvalidArgument, format!("invalid preset: {e}")))?;
        *dst = boxed(CoefficientSet::preset(order, &spec)?);
        Ok(())
    })
}

/// `v_1 = λ sech² x`, all other coefficients zero.
///
/// # Safety
/// `out_cs` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ndt_coefficients_sech2(order: usize, lambda: f64, out_cs: *mut *mut NdtCoefficients) -> NdtStatus {
    run(|| {
        let dst = out(out_cs)?;
        *dst = boxed(CoefficientSet::sech2(order, lambda)?);
        Ok(())
    })
}

/// Copy of `cs` multiplied by the indicator of `(−r, r)`.
///
/// # Safety
/// `cs` must come from this library and `out_cs` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ndt_coefficients_cutoff(cs: *const NdtCoefficients, r: f64, out_cs: *mut *mut NdtCoefficients) -> NdtStatus {
    run(|| {
        let cs = handle(cs)?;
        let dst = out(out_cs)?;
        *dst = boxed(cs.cutoff(r)?);
        Ok(())
    })
}

/// # Safety
/// `cs` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ndt_coefficients_free(cs: *mut NdtCoefficients) {
    if !cs.is_null() {
        drop(Box::from_raw(cs));
    }
}

/// # Safety
/// `cs` must come from this library and `order` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ndt_coefficients_order(cs: *const NdtCoefficients, order: *mut usize) -> NdtStatus {
    run(|| {
        *out(order)? = handle(cs)?.order;
        Ok(())
    })
}

/// Roots of `ζ^N = i^N z`, ordered by decreasing real part. Writes `order`
/// roots to `roots` (capacity `cap`) and the number with positive real part to
/// `n_positive`.
///
/// # Safety
/// `roots` must hold `cap` elements; `n_positive` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ndt_roots(order: usize, z: NdtComplex, roots: *mut NdtComplex, cap: usize, n_positive: *mut usize) -> NdtStatus {
    run(|| {
        if roots.is_null() {
            return Err(null());
        }
        let n = out(n_positive)?;
        let rs = compute_roots(order, z.into())?;
        if cap < order {
            return Err(Fail(NdtStatus::BufferTooSmall, format!("need room for {order} roots, got {cap}")));
        }
        let dst = std::slice::from_raw_parts_mut(roots, order);
        for (d, r) in dst.iter_mut().zip(&rs.roots) {
            *d = (*r).into();
        }
        *n = rs.n;
        Ok(())
    })
}

/// `Δ(x, z) = W(x, z)/W₀(z)`.
///
/// # Safety
/// `cs` must come from this library and `delta` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ndt_normalized_wronskian(cs: *const NdtCoefficients, z: NdtComplex, x: f64, delta: *mut NdtComplex) -> NdtStatus {
    run(|| {
        let cs = handle(cs)?;
        let dst = out(delta)?;
        let z = C64::from(z);
        let value = if cs.is_zero() {
            compute_roots(cs.order, z)?;
            C64::new(1.0, 0.0)
        } else {
            DeltaEvaluator::new(cs.order, cs, &[z], x)?.delta(z)?
        };
        *dst = value.into();
        Ok(())
    })
}

/// Nyström value of `Det(I + V R₀(z))`; requires `v_N = 0`.
///
/// # Safety
/// `cs` must come from this library; `det` must be valid, `estimate` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ndt_fredholm_determinant(cs: *const NdtCoefficients, z: NdtComplex, det: *mut NdtComplex, estimate: *mut f64) -> NdtStatus {
    run(|| {
        let cs = handle(cs)?;
        let dst = out(det)?;
        let fd = verify::fredholm_determinant(cs, z.into(), &FredholmOptions::default())?;
        *dst = fd.value.into();
        if let Some(e) = estimate.as_mut() {
            *e = fd.estimate;
        }
        Ok(())
    })
}

/// Trace formula at `z`. `window <= 0` selects the default window.
///
/// # Safety
/// `cs` must come from this library and `report` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ndt_trace_check(cs: *const NdtCoefficients, z: NdtComplex, window: f64, report: *mut NdtReport) -> NdtStatus {
    run(|| {
        let cs = handle(cs)?;
        let dst = out(report)?;
        let window = (window > 0.0).then_some(window);
        *dst = (&verify::trace_check(cs, z.into(), window)?).into();
        Ok(())
    })
}

/// Nyström determinant against `Δ(0, z)`.
///
/// # Safety
/// `cs` must come from this library and `report` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ndt_det_identity_check(cs: *const NdtCoefficients, z: NdtComplex, report: *mut NdtReport) -> NdtStatus {
    run(|| {
        let cs = handle(cs)?;
        let dst = out(report)?;
        *dst = (&verify::det_identity_check(cs, z.into())?).into();
        Ok(())
    })
}

/// Number of zeros of `Δ` inside the circle `|z − center| = radius`.
///
/// # Safety
/// `cs` must come from this library and `count` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ndt_eig_count(cs: *const NdtCoefficients, center: NdtComplex, radius: f64, count: *mut i64) -> NdtStatus {
    run(|| {
        let cs = handle(cs)?;
        let dst = out(count)?;
        *dst = verify::eig_count(cs, &Circle { center: center.into(), radius })?.count;
        Ok(())
    })
}
