//! Small dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// `i^n` computed exactly.
pub fn i_pow(n: usize) -> C64 {
    match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Logarithm of the determinant, accumulated from the LU pivots so that it
/// survives entries far outside the f64 exponent range.
pub fn log_det(m: &CMat) -> Result<C64> {
    let n = m.nrows();
    let lu = m.clone().lu();
    let u = lu.u();
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let d = u[(k, k)];
        if d == C64::new(0.0, 0.0) || !d.is_finite() {
            return Err(Error::SingularSystem("zero pivot in log-determinant".into()));
        }
        acc += d.ln();
    }
    if lu.p().determinant::<f64>() < 0.0 {
        acc += C64::new(0.0, std::f64::consts::PI);
    }
    Ok(acc)
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularSystem("matrix is not invertible".into()))
}

/// Induced 1-norm (max column sum).
pub fn norm1(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|c| m.column(c).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Induced infinity norm (max row sum).
pub fn norm_inf(m: &CMat) -> f64 {
    (0..m.nrows())
        .map(|r| m.row(r).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// 1-norm condition number given the inverse.
pub fn cond1(m: &CMat, inv: &CMat) -> f64 {
    norm1(m) * norm1(inv)
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// `exp(z)`, flushed to zero below the f64 underflow threshold.
pub fn cexp(z: C64) -> C64 {
    if z.re < -745.0 {
        C64::new(0.0, 0.0)
    } else {
        z.exp()
    }
}
