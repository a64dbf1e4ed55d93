//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use ndtrace::C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `κ = √(−z)` with `Re κ > 0`.
pub fn kappa(z: C64) -> C64 {
    (-z).sqrt()
}

/// Classical value of `Δ` for `v₁ = −2 sech²`: `(κ−1)/(κ+1)`.
pub fn sech2_delta(z: C64) -> C64 {
    let k = kappa(z);
    (k - 1.0) / (k + 1.0)
}

/// `−Δ̇/Δ` for the same potential, differentiated by hand:
/// `d log Δ/dκ = 2/(κ²−1)` and `dκ/dz = −1/(2κ)`.
pub fn sech2_trace(z: C64) -> C64 {
    let k = kappa(z);
    1.0 / (k * (k * k - 1.0))
}

/// Free Green function of `−∂² − z` at `z = −κ²`.
pub fn free_green(kappa: f64, x: f64, y: f64) -> f64 {
    (-kappa * (x - y).abs()).exp() / (2.0 * kappa)
}

/// Fourier second-derivative matrix on `n` equispaced points of the
/// periodic interval `[−l, l)`.
pub fn fourier_d2(n: usize, l: f64) -> (Vec<f64>, DMatrix<f64>) {
    assert!(n.is_multiple_of(2));
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let scale = (std::f64::consts::PI / l).powi(2);
    let xs: Vec<f64> = (0..n).map(|j| -l + 2.0 * l * j as f64 / n as f64).collect();
    let d2 = DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            (-std::f64::consts::PI.powi(2) / (3.0 * h * h) - 1.0 / 6.0) * scale
        } else {
            let d = j as f64 - k as f64;
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            -sign / (2.0 * (d * h / 2.0).sin().powi(2)) * scale
        }
    });
    (xs, d2)
}

/// Eigenvalues of `−∂² + v` discretized spectrally with `n` points on
/// `[−l, l)`.
pub fn schroedinger_eigenvalues(v: impl Fn(f64) -> f64, n: usize, l: f64) -> Vec<f64> {
    let (xs, d2) = fourier_d2(n, l);
    let mut h = -d2;
    for (j, x) in xs.iter().enumerate() {
        h[(j, j)] += v(*x);
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn sech2_potential(lambda: f64) -> impl Fn(f64) -> f64 + Copy {
    move |x: f64| lambda / x.cosh().powi(2)
}

/// Number of oracle eigenvalues inside the disc `|z − center| < radius`.
pub fn count_inside(eigs: &[f64], center: C64, radius: f64) -> usize {
    eigs.iter().filter(|&&e| (c(e, 0.0) - center).norm() < radius).count()
}

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// `Σ 1/(λ_k − z) − Σ 1/(μ_k − z)` over the discretized `H` and `H₀`, from
/// spectra at `n` and `2n` points.
pub struct DiscreteTrace {
    coarse: (Vec<f64>, Vec<f64>),
    fine: (Vec<f64>, Vec<f64>),
}

impl DiscreteTrace {
    pub fn new(v: impl Fn(f64) -> f64 + Copy, n: usize, l: f64) -> Self {
        let pair = |n: usize| (schroedinger_eigenvalues(v, n, l), schroedinger_eigenvalues(|_| 0.0, n, l));
        Self { coarse: pair(n), fine: pair(2 * n) }
    }

    /// The trace extrapolated in `n`: the neglected high modes contribute
    /// `O(n^{-3})`.
    pub fn at(&self, z: C64) -> C64 {
        let tr = |(h, h0): &(Vec<f64>, Vec<f64>)| -> C64 {
            h.iter().map(|e| 1.0 / (c(*e, 0.0) - z)).sum::<C64>() - h0.iter().map(|e| 1.0 / (c(*e, 0.0) - z)).sum::<C64>()
        };
        let (a, b) = (tr(&self.coarse), tr(&self.fine));
        b + (b - a) / 7.0
    }
}
