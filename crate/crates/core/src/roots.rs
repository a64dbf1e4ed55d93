//! Characteristic roots of `ζ^N = i^N z`, their ordering, eigenvectors of the
//! companion matrix `L₀(z)`, dual basis and spectral projections.
//!
//! Indices are zero-based: roots `0..n` have positive real part, roots
//! `n..N` negative real part.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{i_pow, inverse, CMat, CVec, C64};

/// Default floor for `|Re ζ| / |ζ|`.
pub const DEFAULT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct RootSystem {
    pub order: usize,
    pub z: C64,
    pub roots: Vec<C64>,
    pub n: usize,
    pub eigvecs: Vec<CVec>,
    /// `p_j*` with `⟨p_k, p_j*⟩ = Σ_i p_k[i] conj(p_j*[i]) = δ_{jk}`.
    pub dualvecs: Vec<CVec>,
    pub vandermonde_det: C64,
    vand: CMat,
    vinv: CMat,
}

pub fn compute_roots(order: usize, z: C64) -> Result<RootSystem> {
    compute_roots_with_floor(order, z, DEFAULT_FLOOR)
}

pub fn compute_roots_with_floor(order: usize, z: C64, floor: f64) -> Result<RootSystem> {
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    if !z.is_finite() || z.norm() == 0.0 {
        return Err(Error::SpectralPoint { z, detail: "z must be finite and nonzero".into() });
    }
    let w = i_pow(order) * z;
    let modulus = w.norm().powf(1.0 / order as f64);
    let base = w.arg();
    let mut roots: Vec<C64> = (0..order)
        .map(|k| C64::from_polar(modulus, (base + 2.0 * PI * k as f64) / order as f64))
        .collect();
    for r in &roots {
        if r.re.abs() < floor * r.norm() {
            return Err(Error::SpectralPoint {
                z,
                detail: format!("root {r} has |Re ζ| below {floor:e}·|ζ|; z lies on the essential spectrum"),
            });
        }
    }
    roots.sort_by(|a, b| root_order(*a, *b));
    let n = roots.iter().filter(|r| r.re > 0.0).count();

    let vand = CMat::from_fn(order, order, |i, j| roots[j].powu(i as u32));
    let vinv = inverse(&vand)?;
    let eigvecs = (0..order).map(|j| vand.column(j).into_owned()).collect();
    let dualvecs = (0..order)
        .map(|j| CVec::from_iterator(order, vinv.row(j).iter().map(|v| v.conj())))
        .collect();
    let mut det = C64::new(1.0, 0.0);
    for j in 0..order {
        for k in j + 1..order {
            det *= roots[k] - roots[j];
        }
    }
    Ok(RootSystem { order, z, roots, n, eigvecs, dualvecs, vandermonde_det: det, vand, vinv })
}

fn root_order(a: C64, b: C64) -> Ordering {
    match (a.re > 0.0, b.re > 0.0) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        // descending Re on the right, ascending |Re| on the left: both are
        // descending Re
        _ => b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)),
    }
}

impl RootSystem {
    pub fn kappa(&self, j: usize) -> f64 {
        self.roots[j].re
    }

    /// `P_j = ⟨·, p_j*⟩ p_j`.
    pub fn projection(&self, j: usize) -> CMat {
        assert!(j < self.order, "root index {j} out of range");
        let p = self.vand.column(j);
        let row = self.vinv.row(j);
        p * row
    }

    /// `P_j e_N`: the last column of the projection, `p_j / ∏_{k≠j}(ζ_j − ζ_k)`.
    pub fn projection_last_column(&self, j: usize) -> CVec {
        self.vand.column(j) * self.vinv[(j, self.order - 1)]
    }

    /// `1 / ∏_{k≠j}(ζ_j − ζ_k)`.
    pub fn coef(&self, j: usize) -> C64 {
        self.vinv[(j, self.order - 1)]
    }

    /// Companion matrix with superdiagonal ones and `i^N z` in the lower-left
    /// corner.
    pub fn l0_matrix(&self) -> CMat {
        let n = self.order;
        let mut m = CMat::zeros(n, n);
        for i in 0..n - 1 {
            m[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        m[(n - 1, 0)] += i_pow(n) * self.z;
        m
    }

    /// Matrix with columns `p_j`.
    pub fn vandermonde(&self) -> &CMat {
        &self.vand
    }

    /// Inverse of [`Self::vandermonde`]; its rows are the conjugated dual vectors.
    pub fn vandermonde_inverse(&self) -> &CMat {
        &self.vinv
    }

    /// `log ∏_{j<k}(ζ_k − ζ_j)` as a sum of logarithms.
    pub fn log_vandermonde_det(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..self.order {
            for k in j + 1..self.order {
                acc += (self.roots[k] - self.roots[j]).ln();
            }
        }
        acc
    }

    pub fn root_sum(&self) -> C64 {
        self.roots.iter().sum()
    }

    /// `ρ₊ = min_{j<n} Re ζ_j` (zero when `n = 0`).
    pub fn rho_plus(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.roots[..self.n].iter().map(|r| r.re).fold(f64::INFINITY, f64::min)
    }

    /// `ρ₋ = min_{j≥n} |Re ζ_j|` (zero when `n = N`).
    pub fn rho_minus(&self) -> f64 {
        if self.n == self.order {
            return 0.0;
        }
        self.roots[self.n..].iter().map(|r| r.re.abs()).fold(f64::INFINITY, f64::min)
    }

    /// True when two roots share their real part up to `tol·|ζ|`.
    pub fn on_critical_ray(&self, tol: f64) -> bool {
        let scale = self.roots[0].norm();
        (0..self.order).any(|j| (j + 1..self.order).any(|k| (self.roots[j].re - self.roots[k].re).abs() < tol * scale))
    }

    /// Eigenvalues of the companion matrix from a general eigensolve, sorted
    /// like `roots`; an independent cross-check of the closed form.
    pub fn companion_eigenvalues(&self) -> Vec<C64> {
        let mut ev: Vec<C64> = self.l0_matrix().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default();
        ev.sort_by(|a, b| root_order(*a, *b));
        ev
    }

    /// `Σ_j ⟨v, p_j*⟩ p_j`.
    pub fn reconstruct(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.order);
        for j in 0..self.order {
            let c: C64 = v.iter().zip(self.dualvecs[j].iter()).map(|(a, b)| a * b.conj()).sum();
            out += &self.eigvecs[j] * c;
        }
        out
    }
}
