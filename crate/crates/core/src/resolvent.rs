//! Matrix and scalar resolvent kernels built from Jost frames, the free
//! kernel in closed form, application of the resolvent, and diagonal
//! integrals.

use std::time::Instant;

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::fundmat::{z_derivative, z_step, FundamentalFrame, JostSet};
use crate::jost::{JostLayout, Side};
use crate::linalg::{cexp, i_pow, CMat, CVec, C64};
use crate::quadrature::{ExpVolterra, PanelGrid};
use crate::roots::{compute_roots, RootSystem};
use crate::verify::{Identity, VerificationReport};

/// Kernel of `(H₀ − z)^{-1}` from the Vandermonde inverse.
#[derive(Debug, Clone)]
pub struct FreeKernel {
    pub rs: RootSystem,
}

impl FreeKernel {
    pub fn new(rs: &RootSystem) -> Self {
        Self { rs: rs.clone() }
    }

    /// `∂_x^k R₀(x, y)`; on the diagonal the `x > y` limit is used.
    pub fn derivative(&self, k: usize, x: f64, y: f64) -> C64 {
        let rs = &self.rs;
        let i_n = i_pow(rs.order);
        let t = x - y;
        let (range, sign) = if t < 0.0 { (0..rs.n, -1.0) } else { (rs.n..rs.order, 1.0) };
        let mut acc = C64::new(0.0, 0.0);
        for j in range {
            acc += rs.coef(j) * rs.roots[j].powu(k as u32) * cexp(rs.roots[j] * t);
        }
        acc * i_n * sign
    }

    pub fn scalar(&self, x: f64, y: f64) -> C64 {
        self.derivative(0, x, y)
    }

    /// `R₀(y, y)`, independent of `y`.
    pub fn diagonal(&self) -> C64 {
        self.derivative(0, 0.0, 0.0)
    }

    /// Matrix kernel `−U₀(x)P₊G₀(y)` (`x < y`) or `U₀(x)P₋G₀(y)` (`x ≥ y`).
    pub fn matrix(&self, x: f64, y: f64) -> CMat {
        let rs = &self.rs;
        let t = x - y;
        let (range, sign) = if t < 0.0 { (0..rs.n, -1.0) } else { (rs.n..rs.order, 1.0) };
        let mut m = CMat::zeros(rs.order, rs.order);
        for j in range {
            m += rs.projection(j) * (cexp(rs.roots[j] * t) * sign);
        }
        m
    }
}

/// `R(x, y)` from the frames at `x` and `y`. For `x == y` the `x > y` limit
/// `R(x, x − 0)` is returned.
pub fn kernel_from_frames(fx: &FundamentalFrame, fy: &FundamentalFrame, n: usize) -> CMat {
    let big_n = fx.wr.nrows();
    let t = fx.x - fy.x;
    let (range, sign) = if t < 0.0 { (0..n, -1.0) } else { (n..big_n, 1.0) };
    let mut m = CMat::zeros(big_n, big_n);
    for j in range {
        let f = cexp(fx.zeta[j] * t) * sign;
        m += fx.wr.column(j) * fy.wr_inv.row(j) * f;
    }
    m
}

/// Resolvent kernel of `H` at a fixed `z`.
#[derive(Debug, Clone)]
pub struct ResolventKernel {
    pub rs: RootSystem,
    pub cs: CoefficientSet,
    pub layout: JostLayout,
    pub free: FreeKernel,
}

fn sorted_unique(points: &[f64]) -> Vec<f64> {
    let mut p = points.to_vec();
    p.sort_by(f64::total_cmp);
    p.dedup();
    p
}

impl ResolventKernel {
    pub fn new(cs: &CoefficientSet, z: C64) -> Result<Self> {
        let rs = compute_roots(cs.order, z)?;
        let layout = JostLayout::new(&rs, cs)?;
        Ok(Self { free: FreeKernel::new(&rs), rs, cs: cs.clone(), layout })
    }

    pub fn with_layout(cs: &CoefficientSet, z: C64, layout: JostLayout) -> Result<Self> {
        let rs = compute_roots(cs.order, z)?;
        Ok(Self { free: FreeKernel::new(&rs), rs, cs: cs.clone(), layout })
    }

    pub fn z(&self) -> C64 {
        self.rs.z
    }

    /// Jost solutions at the given points (sorted and deduplicated).
    pub fn jost_set(&self, points: &[f64]) -> Result<JostSet> {
        JostSet::compute(&self.rs, &self.cs, &self.layout, &sorted_unique(points))
    }

    /// Frames at `points`, in the given order.
    pub fn frames(&self, points: &[f64]) -> Result<Vec<FundamentalFrame>> {
        let set = self.jost_set(points)?;
        points.iter().map(|&x| set.frame_at(x)).collect()
    }

    pub fn matrix_kernel(&self, x: f64, y: f64) -> Result<CMat> {
        let f = self.frames(&[x, y])?;
        Ok(kernel_from_frames(&f[0], &f[1], self.rs.n))
    }

    /// `(R(x, x − 0), R(x, x + 0))`.
    pub fn diagonal_limits(&self, x: f64) -> Result<(CMat, CMat)> {
        let f = self.frames(&[x])?;
        let f = &f[0];
        let n = self.rs.n;
        let big_n = self.rs.order;
        let mut below = CMat::zeros(big_n, big_n);
        let mut above = CMat::zeros(big_n, big_n);
        for j in 0..big_n {
            let term = f.wr.column(j) * f.wr_inv.row(j);
            if j < n {
                above -= term;
            } else {
                below += term;
            }
        }
        Ok((below, above))
    }

    /// `R(x, y) = i^N R_{1,N}(x, y)`.
    pub fn scalar_kernel(&self, x: f64, y: f64) -> Result<C64> {
        Ok(self.matrix_kernel(x, y)?[(0, self.rs.order - 1)] * i_pow(self.rs.order))
    }

    /// `∂_x^k R(x, y)` for `k < N`: row `k` of the matrix kernel, column `N`.
    pub fn scalar_kernel_derivative(&self, k: usize, x: f64, y: f64) -> Result<C64> {
        Ok(self.matrix_kernel(x, y)?[(k, self.rs.order - 1)] * i_pow(self.rs.order))
    }

    /// Scalar kernel on a tensor grid, rows indexed by `xs`.
    pub fn scalar_kernel_grid(&self, xs: &[f64], ys: &[f64]) -> Result<CMat> {
        let all: Vec<f64> = xs.iter().chain(ys).copied().collect();
        let set = self.jost_set(&all)?;
        let fx: Vec<_> = xs.iter().map(|&x| set.frame_at(x)).collect::<Result<_>>()?;
        let fy: Vec<_> = ys.iter().map(|&y| set.frame_at(y)).collect::<Result<_>>()?;
        let i_n = i_pow(self.rs.order);
        let last = self.rs.order - 1;
        Ok(CMat::from_fn(xs.len(), ys.len(), |i, k| {
            let fx = &fx[i];
            let fy = &fy[k];
            let t = fx.x - fy.x;
            let (range, sign) = if t < 0.0 { (0..self.rs.n, -1.0) } else { (self.rs.n..self.rs.order, 1.0) };
            let mut acc = C64::new(0.0, 0.0);
            for j in range {
                acc += fx.wr[(0, j)] * fy.wr_inv[(j, last)] * cexp(fx.zeta[j] * t);
            }
            acc * sign * i_n
        }))
    }

    /// `R(y, y) − R₀(y, y)` at each point (`x > y` limit).
    pub fn diagonal_difference(&self, points: &[f64]) -> Result<Vec<C64>> {
        let set = self.jost_set(points)?;
        let r0 = self.free.diagonal();
        points.iter().map(|&y| Ok(diag_value(&set.frame_at(y)?, self.rs.n) - r0)).collect()
    }
}

/// `R(y, y − 0)` scalar value from a frame.
fn diag_value(f: &FundamentalFrame, n: usize) -> C64 {
    let big_n = f.wr.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for j in n..big_n {
        acc += f.wr[(0, j)] * f.wr_inv[(j, big_n - 1)];
    }
    acc * i_pow(big_n)
}

/// Result of applying the resolvent to a sampled function.
#[derive(Debug, Clone)]
pub struct ResolventApplication {
    /// `(φ, φ', …, φ^{(N−1)})` at the grid nodes.
    pub phi: Vec<CVec>,
    /// `max |(H − z)φ − f| / max |f|` over the nodes.
    pub defect: f64,
}

impl ResolventApplication {
    pub fn values(&self) -> Vec<C64> {
        self.phi.iter().map(|v| v[0]).collect()
    }
}

/// `φ(x) = ∫ R(x, y) f(y) dy` with `f` given at the nodes of `grid` and
/// negligible outside it.
pub fn apply_resolvent(rk: &ResolventKernel, grid: &PanelGrid, f: &[C64]) -> Result<ResolventApplication> {
    if f.len() != grid.len() {
        return Err(Error::InvalidArgument("sample count does not match the grid".into()));
    }
    let big_n = rk.rs.order;
    let n = rk.rs.n;
    let m = grid.len();
    if f.iter().all(|v| v.norm() == 0.0) {
        return Ok(ResolventApplication { phi: vec![CVec::zeros(big_n); m], defect: 0.0 });
    }
    let set = rk.jost_set(&grid.nodes)?;
    let frames: Vec<FundamentalFrame> = (0..m).map(|i| set.frame_at(grid.nodes[i])).collect::<Result<_>>()?;
    let i_n = i_pow(big_n);
    let mut phi = vec![CVec::zeros(big_n); m];
    for j in 0..big_n {
        let h: Vec<C64> = (0..m).map(|i| frames[i].wr_inv[(j, big_n - 1)] * f[i]).collect();
        let ev = ExpVolterra::new(grid, rk.rs.roots[j]);
        let (integral, sign) = if j < n { (ev.apply_right(grid, &h), -i_n) } else { (ev.apply_left(grid, &h), i_n) };
        for i in 0..m {
            phi[i] += frames[i].wr.column(j) * (integral[i] * sign);
        }
    }
    let defect = resolvent_defect(rk, grid, &phi, f);
    Ok(ResolventApplication { phi, defect })
}

/// `max |(H − z)φ − f| / max |f|` using spectral differentiation of the
/// top component and the vector identities `φ_k' = φ_{k+1}`.
fn resolvent_defect(rk: &ResolventKernel, grid: &PanelGrid, phi: &[CVec], f: &[C64]) -> f64 {
    let big_n = rk.rs.order;
    let m = grid.len();
    let i_n = i_pow(big_n);
    let fmax = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    let mut v = vec![C64::new(0.0, 0.0); big_n];
    for k in 0..big_n {
        let comp: Vec<C64> = phi.iter().map(|p| p[k]).collect();
        let d = grid.differentiate(&comp);
        for i in 0..m {
            let r = if k + 1 < big_n {
                d[i] - phi[i][k + 1]
            } else {
                rk.cs.eval_all(grid.nodes[i], &mut v);
                let lower: C64 = (0..big_n).map(|q| v[q] * phi[i][q]).sum();
                d[i] / i_n + lower - rk.rs.z * phi[i][0] - f[i]
            };
            worst = worst.max(r.norm());
        }
    }
    worst / fmax.max(1e-300)
}

/// `∫_{x1}^{x2} (R(y,y) − R₀(y,y)) dy` with tail extrapolations.
#[derive(Debug, Clone, Copy)]
pub struct DiagonalIntegral {
    pub value: C64,
    pub quad_error: f64,
    /// `∫_{−∞}^{x1}` with the coefficients neglected there.
    pub tail_left: C64,
    /// `∫_{x2}^{∞}` with the coefficients neglected there.
    pub tail_right: C64,
    pub truncation_estimate: f64,
}

impl DiagonalIntegral {
    pub fn extrapolated(&self) -> C64 {
        self.value + self.tail_left + self.tail_right
    }
}

fn diagonal_panels(rk: &ResolventKernel, x1: f64, x2: f64, halve: bool) -> PanelGrid {
    let scale = rk.rs.roots[0].norm().max(1e-3);
    let mut h = 1f64.min(rk.cs.length_scale()).min(4.0 / scale);
    if halve {
        h /= 2.0;
    }
    let count = (((x2 - x1) / h).ceil() as usize).max(1);
    let mut edges: Vec<f64> = (0..=count).map(|k| x1 + (x2 - x1) * k as f64 / count as f64).collect();
    edges.extend(rk.cs.breakpoints().iter().copied().filter(|&b| b > x1 && b < x2));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    PanelGrid::new(edges, 12)
}

fn diagonal_quadrature<F: Fn(&[f64]) -> Result<Vec<C64>>>(rk: &ResolventKernel, x1: f64, x2: f64, f: F) -> Result<(C64, f64, Vec<C64>)> {
    let coarse = diagonal_panels(rk, x1, x2, false);
    let fine = diagonal_panels(rk, x1, x2, true);
    let mut pts: Vec<f64> = coarse.nodes.iter().chain(&fine.nodes).copied().collect();
    pts.push(x1);
    pts.push(x2);
    let pts = sorted_unique(&pts);
    let vals = f(&pts)?;
    let lookup = |x: f64| vals[pts.binary_search_by(|p| p.total_cmp(&x)).unwrap()];
    let vc: Vec<C64> = coarse.nodes.iter().map(|&x| lookup(x)).collect();
    let vf: Vec<C64> = fine.nodes.iter().map(|&x| lookup(x)).collect();
    let ic = coarse.integrate(&vc);
    let ifn = fine.integrate(&vf);
    Ok((ifn, (ifn - ic).norm(), vec![lookup(x1), lookup(x2)]))
}

/// Integral of `R(y,y) − R₀(y,y)` beyond `f.x`, assuming the coefficients
/// vanish there. With `V = 0` the projector `P₊(y) = U E₊ U^{-1}` evolves
/// freely, so in eigen-coordinates its entries are `Q_{kl} e^{(ζ_k−ζ_l)(y−x)}`
/// and each decaying entry integrates in closed form. Returns the tail and
/// the size of the entries that would not decay.
fn free_tail(rs: &RootSystem, f: &FundamentalFrame, towards_plus: bool) -> (C64, f64) {
    let big_n = rs.order;
    let mut p = CMat::zeros(big_n, big_n);
    for j in rs.n..big_n {
        p += f.wr.column(j) * f.wr_inv.row(j);
    }
    let q = rs.vandermonde_inverse() * p * rs.vandermonde();
    let mut tail = C64::new(0.0, 0.0);
    let mut residual = 0.0;
    for k in 0..big_n {
        for l in 0..big_n {
            let mut d = q[(k, l)];
            if k == l && k >= rs.n {
                d -= 1.0;
            }
            let term = d * rs.coef(l);
            let c = rs.roots[k] - rs.roots[l];
            let floor = 1e-12 * rs.roots[0].norm();
            if towards_plus && c.re < -floor {
                tail -= term / c;
            } else if !towards_plus && c.re > floor {
                tail += term / c;
            } else {
                residual += term.norm();
            }
        }
    }
    (tail * i_pow(big_n), residual)
}

/// `∫_{x1}^{x2} (R(y,y) − R₀(y,y)) dy` by composite Gauss-Legendre at two
/// resolutions. The tails beyond the ends are integrated exactly under the
/// assumption that the coefficients vanish there.
pub fn diagonal_difference_integral(rk: &ResolventKernel, x1: f64, x2: f64) -> Result<DiagonalIntegral> {
    if !(x1 < x2) {
        return Err(Error::InvalidArgument(format!("need x1 < x2, got {x1} and {x2}")));
    }
    let (value, quad_error, _) = diagonal_quadrature(rk, x1, x2, |p| rk.diagonal_difference(p))?;
    let ends = rk.frames(&[x1, x2])?;
    let (tail_left, res_left) = free_tail(&rk.rs, &ends[0], false);
    let (tail_right, res_right) = free_tail(&rk.rs, &ends[1], true);
    let rho = rk.rs.rho_plus() + rk.rs.rho_minus();
    let mass = rk.cs.l1_tail(Side::Minus, x1)? + rk.cs.l1_tail(Side::Plus, x2)?;
    let truncation_estimate = quad_error + (res_left + res_right) / rho.max(1e-300) + mass * rk.free.diagonal().norm();
    Ok(DiagonalIntegral { value, quad_error, tail_left, tail_right, truncation_estimate })
}

/// `Σ_l g_{j,l}(x) u̇_{l,j}(x)` for every `j`, from the rescaled frame and
/// `ẇ_j`.
fn g_udot(rs: &RootSystem, f: &FundamentalFrame, wdot: &[CVec]) -> Vec<C64> {
    (0..rs.order)
        .map(|j| {
            let zdot = rs.roots[j] / (rs.order as f64 * rs.z);
            let dot: C64 = (0..rs.order).map(|l| f.wr_inv[(j, l)] * wdot[j][l]).sum();
            zdot * f.x + dot
        })
        .collect()
}

/// Checks `∫_{x1}^{x2} R(y,y) dy = −Σ_j g_j·u̇_j (x) + Σ_{j≥n} g_j·u̇_j (x2) + Σ_{j<n} g_j·u̇_j (x1)`.
pub fn resint_identity_check(rk: &ResolventKernel, x1: f64, x2: f64, x: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    if rk.cs.support_radius.is_none() {
        return Err(Error::UnsupportedCoefficients("the finite-interval identity is checked for compactly supported coefficients".into()));
    }
    if !(x1 < x2) {
        return Err(Error::InvalidArgument(format!("need x1 < x2, got {x1} and {x2}")));
    }
    let r0 = rk.free.diagonal();
    let (lhs, quad_error, _) = diagonal_quadrature(rk, x1, x2, |p| Ok(rk.diagonal_difference(p)?.into_iter().map(|v| v + r0).collect()))?;

    let pts = sorted_unique(&[x1, x2, x]);
    let z = rk.rs.z;
    let big_n = rk.rs.order;
    let reference = JostSet::compute(&rk.rs, &rk.cs, &rk.layout, &pts)?;
    let flat = |s: C64| -> Result<Vec<C64>> {
        let rs = compute_roots(big_n, s)?;
        let set = JostSet::compute_pinned(&rs, &rk.cs, &rk.layout, &reference)?;
        Ok(set.solutions.iter().flat_map(|sol| sol.w_samples.iter().flat_map(|w| w.iter().copied())).collect())
    };
    let der = z_derivative(flat, z, z_step(big_n, z), 1e-8)?;
    let np = pts.len();
    let wdot_at = |i: usize| -> Vec<CVec> {
        (0..big_n)
            .map(|j| CVec::from_iterator(big_n, (0..big_n).map(|l| der.value[(j * np + i) * big_n + l])))
            .collect()
    };
    let term = |xx: f64| -> Result<Vec<C64>> {
        let i = reference.index_of(xx)?;
        Ok(g_udot(&rk.rs, &reference.frame(i)?, &wdot_at(i)))
    };
    let n = rk.rs.n;
    let tx = term(x)?;
    let t1 = term(x1)?;
    let t2 = term(x2)?;
    let rhs = -tx.iter().sum::<C64>() + t2[n..].iter().sum::<C64>() + t1[..n].iter().sum::<C64>();
    let mut report = VerificationReport::new(Identity::Resint, vec![z], lhs, rhs, quad_error + der.error * (x2 - x1).abs().max(1.0));
    if !der.converged {
        report.flags.push("z-derivative did not converge".into());
    }
    report.runtime = start.elapsed().as_secs_f64();
    Ok(report)
}
