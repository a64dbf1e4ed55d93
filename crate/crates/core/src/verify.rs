//! End-to-end checks: the trace formula, the perturbation determinant
//! identity, large-`z` behaviour of `Δ`, and eigenvalue counting.
//!
//! The two sides of every identity come from separate code paths: diagonal
//! integrals of the resolvent kernel against z-derivatives of the Wronskian,
//! and a Nyström determinant against the Wronskian.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::fundmat::{normalized_wronskian, z_derivative, z_step, DeltaEvaluator, JostSet, WronskianValue};
use crate::jost::{JostLayout, Side};
use crate::linalg::{i_pow, rel_err, CMat, C64};
use crate::quadrature::PanelGrid;
use crate::resolvent::{diagonal_difference_integral, FreeKernel, ResolventKernel};
use crate::roots::compute_roots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    TraceFormula,
    DetIdentity,
    Resint,
    LargeZ,
    EigCount,
    WronskianXLaw,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::TraceFormula => "trace_formula",
            Identity::DetIdentity => "det_identity",
            Identity::Resint => "resint",
            Identity::LargeZ => "large_z",
            Identity::EigCount => "eig_count",
            Identity::WronskianXLaw => "wronskian_x_law",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: Identity,
    pub z: Vec<C64>,
    pub lhs: C64,
    pub rhs: C64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub truncation_estimate: f64,
    /// Wall-clock seconds; not part of the deterministic outputs.
    pub runtime: f64,
    #[serde(default)]
    pub flags: Vec<String>,
}

impl VerificationReport {
    pub fn new(identity: Identity, z: Vec<C64>, lhs: C64, rhs: C64, truncation_estimate: f64) -> Self {
        Self {
            identity,
            z,
            lhs,
            rhs,
            abs_err: (lhs - rhs).norm(),
            rel_err: rel_err(lhs, rhs),
            truncation_estimate,
            runtime: 0.0,
            flags: Vec::new(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lhs.is_finite() && self.rhs.is_finite() && self.abs_err.is_finite() && self.rel_err.is_finite() && self.truncation_estimate.is_finite()
    }
}

/// Half-width of the default trace window: the coefficients carry less than
/// `1e-13` of their `L¹` mass outside it.
pub fn default_window(cs: &CoefficientSet) -> Result<f64> {
    Ok(cs.effective_radius(1e-13)?.max(1.0))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TraceOptions {
    /// Half-width `A` of the quadrature window; see [`default_window`].
    pub window: Option<f64>,
    /// Initial step of the z-differencing; see [`z_step`].
    pub z_step: Option<f64>,
}

/// Compares `∫(R − R₀)(y, y) dy` over `[−A, A]` plus the free tails with
/// `−Δ̇(z)/Δ(z)` at `x = 0`.
pub fn trace_check(cs: &CoefficientSet, z: C64, window: Option<f64>) -> Result<VerificationReport> {
    trace_check_with(cs, z, &TraceOptions { window, z_step: None })
}

pub fn trace_check_with(cs: &CoefficientSet, z: C64, opts: &TraceOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    compute_roots(cs.order, z)?;
    if cs.is_zero() {
        return Ok(VerificationReport::new(Identity::TraceFormula, vec![z], C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.0));
    }
    let a = match opts.window {
        Some(a) if a > 0.0 => a,
        Some(a) => return Err(Error::InvalidArgument(format!("window must be positive, got {a}"))),
        None => default_window(cs)?,
    };
    let rk = ResolventKernel::new(cs, z)?;
    let di = diagonal_difference_integral(&rk, -a, a)?;
    let lhs = di.extrapolated();

    let h = opts.z_step.unwrap_or_else(|| z_step(cs.order, z));
    let stencil: Vec<C64> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|k| z + h * k).collect();
    let mut ev = DeltaEvaluator::new(cs.order, cs, &stencil, 0.0)?;
    ev.pin(z)?;
    let (dlog, der) = ev.log_derivative_with_step(z, h)?;
    let rhs = -dlog;
    let mut report = VerificationReport::new(Identity::TraceFormula, vec![z], lhs, rhs, di.truncation_estimate + der.error);
    if !der.converged {
        report.flags.push("z-derivative did not converge".into());
    }
    report.runtime = start.elapsed().as_secs_f64();
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
pub struct FredholmOptions {
    pub nodes_per_panel: usize,
    /// Panel length of the coarse grid; the fine grid halves it.
    pub panel: f64,
    /// Half-width of the integration domain; derived from the coefficients
    /// when unset.
    pub half_width: Option<f64>,
    /// Combine the two grids by extrapolation in `h²`.
    pub richardson: bool,
}

impl Default for FredholmOptions {
    fn default() -> Self {
        Self { nodes_per_panel: 8, panel: 0.5, half_width: None, richardson: true }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FredholmValue {
    pub value: C64,
    pub coarse: C64,
    pub fine: C64,
    pub estimate: f64,
}

fn nystrom_det(cs: &CoefficientSet, free: &FreeKernel, grid: &PanelGrid) -> Result<C64> {
    let m = grid.len();
    let order = cs.order;
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let mut v = vec![C64::new(0.0, 0.0); order];
    let mut a = CMat::identity(m, m);
    for i in 0..m {
        let x = grid.nodes[i];
        cs.eval_all(x, &mut v);
        for k in 0..m {
            let y = grid.nodes[k];
            let mut acc = C64::new(0.0, 0.0);
            for (q, vq) in v.iter().enumerate().take(order - 1) {
                if vq.norm() != 0.0 {
                    acc += vq * free.derivative(q, x, y);
                }
            }
            a[(i, k)] += acc * (sw[i] * sw[k]);
        }
    }
    let det = a.lu().determinant();
    if !det.is_finite() {
        return Err(Error::SingularSystem("Nyström determinant is not finite".into()));
    }
    Ok(det)
}

/// Nyström approximation of `Det(I + V R₀(z))` with kernel
/// `Σ_{k<N} v_k(x) ∂_x^{k−1} R₀(x, y)` and symmetrized weights.
pub fn fredholm_determinant(cs: &CoefficientSet, z: C64, opts: &FredholmOptions) -> Result<FredholmValue> {
    if !cs.top_vanishes() {
        return Err(Error::UnsupportedCoefficients("the perturbation determinant needs v_N = 0".into()));
    }
    let rs = compute_roots(cs.order, z)?;
    if cs.is_zero() {
        let one = C64::new(1.0, 0.0);
        return Ok(FredholmValue { value: one, coarse: one, fine: one, estimate: 0.0 });
    }
    let l = match opts.half_width {
        Some(l) => l,
        None => cs.effective_radius(1e-12)?,
    };
    let scale = rs.roots[0].norm();
    let h = opts.panel.min(cs.length_scale()).min(1.5 / scale);
    let free = FreeKernel::new(&rs);
    let mk = |h: f64| {
        let mut grid = PanelGrid::uniform(-l, l, h, opts.nodes_per_panel);
        let mut edges = grid.edges.clone();
        edges.extend(cs.breakpoints().iter().copied().filter(|&b| b > -l && b < l));
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if edges.len() != grid.edges.len() {
            grid = PanelGrid::new(edges, opts.nodes_per_panel);
        }
        grid
    };
    let coarse = nystrom_det(cs, &free, &mk(h))?;
    let fine = nystrom_det(cs, &free, &mk(h / 2.0))?;
    let (value, estimate) = if opts.richardson {
        ((fine * 4.0 - coarse) / 3.0, (fine - coarse).norm() / 3.0)
    } else {
        (fine, (fine - coarse).norm())
    };
    Ok(FredholmValue { value, coarse, fine, estimate })
}

/// Compares the Nyström determinant with `Δ(0, z)`.
pub fn det_identity_check(cs: &CoefficientSet, z: C64) -> Result<VerificationReport> {
    let start = Instant::now();
    let fd = fredholm_determinant(cs, z, &FredholmOptions::default())?;
    let delta = if cs.is_zero() {
        C64::new(1.0, 0.0)
    } else {
        DeltaEvaluator::new(cs.order, cs, &[z], 0.0)?.delta(z)?
    };
    let mut report = VerificationReport::new(Identity::DetIdentity, vec![z], fd.value, delta, fd.estimate);
    report.runtime = start.elapsed().as_secs_f64();
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct XLawReport {
    pub values: Vec<WronskianValue>,
    /// `Δ(x_0) exp(−i^N ∫_{x_0}^{x} v_N)` at every point.
    pub predicted: Vec<C64>,
    pub rel_err: Vec<f64>,
}

impl XLawReport {
    pub fn max_rel_err(&self) -> f64 {
        self.rel_err.iter().copied().fold(0.0, f64::max)
    }
}

/// `Δ(x, z)` at `xs` (sorted ascending) against the law
/// `Δ(x) = Δ(x_0) exp(−i^N ∫_{x_0}^{x} v_N)`; for `v_N = 0` this is
/// x-independence.
pub fn wronskian_x_law(cs: &CoefficientSet, z: C64, xs: &[f64]) -> Result<XLawReport> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("need at least one x point".into()));
    }
    let rs = compute_roots(cs.order, z)?;
    let layout = JostLayout::new(&rs, cs)?;
    let set = JostSet::compute(&rs, cs, &layout, xs)?;
    let values: Vec<WronskianValue> = (0..xs.len()).map(|i| normalized_wronskian(&rs, &set, i)).collect::<Result<_>>()?;
    let top = cs.order - 1;
    let i_n = i_pow(cs.order);
    let mut predicted = Vec::with_capacity(xs.len());
    for &x in xs {
        let integral = if cs.top_vanishes() { C64::new(0.0, 0.0) } else { cs.integral(top, xs[0], x)? };
        predicted.push(values[0].delta * (-i_n * integral).exp());
    }
    let rel_err = values.iter().zip(&predicted).map(|(v, p)| rel_err(v.delta, *p)).collect();
    Ok(XLawReport { values, predicted, rel_err })
}

#[derive(Debug, Clone, Serialize)]
pub struct LargeZReport {
    pub z: Vec<C64>,
    pub delta: Vec<C64>,
    /// `|Δ(z_m) − 1|`.
    pub deviation: Vec<f64>,
    /// Least-squares slope of `log|Δ − 1|` against `log|z|`.
    pub slope: f64,
    pub bound: f64,
    pub decreasing: bool,
    pub pass: bool,
}

impl LargeZReport {
    pub fn to_report(&self) -> VerificationReport {
        let mut r = VerificationReport::new(
            Identity::LargeZ,
            self.z.clone(),
            C64::new(self.slope, 0.0),
            C64::new(self.bound, 0.0),
            self.deviation.last().copied().unwrap_or(0.0),
        );
        if !self.decreasing {
            r.flags.push("|Δ − 1| is not decreasing".into());
        }
        r
    }
}

/// `|Δ(z) − 1|` along the ray `z = t·direction` at the given magnitudes.
pub fn large_z_check(cs: &CoefficientSet, direction: C64, magnitudes: &[f64]) -> Result<LargeZReport> {
    if !cs.top_vanishes() {
        return Err(Error::UnsupportedCoefficients("large-z decay is checked for v_N = 0".into()));
    }
    if magnitudes.len() < 2 || magnitudes.windows(2).any(|w| !(w[1] > w[0] && w[0] > 0.0)) {
        return Err(Error::InvalidArgument("magnitudes must be positive and increasing".into()));
    }
    let dir = direction / direction.norm();
    let z: Vec<C64> = magnitudes.iter().map(|&t| dir * t).collect();
    let delta: Vec<C64> = if cs.is_zero() {
        vec![C64::new(1.0, 0.0); z.len()]
    } else {
        z.par_iter().map(|&s| DeltaEvaluator::new(cs.order, cs, &[s], 0.0)?.delta(s)).collect::<Result<_>>()?
    };
    let deviation: Vec<f64> = delta.iter().map(|d| (d - 1.0).norm()).collect();
    let decreasing = deviation.windows(2).all(|w| w[1] < w[0]) || deviation.iter().all(|&d| d == 0.0);
    let slope = if deviation.contains(&0.0) {
        f64::NEG_INFINITY
    } else {
        let xs: Vec<f64> = magnitudes.iter().map(|m| m.ln()).collect();
        let ys: Vec<f64> = deviation.iter().map(|d| d.ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    };
    let bound = -1.0 / cs.order as f64 + 0.3;
    Ok(LargeZReport { z, delta, deviation, slope, bound, decreasing, pass: decreasing && slope <= bound })
}

/// Circle in the `z` plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn point(&self, theta: f64) -> C64 {
        self.center + C64::from_polar(self.radius, theta)
    }
}

#[derive(Debug, Clone)]
pub struct EigCount {
    pub count: i64,
    /// `(1/2πi)∮ Δ'/Δ dz` before rounding.
    pub raw: C64,
    /// `(1/2πi)∮ z Δ'/Δ dz`: the sum of the enclosed zeros.
    pub zero_sum: C64,
    pub nodes: usize,
    pub min_abs_delta: f64,
}

/// `dΔ/dθ` of periodic samples by trigonometric interpolation.
fn periodic_derivative(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    let coeffs: Vec<C64> = (0..n)
        .map(|m| {
            let s: C64 = values.iter().enumerate().map(|(k, v)| v * C64::from_polar(1.0, -2.0 * PI * (m * k) as f64 / n as f64)).sum();
            s / n as f64
        })
        .collect();
    (0..n)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for (m, c) in coeffs.iter().enumerate() {
                let freq = if 2 * m < n {
                    m as f64
                } else if 2 * m > n {
                    m as f64 - n as f64
                } else {
                    continue;
                };
                acc += c * C64::new(0.0, freq) * C64::from_polar(1.0, 2.0 * PI * (m * k) as f64 / n as f64);
            }
            acc
        })
        .collect()
}

fn winding(contour: &Circle, delta: &[C64]) -> (C64, C64) {
    let n = delta.len();
    let d = periodic_derivative(delta);
    let mut raw = C64::new(0.0, 0.0);
    let mut zsum = C64::new(0.0, 0.0);
    for k in 0..n {
        let z = contour.point(2.0 * PI * k as f64 / n as f64);
        let g = d[k] / delta[k];
        raw += g;
        zsum += g * z;
    }
    let f = 1.0 / (n as f64 * C64::new(0.0, 1.0));
    (raw * f, zsum * f)
}

/// Counts zeros of `Δ` inside `contour` by the argument principle.
pub fn eig_count(cs: &CoefficientSet, contour: &Circle) -> Result<EigCount> {
    if !(contour.radius > 0.0) {
        return Err(Error::InvalidArgument("contour radius must be positive".into()));
    }
    let probe: Vec<C64> = (0..16).map(|k| contour.point(2.0 * PI * k as f64 / 16.0)).collect();
    for &z in &probe {
        compute_roots(cs.order, z)?;
    }
    if cs.is_zero() {
        return Ok(EigCount { count: 0, raw: C64::new(0.0, 0.0), zero_sum: C64::new(0.0, 0.0), nodes: 0, min_abs_delta: 1.0 });
    }
    let ev = DeltaEvaluator::new(cs.order, cs, &probe, 0.0)?;
    let sample = |n: usize| -> Result<Vec<C64>> {
        (0..n).into_par_iter().map(|k| ev.delta(contour.point(2.0 * PI * k as f64 / n as f64))).collect()
    };
    let mut n = 128;
    let mut values = sample(n)?;
    let mut prev = winding(contour, &values);
    loop {
        if n >= 2048 {
            break;
        }
        // the doubled rule reuses the even nodes
        let odd: Vec<C64> = (0..n)
            .into_par_iter()
            .map(|k| ev.delta(contour.point(2.0 * PI * (2 * k + 1) as f64 / (2 * n) as f64)))
            .collect::<Result<_>>()?;
        let mut merged = Vec::with_capacity(2 * n);
        for k in 0..n {
            merged.push(values[k]);
            merged.push(odd[k]);
        }
        values = merged;
        n *= 2;
        let next = winding(contour, &values);
        let stable = (next.0 - prev.0).norm() < 1e-6;
        prev = next;
        if stable {
            break;
        }
    }
    let (raw, zero_sum) = prev;
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min_abs_delta = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    if min_abs_delta < 1e-10 * max_abs {
        return Err(Error::InvalidArgument("the contour passes through a zero of Δ".into()));
    }
    let count = raw.re.round();
    if (raw.re - count).abs() > 0.1 || raw.im.abs() > 0.1 {
        return Err(Error::NonIntegerWinding { raw: raw.re });
    }
    // cross-check against the accumulated change of argument
    let turns: f64 = (0..n).map(|k| (values[(k + 1) % n] / values[k]).arg()).sum::<f64>() / (2.0 * PI);
    if (turns - count).abs() > 0.1 {
        return Err(Error::NonIntegerWinding { raw: turns });
    }
    Ok(EigCount { count: count as i64, raw, zero_sum, nodes: n, min_abs_delta })
}

/// Refines a zero of `Δ` by Newton's method from `z0`.
pub fn locate_zero(cs: &CoefficientSet, z0: C64, tol: f64) -> Result<C64> {
    let mut z = z0;
    for _ in 0..40 {
        let ev = DeltaEvaluator::new(cs.order, cs, &[z], 0.0)?;
        let d = match ev.delta(z) {
            Ok(d) => d,
            Err(Error::NearSingular { .. }) => return Ok(z),
            Err(e) => return Err(e),
        };
        let der = z_derivative(|s| Ok(vec![ev.delta(s)?]), z, z_step(cs.order, z).min(1e-4), 1e-8)?;
        let step = d / der.value[0];
        z -= step;
        if step.norm() < tol {
            return Ok(z);
        }
    }
    Err(Error::InvalidArgument(format!("Newton iteration for a zero of Δ did not converge from {z0}")))
}

/// Argument-principle location of the single zero inside `contour`,
/// refined by Newton's method.
pub fn locate_eigenvalue(cs: &CoefficientSet, contour: &Circle) -> Result<C64> {
    let count = eig_count(cs, contour)?;
    if count.count != 1 {
        return Err(Error::InvalidArgument(format!("contour encloses {} zeros, expected one", count.count)));
    }
    locate_zero(cs, count.zero_sum, 1e-12)
}

/// Coefficient tails used by the Jost construction, for diagnostics.
pub fn tail_masses(cs: &CoefficientSet, a: f64) -> Result<(f64, f64)> {
    Ok((cs.l1_tail(Side::Minus, -a)?, cs.l1_tail(Side::Plus, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_are_trivial() {
        let cs = CoefficientSet::zero(3);
        let z = C64::new(0.5, 1.0);
        let r = trace_check(&cs, z, None).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert_eq!(r.rel_err, 0.0);
        let f = fredholm_determinant(&cs, z, &FredholmOptions::default()).unwrap();
        assert_eq!(f.value, C64::new(1.0, 0.0));
        let c = eig_count(&cs, &Circle { center: C64::new(-1.0, 1.0), radius: 0.5 }).unwrap();
        assert_eq!(c.count, 0);
    }

    #[test]
    fn periodic_derivative_of_exponential() {
        let n = 32;
        let vals: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, 3.0 * 2.0 * PI * k as f64 / n as f64)).collect();
        let d = periodic_derivative(&vals);
        for k in 0..n {
            assert!((d[k] - vals[k] * C64::new(0.0, 3.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn fredholm_rejects_top_coefficient() {
        let cs = CoefficientSet::bump(2, 1.0, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert!(fredholm_determinant(&cs, C64::new(-1.0, 0.0), &FredholmOptions::default()).is_err());
    }
}
