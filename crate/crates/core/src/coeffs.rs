//! Perturbation coefficients `v_1..v_N` of the operator
//! `i^{-N}∂^N + v_N∂^{N-1} + … + v_1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::Side;
use crate::linalg::{i_pow, CMat, C64};
use crate::quadrature::{integrate_adaptive, integrate_half_line};

/// A complex number in JSON: either a bare real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> C64 {
        match self {
            ComplexValue::Real(r) => C64::new(r, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl From<C64> for ComplexValue {
    fn from(z: C64) -> Self {
        ComplexValue::Pair([z.re, z.im])
    }
}

/// Tabulated coefficient: samples at increasing abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub x: Vec<f64>,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetSpec {
    Zero,
    /// `v_k(x) = c_k exp(-1/(1-(x/R)^2))` on `|x| < R`.
    Bump { radius: f64, amplitudes: Vec<ComplexValue> },
    /// `v_k(x) = c_k exp(-(x/σ)^2)`.
    Gaussian { sigma: f64, amplitudes: Vec<ComplexValue> },
    /// `v_1(x) = λ sech^2 x`.
    Sech2 { lambda: f64 },
    /// One optional table per coefficient.
    Custom { tables: Vec<Option<TableSpec>> },
}

#[derive(Debug, Clone)]
enum Profile {
    Zero,
    Bump { amp: C64, radius: f64 },
    Gaussian { amp: C64, sigma: f64 },
    Sech2 { amp: f64 },
    Table { re: CubicSpline, im: CubicSpline },
}

impl Profile {
    fn eval(&self, x: f64) -> C64 {
        match self {
            Profile::Zero => C64::new(0.0, 0.0),
            Profile::Bump { amp, radius } => {
                let t = x / radius;
                if t.abs() >= 1.0 {
                    C64::new(0.0, 0.0)
                } else {
                    amp * (-1.0 / (1.0 - t * t)).exp()
                }
            }
            Profile::Gaussian { amp, sigma } => amp * (-(x / sigma).powi(2)).exp(),
            Profile::Sech2 { amp } => C64::new(amp / x.cosh().powi(2), 0.0),
            Profile::Table { re, im } => C64::new(re.eval(x), im.eval(x)),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Bump { amp, .. } | Profile::Gaussian { amp, .. } => amp.norm() == 0.0,
            Profile::Sech2 { amp } => *amp == 0.0,
            Profile::Table { re, im } => re.is_zero() && im.is_zero(),
        }
    }
}

/// Natural cubic spline, extended by zero outside the table.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidPreset("a table needs at least two samples and matching lengths".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPreset("table abscissae must be finite and strictly increasing".into()));
        }
        // tridiagonal solve for the second derivatives, natural end conditions
        let mut m = vec![0.0; n];
        if n > 2 {
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut upper = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let f = lower / diag[i - 1];
                diag[i] -= f * upper[i - 1];
                rhs[i] -= f * rhs[i - 1];
            }
            let mut sol = vec![0.0; k];
            sol[k - 1] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
            }
            m[1..n - 1].copy_from_slice(&sol);
        }
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t < self.x[0] || t > self.x[n - 1] {
            return 0.0;
        }
        let i = self.x.partition_point(|&v| v <= t).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn is_zero(&self) -> bool {
        self.y.iter().all(|&v| v == 0.0)
    }
}

/// The coefficients `v_1..v_N` (stored zero-based) with decay metadata.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub order: usize,
    profiles: Vec<Profile>,
    /// Weight exponent of the short-range condition `∫|v|²(1+x²)^α < ∞`.
    pub alpha: f64,
    /// `v_k(x) = 0` for `|x| > support_radius`.
    pub support_radius: Option<f64>,
    pub cutoff_radius: Option<f64>,
    breaks: Vec<f64>,
    scale: C64,
}

impl CoefficientSet {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            profiles: vec![Profile::Zero; order],
            alpha: f64::INFINITY,
            support_radius: Some(0.0),
            cutoff_radius: None,
            breaks: Vec::new(),
            scale: C64::new(1.0, 0.0),
        }
    }

    pub fn bump(order: usize, radius: f64, amplitudes: &[C64]) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidPreset(format!("bump radius must be positive, got {radius}")));
        }
        let amps = pad(order, amplitudes)?;
        Ok(Self {
            order,
            profiles: amps.into_iter().map(|amp| Profile::Bump { amp, radius }).collect(),
            alpha: f64::INFINITY,
            support_radius: Some(radius),
            cutoff_radius: None,
            breaks: vec![-radius, radius],
            scale: C64::new(1.0, 0.0),
        })
    }

    pub fn gaussian(order: usize, sigma: f64, amplitudes: &[C64]) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidPreset(format!("gaussian width must be positive, got {sigma}")));
        }
        let amps = pad(order, amplitudes)?;
        Ok(Self {
            order,
            profiles: amps.into_iter().map(|amp| Profile::Gaussian { amp, sigma }).collect(),
            alpha: f64::INFINITY,
            support_radius: None,
            cutoff_radius: None,
            breaks: Vec::new(),
            scale: C64::new(1.0, 0.0),
        })
    }

    pub fn sech2(order: usize, lambda: f64) -> Result<Self> {
        if order == 0 || !lambda.is_finite() {
            return Err(Error::InvalidPreset("sech2 needs order >= 1 and a finite coupling".into()));
        }
        let mut profiles = vec![Profile::Zero; order];
        profiles[0] = Profile::Sech2 { amp: lambda };
        Ok(Self { order, profiles, alpha: f64::INFINITY, support_radius: None, cutoff_radius: None, breaks: Vec::new(), scale: C64::new(1.0, 0.0) })
    }

    pub fn custom(order: usize, tables: &[Option<TableSpec>]) -> Result<Self> {
        if tables.len() > order {
            return Err(Error::InvalidPreset(format!("{} tables given for order {order}", tables.len())));
        }
        let mut profiles = vec![Profile::Zero; order];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (k, t) in tables.iter().enumerate() {
            if let Some(t) = t {
                let re = CubicSpline::new(&t.x, &t.re)?;
                let im = match &t.im {
                    Some(im) => CubicSpline::new(&t.x, im)?,
                    None => CubicSpline::new(&t.x, &vec![0.0; t.x.len()])?,
                };
                let (a, b) = re.extent();
                lo = lo.min(a);
                hi = hi.max(b);
                profiles[k] = Profile::Table { re, im };
            }
        }
        let (support, breaks) = if lo.is_finite() {
            (lo.abs().max(hi.abs()), vec![lo, hi])
        } else {
            (0.0, Vec::new())
        };
        Ok(Self { order, profiles, alpha: f64::INFINITY, support_radius: Some(support), cutoff_radius: None, breaks, scale: C64::new(1.0, 0.0) })
    }

    pub fn preset(order: usize, spec: &PresetSpec) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidPreset("order must be at least 1".into()));
        }
        let amps = |v: &[ComplexValue]| v.iter().map(|c| c.value()).collect::<Vec<_>>();
        match spec {
            PresetSpec::Zero => Ok(Self::zero(order)),
            PresetSpec::Bump { radius, amplitudes } => Self::bump(order, *radius, &amps(amplitudes)),
            PresetSpec::Gaussian { sigma, amplitudes } => Self::gaussian(order, *sigma, &amps(amplitudes)),
            PresetSpec::Sech2 { lambda } => Self::sech2(order, *lambda),
            PresetSpec::Custom { tables } => Self::custom(order, tables),
        }
    }

    /// Multiplies every coefficient by the indicator of `(-r, r)`.
    pub fn cutoff(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("cut-off radius must be positive, got {r}")));
        }
        let mut out = self.clone();
        out.cutoff_radius = Some(self.cutoff_radius.map_or(r, |old| old.min(r)));
        out.support_radius = Some(self.support_radius.map_or(r, |old| old.min(r)));
        out.breaks.extend([-r, r]);
        out.breaks.sort_by(f64::total_cmp);
        out.breaks.dedup();
        Ok(out)
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.scale *= s;
        out
    }

    /// `v_{k+1}(x)`.
    pub fn eval(&self, k: usize, x: f64) -> C64 {
        if let Some(r) = self.cutoff_radius {
            if x.abs() >= r {
                return C64::new(0.0, 0.0);
            }
        }
        self.scale * self.profiles[k].eval(x)
    }

    pub fn eval_all(&self, x: f64, out: &mut [C64]) {
        for (k, o) in out.iter_mut().enumerate().take(self.order) {
            *o = self.eval(k, x);
        }
    }

    /// `Σ_k |v_k(x)|`, the row norm of `V(x)`.
    pub fn abs_sum(&self, x: f64) -> f64 {
        (0..self.order).map(|k| self.eval(k, x).norm()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.scale.norm() == 0.0 || self.profiles.iter().all(Profile::is_zero)
    }

    /// True when `v_N ≡ 0`.
    pub fn top_vanishes(&self) -> bool {
        self.scale.norm() == 0.0 || self.profiles[self.order - 1].is_zero()
    }

    /// `tr V(x) = -i^N v_N(x)`.
    pub fn trace_v(&self, x: f64) -> C64 {
        -i_pow(self.order) * self.eval(self.order - 1, x)
    }

    /// The system perturbation `V(x)`: last row `-i^N (v_1, …, v_N)`.
    pub fn system_perturbation(&self, x: f64) -> CMat {
        let n = self.order;
        let mut m = CMat::zeros(n, n);
        let f = -i_pow(n);
        for k in 0..n {
            m[(n - 1, k)] = f * self.eval(k, x);
        }
        m
    }

    /// Length over which the coefficients vary appreciably.
    pub fn length_scale(&self) -> f64 {
        self.profiles
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| match p {
                Profile::Zero => f64::INFINITY,
                Profile::Bump { radius, .. } => radius / 4.0,
                Profile::Gaussian { sigma, .. } => sigma / 2.0,
                Profile::Sech2 { .. } => 1.0,
                Profile::Table { re, .. } => 4.0 * re.x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Points where the coefficients may fail to be smooth.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// `∫ Σ_k |v_k|` over `(-∞, a]` (minus) or `[a, ∞)` (plus).
    pub fn l1_tail(&self, side: Side, a: f64) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        let f = |y: f64| C64::new(self.abs_sum(y), 0.0);
        let (abs_tol, rel_tol) = (1e-18, 1e-10);
        let value = match (self.support_radius, side) {
            (Some(r), Side::Minus) => {
                if a <= -r {
                    return Ok(0.0);
                }
                self.piecewise(&f, -r, a.min(r), abs_tol, rel_tol)
            }
            (Some(r), Side::Plus) => {
                if a >= r {
                    return Ok(0.0);
                }
                self.piecewise(&f, a.max(-r), r, abs_tol, rel_tol)
            }
            // split at the origin so the mass is never far out on the mapped
            // half-line
            (None, Side::Plus) if a < 0.0 => self
                .piecewise(&f, a, 0.0, abs_tol, rel_tol)
                .and_then(|inner| Ok(inner + integrate_half_line(f, 0.0, true, abs_tol, rel_tol)?.0.re)),
            (None, Side::Minus) if a > 0.0 => self
                .piecewise(&f, 0.0, a, abs_tol, rel_tol)
                .and_then(|inner| Ok(inner + integrate_half_line(f, 0.0, false, abs_tol, rel_tol)?.0.re)),
            (None, side) => integrate_half_line(f, a, side == Side::Plus, abs_tol, rel_tol).map(|v| v.0.re),
        };
        match value {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::DivergentTail { side, a }),
        }
    }

    /// `∫_a^b Σ_k |v_k|`.
    pub fn l1_between(&self, a: f64, b: f64) -> Result<f64> {
        let f = |y: f64| C64::new(self.abs_sum(y), 0.0);
        self.piecewise(&f, a, b, 1e-18, 1e-10)
    }

    fn piecewise<F: Fn(f64) -> C64>(&self, f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let mut knots = vec![a];
        knots.extend(self.breaks.iter().copied().filter(|&x| x > a && x < b));
        knots.extend(self.mass_knots().filter(|&x| x > a && x < b));
        knots.push(b);
        knots.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        for w in knots.windows(2) {
            acc += integrate_adaptive(f, w[0], w[1], abs_tol, rel_tol)?.0.re;
        }
        Ok(acc)
    }

    /// Geometrically spaced knots around the origin, so that adaptive
    /// quadrature on a long interval cannot step over the coefficients.
    fn mass_knots(&self) -> impl Iterator<Item = f64> {
        let ls = self.length_scale();
        let ls = if ls.is_finite() { ls } else { 1.0 };
        std::iter::once(0.0).chain((0..24).flat_map(move |k| {
            let d = ls * 2f64.powi(k);
            [-d, d]
        }))
    }

    /// `∫_a^b v_{k+1}`, used for the Wronskian x-law.
    pub fn integral(&self, k: usize, a: f64, b: f64) -> Result<C64> {
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut knots = vec![lo];
        knots.extend(self.breaks.iter().copied().filter(|&x| x > lo && x < hi));
        knots.extend(self.mass_knots().filter(|&x| x > lo && x < hi));
        knots.push(hi);
        knots.sort_by(f64::total_cmp);
        let mut acc = C64::new(0.0, 0.0);
        for w in knots.windows(2) {
            acc += integrate_adaptive(|y| self.eval(k, y), w[0], w[1], 1e-15, 1e-13)?.0;
        }
        Ok(acc * sign)
    }

    /// `∫ |v_{k+1}|^2 (1+x^2)^α dx` for a finite weight exponent `alpha`.
    pub fn weighted_norm(&self, k: usize, alpha: f64) -> Result<f64> {
        let f = |y: f64| C64::new(self.eval(k, y).norm_sqr() * (1.0 + y * y).powf(alpha), 0.0);
        let left = integrate_half_line(f, 0.0, false, 1e-15, 1e-10)?.0.re;
        let right = integrate_half_line(f, 0.0, true, 1e-15, 1e-10)?.0.re;
        Ok(left + right)
    }

    /// Half-width `L` beyond which both coefficient tails are below `tol`.
    pub fn effective_radius(&self, tol: f64) -> Result<f64> {
        if let Some(r) = self.support_radius {
            return Ok(r);
        }
        let mut l: f64 = 1.0;
        while self.l1_tail(Side::Minus, -l)? + self.l1_tail(Side::Plus, l)? > tol {
            l *= 1.25;
            if l > 1e6 {
                return Err(Error::NoValidAnchor { side: Side::Plus });
            }
        }
        Ok(l)
    }
}

fn pad(order: usize, amplitudes: &[C64]) -> Result<Vec<C64>> {
    if order == 0 {
        return Err(Error::InvalidPreset("order must be at least 1".into()));
    }
    if amplitudes.len() > order {
        return Err(Error::InvalidPreset(format!("{} amplitudes given for order {order}", amplitudes.len())));
    }
    if amplitudes.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidPreset("amplitudes must be finite".into()));
    }
    let mut v = amplitudes.to_vec();
    v.resize(order, C64::new(0.0, 0.0));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn preset_values() {
        let z = CoefficientSet::preset(3, &PresetSpec::Zero).unwrap();
        assert!((0..3).all(|k| z.eval(k, 0.3) == C64::new(0.0, 0.0)));
        let s = CoefficientSet::preset(2, &PresetSpec::Sech2 { lambda: -2.0 }).unwrap();
        assert_eq!(s.eval(0, 0.0), C64::new(-2.0, 0.0));
        let b = CoefficientSet::preset(2, &PresetSpec::Bump { radius: 1.0, amplitudes: vec![ComplexValue::Real(1.0)] }).unwrap();
        assert_eq!(b.eval(0, 1.0), C64::new(0.0, 0.0));
        assert_eq!(b.eval(0, -1.0), C64::new(0.0, 0.0));
        assert_relative_eq!(b.eval(0, 0.0).re, (-1f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn invalid_presets() {
        assert!(CoefficientSet::bump(2, -1.0, &[C64::new(1.0, 0.0)]).is_err());
        assert!(CoefficientSet::gaussian(2, 0.0, &[]).is_err());
        assert!(CoefficientSet::bump(1, 1.0, &[C64::new(1.0, 0.0); 2]).is_err());
        let t = TableSpec { x: vec![0.0, 0.0], re: vec![1.0, 1.0], im: None };
        assert!(CoefficientSet::custom(1, &[Some(t)]).is_err());
    }

    #[test]
    fn cutoff_behaviour() {
        let s = CoefficientSet::sech2(2, -2.0).unwrap().cutoff(3.0).unwrap();
        assert_eq!(s.eval(0, 4.0), C64::new(0.0, 0.0));
        assert_eq!(s.eval(0, 0.0), C64::new(-2.0, 0.0));
        assert_eq!(s.support_radius, Some(3.0));
        let z = CoefficientSet::zero(2).cutoff(5.0).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn tails() {
        assert_eq!(CoefficientSet::zero(2).l1_tail(Side::Minus, 0.0).unwrap(), 0.0);
        let s = CoefficientSet::sech2(2, -2.0).unwrap();
        assert_relative_eq!(s.l1_tail(Side::Minus, 0.0).unwrap(), 2.0, epsilon = 1e-9);
        // closed form 2(1 + tanh a)
        let a = -1.7;
        assert_relative_eq!(s.l1_tail(Side::Minus, a).unwrap(), 2.0 * (1.0 + a.tanh()), max_relative = 1e-9);
        let b = CoefficientSet::bump(2, 1.0, &[C64::new(1.0, 0.0)]).unwrap();
        assert_eq!(b.l1_tail(Side::Minus, -2.0).unwrap(), 0.0);
    }

    #[test]
    fn spline_reproduces_cubic_interior_and_vanishes_outside() {
        let x: Vec<f64> = (0..=40).map(|k| -2.0 + 0.1 * k as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| (t * 1.3).sin()).collect();
        let sp = CubicSpline::new(&x, &y).unwrap();
        assert!((sp.eval(0.05) - (0.065f64).sin()).abs() < 1e-5);
        assert_eq!(sp.eval(2.5), 0.0);
        assert_eq!(sp.eval(x[7]), y[7]);
    }

    #[test]
    fn weighted_norm_is_finite_for_presets() {
        let g = CoefficientSet::gaussian(2, 1.0, &[C64::new(1.0, 0.0)]).unwrap();
        let v = g.weighted_norm(0, 1.0).unwrap();
        // ∫ e^{-2x²}(1+x²) = sqrt(π/2)(1 + 1/4)
        assert_relative_eq!(v, (std::f64::consts::PI / 2.0).sqrt() * 1.25, max_relative = 1e-8);
    }

    #[test]
    fn system_matrix_trace() {
        let b = CoefficientSet::bump(3, 1.0, &[C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(0.5, 0.0)]).unwrap();
        let m = b.system_perturbation(0.2);
        let tr: C64 = (0..3).map(|k| m[(k, k)]).sum();
        assert!((tr - b.trace_v(0.2)).norm() < 1e-15);
        assert!((0..2).all(|r| (0..3).all(|c| m[(r, c)] == C64::new(0.0, 0.0))));
    }
}
