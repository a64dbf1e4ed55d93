//! Jost-type solutions `u_j(x) = e^{ζ_j x} w_j(x)` of `u' = (L₀ + V)u`.
//!
//! On the tail beyond the anchor `a` the rescaled solution `w_j` solves a
//! Volterra-type integral equation. Because `V` only has a nonzero last row,
//! `V w = -i^N e_N (v·w)` and the equation reduces to one for the scalar
//! `s = v·w`, which is discretized by product integration on Gauss-Legendre
//! panels and solved by fixed-point sweeps, falling back to a dense solve.
//! From the anchor inwards `w_j` is propagated by
//! the rescaled ODE `w' = (L₀ − ζ_j + V) w`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::linalg::{cexp, i_pow, CMat, CVec, C64};
use crate::ode::{dopri5, OdeOptions};
use crate::quadrature::{ExpVolterra, PanelGrid};
use crate::roots::{compute_roots, RootSystem};

/// Which spatial infinity a solution is normalized at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Minus,
    Plus,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        })
    }
}

impl Side {
    /// Outward direction (towards the normalizing infinity).
    pub fn outward(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }

    /// Root indices whose solutions decay towards this side's infinity.
    pub fn indices(self, rs: &RootSystem) -> std::ops::Range<usize> {
        match self {
            Side::Minus => 0..rs.n,
            Side::Plus => rs.n..rs.order,
        }
    }
}

/// Panel order of the tail discretization.
pub const TAIL_NODES: usize = 16;
/// Neglected tail: `C·∫|V|` beyond the truncation point.
pub const TRUNCATION_TOL: f64 = 1e-12;

fn equal_kappa(rs: &RootSystem, a: usize, b: usize) -> bool {
    (rs.kappa(a) - rs.kappa(b)).abs() <= 1e-12 * rs.roots[0].norm()
}

/// True when index `m` belongs to the set integrated from the left end of the
/// tail: `κ_m ≤ κ_j` on the minus side, `κ_m < κ_j` on the plus side. Equal
/// real parts go to the far-end sum, so they are integrated from `-∞` on the
/// minus side and towards `+∞` on the plus side.
pub fn in_left_set(rs: &RootSystem, side: Side, j: usize, m: usize) -> bool {
    let eq = m == j || equal_kappa(rs, m, j);
    match side {
        Side::Minus => eq || rs.kappa(m) < rs.kappa(j),
        Side::Plus => !eq && rs.kappa(m) < rs.kappa(j),
    }
}

/// Adding `c·u_l` to `u_j` keeps `u_j` a Jost solution of this side.
pub fn is_admissible_addition(rs: &RootSystem, side: Side, j: usize, l: usize) -> bool {
    let range = side.indices(rs);
    if !range.contains(&j) || !range.contains(&l) || j == l || equal_kappa(rs, j, l) {
        return false;
    }
    match side {
        Side::Minus => rs.kappa(l) > rs.kappa(j),
        Side::Plus => rs.kappa(l) < rs.kappa(j),
    }
}

/// Kernel of the integral equation for `u_j` normalized at `side`:
/// on the minus side `K_j(x) = Σ_{κ_m>κ_j} P_m e^{ζ_m x} θ(−x) − Σ_{κ_m≤κ_j} P_m e^{ζ_m x} θ(x)`
/// with `θ(0) = 1`; the plus side is the mirror image.
pub fn jost_kernel(rs: &RootSystem, j: usize, side: Side, x: f64) -> CMat {
    let mut k = CMat::zeros(rs.order, rs.order);
    for m in 0..rs.order {
        let left = in_left_set(rs, side, j, m);
        let active = if left { x >= 0.0 } else { x < 0.0 };
        if active {
            let sign = if left { -1.0 } else { 1.0 };
            k += rs.projection(m) * (cexp(rs.roots[m] * x) * sign);
        }
    }
    k
}

/// `K_j(x)` for the minus side.
pub fn kj_kernel(rs: &RootSystem, j: usize, x: f64) -> CMat {
    jost_kernel(rs, j, Side::Minus, x)
}

/// Constant `C` with `|K_j(t) e^{-ζ_j t} e_N|_∞ ≤ C` for all `t` and all
/// indices `j` of `side`, so that the tail operator has norm at most
/// `C ∫|V|`. The bound is the triangle inequality over the exponential terms.
pub fn kernel_constant(rs: &RootSystem, side: Side) -> f64 {
    let mut c: f64 = 0.0;
    for j in side.indices(rs) {
        for row in 0..rs.order {
            let (mut l, mut r) = (0.0, 0.0);
            for m in 0..rs.order {
                let t = rs.roots[m].norm().powi(row as i32) * rs.coef(m).norm();
                if in_left_set(rs, side, j, m) {
                    l += t;
                } else {
                    r += t;
                }
            }
            c = c.max(l).max(r);
        }
    }
    c
}

/// Anchor `a` with `C·∫_tail |V| ≤ 1/2`.
pub fn choose_anchor(rs: &RootSystem, cs: &CoefficientSet, side: Side) -> Result<f64> {
    if cs.is_zero() {
        return Ok(0.0);
    }
    if let Some(r) = cs.support_radius {
        return Ok(side.outward() * r);
    }
    let c = kernel_constant(rs, side);
    let ok = |a: f64| -> Result<bool> { Ok(c * cs.l1_tail(side, a)? <= 0.5) };
    let d = side.outward();
    if ok(0.0)? {
        return Ok(0.0);
    }
    let mut inner = 0.0;
    let mut outer = 0.5;
    while !ok(d * outer)? {
        inner = outer;
        outer += 0.5;
        if outer > 1e4 {
            return Err(Error::NoValidAnchor { side });
        }
    }
    for _ in 0..30 {
        let mid = 0.5 * (inner + outer);
        if ok(d * mid)? {
            outer = mid;
        } else {
            inner = mid;
        }
    }
    Ok(d * outer)
}

/// Truncation point `x_far` beyond `a` with `C·∫_{beyond} |V| ≤ TRUNCATION_TOL`.
pub fn truncation_point(rs: &RootSystem, cs: &CoefficientSet, side: Side, a: f64) -> Result<f64> {
    let d = side.outward();
    if cs.is_zero() {
        return Ok(a);
    }
    if let Some(r) = cs.support_radius {
        return Ok(if side == Side::Minus { a.min(-r) } else { a.max(r) });
    }
    let c = kernel_constant(rs, side);
    let ok = |x: f64| -> Result<bool> { Ok(c * cs.l1_tail(side, x)? <= TRUNCATION_TOL) };
    if ok(a)? {
        return Ok(a);
    }
    let mut inner = 0.0;
    let mut outer = 1.0;
    while !ok(a + d * outer)? {
        inner = outer;
        outer *= 2.0;
        if outer > 1e6 {
            return Err(Error::NoValidAnchor { side });
        }
    }
    for _ in 0..20 {
        let mid = 0.5 * (inner + outer);
        if ok(a + d * mid)? {
            outer = mid;
        } else {
            inner = mid;
        }
    }
    Ok(a + d * outer)
}

fn max_exponent_gap(rs: &RootSystem, side: Side) -> f64 {
    side.indices(rs)
        .flat_map(|j| rs.roots.iter().map(move |&m| (m - rs.roots[j]).norm()))
        .fold(0.0, f64::max)
}

/// Tail discretization for one side: anchor, truncation point and panels.
#[derive(Debug, Clone)]
pub struct TailLayout {
    pub side: Side,
    pub anchor: f64,
    pub x_far: f64,
    pub edges: Vec<f64>,
}

impl TailLayout {
    /// Panels on `[x_far, a]` (or `[a, x_far]`), graded towards the anchor.
    pub fn new(side: Side, anchor: f64, x_far: f64, gap: f64, length_scale: f64, breaks: &[f64]) -> Self {
        let len = (x_far - anchor).abs();
        if len == 0.0 {
            return Self { side, anchor, x_far, edges: Vec::new() };
        }
        let h_max = 1f64.min(8.0 / gap.max(1e-300)).min(length_scale);
        let h_fine = (1.0 / gap.max(1e-300)).min(h_max);
        let d = side.outward();
        let mut dist = vec![0.0];
        let mut h = h_fine;
        let mut t = 0.0;
        while t < len {
            t += h;
            if len - t < 0.25 * h {
                t = len;
            }
            dist.push(t.min(len));
            if dist.len() > 3 {
                h = (2.0 * h).min(h_max);
            }
        }
        let mut edges: Vec<f64> = dist.iter().map(|&t| anchor + d * t).collect();
        edges.extend(breaks.iter().copied().filter(|&b| (b - anchor) * d > 0.0 && (x_far - b) * d > 0.0));
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        Self { side, anchor, x_far, edges }
    }

    pub fn for_roots(rs: &RootSystem, cs: &CoefficientSet, side: Side) -> Result<Self> {
        let a = choose_anchor(rs, cs, side)?;
        let x_far = truncation_point(rs, cs, side, a)?;
        Ok(Self::new(side, a, x_far, max_exponent_gap(rs, side), cs.length_scale(), cs.breakpoints()))
    }

    pub fn grid(&self) -> Option<PanelGrid> {
        (self.edges.len() >= 2).then(|| PanelGrid::new(self.edges.clone(), TAIL_NODES))
    }
}

/// Anchors and tail panels for both sides. A layout fixed once can be reused
/// for nearby `z`, which keeps the discrete solutions analytic in `z`.
#[derive(Debug, Clone)]
pub struct JostLayout {
    pub minus: TailLayout,
    pub plus: TailLayout,
}

impl JostLayout {
    pub fn new(rs: &RootSystem, cs: &CoefficientSet) -> Result<Self> {
        Ok(Self { minus: TailLayout::for_roots(rs, cs, Side::Minus)?, plus: TailLayout::for_roots(rs, cs, Side::Plus)? })
    }

    /// A layout valid for every `z` in `zs`: the outermost anchors and
    /// truncation points and the finest panels.
    pub fn covering(order: usize, cs: &CoefficientSet, zs: &[C64]) -> Result<Self> {
        let mut a = [0f64; 2];
        let mut far = [0f64; 2];
        let mut gap: f64 = 0.0;
        for &z in zs {
            let rs = compute_roots(order, z)?;
            for (i, side) in [Side::Minus, Side::Plus].into_iter().enumerate() {
                let an = choose_anchor(&rs, cs, side)?;
                let xf = truncation_point(&rs, cs, side, an)?;
                a[i] = if side == Side::Minus { a[i].min(an) } else { a[i].max(an) };
                far[i] = if side == Side::Minus { far[i].min(xf) } else { far[i].max(xf) };
                gap = gap.max(max_exponent_gap(&rs, side));
            }
        }
        let far = [far[0].min(a[0]), far[1].max(a[1])];
        let (ls, br) = (cs.length_scale(), cs.breakpoints());
        Ok(Self {
            minus: TailLayout::new(Side::Minus, a[0], far[0], gap, ls, br),
            plus: TailLayout::new(Side::Plus, a[1], far[1], gap, ls, br),
        })
    }

    pub fn side(&self, side: Side) -> &TailLayout {
        match side {
            Side::Minus => &self.minus,
            Side::Plus => &self.plus,
        }
    }
}

/// Discrete solution of the tail integral equation.
#[derive(Debug, Clone)]
pub struct TailSolution {
    pub j: usize,
    pub side: Side,
    pub anchor: f64,
    pub x_far: f64,
    pub zeta: C64,
    /// Norm bound `C ∫_tail |V|` of the tail operator.
    pub contraction_bound: f64,
    p: CVec,
    grid: Option<PanelGrid>,
    s: Vec<C64>,
    /// `(m, weight, volterra, left)` for every `m` with a nonzero coupling
    terms: Vec<(usize, C64, ExpVolterra, bool)>,
}

impl TailSolution {
    /// `w_j(x)` for `x` on the tail side of the anchor.
    pub fn w_at(&self, rs: &RootSystem, x: f64) -> CVec {
        let mut w = self.p.clone();
        if let Some(grid) = &self.grid {
            for (m, weight, ev, left) in &self.terms {
                let integral = if *left { ev.left_at(grid, &self.s, x) } else { ev.right_at(grid, &self.s, x) };
                w += &rs.eigvecs[*m] * (weight * integral);
            }
        }
        w
    }

    /// Scalar unknown `s = v·w` at the tail nodes.
    pub fn scalar(&self) -> (&[f64], &[C64]) {
        match &self.grid {
            Some(g) => (&g.nodes, &self.s),
            None => (&[], &[]),
        }
    }
}

/// Solves the tail integral equation for `w_j` on `layout`.
pub fn solve_w(rs: &RootSystem, cs: &CoefficientSet, j: usize, layout: &TailLayout) -> Result<TailSolution> {
    let side = layout.side;
    let (lo, hi) = if side == Side::Minus { (layout.x_far, layout.anchor) } else { (layout.anchor, layout.x_far) };
    let mass = if hi > lo { cs.l1_between(lo, hi)? } else { 0.0 };
    let bound = kernel_constant(rs, side) * mass;
    if bound >= 1.0 {
        return Err(Error::ContractionFailure { bound });
    }
    let zeta = rs.roots[j];
    let p = rs.eigvecs[j].clone();
    let grid = match layout.grid() {
        Some(g) if mass > 0.0 => g,
        _ => return Ok(TailSolution { j, side, anchor: layout.anchor, x_far: layout.x_far, zeta, contraction_bound: bound, p, grid: None, s: Vec::new(), terms: Vec::new() }),
    };
    let n = rs.order;
    let i_n = i_pow(n);
    let m_nodes = grid.len();
    let mut vals = vec![C64::new(0.0, 0.0); n * m_nodes];
    for (i, &x) in grid.nodes.iter().enumerate() {
        cs.eval_all(x, &mut vals[i * n..(i + 1) * n]);
    }
    let dot = |i: usize, v: &CVec| -> C64 { (0..n).map(|k| vals[i * n + k] * v[k]).sum() };
    let mut terms = Vec::new();
    let mut factors = Vec::new();
    for m in 0..n {
        let left = in_left_set(rs, side, j, m);
        let weight = if left { -i_n * rs.coef(m) } else { i_n * rs.coef(m) };
        let f: Vec<C64> = (0..m_nodes).map(|i| weight * dot(i, &rs.eigvecs[m])).collect();
        let ev = ExpVolterra::new(&grid, rs.roots[m] - zeta);
        if f.iter().any(|v| v.norm() != 0.0) {
            factors.push((terms.len(), f));
        }
        terms.push((m, weight, ev, left));
    }
    let b: Vec<C64> = (0..m_nodes).map(|i| dot(i, &p)).collect();
    // the anchor makes the tail operator a contraction, so fixed-point
    // sweeps converge; each sweep is linear in the node count
    let apply = |s: &[C64]| -> Vec<C64> {
        let mut out = b.clone();
        for (t, f) in &factors {
            let (_, _, ev, left) = &terms[*t];
            let integral = if *left { ev.apply_left(&grid, s) } else { ev.apply_right(&grid, s) };
            for i in 0..m_nodes {
                out[i] += f[i] * integral[i];
            }
        }
        out
    };
    let norm = |v: &[C64]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut s = b.clone();
    let mut converged = false;
    for _ in 0..200 {
        let next = apply(&s);
        let change = next.iter().zip(&s).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
        s = next;
        if change <= 1e-15 * norm(&s) {
            converged = true;
            break;
        }
    }
    if !converged {
        let mut a = CMat::identity(m_nodes, m_nodes);
        for (t, f) in &factors {
            let (_, _, ev, left) = &terms[*t];
            let mat = if *left { ev.left_matrix(&grid) } else { ev.right_matrix(&grid) };
            for i in 0..m_nodes {
                for k in 0..m_nodes {
                    a[(i, k)] -= f[i] * mat[(i, k)];
                }
            }
        }
        let sol = a.lu().solve(&CVec::from_vec(b.clone())).ok_or_else(|| Error::SingularSystem(format!("tail system for root {j} on the {side} side")))?;
        s = sol.iter().copied().collect();
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem(format!("tail system for root {j} on the {side} side")));
    }
    Ok(TailSolution {
        j,
        side,
        anchor: layout.anchor,
        x_far: layout.x_far,
        zeta,
        contraction_bound: bound,
        p,
        grid: Some(grid),
        s,
        terms,
    })
}

/// A Jost solution sampled at a set of points, stored in the rescaled form
/// `w_j(x) = e^{-ζ_j x} u_j(x)`.
#[derive(Debug, Clone)]
pub struct JostSolution {
    pub j: usize,
    pub side: Side,
    pub anchor: f64,
    pub zeta: C64,
    pub grid: Vec<f64>,
    pub w_samples: Vec<CVec>,
    /// `|w_j(x_far) − p_j| / |p_j|` at the truncation point.
    pub tail_deviation: f64,
    /// Largest local ODE error per unit length, relative to `|w|`.
    pub residual_report: f64,
    /// Accepted step points of the propagation, reusable for pinned runs.
    pub mesh: Vec<f64>,
}

impl JostSolution {
    /// `log` of the prefactor `e^{ζ_j x}` at sample `i`.
    pub fn log_prefactor(&self, i: usize) -> C64 {
        self.zeta * self.grid[i]
    }

    /// `u_j` at sample `i`, or `None` when the prefactor would overflow.
    pub fn u(&self, i: usize) -> Option<CVec> {
        let e = self.log_prefactor(i);
        (e.re.abs() <= 300.0).then(|| &self.w_samples[i] * e.exp())
    }
}

/// Right-hand side of the rescaled system `w' = (L₀ − ζ_j + V(x)) w`.
pub fn rescaled_rhs<'a>(rs: &'a RootSystem, cs: &'a CoefficientSet, zeta: C64) -> impl Fn(f64, &[C64], &mut [C64]) + 'a {
    let n = rs.order;
    let i_n = i_pow(n);
    let corner = i_n * rs.z;
    move |x: f64, y: &[C64], dy: &mut [C64]| {
        for i in 0..n - 1 {
            dy[i] = y[i + 1] - zeta * y[i];
        }
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            acc += cs.eval(k, x) * y[k];
        }
        dy[n - 1] = corner * y[0] - zeta * y[n - 1] - i_n * acc;
    }
}

pub fn default_ode_options(rs: &RootSystem) -> OdeOptions {
    let scale = rs.roots[0].norm().max(1.0);
    OdeOptions { h_init: 0.05 / scale, h_max: 0.5, ..OdeOptions::default() }
}

/// Samples `w_j` at `points` (sorted ascending): points on the tail side of
/// the anchor come from the integral equation, the others from propagating
/// away from the anchor. `mesh` pins the ODE step sequence.
pub fn extend(rs: &RootSystem, cs: &CoefficientSet, tail: &TailSolution, points: &[f64], mesh: Option<&[f64]>) -> Result<JostSolution> {
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("sample points must be sorted ascending".into()));
    }
    let a = tail.anchor;
    let d = tail.side.outward();
    let mut w_samples = vec![CVec::zeros(rs.order); points.len()];
    let mut inner = Vec::new();
    for (i, &x) in points.iter().enumerate() {
        if (x - a) * d >= 0.0 {
            w_samples[i] = tail.w_at(rs, x);
        } else {
            inner.push(i);
        }
    }
    if tail.side == Side::Plus {
        inner.reverse();
    }
    let outs: Vec<f64> = inner.iter().map(|&i| points[i]).collect();
    let w0 = tail.w_at(rs, a);
    let f = rescaled_rhs(rs, cs, tail.zeta);
    let res = dopri5(f, a, w0.as_slice(), &outs, cs.breakpoints(), &default_ode_options(rs), mesh)?;
    for (k, &i) in inner.iter().enumerate() {
        w_samples[i] = CVec::from_vec(res.values[k].clone());
    }
    let p = &rs.eigvecs[tail.j];
    let tail_deviation = (tail.w_at(rs, tail.x_far) - p).norm() / p.norm();
    Ok(JostSolution {
        j: tail.j,
        side: tail.side,
        anchor: a,
        zeta: tail.zeta,
        grid: points.to_vec(),
        w_samples,
        tail_deviation,
        residual_report: res.max_defect,
        mesh: res.mesh,
    })
}

/// Solves the tail equation and samples `w_j` at `points`.
pub fn jost_solution(rs: &RootSystem, cs: &CoefficientSet, j: usize, side: Side, layout: &JostLayout, points: &[f64]) -> Result<JostSolution> {
    let tail = solve_w(rs, cs, j, layout.side(side))?;
    extend(rs, cs, &tail, points, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    fn z(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kernel_examples() {
        let rs = compute_roots(2, z(-1.0, 0.0)).unwrap();
        // maximal κ_j: first sum empty for x < 0
        assert_eq!(max_abs(&kj_kernel(&rs, 0, -0.7)), 0.0);
        let k = kj_kernel(&rs, 1, -1.0);
        let expect = rs.projection(0) * C64::new((-1f64).exp(), 0.0);
        assert!(max_abs(&(k - expect)) < 1e-15);
    }

    #[test]
    fn zero_coefficients_give_eigenvectors() {
        let rs = compute_roots(3, z(0.4, 1.1)).unwrap();
        let cs = CoefficientSet::zero(3);
        let layout = JostLayout::new(&rs, &cs).unwrap();
        for side in [Side::Minus, Side::Plus] {
            for j in side.indices(&rs) {
                let sol = jost_solution(&rs, &cs, j, side, &layout, &[-3.0, 0.0, 2.5]).unwrap();
                for w in &sol.w_samples {
                    assert!((w - &rs.eigvecs[j]).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn sech2_anchor_inverts_closed_form_tail() {
        let rs = compute_roots(2, z(-4.0, 0.0)).unwrap();
        let cs = CoefficientSet::sech2(2, -2.0).unwrap();
        let a = choose_anchor(&rs, &cs, Side::Minus).unwrap();
        let c = kernel_constant(&rs, Side::Minus);
        assert!(2.0 * (1.0 + a.tanh()) <= 0.5 / c * (1.0 + 1e-8));
        assert!(2.0 * (1.0 + (a + 0.01).tanh()) > 0.5 / c);
    }

    #[test]
    fn compact_support_tail_is_trivial() {
        let rs = compute_roots(2, z(-1.0, 0.5)).unwrap();
        let cs = CoefficientSet::sech2(2, -2.0).unwrap().cutoff(3.0).unwrap();
        let a = choose_anchor(&rs, &cs, Side::Minus).unwrap();
        assert!(a <= -3.0);
        let layout = JostLayout::new(&rs, &cs).unwrap();
        let tail = solve_w(&rs, &cs, 0, &layout.minus).unwrap();
        assert!((tail.w_at(&rs, -5.0) - &rs.eigvecs[0]).norm() == 0.0);
    }

    #[test]
    fn reflectionless_jost_solution() {
        // -u'' - 2 sech² u = -κ² u has u = e^{κx}(κ - tanh x)/(κ - 1)... normalized at -∞:
        // u(x) = e^{κx}(κ - tanh x)/(κ + 1) → e^{κx} as x → -∞
        let kappa = 2.0;
        let rs = compute_roots(2, z(-kappa * kappa, 0.0)).unwrap();
        let cs = CoefficientSet::sech2(2, -2.0).unwrap();
        let layout = JostLayout::new(&rs, &cs).unwrap();
        let pts = [-12.0, -6.0, -1.0, 0.0, 1.5, 4.0];
        let sol = jost_solution(&rs, &cs, 0, Side::Minus, &layout, &pts).unwrap();
        for (x, w) in pts.iter().zip(&sol.w_samples) {
            let exact = (kappa - x.tanh()) / (kappa + 1.0);
            let dexact = kappa * exact - (1.0 / x.cosh().powi(2)) / (kappa + 1.0);
            assert!((w[0].re - exact).abs() < 1e-10, "{x}: {} vs {exact}", w[0]);
            assert!((w[1].re - dexact).abs() < 1e-10);
            assert!(w[0].im.abs() < 1e-12);
        }
        assert!(sol.tail_deviation < 1e-10);
    }

    #[test]
    fn admissible_sets() {
        let rs = compute_roots(4, z(0.3, 1.0)).unwrap();
        assert!(is_admissible_addition(&rs, Side::Minus, 1, 0));
        assert!(!is_admissible_addition(&rs, Side::Minus, 0, 1));
        assert!(is_admissible_addition(&rs, Side::Plus, 2, 3));
        assert!(!is_admissible_addition(&rs, Side::Plus, 3, 2));
        assert!(!is_admissible_addition(&rs, Side::Plus, 2, 0));
    }
}
