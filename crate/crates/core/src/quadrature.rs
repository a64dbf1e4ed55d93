//! Gauss-Legendre panels, adaptive Gauss-Kronrod integration, and
//! product-integration weights for exponentially weighted Volterra integrals
//! of the form `∫ e^{c(x-y)} h(y) dy`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::linalg::{cexp, CMat, C64};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let m = NonZeroUsize::new(m.max(1)).unwrap();
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(m).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Barycentric Lagrange interpolation on a fixed set of reference nodes.
#[derive(Debug, Clone)]
pub struct Lagrange {
    nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl Lagrange {
    pub fn new(nodes: &[f64]) -> Self {
        let bary = (0..nodes.len())
            .map(|k| {
                let prod: f64 = (0..nodes.len())
                    .filter(|&l| l != k)
                    .map(|l| nodes[k] - nodes[l])
                    .product();
                1.0 / prod
            })
            .collect();
        Self { nodes: nodes.to_vec(), bary }
    }

    /// Values of every basis polynomial at `t`.
    pub fn basis(&self, t: f64, out: &mut [f64]) {
        if let Some(k) = self.nodes.iter().position(|&n| n == t) {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[k] = 1.0;
            return;
        }
        let mut denom = 0.0;
        for (k, (&n, &b)) in self.nodes.iter().zip(&self.bary).enumerate() {
            let q = b / (t - n);
            out[k] = q;
            denom += q;
        }
        out.iter_mut().for_each(|v| *v /= denom);
    }

    /// Differentiation matrix `D[i][k] = ℓ_k'(t_i)` on the reference nodes.
    pub fn diff_matrix(&self) -> Vec<Vec<f64>> {
        let m = self.nodes.len();
        let mut d = vec![vec![0.0; m]; m];
        for i in 0..m {
            let mut diag = 0.0;
            for k in 0..m {
                if k != i {
                    d[i][k] = self.bary[k] / self.bary[i] / (self.nodes[i] - self.nodes[k]);
                    diag -= d[i][k];
                }
            }
            d[i][i] = diag;
        }
        d
    }
}

/// Composite Gauss-Legendre rule on a sequence of panels.
#[derive(Debug, Clone)]
pub struct PanelGrid {
    pub edges: Vec<f64>,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    ref_nodes: Vec<f64>,
    lagrange: Lagrange,
}

impl PanelGrid {
    /// `edges` must be strictly increasing.
    pub fn new(edges: Vec<f64>, order: usize) -> Self {
        let (rn, rw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(order * edges.len().saturating_sub(1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (t, wt) in rn.iter().zip(&rw) {
                nodes.push(mid + half * t);
                weights.push(half * wt);
            }
        }
        let lagrange = Lagrange::new(&rn);
        Self { edges, order, nodes, weights, ref_nodes: rn, lagrange }
    }

    /// Uniform panels of length at most `h` on `[a, b]`.
    pub fn uniform(a: f64, b: f64, h: f64, order: usize) -> Self {
        let count = (((b - a) / h).ceil() as usize).max(1);
        let edges = (0..=count).map(|k| a + (b - a) * k as f64 / count as f64).collect();
        Self::new(edges, order)
    }

    pub fn panels(&self) -> usize {
        self.edges.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panel_bounds(&self, p: usize) -> (f64, f64) {
        (self.edges[p], self.edges[p + 1])
    }

    /// Index of the panel containing `x` (clamped to the grid).
    pub fn panel_of(&self, x: f64) -> usize {
        let p = self.edges.partition_point(|&e| e <= x);
        p.saturating_sub(1).min(self.panels().saturating_sub(1))
    }

    pub fn integrate(&self, values: &[C64]) -> C64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Lagrange basis of panel `p` evaluated at physical point `x`.
    pub fn basis_at(&self, p: usize, x: f64, out: &mut [f64]) {
        let (a, b) = self.panel_bounds(p);
        let t = (2.0 * x - a - b) / (b - a);
        self.lagrange.basis(t, out);
    }

    /// Spectral derivative of nodal samples, panel by panel.
    pub fn differentiate(&self, values: &[C64]) -> Vec<C64> {
        let d = self.lagrange.diff_matrix();
        let m = self.order;
        let mut out = vec![C64::new(0.0, 0.0); values.len()];
        for p in 0..self.panels() {
            let (a, b) = self.panel_bounds(p);
            let scale = 2.0 / (b - a);
            for i in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..m {
                    acc += values[p * m + k] * d[i][k];
                }
                out[p * m + i] = acc * scale;
            }
        }
        out
    }

    pub fn reference_nodes(&self) -> &[f64] {
        &self.ref_nodes
    }
}

/// Weights `∫_α^β e^{c(x_ref - y)} ℓ_k(y) dy` for every basis polynomial of
/// panel `p`.
fn exp_moments(grid: &PanelGrid, p: usize, c: C64, x_ref: f64, alpha: f64, beta: f64) -> Vec<C64> {
    let m = grid.order;
    let mut out = vec![C64::new(0.0, 0.0); m];
    if beta <= alpha {
        return out;
    }
    let (qn, qw) = sub_rule();
    let pieces = ((c.norm() * (beta - alpha) / 4.0).ceil() as usize).clamp(1, 64);
    let mut basis = vec![0.0; m];
    for piece in 0..pieces {
        let lo = alpha + (beta - alpha) * piece as f64 / pieces as f64;
        let hi = alpha + (beta - alpha) * (piece + 1) as f64 / pieces as f64;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (t, w) in qn.iter().zip(qw.iter()) {
            let y = mid + half * t;
            grid.basis_at(p, y, &mut basis);
            let e = cexp(c * (x_ref - y)) * (half * w);
            for k in 0..m {
                out[k] += e * basis[k];
            }
        }
    }
    out
}

fn sub_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(24))
}

/// Product-integration rule for `L(x) = ∫_{left}^{x} e^{c(x-y)} h(y) dy` and
/// `R(x) = ∫_{x}^{right} e^{c(x-y)} h(y) dy` where `h` is known at the nodes
/// of a panel grid. The exponential is integrated exactly against the
/// interpolating polynomial of `h`, so the kink of the kernel at `y = x`
/// costs no accuracy.
#[derive(Debug, Clone)]
pub struct ExpVolterra {
    pub c: C64,
    /// `μL[p][k] = ∫_panel e^{c(b_p - y)} ℓ_k`
    full_left: Vec<Vec<C64>>,
    /// `μR[p][k] = ∫_panel e^{c(a_p - y)} ℓ_k`
    full_right: Vec<Vec<C64>>,
    /// `νL[i][k] = ∫_{a_p}^{x_i} e^{c(x_i - y)} ℓ_k`
    part_left: Vec<Vec<C64>>,
    /// `νR[i][k] = ∫_{x_i}^{b_p} e^{c(x_i - y)} ℓ_k`
    part_right: Vec<Vec<C64>>,
}

impl ExpVolterra {
    pub fn new(grid: &PanelGrid, c: C64) -> Self {
        let mut full_left = Vec::with_capacity(grid.panels());
        let mut full_right = Vec::with_capacity(grid.panels());
        let mut part_left = Vec::with_capacity(grid.len());
        let mut part_right = Vec::with_capacity(grid.len());
        for p in 0..grid.panels() {
            let (a, b) = grid.panel_bounds(p);
            full_left.push(exp_moments(grid, p, c, b, a, b));
            full_right.push(exp_moments(grid, p, c, a, a, b));
            for i in 0..grid.order {
                let x = grid.nodes[p * grid.order + i];
                part_left.push(exp_moments(grid, p, c, x, a, x));
                part_right.push(exp_moments(grid, p, c, x, x, b));
            }
        }
        Self { c, full_left, full_right, part_left, part_right }
    }

    /// `L(x_i)` at every node.
    pub fn apply_left(&self, grid: &PanelGrid, h: &[C64]) -> Vec<C64> {
        let m = grid.order;
        let mut out = vec![C64::new(0.0, 0.0); grid.len()];
        let mut carry = C64::new(0.0, 0.0); // L at the right edge of the previous panel
        for p in 0..grid.panels() {
            let (a, b) = grid.panel_bounds(p);
            let hp = &h[p * m..(p + 1) * m];
            for i in 0..m {
                let idx = p * m + i;
                let x = grid.nodes[idx];
                let part: C64 = self.part_left[idx].iter().zip(hp).map(|(w, v)| w * v).sum();
                out[idx] = cexp(self.c * (x - a)) * carry + part;
            }
            let full: C64 = self.full_left[p].iter().zip(hp).map(|(w, v)| w * v).sum();
            carry = cexp(self.c * (b - a)) * carry + full;
        }
        out
    }

    /// `R(x_i)` at every node.
    pub fn apply_right(&self, grid: &PanelGrid, h: &[C64]) -> Vec<C64> {
        let m = grid.order;
        let mut out = vec![C64::new(0.0, 0.0); grid.len()];
        let mut carry = C64::new(0.0, 0.0); // R at the left edge of the next panel
        for p in (0..grid.panels()).rev() {
            let (a, b) = grid.panel_bounds(p);
            let hp = &h[p * m..(p + 1) * m];
            for i in 0..m {
                let idx = p * m + i;
                let x = grid.nodes[idx];
                let part: C64 = self.part_right[idx].iter().zip(hp).map(|(w, v)| w * v).sum();
                out[idx] = cexp(self.c * (x - b)) * carry + part;
            }
            let full: C64 = self.full_right[p].iter().zip(hp).map(|(w, v)| w * v).sum();
            carry = cexp(self.c * (a - b)) * carry + full;
        }
        out
    }

    /// Dense matrix `A` with `L(x_i) = Σ_k A[i,k] h_k`.
    pub fn left_matrix(&self, grid: &PanelGrid) -> CMat {
        let m = grid.order;
        let n = grid.len();
        CMat::from_fn(n, n, |i, k| {
            let p = i / m;
            let q = k / m;
            if q > p {
                C64::new(0.0, 0.0)
            } else if q == p {
                self.part_left[i][k % m]
            } else {
                let bq = grid.edges[q + 1];
                cexp(self.c * (grid.nodes[i] - bq)) * self.full_left[q][k % m]
            }
        })
    }

    /// Dense matrix `B` with `R(x_i) = Σ_k B[i,k] h_k`.
    pub fn right_matrix(&self, grid: &PanelGrid) -> CMat {
        let m = grid.order;
        let n = grid.len();
        CMat::from_fn(n, n, |i, k| {
            let p = i / m;
            let q = k / m;
            if q < p {
                C64::new(0.0, 0.0)
            } else if q == p {
                self.part_right[i][k % m]
            } else {
                let aq = grid.edges[q];
                cexp(self.c * (grid.nodes[i] - aq)) * self.full_right[q][k % m]
            }
        })
    }

    /// `L(x)` at an arbitrary point; nodes right of `x` are ignored.
    pub fn left_at(&self, grid: &PanelGrid, h: &[C64], x: f64) -> C64 {
        let m = grid.order;
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..grid.panels() {
            let (a, b) = grid.panel_bounds(p);
            if a >= x {
                break;
            }
            let hp = &h[p * m..(p + 1) * m];
            let w = if b <= x {
                self.full_left[p].iter().map(|w| w * cexp(self.c * (x - b))).collect::<Vec<_>>()
            } else {
                exp_moments(grid, p, self.c, x, a, x)
            };
            acc += w.iter().zip(hp).map(|(w, v)| w * v).sum::<C64>();
        }
        acc
    }

    /// `R(x)` at an arbitrary point; nodes left of `x` are ignored.
    pub fn right_at(&self, grid: &PanelGrid, h: &[C64], x: f64) -> C64 {
        let m = grid.order;
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..grid.panels() {
            let (a, b) = grid.panel_bounds(p);
            if b <= x {
                continue;
            }
            let hp = &h[p * m..(p + 1) * m];
            let w = if a >= x {
                self.full_right[p].iter().map(|w| w * cexp(self.c * (x - a))).collect::<Vec<_>>()
            } else {
                exp_moments(grid, p, self.c, x, x, b)
            };
            acc += w.iter().zip(hp).map(|(w, v)| w * v).sum::<C64>();
        }
        acc
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let s = f(mid - dx) + f(mid + dx);
        kron += s * WGK[k];
        if k % 2 == 1 {
            gauss += s * WG[k / 2];
        }
    }
    ((kron * half), ((kron - gauss) * half).norm())
}

/// Adaptive Gauss-Kronrod (7/15) integration of a complex integrand on a
/// finite interval. Returns the value and an error estimate.
pub fn integrate_adaptive<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<(C64, f64)> {
    if a == b {
        return Ok((C64::new(0.0, 0.0), 0.0));
    }
    let mut intervals = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..2000 {
        let total: C64 = intervals.iter().map(|iv| iv.2 .0).sum();
        let err: f64 = intervals.iter().map(|iv| iv.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok((total, err));
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        intervals.push((lo, mid, gk15(&f, lo, mid)));
        intervals.push((mid, hi, gk15(&f, mid, hi)));
    }
    let total: C64 = intervals.iter().map(|iv| iv.2 .0).sum();
    let err: f64 = intervals.iter().map(|iv| iv.2 .1).sum();
    if err <= 1e3 * abs_tol.max(rel_tol * total.norm()) {
        Ok((total, err))
    } else {
        Err(Error::Quadrature(format!("no convergence on [{a}, {b}], error estimate {err:.3e}")))
    }
}

/// Integrates over `[a, ∞)` (`towards_plus = true`) or `(-∞, a]` using the
/// substitution `y = a ± t / (1 - t)`.
pub fn integrate_half_line<F: Fn(f64) -> C64>(f: F, a: f64, towards_plus: bool, abs_tol: f64, rel_tol: f64) -> Result<(C64, f64)> {
    let sign = if towards_plus { 1.0 } else { -1.0 };
    let g = |t: f64| {
        let s = 1.0 - t;
        let y = a + sign * t / s;
        let v = f(y);
        if v.norm() == 0.0 {
            v
        } else {
            v / (s * s)
        }
    };
    integrate_adaptive(g, 0.0, 1.0, abs_tol, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn panel_grid_integrates_polynomials_exactly() {
        let grid = PanelGrid::uniform(-1.0, 2.0, 0.7, 6);
        let vals: Vec<C64> = grid.nodes.iter().map(|&x| C64::new(x.powi(5), 0.0)).collect();
        let exact = (2f64.powi(6) - 1.0) / 6.0;
        assert_relative_eq!(grid.integrate(&vals).re, exact, epsilon = 1e-12);
    }

    #[test]
    fn exp_volterra_matches_closed_form() {
        // h ≡ 1, c = -2: L(x) = (1 - e^{-2(x - a)}) / 2
        let grid = PanelGrid::uniform(0.0, 3.0, 0.5, 12);
        let c = C64::new(-2.0, 0.7);
        let ev = ExpVolterra::new(&grid, c);
        let h = vec![C64::new(1.0, 0.0); grid.len()];
        let left = ev.apply_left(&grid, &h);
        let right = ev.apply_right(&grid, &h);
        let lm = ev.left_matrix(&grid);
        let rm = ev.right_matrix(&grid);
        for (i, &x) in grid.nodes.iter().enumerate() {
            let exact_l = (C64::new(1.0, 0.0) - (c * x).exp()) / (-c);
            let exact_r = ((c * (x - 3.0)).exp() - 1.0) / (-c);
            assert!((left[i] - exact_l).norm() < 1e-13);
            assert!((right[i] - exact_r).norm() < 1e-13);
            let lrow: C64 = (0..grid.len()).map(|k| lm[(i, k)]).sum();
            let rrow: C64 = (0..grid.len()).map(|k| rm[(i, k)]).sum();
            assert!((lrow - exact_l).norm() < 1e-13);
            assert!((rrow - exact_r).norm() < 1e-13);
        }
        let x = 1.234;
        let exact_l = (C64::new(1.0, 0.0) - (c * x).exp()) / (-c);
        assert!((ev.left_at(&grid, &h, x) - exact_l).norm() < 1e-13);
        let exact_r = ((c * (x - 3.0)).exp() - 1.0) / (-c);
        assert!((ev.right_at(&grid, &h, x) - exact_r).norm() < 1e-13);
    }

    #[test]
    fn adaptive_half_line() {
        let (v, _) = integrate_half_line(|y| C64::new((-y * y).exp(), 0.0), 0.0, true, 1e-14, 1e-12).unwrap();
        assert_relative_eq!(v.re, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-11);
    }

    #[test]
    fn spectral_differentiation() {
        let grid = PanelGrid::uniform(0.0, 2.0, 0.5, 14);
        let vals: Vec<C64> = grid.nodes.iter().map(|&x| C64::new(x.sin(), 0.0)).collect();
        let d = grid.differentiate(&vals);
        for (i, &x) in grid.nodes.iter().enumerate() {
            assert!((d[i].re - x.cos()).abs() < 1e-10);
        }
    }
}
