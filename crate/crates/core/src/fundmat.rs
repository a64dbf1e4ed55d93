//! Admissible fundamental matrices built from Jost solutions, Wronskians,
//! normalized Wronskians and transition matrices.
//!
//! The frame `U(x) = Wr(x)·diag(e^{ζ_j x})` is never formed explicitly when
//! the prefactors are large: `Wr` holds the rescaled columns `w_j` and all
//! determinants are kept in log form.

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::jost::{extend, is_admissible_addition, solve_w, JostLayout, JostSolution, Side};
use crate::linalg::{cexp, cond1, inverse, log_det, CMat, CVec, C64};
use crate::roots::{compute_roots, RootSystem};

/// Condition number above which a frame is reported as nearly singular.
pub const COND_LIMIT: f64 = 1e12;

/// Jost solutions `u_j^{(-)}`, `j < n`, and `u_j^{(+)}`, `j ≥ n`, sampled at
/// common points.
#[derive(Debug, Clone)]
pub struct JostSet {
    pub rs: RootSystem,
    pub points: Vec<f64>,
    pub solutions: Vec<JostSolution>,
}

impl JostSet {
    /// `points` must be sorted ascending.
    pub fn compute(rs: &RootSystem, cs: &CoefficientSet, layout: &JostLayout, points: &[f64]) -> Result<Self> {
        Self::compute_with_meshes(rs, cs, layout, points, None)
    }

    /// Like [`Self::compute`] but replays the ODE step sequences of
    /// `reference`, which must have been computed for the same points.
    pub fn compute_pinned(rs: &RootSystem, cs: &CoefficientSet, layout: &JostLayout, reference: &JostSet) -> Result<Self> {
        let meshes: Vec<Vec<f64>> = reference.solutions.iter().map(|s| s.mesh.clone()).collect();
        if reference.rs.n != rs.n || reference.rs.order != rs.order {
            return Err(Error::InvalidArgument("pinned evaluation changes the number of growing roots".into()));
        }
        Self::compute_with_meshes(rs, cs, layout, &reference.points, Some(&meshes))
    }

    fn compute_with_meshes(rs: &RootSystem, cs: &CoefficientSet, layout: &JostLayout, points: &[f64], meshes: Option<&[Vec<f64>]>) -> Result<Self> {
        let mut sorted = points.to_vec();
        sorted.sort_by(f64::total_cmp);
        if sorted != points {
            return Err(Error::InvalidArgument("frame points must be sorted ascending".into()));
        }
        let mut solutions = Vec::with_capacity(rs.order);
        for j in 0..rs.order {
            let side = if j < rs.n { Side::Minus } else { Side::Plus };
            let tail = solve_w(rs, cs, j, layout.side(side))?;
            let mesh = meshes.map(|m| m[j].as_slice());
            solutions.push(extend(rs, cs, &tail, points, mesh)?);
        }
        Ok(Self { rs: rs.clone(), points: points.to_vec(), solutions })
    }

    pub fn index_of(&self, x: f64) -> Result<usize> {
        self.points
            .iter()
            .position(|&p| p == x)
            .ok_or_else(|| Error::InvalidArgument(format!("x = {x} is not a sample point of this Jost set")))
    }

    pub fn w(&self, j: usize, i: usize) -> &CVec {
        &self.solutions[j].w_samples[i]
    }

    /// Replaces `u_j` by `u_j + c·u_l`, which must be an admissible
    /// modification (same side, `u_l` decaying faster).
    pub fn modify(&mut self, j: usize, l: usize, c: C64) -> Result<()> {
        let side = if j < self.rs.n { Side::Minus } else { Side::Plus };
        if !is_admissible_addition(&self.rs, side, j, l) {
            return Err(Error::InvalidArgument(format!("adding u_{l} to u_{j} is not admissible")));
        }
        let shift = self.rs.roots[l] - self.rs.roots[j];
        for i in 0..self.points.len() {
            let add = self.solutions[l].w_samples[i].clone() * (c * cexp(shift * self.points[i]));
            self.solutions[j].w_samples[i] += add;
        }
        Ok(())
    }

    /// Replaces the solutions of `side` by `u'_j = Σ_l m[(l, j)] u_l`, a change
    /// of basis of the decaying subspace.
    pub fn recombine(&mut self, side: Side, m: &CMat) -> Result<()> {
        let range = side.indices(&self.rs);
        if m.nrows() != range.len() || m.ncols() != range.len() {
            return Err(Error::InvalidArgument("recombination matrix has the wrong size".into()));
        }
        let old: Vec<Vec<CVec>> = range.clone().map(|l| self.solutions[l].w_samples.clone()).collect();
        for (jj, j) in range.clone().enumerate() {
            for i in 0..self.points.len() {
                let x = self.points[i];
                let mut acc = CVec::zeros(self.rs.order);
                for (ll, l) in range.clone().enumerate() {
                    acc += &old[ll][i] * (m[(ll, jj)] * cexp((self.rs.roots[l] - self.rs.roots[j]) * x));
                }
                self.solutions[j].w_samples[i] = acc;
            }
        }
        Ok(())
    }

    pub fn frame(&self, i: usize) -> Result<FundamentalFrame> {
        frame(&self.rs, self, i)
    }

    pub fn frame_at(&self, x: f64) -> Result<FundamentalFrame> {
        self.frame(self.index_of(x)?)
    }
}

/// `U(x)` and `G(x) = U(x)^{-1}` in rescaled form.
#[derive(Debug, Clone)]
pub struct FundamentalFrame {
    pub x: f64,
    pub z: C64,
    pub zeta: Vec<C64>,
    /// Columns `w_j(x)`; `U = wr · diag(e^{ζ_j x})`.
    pub wr: CMat,
    /// `G = diag(e^{-ζ_j x}) · wr_inv`.
    pub wr_inv: CMat,
    /// `log det U(x)`.
    pub logdet: C64,
    pub cond: f64,
}

impl FundamentalFrame {
    fn prefactors(&self) -> Option<Vec<C64>> {
        let e: Vec<C64> = self.zeta.iter().map(|z| z * self.x).collect();
        e.iter().all(|v| v.re.abs() <= 300.0).then(|| e.iter().map(|v| v.exp()).collect())
    }

    /// Explicit `U(x)` when the prefactors are representable.
    pub fn u(&self) -> Option<CMat> {
        let e = self.prefactors()?;
        let mut u = self.wr.clone();
        for (j, f) in e.iter().enumerate() {
            let col = u.column(j) * *f;
            u.set_column(j, &col);
        }
        Some(u)
    }

    /// Explicit `G(x)` when the prefactors are representable.
    pub fn g(&self) -> Option<CMat> {
        let e = self.prefactors()?;
        let mut g = self.wr_inv.clone();
        for (j, f) in e.iter().enumerate() {
            let row = g.row(j) / *f;
            g.set_row(j, &row);
        }
        Some(g)
    }

    /// `max |U G − I|`, computed in rescaled form.
    pub fn inverse_defect(&self) -> f64 {
        let p = &self.wr * &self.wr_inv;
        let n = p.nrows();
        (p - CMat::identity(n, n)).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Frame at sample `i` of `set`.
pub fn frame(rs: &RootSystem, set: &JostSet, i: usize) -> Result<FundamentalFrame> {
    let n = rs.order;
    let x = set.points[i];
    let wr = CMat::from_fn(n, n, |r, c| set.w(c, i)[r]);
    let wr_inv = inverse(&wr).map_err(|_| Error::NearSingular { x, cond: f64::INFINITY })?;
    // column scaling only changes the prefactors, so condition the
    // equilibrated matrix
    let scale: Vec<f64> = (0..n).map(|j| wr.column(j).norm().max(1e-300)).collect();
    let wr_eq = CMat::from_fn(n, n, |r, c| wr[(r, c)] / scale[c]);
    let inv_eq = CMat::from_fn(n, n, |r, c| wr_inv[(r, c)] * scale[r]);
    let cond = cond1(&wr_eq, &inv_eq);
    if !(cond <= COND_LIMIT) {
        return Err(Error::NearSingular { x, cond });
    }
    let logdet = rs.root_sum() * x + log_det(&wr)?;
    Ok(FundamentalFrame { x, z: rs.z, zeta: rs.roots.clone(), wr, wr_inv, logdet, cond })
}

/// `log W₀(x) = log ∏_{j<k}(ζ_k − ζ_j) + (Σ_j ζ_j) x`.
pub fn free_wronskian(rs: &RootSystem, x: f64) -> C64 {
    rs.log_vandermonde_det() + rs.root_sum() * x
}

#[derive(Debug, Clone, Copy)]
pub struct WronskianValue {
    pub x: f64,
    pub z: C64,
    pub log_w: C64,
    pub log_w0: C64,
    pub delta: C64,
}

/// `Δ(x, z) = W(x, z) / W₀(z)` at sample `i`.
pub fn normalized_wronskian(rs: &RootSystem, set: &JostSet, i: usize) -> Result<WronskianValue> {
    let f = frame(rs, set, i)?;
    let log_w0 = free_wronskian(rs, f.x);
    Ok(WronskianValue { x: f.x, z: rs.z, log_w: f.logdet, log_w0, delta: (f.logdet - log_w0).exp() })
}

/// Transition coefficients of compactly supported coefficients.
#[derive(Debug, Clone)]
pub struct TransitionMatrices {
    /// `t_{j,k}`, `j, k < n`: `u_j^{(-)}` right of the support.
    pub t_plus: CMat,
    /// `t_{j,k}`, `j, k ≥ n`: `u_j^{(+)}` left of the support.
    pub t_minus: CMat,
    /// All coefficients `k = 1..N` of the `u_j^{(-)}` expansion (diagnostic).
    pub full_plus: CMat,
    /// All coefficients of the `u_j^{(+)}` expansion (diagnostic).
    pub full_minus: CMat,
    pub radius: f64,
}

/// Expands `u_j^{(-)}` (`u_j^{(+)}`) in the free basis `p_k e^{ζ_k x}` at a
/// point right (left) of the support.
pub fn transition_matrices(rs: &RootSystem, cs: &CoefficientSet, layout: &JostLayout) -> Result<TransitionMatrices> {
    let r = cs
        .support_radius
        .ok_or_else(|| Error::UnsupportedCoefficients("transition matrices need compactly supported coefficients".into()))?;
    let set = JostSet::compute(rs, cs, layout, &[-r, r])?;
    let (n, big_n) = (rs.n, rs.order);
    let vinv = rs.vandermonde_inverse();
    let mut full_plus = CMat::zeros(n, big_n);
    let mut full_minus = CMat::zeros(big_n - n, big_n);
    for j in 0..big_n {
        let (i, x) = if j < n { (1, r) } else { (0, -r) };
        let c = vinv * set.w(j, i);
        for k in 0..big_n {
            let t = c[k] * cexp((rs.roots[j] - rs.roots[k]) * x);
            if j < n {
                full_plus[(j, k)] = t;
            } else {
                full_minus[(j - n, k)] = t;
            }
        }
    }
    let t_plus = full_plus.columns(0, n).into_owned();
    let t_minus = full_minus.columns(n, big_n - n).into_owned();
    Ok(TransitionMatrices { t_plus, t_minus, full_plus, full_minus, radius: r })
}

/// Step for z-differencing: `1e-3·max(1, |z|)`, kept well inside the
/// resolvent set.
pub fn z_step(order: usize, z: C64) -> f64 {
    let dist = if order.is_multiple_of(2) {
        if z.re <= 0.0 {
            z.norm()
        } else {
            z.im.abs()
        }
    } else {
        z.im.abs()
    };
    (1e-3 * z.norm().max(1.0)).min(0.05 * dist)
}

/// Derivative estimate from Richardson-extrapolated central differences.
#[derive(Debug, Clone)]
pub struct Derivative {
    pub value: Vec<C64>,
    pub error: f64,
    /// Two successive estimates agreed to the requested tolerance.
    pub converged: bool,
    pub step: f64,
}

/// Fourth-order central differences in `z` along the real direction, with
/// step halving until two estimates agree to `tol` (relative), followed by
/// one Richardson step.
pub fn z_derivative<F: Fn(C64) -> Result<Vec<C64>>>(f: F, z: C64, h0: f64, tol: f64) -> Result<Derivative> {
    let stencil = |h: f64| -> Result<Vec<C64>> {
        let fm2 = f(z - 2.0 * h)?;
        let fm1 = f(z - h)?;
        let fp1 = f(z + h)?;
        let fp2 = f(z + 2.0 * h)?;
        Ok((0..fm2.len()).map(|k| (fm2[k] - fm1[k] * 8.0 + fp1[k] * 8.0 - fp2[k]) / (12.0 * h)).collect())
    };
    let diff = |a: &[C64], b: &[C64]| -> f64 {
        let scale = a.iter().map(|v| v.norm()).fold(1e-300, f64::max);
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale.max(1.0)
    };
    let mut h = h0;
    let mut coarse = stencil(h)?;
    let mut best: Option<(f64, Vec<C64>, f64)> = None;
    for _ in 0..4 {
        let fine = stencil(h / 2.0)?;
        let d = diff(&fine, &coarse);
        let extrap: Vec<C64> = fine.iter().zip(&coarse).map(|(a, b)| a + (a - b) / 15.0).collect();
        if d <= tol {
            return Ok(Derivative { value: extrap, error: d / 15.0, converged: true, step: h / 2.0 });
        }
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, extrap, h / 2.0));
        }
        coarse = fine;
        h /= 2.0;
    }
    let (d, value, step) = best.unwrap();
    Ok(Derivative { value, error: d / 15.0, converged: false, step })
}

/// Evaluates `Δ(x, z)` for varying `z` on a fixed layout, so that the
/// discrete `Δ` is a smooth function of `z`.
#[derive(Debug, Clone)]
pub struct DeltaEvaluator {
    pub order: usize,
    pub cs: CoefficientSet,
    pub layout: JostLayout,
    pub x: f64,
    reference: Option<JostSet>,
}

impl DeltaEvaluator {
    /// Layout covering every point of `zs`.
    pub fn new(order: usize, cs: &CoefficientSet, zs: &[C64], x: f64) -> Result<Self> {
        let layout = JostLayout::covering(order, cs, zs)?;
        Ok(Self { order, cs: cs.clone(), layout, x, reference: None })
    }

    /// Fixes the ODE step sequences to those used at `z`.
    pub fn pin(&mut self, z: C64) -> Result<()> {
        let rs = compute_roots(self.order, z)?;
        self.reference = Some(JostSet::compute(&rs, &self.cs, &self.layout, &[self.x])?);
        Ok(())
    }

    pub fn jost_set(&self, z: C64) -> Result<JostSet> {
        let rs = compute_roots(self.order, z)?;
        match &self.reference {
            Some(r) if r.rs.n == rs.n => JostSet::compute_pinned(&rs, &self.cs, &self.layout, r),
            _ => JostSet::compute(&rs, &self.cs, &self.layout, &[self.x]),
        }
    }

    pub fn wronskian(&self, z: C64) -> Result<WronskianValue> {
        let set = self.jost_set(z)?;
        normalized_wronskian(&set.rs, &set, 0)
    }

    pub fn delta(&self, z: C64) -> Result<C64> {
        Ok(self.wronskian(z)?.delta)
    }

    /// `Δ̇(z)/Δ(z)` with its error estimate.
    pub fn log_derivative(&self, z: C64) -> Result<(C64, Derivative)> {
        self.log_derivative_with_step(z, z_step(self.order, z))
    }

    /// Like [`Self::log_derivative`] with an explicit initial step.
    pub fn log_derivative_with_step(&self, z: C64, h: f64) -> Result<(C64, Derivative)> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("z step must be positive, got {h}")));
        }
        let d0 = self.delta(z)?;
        let der = z_derivative(|s| Ok(vec![self.delta(s)?]), z, h, 1e-8)?;
        Ok((der.value[0] / d0, der))
    }
}
