//! Adaptive Dormand-Prince 5(4) integrator for complex linear systems.

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, h_init: 1e-2, h_max: 1.0, h_min: 1e-12, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct OdeOutput {
    /// Solution at each requested output point.
    pub values: Vec<Vec<C64>>,
    /// Every accepted step endpoint, starting at `x0`.
    pub mesh: Vec<f64>,
    /// Largest local error estimate per unit length, relative to the solution size.
    pub max_defect: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stepper {
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
    y_new: Vec<C64>,
    err: Vec<C64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z.clone(),
            y_new: z.clone(),
            err: z,
        }
    }

    /// One step of size `h` from `(x, y)`; `k[0]` must hold `f(x, y)`.
    fn step<F: Fn(f64, &[C64], &mut [C64])>(&mut self, f: &F, x: f64, y: &[C64], h: f64) {
        let n = y.len();
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let tmp = &mut self.tmp;
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (h * A21);
        }
        f(x + C2 * h, tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
        }
        f(x + C3 * h, tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
        }
        f(x + C4 * h, tmp, k4);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
        }
        f(x + C5 * h, tmp, k5);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
        }
        f(x + h, tmp, k6);
        for i in 0..n {
            self.y_new[i] = y[i] + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h;
        }
        f(x + h, &self.y_new, k7);
        for i in 0..n {
            self.err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        }
    }

    fn error_norm(&self, y: &[C64], opts: &OdeOptions) -> f64 {
        let n = y.len();
        let s: f64 = (0..n)
            .map(|i| {
                let sc = opts.atol + opts.rtol * y[i].norm().max(self.y_new[i].norm());
                (self.err[i].norm() / sc).powi(2)
            })
            .sum();
        (s / n as f64).sqrt()
    }
}

fn sup(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Integrates `y' = f(x, y)` from `x0` through every point of `outputs`
/// (monotone, all on the same side of `x0`). Steps never cross a point of
/// `stops`. With `fixed_mesh`, the step sequence is taken from that mesh
/// instead of being chosen adaptively, which keeps results smooth in any
/// parameter the right-hand side depends on.
pub fn dopri5<F: Fn(f64, &[C64], &mut [C64])>(
    f: F,
    x0: f64,
    y0: &[C64],
    outputs: &[f64],
    stops: &[f64],
    opts: &OdeOptions,
    fixed_mesh: Option<&[f64]>,
) -> Result<OdeOutput> {
    let n = y0.len();
    let dir = match outputs.iter().find(|&&x| x != x0) {
        Some(&x) if x > x0 => 1.0,
        Some(_) => -1.0,
        None => 1.0,
    };
    if outputs.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) || outputs.iter().any(|&x| (x - x0) * dir < 0.0) {
        return Err(Error::InvalidArgument("ODE output points must be monotone away from the start".into()));
    }
    let end = outputs.last().copied().unwrap_or(x0);
    // all points the integrator must land on exactly
    let mut knots: Vec<f64> = outputs.to_vec();
    knots.extend(stops.iter().copied().filter(|&s| (s - x0) * dir > 0.0 && (end - s) * dir > 0.0));
    if let Some(mesh) = fixed_mesh {
        knots.extend(mesh.iter().copied().filter(|&s| (s - x0) * dir > 0.0 && (end - s) * dir > 0.0));
    }
    knots.sort_by(|a, b| (a * dir).total_cmp(&(b * dir)));
    knots.dedup();

    let mut values = Vec::with_capacity(outputs.len());
    let mut next_out = 0;
    let mut y = y0.to_vec();
    let mut x = x0;
    let mut mesh = vec![x0];
    let mut max_defect: f64 = 0.0;
    let mut st = Stepper::new(n);
    f(x, &y, &mut st.k[0]);
    while next_out < outputs.len() && outputs[next_out] == x0 {
        values.push(y.clone());
        next_out += 1;
    }
    let mut h = opts.h_init.min(opts.h_max);
    let mut steps = 0;
    for &knot in &knots {
        while (knot - x) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::IntegratorFailure { x, step: h });
            }
            let remaining = (knot - x).abs();
            let fixed = fixed_mesh.is_some();
            let (hh, last) = if fixed || h >= remaining * (1.0 - 1e-12) {
                (remaining, true)
            } else {
                (h, false)
            };
            st.step(&f, x, &y, hh * dir);
            let err = st.error_norm(&y, opts);
            if !err.is_finite() {
                if fixed {
                    return Err(Error::IntegratorFailure { x, step: hh });
                }
                h = 0.25 * hh;
                if h < opts.h_min {
                    return Err(Error::IntegratorFailure { x, step: h });
                }
                continue;
            }
            if err <= 1.0 || fixed {
                let scale = sup(&y).max(sup(&st.y_new)).max(1e-300);
                max_defect = max_defect.max(sup(&st.err) / (hh * scale));
                x = if last { knot } else { x + hh * dir };
                std::mem::swap(&mut y, &mut st.y_new);
                let k7 = std::mem::take(&mut st.k[6]);
                st.k[6] = std::mem::replace(&mut st.k[0], k7);
                mesh.push(x);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !fixed {
                    h = (hh * fac).min(opts.h_max);
                }
            } else {
                h = hh * (0.9 * err.powf(-0.2)).max(0.1);
                if h < opts.h_min {
                    return Err(Error::IntegratorFailure { x, step: h });
                }
            }
        }
        while next_out < outputs.len() && outputs[next_out] == x {
            values.push(y.clone());
            next_out += 1;
        }
    }
    Ok(OdeOutput { values, mesh, max_defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // y'' = -y as a complex system, exact solution (cos x, -sin x)
        let f = |_x: f64, y: &[C64], dy: &mut [C64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let outs = [0.5, 1.0, 3.0, 10.0];
        let y0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let res = dopri5(f, 0.0, &y0, &outs, &[2.0], &OdeOptions::default(), None).unwrap();
        for (x, v) in outs.iter().zip(&res.values) {
            assert!((v[0].re - x.cos()).abs() < 1e-10);
            assert!((v[1].re + x.sin()).abs() < 1e-10);
        }
        assert!(res.mesh.contains(&2.0));
        // replaying the mesh reproduces the adaptive result
        let again = dopri5(f, 0.0, &y0, &outs, &[2.0], &OdeOptions::default(), Some(&res.mesh)).unwrap();
        for (a, b) in again.values.iter().zip(&res.values) {
            assert!((a[0] - b[0]).norm() < 1e-14 && (a[1] - b[1]).norm() < 1e-14);
        }
    }

    #[test]
    fn backward_complex_exponential() {
        let lam = C64::new(-0.3, 2.0);
        let f = move |_x: f64, y: &[C64], dy: &mut [C64]| dy[0] = lam * y[0];
        let res = dopri5(f, 1.0, &[C64::new(1.0, 0.0)], &[0.0, -2.0], &[], &OdeOptions::default(), None).unwrap();
        let exact = (lam * -3.0).exp();
        assert!((res.values[1][0] - exact).norm() < 1e-10 * exact.norm());
    }
}
