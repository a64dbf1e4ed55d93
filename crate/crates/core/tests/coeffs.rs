mod common;

use common::c;
use ndtrace::coeffs::{ComplexValue, CubicSpline, TableSpec};
use ndtrace::{CoefficientSet, Error, PresetSpec, Side};
use proptest::prelude::*;

// ∫_{-1}^{1} exp(-1/(1-t²)) dt
const BUMP_MASS: f64 = 0.443_993_816_168_079_4;

#[test]
fn sech2_tail_masses() {
    let cs = CoefficientSet::sech2(2, -2.0).unwrap();
    assert!((cs.l1_tail(Side::Plus, 0.0).unwrap() - 2.0).abs() < 1e-9);
    assert!((cs.l1_tail(Side::Minus, 0.0).unwrap() - 2.0).abs() < 1e-9);
    // ∫_a^∞ 2 sech² = 2(1 − tanh a)
    for a in [-3.0, 1.0, 5.0] {
        let exact = 2.0 * (1.0 - f64::tanh(a));
        assert!((cs.l1_tail(Side::Plus, a).unwrap() - exact).abs() < 1e-9 * exact.max(1e-3));
    }
}

#[test]
fn gaussian_and_bump_masses() {
    let g = CoefficientSet::gaussian(3, 1.5, &[c(0.0, 2.0)]).unwrap();
    let total = g.l1_tail(Side::Plus, 0.0).unwrap() + g.l1_tail(Side::Minus, 0.0).unwrap();
    assert!((total - 2.0 * 1.5 * std::f64::consts::PI.sqrt()).abs() < 1e-8);

    let b = CoefficientSet::bump(2, 2.0, &[c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
    assert!((b.l1_between(-5.0, 5.0).unwrap() - 1.5 * 2.0 * BUMP_MASS).abs() < 1e-9);
    assert_eq!(b.l1_tail(Side::Plus, 2.0).unwrap(), 0.0);
    assert_eq!(b.l1_tail(Side::Minus, -2.5).unwrap(), 0.0);
    assert_eq!(b.eval(0, 2.0), c(0.0, 0.0));
    assert!((b.eval(0, 0.0) - (-1f64).exp()).norm() < 1e-15);
}

#[test]
fn cutoff_truncates() {
    let g = CoefficientSet::gaussian(2, 4.0, &[c(1.0, 0.0)]).unwrap();
    let t = g.cutoff(3.0).unwrap();
    assert_eq!(t.eval(0, 3.0), c(0.0, 0.0));
    assert_eq!(t.eval(0, -3.5), c(0.0, 0.0));
    assert_eq!(t.eval(0, 2.9), g.eval(0, 2.9));
    assert_eq!(t.support_radius, Some(3.0));
    assert_eq!(t.l1_tail(Side::Plus, 3.0).unwrap(), 0.0);
    assert!(t.breakpoints().contains(&-3.0) && t.breakpoints().contains(&3.0));
    assert!(matches!(g.cutoff(-1.0), Err(Error::InvalidArgument(_))));
}

#[test]
fn system_perturbation_and_trace() {
    let b = CoefficientSet::bump(3, 1.0, &[c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)]).unwrap();
    let x = 0.3;
    let v = b.system_perturbation(x);
    // −i³ = i
    for k in 0..3 {
        assert!((v[(2, k)] - c(0.0, 1.0) * b.eval(k, x)).norm() < 1e-15);
        assert_eq!(v[(0, k)], c(0.0, 0.0));
    }
    assert!((b.trace_v(x) - v[(2, 2)]).norm() < 1e-15);
    assert!(!b.top_vanishes());
    assert!(CoefficientSet::sech2(3, 1.0).unwrap().top_vanishes());
}

#[test]
fn presets_from_json() {
    let spec: PresetSpec = serde_json::from_str(r#"{"name":"bump","radius":2.0,"amplitudes":[1.0,[0.0,0.5]]}"#).unwrap();
    let cs = CoefficientSet::preset(3, &spec).unwrap();
    assert!((cs.eval(1, 0.0) - c(0.0, 0.5 * (-1f64).exp())).norm() < 1e-15);
    assert_eq!(cs.eval(2, 0.0), c(0.0, 0.0));
    assert!(serde_json::from_str::<PresetSpec>(r#"{"name":"bump","radius":2.0,"amplitudes":[],"extra":1}"#).is_err());
    let bad = PresetSpec::Gaussian { sigma: -1.0, amplitudes: vec![] };
    assert!(matches!(CoefficientSet::preset(2, &bad), Err(Error::InvalidPreset(_))));
    let too_many = PresetSpec::Bump { radius: 1.0, amplitudes: vec![ComplexValue::Real(1.0); 3] };
    assert!(CoefficientSet::preset(2, &too_many).is_err());
    assert!(CoefficientSet::zero(4).is_zero());
}

#[test]
fn tables_are_interpolated() {
    let x: Vec<f64> = (0..21).map(|k| -2.0 + 0.2 * k as f64).collect();
    let re: Vec<f64> = x.iter().map(|t| 3.0 * t - 1.0).collect();
    let im: Vec<f64> = x.iter().map(|t| -t).collect();
    let cs = CoefficientSet::custom(2, &[None, Some(TableSpec { x: x.clone(), re, im: Some(im) })]).unwrap();
    for t in [-1.93, -0.5, 0.0, 1.77] {
        assert!((cs.eval(1, t) - c(3.0 * t - 1.0, -t)).norm() < 1e-12);
    }
    assert_eq!(cs.eval(1, 2.5), c(0.0, 0.0));
    assert_eq!(cs.eval(0, 0.0), c(0.0, 0.0));
    assert_eq!(cs.support_radius, Some(2.0));
    assert!(CubicSpline::new(&[0.0, 0.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
}

#[test]
fn effective_radius_of_gaussian() {
    let g = CoefficientSet::gaussian(2, 1.0, &[c(1.0, 0.0)]).unwrap();
    let l = g.effective_radius(1e-12).unwrap();
    assert!(g.l1_tail(Side::Plus, l).unwrap() + g.l1_tail(Side::Minus, -l).unwrap() <= 1e-12);
    assert!(l < 10.0);
}

proptest! {
    #[test]
    fn tails_add_up(a in -6.0f64..6.0, b in -6.0f64..6.0, sigma in 0.5f64..3.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let g = CoefficientSet::gaussian(2, sigma, &[c(1.0, 0.0), c(0.0, -0.5)]).unwrap();
        let whole = g.l1_tail(Side::Plus, -1e3).unwrap();
        let parts = g.l1_tail(Side::Minus, lo).unwrap() + g.l1_between(lo, hi).unwrap() + g.l1_tail(Side::Plus, hi).unwrap();
        prop_assert!((whole - parts).abs() < 1e-8 * whole);
    }

    #[test]
    fn scaling_is_linear(s_re in -3.0f64..3.0, s_im in -3.0f64..3.0, x in -2.0f64..2.0) {
        let b = CoefficientSet::bump(2, 2.5, &[c(1.0, 0.3), c(-0.2, 0.0)]).unwrap();
        let s = c(s_re, s_im);
        let t = b.scaled(s);
        for k in 0..2 {
            prop_assert!((t.eval(k, x) - s * b.eval(k, x)).norm() < 1e-14);
        }
    }

    #[test]
    fn integral_is_antisymmetric(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = CoefficientSet::gaussian(3, 1.0, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)]).unwrap();
        let fwd = g.integral(2, a, b).unwrap();
        let back = g.integral(2, b, a).unwrap();
        prop_assert!((fwd + back).norm() < 1e-13);
    }

    #[test]
    fn cutoff_converges_pointwise(x in -5.0f64..5.0, r in 6.0f64..50.0) {
        let g = CoefficientSet::gaussian(2, 2.0, &[c(1.0, -1.0)]).unwrap();
        prop_assert_eq!(g.cutoff(r).unwrap().eval(0, x), g.eval(0, x));
    }

    #[test]
    fn tail_mass_is_monotone(a in -8.0f64..8.0, d in 0.0f64..4.0) {
        for cs in [CoefficientSet::sech2(2, -2.0).unwrap(), CoefficientSet::bump(2, 3.0, &[c(1.0, 0.0)]).unwrap()] {
            prop_assert!(cs.l1_tail(Side::Minus, a - d).unwrap() <= cs.l1_tail(Side::Minus, a).unwrap() + 1e-14);
            prop_assert!(cs.l1_tail(Side::Plus, a + d).unwrap() <= cs.l1_tail(Side::Plus, a).unwrap() + 1e-14);
        }
    }
}
