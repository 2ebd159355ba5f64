use num_complex::Complex64;
use proptest::prelude::*;

use szego_core::kernel::{first_zero, p_of_with};
use szego_core::numerics::{integrate_segment, log_gamma, ContourSegment, QuadSpec};
use szego_core::phi::{ode_residual, phi_quadrature_scaled, phi_series};
use szego_core::ModelOrder;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn phi_is_even(re in -4.0f64..4.0, im in -4.0f64..4.0, m in 1u32..4) {
        let o = ModelOrder::new(m).unwrap();
        let x = Complex64::new(re, im);
        let a = phi_series(&o, x, 0).unwrap();
        let b = phi_series(&o, -x, 0).unwrap();
        prop_assert!((a.value - b.value).norm() <= a.err + b.err + 1e-13 * a.value.norm());
    }

    #[test]
    fn phi_schwarz_reflection(re in -6.0f64..6.0, im in -6.0f64..6.0, m in 1u32..4) {
        let o = ModelOrder::new(m).unwrap();
        let x = Complex64::new(re, im);
        let a = phi_quadrature_scaled(&o, x, 0).unwrap();
        let b = phi_quadrature_scaled(&o, x.conj(), 0).unwrap();
        prop_assert!((a.log_scale - b.log_scale).abs() < 1e-12);
        prop_assert!((a.mantissa.conj() - b.mantissa).norm() <= 1e-11 * a.mantissa.norm().max(1e-3));
    }

    #[test]
    fn turrittin_residual(re in -3.0f64..3.0, im in -3.0f64..3.0, m in 2u32..4) {
        let o = ModelOrder::new(m).unwrap();
        prop_assert!(ode_residual(&o, Complex64::new(re, im)).unwrap() < 1e-7);
    }

    #[test]
    fn quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0.1f64..4.0) {
        let spec = QuadSpec::default();
        let seg = ContourSegment::segment(Complex64::new(-1.0, 0.5), Complex64::new(2.0, -0.3));
        let f = |v: Complex64| (k * v).sin();
        let g = |v: Complex64| (-v * v).exp();
        let h = |v: Complex64| f(v) * a + g(v) * b;
        let lhs = integrate_segment(h, &seg, &spec).unwrap().value;
        let rhs = integrate_segment(f, &seg, &spec).unwrap().value * a + integrate_segment(g, &seg, &spec).unwrap().value * b;
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn quadrature_is_additive(t in 0.05f64..0.95, k in 0.1f64..6.0) {
        let spec = QuadSpec::default();
        let (p, q) = (Complex64::new(0.0, 0.0), Complex64::new(3.0, 1.0));
        let mid = p + (q - p) * t;
        let f = |v: Complex64| (Complex64::i() * k * v).exp() / (1.0 + v * v.conj());
        let whole = integrate_segment(f, &ContourSegment::segment(p, q), &spec).unwrap().value;
        let parts = integrate_segment(f, &ContourSegment::segment(p, mid), &spec).unwrap().value
            + integrate_segment(f, &ContourSegment::segment(mid, q), &spec).unwrap().value;
        prop_assert!((whole - parts).norm() <= 1e-9 * (1.0 + whole.norm()));
    }

    #[test]
    fn log_gamma_recurrence(x in 0.01f64..80.0) {
        let lhs = log_gamma(x + 1.0).unwrap();
        let rhs = log_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(cfg(12))]

    #[test]
    fn p_reflection(r in 0.0f64..6.0, th in -3.1f64..3.1) {
        let o = ModelOrder::new(2).unwrap();
        let a1 = first_zero(&o).unwrap();
        let u = Complex64::from_polar(r, th);
        let a = p_of_with(&o, Some(a1), u).unwrap();
        let b = p_of_with(&o, Some(a1), u.conj()).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-9 * a.norm());
    }
}
