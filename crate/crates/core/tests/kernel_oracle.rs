//! `K(i, 0)` for m = 2 against a brute-force double Riemann sum that uses
//! nothing from the crate.

use szego_core::kernel::{first_zero, k_nagel, KernelKind};
use szego_core::singular::EvalPoint;
use szego_core::ModelOrder;

fn phi_riemann(v: f64) -> f64 {
    let h = 0.005;
    (0..=2800)
        .map(|k| {
            let w = -6.0 + k as f64 * h;
            (-2.0 * (w.powi(4) - v * w)).exp()
        })
        .sum::<f64>()
        * h
}

#[test]
fn nagel_matches_double_riemann_sum() {
    // K = 4 ∫ s^5 P(is) ds with P(is) = 2 ∫_0^∞ cos(sv)/φ(v) dv.
    let hv = 0.01;
    let vs: Vec<f64> = (0..=1600).map(|k| k as f64 * hv).collect();
    let inv: Vec<f64> = vs
        .iter()
        .enumerate()
        .map(|(k, &v)| if k == 0 { 0.5 } else { 1.0 } / phi_riemann(v))
        .collect();
    let hs = 0.01;
    let mut k_sum = 0.0;
    for i in 1..=3500 {
        let s = i as f64 * hs;
        let p: f64 = vs.iter().zip(&inv).map(|(v, w)| (s * v).cos() * w).sum::<f64>() * 2.0 * hv;
        k_sum += s.powi(5) * p;
    }
    let oracle = 4.0 * k_sum * hs;
    let o = ModelOrder::new(2).unwrap();
    let a1 = first_zero(&o).unwrap();
    let k = k_nagel(&o, Some(a1), &EvalPoint::new(0.0, 1.0, 0.0), KernelKind::Szego).unwrap();
    assert!(k.value.im.abs() < 1e-10 * k.value.re.abs());
    assert!((k.value.re / oracle - 1.0).abs() < 1e-3, "{} vs {}", k.value.re, oracle);
}
