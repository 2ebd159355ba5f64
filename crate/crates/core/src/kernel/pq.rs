//! `P_q(u) = ∫_{Γ_σ} e^{uv} q^{−F_σ(v)−1} / φ(v) dv` and its residue sum
//! `2πi Σ_j e^{σia_j u} q^{−f_j−1} / φ′(ia_j)`.
//!
//! `Γ_+` comes in along `arg v = (m+1)π/2m`, passes over the origin on the
//! arc `|v| = a_1/2` and leaves along `arg v = (m−1)π/2m`; `Γ_−` is its mirror.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::maps::ConformalMaps;
use crate::error::{Error, Result};
use crate::numerics::{integrate_halfline_scaled, integrate_segment, ContourSegment, QuadSpec};
use crate::phi::{phi_quadrature_scaled, ModelOrder};
use crate::zeros::ZeroTable;

/// Whether `q` lies in the region `V` on which `P_q` is holomorphic.
pub fn in_region_v(order: &ModelOrder, q: Complex64) -> bool {
    let th = order.theta0();
    let k = order.c1() / order.c2() / 3.0;
    let r_min = (-k * th.sin() / (2.0 * th).cos()).exp();
    let arg_max = (PI / 2.0).min(k * th.sin() / (2.0 * th).sin());
    q.norm() >= r_min && q.arg().abs() <= arg_max
}

fn sigma_of(sign: f64) -> Result<f64> {
    if sign == 1.0 || sign == -1.0 {
        Ok(sign)
    } else {
        Err(Error::InvalidParameter(format!("sign must be ±1, got {}", sign)))
    }
}

/// `P_q(u)` by quadrature along `Γ_σ`.
pub fn pq_contour(order: &ModelOrder, a1: f64, u: Complex64, q: Complex64, sign: f64) -> Result<Complex64> {
    let sigma = sigma_of(sign)?;
    if !in_region_v(order, q) {
        return Err(Error::Domain(format!("q = {} lies outside the region V", q)));
    }
    let maps = ConformalMaps::new(*order)?;
    let m = order.m() as f64;
    let b_in = sigma * (m + 1.0) * PI / (2.0 * m);
    let b_out = sigma * (m - 1.0) * PI / (2.0 * m);
    let r0 = 0.5 * a1;
    let lq = q.ln();
    let err = std::cell::Cell::new(None);
    let f = |v: Complex64| {
        let ph = match phi_quadrature_scaled(order, v, 0) {
            Ok(s) => s,
            Err(e) => {
                err.set(Some(e));
                return Complex64::new(0.0, 0.0);
            }
        };
        let fv = maps.f_raw(sigma, v);
        (u * v - (fv + 1.0) * lq - ph.ln()).exp()
    };
    let spec = QuadSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_evals: 400_000,
        oscillation_hint: None,
    };
    let inward = integrate_halfline_scaled(&f, &ContourSegment::ray_at(Complex64::from_polar(r0, b_in), b_in), &spec, 0.5)?;
    let arc = integrate_segment(&f, &ContourSegment::arc(Complex64::new(0.0, 0.0), r0, b_in, b_out)?, &spec)?;
    let outward = integrate_halfline_scaled(&f, &ContourSegment::ray_at(Complex64::from_polar(r0, b_out), b_out), &spec, 0.5)?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(-inward.value + arc.value + outward.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidueSum {
    pub value: Complex64,
    pub terms: usize,
    /// Bound on the omitted terms from the local ratio at the cut.
    pub tail: f64,
}

/// `2πi Σ_j e^{σia_j u} q^{−f_j−1} / φ′(ia_j)`, summed while the terms shrink.
pub fn pq_residues(table: &ZeroTable, u: Complex64, q: Complex64, sign: f64) -> Result<ResidueSum> {
    let sigma = sigma_of(sign)?;
    if !in_region_v(&table.order, q) {
        return Err(Error::Domain(format!("q = {} lies outside the region V", q)));
    }
    let lq = q.ln();
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let ln_term = |j: usize| -> Result<Complex64> {
        let r = table.record(j)?;
        Ok(Complex64::new(0.0, sigma * r.a) * u - (r.f + 1.0) * lq + r.inv_phi_prime_log())
    };
    let mut acc = crate::numerics::NeumaierSum::new();
    let mut prev = f64::INFINITY;
    for j in 1..=table.len() {
        let l = ln_term(j)?;
        if j > 2 && l.re > prev {
            return Err(Error::OutsideConvergenceSector(format!(
                "residue terms grow from j = {} at u = {}, q = {}",
                j - 1,
                u,
                q
            )));
        }
        acc.add(two_pi_i * l.exp());
        let s = acc.sum().norm();
        if j > 2 && l.re < (1e-17 * s).ln() {
            let ratio = (l.re - prev).exp();
            return Ok(ResidueSum {
                value: acc.sum(),
                terms: j,
                tail: 2.0 * PI * l.re.exp() * ratio / (1.0 - ratio),
            });
        }
        prev = l.re;
    }
    Err(Error::NonConvergence(format!(
        "residue sum not converged within {} zeros",
        table.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::p::p_of_with;
    use crate::zeros::locate_zeros;

    #[test]
    fn region_v() {
        let o = ModelOrder::new(2).unwrap();
        assert!(in_region_v(&o, Complex64::new(1.0, 0.0)));
        assert!(in_region_v(&o, Complex64::new(5.0, 0.0)));
        assert!(!in_region_v(&o, Complex64::new(-3.0, 0.0)));
        assert!(!in_region_v(&o, Complex64::new(1e-3, 0.0)));
    }

    #[test]
    fn q_one_is_p() {
        let o = ModelOrder::new(2).unwrap();
        let t = locate_zeros(&o, 1, &QuadSpec::default()).unwrap();
        let a1 = t.a1().unwrap();
        let u = Complex64::new(0.0, 2.0);
        let a = pq_contour(&o, a1, u, Complex64::new(1.0, 0.0), 1.0).unwrap();
        let b = p_of_with(&o, Some(a1), u).unwrap();
        assert!((a - b).norm() < 1e-9 * b.norm(), "{} {}", a, b);
        let c = pq_contour(&o, a1, -u, Complex64::new(1.0, 0.0), -1.0).unwrap();
        let d = p_of_with(&o, Some(a1), -u).unwrap();
        assert!((c - d).norm() < 1e-9 * d.norm(), "{} {}", c, d);
    }

    #[test]
    fn residues_match_contour() {
        let o = ModelOrder::new(2).unwrap();
        let t = locate_zeros(&o, 150, &QuadSpec::default()).unwrap();
        let a1 = t.a1().unwrap();
        for q in [3.0, 5.0] {
            for w in [2.0, 4.0] {
                let u = Complex64::new(0.0, w);
                let q = Complex64::new(q, 0.0);
                let c = pq_contour(&o, a1, u, q, 1.0).unwrap();
                let r = pq_residues(&t, u, q, 1.0).unwrap();
                assert!((c - r.value).norm() < 1e-7 * c.norm(), "q={} w={} {} {}", q, w, c, r.value);
            }
        }
    }
}
