//! Bounded solutions `g_ξ` and the singular solutions `S^ν(ξ; z, t)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::gamma::log_gamma_pos;
use crate::numerics::{
    integrate_halfline_scaled, integrate_oscillatory_halfline, ContourSegment, QuadSpec,
};
use crate::phi::{phi_quadrature_scaled, ModelOrder};
use crate::zeros::ZeroTable;

/// A point `(z = x + iy, t)` of the model hypersurface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl EvalPoint {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        EvalPoint { x, y, t }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Sign of `y`; zero on the singular support.
    pub fn sigma(&self) -> f64 {
        if self.y > 0.0 {
            1.0
        } else if self.y < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// `|arg z ∓ π/2| < π/(2(2m−1))` for `y ≷ 0`.
    pub fn in_sector(&self, order: &ModelOrder) -> bool {
        let s = self.sigma();
        if s == 0.0 {
            return false;
        }
        let a = self.z().arg();
        (a - s * PI / 2.0).abs() < order.theta0()
    }

    pub fn require_off_axis(&self) -> Result<()> {
        if self.y == 0.0 {
            return Err(Error::Domain(format!(
                "y = 0 lies on the singular support {{y = 0}} (point {:?})",
                self
            )));
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        EvalPoint::new(self.x, -self.y, -self.t)
    }
}

/// Log-magnitude beyond which `g_ξ` is reported as unbounded.
pub const UNBOUNDED_LOG_GUARD: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GValue {
    Finite(Complex64),
    Unbounded { u: f64, log_magnitude: f64 },
}

fn spec_fine() -> QuadSpec {
    QuadSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_evals: 400_000,
        oscillation_hint: None,
    }
}

/// `g_ξ(u) = e^{u^{2m} − ξu} ∫_{−∞}^u e^{−2(s^{2m} − ξs)} ds`.
pub fn g_xi(order: &ModelOrder, xi: Complex64, u: f64) -> Result<GValue> {
    if !u.is_finite() {
        return Err(Error::InvalidParameter("u must be finite".into()));
    }
    let mi = 2 * order.m() as i32;
    let pre = Complex64::new(u.powi(mi), 0.0) - xi * u;
    // Everything is kept inside one exponent to avoid overflow.
    let integrand = |s: Complex64| (pre - 2.0 * (s.powi(mi) - xi * s)).exp();
    let spec = spec_fine();
    let start = Complex64::new(u, 0.0);
    if u <= 0.0 {
        let r = integrate_halfline_scaled(integrand, &ContourSegment::ray_at(start, PI), &spec, 0.25)?;
        return Ok(GValue::Finite(-r.value));
    }
    let phi = phi_quadrature_scaled(order, xi, 0)?;
    let tail = integrate_halfline_scaled(integrand, &ContourSegment::ray_at(start, 0.0), &spec, 0.25)?;
    if phi.mantissa.norm() < 1e-9 {
        return Ok(GValue::Finite(-tail.value));
    }
    // g = e^{pre} φ(ξ) − tail, with e^{pre} φ(ξ) carried in the log domain.
    let lead = pre + phi.mantissa.ln() + phi.log_scale;
    if lead.re > UNBOUNDED_LOG_GUARD {
        return Ok(GValue::Unbounded {
            u,
            log_magnitude: lead.re,
        });
    }
    let v = lead.exp() - tail.value;
    if v.norm().ln() > UNBOUNDED_LOG_GUARD {
        return Ok(GValue::Unbounded {
            u,
            log_magnitude: v.norm().ln(),
        });
    }
    Ok(GValue::Finite(v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub sup: f64,
    pub right_edge: f64,
    pub unbounded_at: Option<f64>,
    pub bounded: bool,
    pub samples: Vec<(f64, f64)>,
}

/// Samples `|g_ξ|` on `[−6, 8]`; bounded means `sup < 10³` on `[−6, 6]`, no
/// unbounded signal there, and `|g_ξ(6)| < 10⁻³·sup`.
pub fn boundedness_probe(order: &ModelOrder, xi: Complex64) -> Result<BoundednessReport> {
    let n = 280;
    let mut sup: f64 = 0.0;
    let mut right_edge = f64::NAN;
    let mut unbounded_at = None;
    let mut samples = Vec::new();
    for i in 0..=n {
        let u = -6.0 + 14.0 * i as f64 / n as f64;
        match g_xi(order, xi, u)? {
            GValue::Finite(v) => {
                let a = v.norm();
                samples.push((u, a.ln()));
                if u <= 6.0 + 1e-12 {
                    sup = sup.max(a);
                }
                if (u - 6.0).abs() < 1e-9 {
                    right_edge = a;
                }
            }
            GValue::Unbounded { log_magnitude, .. } => {
                samples.push((u, log_magnitude));
                if unbounded_at.is_none() {
                    unbounded_at = Some(u);
                }
                if u <= 6.0 + 1e-12 {
                    sup = f64::INFINITY;
                }
            }
        }
    }
    let bounded = unbounded_at.map_or(true, |u| u > 6.0)
        && sup < 1e3
        && right_edge.is_finite()
        && right_edge < 1e-3 * sup;
    Ok(BoundednessReport {
        sup,
        right_edge,
        unbounded_at,
        bounded,
        samples,
    })
}

/// `n = 2mν + 2m`, the power of `s` after `τ = s^{2m}`.
pub fn s_exponent(order: &ModelOrder, nu: f64) -> f64 {
    order.two_m() * (nu + 1.0)
}

/// `S^ν(ξ; z, t) = ∫_0^∞ e^{itτ} e^{−x^{2m}τ} e^{ξzτ^{1/2m}} τ^ν dτ`.
///
/// At `x = t = 0` the Gamma closed form is used; otherwise the `s`-ray is
/// rotated onto the steepest-descent direction of `e^{−(x^{2m} − it)s^{2m}}`.
pub fn s_generic(order: &ModelOrder, xi: Complex64, pt: &EvalPoint, nu: f64) -> Result<Complex64> {
    if !(nu >= 0.0) {
        return Err(Error::InvalidParameter(format!("nu must be >= 0, got {}", nu)));
    }
    let z = pt.z();
    let b = xi * z;
    let tm = order.two_m();
    let n = s_exponent(order, nu);
    if pt.x == 0.0 && b.re >= 0.0 {
        return Err(Error::Domain(format!(
            "Re(ξz) = {} must be negative when x = 0 (ξ = {}, z = {})",
            b.re, xi, z
        )));
    }
    if pt.x == 0.0 && pt.t == 0.0 {
        let l = tm.ln() + log_gamma_pos(n) - n * (-b).ln();
        return Ok(l.exp());
    }
    let c = Complex64::new(pt.x.powf(tm), -pt.t);
    let theta = -c.arg() / tm;
    let dir = Complex64::from_polar(1.0, theta);
    let mi = 2 * order.m() as i32;
    let f = |s: Complex64| {
        if s.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        (-c * s.powi(mi) + b * s + (n - 1.0) * s.ln()).exp() * tm
    };
    let scale = 0.5 * c.norm().powf(-1.0 / tm).min(n.max(1.0) / b.norm().max(1e-300));
    let spec = QuadSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_evals: 400_000,
        oscillation_hint: None,
    };
    let r = integrate_halfline_scaled(f, &ContourSegment::Ray {
        start: Complex64::new(0.0, 0.0),
        direction: dir,
    }, &spec, scale)?;
    Ok(r.value)
}

/// The same integral on the real `τ` axis by the oscillatory engine; slower,
/// used as an independent check of the rotated route.
pub fn s_generic_oscillatory(
    order: &ModelOrder,
    xi: Complex64,
    pt: &EvalPoint,
    nu: f64,
) -> Result<Complex64> {
    let tm = order.two_m();
    let b = xi * pt.z();
    let decay = pt.x.powf(tm);
    let env = |tau: Complex64| {
        if tau.re <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = tau.re.powf(1.0 / tm);
        (-decay * tau.re + b * s + nu * tau.re.ln()).exp()
    };
    let ray = ContourSegment::ray_at(Complex64::new(0.0, 0.0), 0.0);
    let spec = QuadSpec::new(1e-11, 1e-14)?;
    Ok(integrate_oscillatory_halfline(env, pt.t, &ray, &spec)?.value)
}

/// `S_j^ν(z, t)`, the singular solution attached to the zero `σ(y)·i·a_j`.
pub fn s_j(order: &ModelOrder, table: &ZeroTable, j: usize, pt: &EvalPoint, nu: f64) -> Result<Complex64> {
    pt.require_off_axis()?;
    let a = table.a(j)?;
    let xi = Complex64::new(0.0, pt.sigma() * a);
    s_generic(order, xi, pt, nu)
}

/// `ln[2m Γ(2mk+2m+2) / (|y| a_j)^{2mk+2m+2}]`.
pub fn t_derivative_closed_form(order: &ModelOrder, a_j: f64, y: f64, k: usize) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::Domain("y = 0".into()));
    }
    let n = order.two_m() * (k as f64 + 1.0) + 2.0;
    Ok(order.two_m().ln() + log_gamma_pos(n) - n * (y.abs() * a_j).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GevreyEstimate {
    pub s_hat: f64,
    pub monotone: bool,
}

/// Solves the normal equations of a small least-squares problem.
fn lstsq(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let p = rows[0].len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (r, yi) in rows.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += r[i] * r[j];
            }
            a[i][p] += r[i] * yi;
        }
    }
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        if a[col][col].abs() < 1e-300 {
            return Err(Error::Consistency("singular regression".into()));
        }
        for r in 0..p {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=p {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Ok((0..p).map(|i| a[i][p] / a[i][i]).collect())
}

/// Gevrey order from `ln|D_k|` by regression on `[k ln k, k, ln k, 1]`.
pub fn gevrey_order_estimate(log_d: &[f64], ks: &[usize]) -> Result<GevreyEstimate> {
    if log_d.len() != ks.len() {
        return Err(Error::InvalidParameter("length mismatch".into()));
    }
    let pts: Vec<(f64, f64)> = ks
        .iter()
        .zip(log_d)
        .filter(|(k, _)| **k >= 1)
        .map(|(k, d)| (*k as f64, *d))
        .collect();
    if pts.len() < 6 {
        return Err(Error::InvalidParameter(
            "Gevrey estimate needs at least six k >= 1".into(),
        ));
    }
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|(k, _)| vec![k * k.ln(), *k, k.ln(), 1.0])
        .collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let beta = lstsq(&rows, &y)?;
    let monotone = pts.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(GevreyEstimate {
        s_hat: beta[0],
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::locate_zeros;

    fn setup() -> (ModelOrder, ZeroTable) {
        let o = ModelOrder::new(2).unwrap();
        let t = locate_zeros(&o, 4, &QuadSpec::default()).unwrap();
        (o, t)
    }

    #[test]
    fn sector_flag() {
        let o = ModelOrder::new(2).unwrap();
        assert!(EvalPoint::new(0.0, 1.0, 0.0).in_sector(&o));
        assert!(EvalPoint::new(0.0, -1.0, 0.3).in_sector(&o));
        assert!(!EvalPoint::new(1.0, 1.0, 0.0).in_sector(&o));
        assert!(!EvalPoint::new(1.0, 0.0, 0.0).in_sector(&o));
    }

    #[test]
    fn dichotomy() {
        let (o, t) = setup();
        let a1 = t.a1().unwrap();
        let on = boundedness_probe(&o, Complex64::new(0.0, a1)).unwrap();
        assert!(on.bounded, "{:?}", (on.sup, on.right_edge, on.unbounded_at));
        for d in [0.1, -0.1] {
            let off = boundedness_probe(&o, Complex64::new(0.0, a1 + d)).unwrap();
            assert!(!off.bounded);
            assert!(off.unbounded_at.unwrap() < 8.0);
        }
        match g_xi(&o, Complex64::new(0.0, a1), -5.0).unwrap() {
            GValue::Finite(v) => assert!(v.norm() < 1e-6),
            _ => panic!(),
        }
    }

    #[test]
    fn closed_form_and_quadrature() {
        let (o, t) = setup();
        let a1 = t.a1().unwrap();
        let pt = EvalPoint::new(0.0, 1.0, 0.0);
        let s = s_j(&o, &t, 1, &pt, 0.5).unwrap();
        assert!((s.re - 480.0 / a1.powi(6)).abs() < 1e-12 * s.re);
        // Quadrature route with a vanishing x perturbation.
        let q = s_generic(&o, Complex64::new(0.0, a1), &EvalPoint::new(1e-9, 1.0, 0.0), 0.5).unwrap();
        assert!((q - s).norm() < 1e-8 * s.norm(), "{} {}", q, s);
        let neg = s_j(&o, &t, 1, &EvalPoint::new(0.0, -1.0, 0.0), 0.5).unwrap();
        assert!((neg - s).norm() < 1e-14 * s.norm());
        assert!(s_j(&o, &t, 1, &EvalPoint::new(0.0, 0.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn rotation_matches_oscillatory_engine() {
        let (o, t) = setup();
        let a1 = t.a1().unwrap();
        let pt = EvalPoint::new(0.6, 1.0, 0.7);
        let xi = Complex64::new(0.0, a1);
        let r = s_generic(&o, xi, &pt, 0.5).unwrap();
        let w = s_generic_oscillatory(&o, xi, &pt, 0.5).unwrap();
        assert!((r - w).norm() < 1e-7 * r.norm(), "{} {}", r, w);
    }

    #[test]
    fn domain_violation() {
        let o = ModelOrder::new(2).unwrap();
        let r = s_generic(&o, Complex64::new(0.0, -1.0), &EvalPoint::new(0.0, 1.0, 0.0), 0.5);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_derivatives() {
        let o = ModelOrder::new(2).unwrap();
        let a1 = 2.053442056427631;
        let l0 = t_derivative_closed_form(&o, a1, 1.0, 0).unwrap();
        assert!((l0 - (480f64.ln() - 6.0 * a1.ln())).abs() < 1e-12);
        for k in 0..10 {
            let d = t_derivative_closed_form(&o, a1, 1.0, k + 1).unwrap()
                - t_derivative_closed_form(&o, a1, 1.0, k).unwrap();
            let n = 4.0 * k as f64 + 6.0;
            let want = log_gamma_pos(n + 4.0) - log_gamma_pos(n) - 4.0 * a1.ln();
            assert!((d - want).abs() < 1e-10);
        }
    }

    #[test]
    fn gevrey_regression() {
        for (m, tol) in [(2u32, 0.2), (3, 0.3)] {
            let o = ModelOrder::new(m).unwrap();
            let ks: Vec<usize> = (1..=20).collect();
            let seq = |y: f64| -> Vec<f64> {
                ks.iter().map(|&k| t_derivative_closed_form(&o, 2.0, y, k).unwrap()).collect()
            };
            let e1 = gevrey_order_estimate(&seq(1.0), &ks).unwrap();
            let e2 = gevrey_order_estimate(&seq(2.0), &ks).unwrap();
            assert!((e1.s_hat - 2.0 * m as f64).abs() < tol, "m={} s={}", m, e1.s_hat);
            assert!((e1.s_hat - e2.s_hat).abs() < 0.05);
            assert!(e1.monotone);
        }
        assert!(gevrey_order_estimate(&[1.0, 2.0], &[1, 2]).is_err());
    }
}
