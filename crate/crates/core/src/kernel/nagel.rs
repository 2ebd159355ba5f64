//! `K(z, t) = ∫_0^∞ e^{itτ} e^{−x^{2m}τ} P(zτ^{1/2m}) τ^{ν′} dτ`.
//!
//! With `τ = s^{2m}` this is `2m ∫ e^{−c s^{2m}} P(zs) s^{2mν′+2m−1} ds`,
//! `c = x^{2m} − it`, and the `s`-ray is turned to `arg s = −arg(c)/2m`.

use num_complex::Complex64;

use super::p::PLine;
use super::{KernelKind, KernelValue, Route};
use crate::error::{Error, Result};
use crate::numerics::{integrate_segment, ContourSegment, QuadSpec};
use crate::phi::ModelOrder;
use crate::singular::EvalPoint;

/// Log-magnitude drop at which the outer integral is cut.
const CUT: f64 = 60.0;
/// Largest `|u|` for which a node table is built.
const U_LIMIT: f64 = 400.0;

fn outer_direction(order: &ModelOrder, pt: &EvalPoint) -> (Complex64, f64) {
    let c = Complex64::new(pt.x.powf(order.two_m()), -pt.t);
    let theta = if c.norm() == 0.0 { 0.0 } else { -c.arg() / order.two_m() };
    (c, theta)
}

/// `K` (Szegő, `ν′ = 1/m`) or `K^B` (Bergman, `ν′ = 1 + 1/m`), constant `c = 1`.
///
/// `a1` is the first zero of `φ`; `None` for `m = 1`.
pub fn k_nagel(order: &ModelOrder, a1: Option<f64>, pt: &EvalPoint, kind: KernelKind) -> Result<KernelValue> {
    if pt.x == 0.0 && pt.y == 0.0 {
        return Err(Error::Domain("z = 0 is excluded".into()));
    }
    pt.require_off_axis()?;
    if order.m() >= 2 && a1.is_none() {
        return Err(Error::InvalidParameter("a_1 is required for m ≥ 2".into()));
    }
    let tm = order.two_m();
    let n = tm * kind.nu(order) + tm;
    let z = pt.z();
    let (c, theta) = outer_direction(order, pt);
    let dir = Complex64::from_polar(1.0, theta);
    let alpha = (z * dir).arg();
    if alpha.sin().abs() <= 0.2 {
        return Err(Error::Domain(format!(
            "arg(z e^{{iθ}}) = {:.4} is too close to the real axis for the supported geometry",
            alpha
        )));
    }
    // Decay rate of |P| along the ray, bounded below by the shifted-line level.
    let kappa = match a1 {
        Some(a) => 0.75 * a * alpha.sin().abs() * z.norm(),
        None => 0.0,
    };
    let envelope = |r: f64| -> f64 {
        let gauss = (c * dir.powf(tm)).re * r.powf(tm);
        gauss + kappa * r - (n - 1.0) * r.max(1e-300).ln()
    };
    let mut r_max = 1.0;
    let floor = envelope(1.0).min(0.0);
    while envelope(r_max) - floor < CUT || envelope(2.0 * r_max) < envelope(r_max) {
        r_max *= 1.25;
        if r_max * z.norm() > U_LIMIT {
            return Err(Error::NonConvergence(format!(
                "outer integral decays too slowly at {:?}; use a larger |y| or |x|",
                pt
            )));
        }
    }
    let line = PLine::new(order, a1, alpha, r_max * z.norm())?;
    let f = |s: Complex64| {
        if s.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let l = -c * s.powf(tm) + (n - 1.0) * s.ln();
        l.exp() * line.eval(z * s) * tm
    };
    let spec = QuadSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_evals: 200_000,
        oscillation_hint: None,
    };
    let seg = ContourSegment::segment(Complex64::new(0.0, 0.0), dir * r_max);
    let r = integrate_segment(f, &seg, &spec)?;
    Ok(KernelValue {
        value: r.value,
        route: Route::Nagel,
        err_est: r.err_est.max(1e-13 * r.value.norm()),
    })
}
