//! Diagonal profiles `Φ(ω)`, `Φ^B(ω)`, the two-sided growth of `P` on the
//! real axis and the diagonal kernels `S(z, z)`, `B(z, z)`.
//!
//! With `φ(x) = ∫ e^{−2(w^{2m}−xw)} dw`, `ln P(u) ~ 2^{1−2m} u^{2m}`. The
//! diagonal formulas here use `P̃(u) = P(2^{(2m−1)/2m} u)`, for which
//! `ln P̃(u) ~ u^{2m}` and the singularity sits on `ρ = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{ln_p_real, KernelKind, RealLnPhi};
use crate::numerics::{integrate_halfline_scaled, integrate_segment, ContourSegment, QuadSpec};
use crate::phi::ModelOrder;

/// `|ω|` beyond which the `s`-integral converges slowly.
pub const SLOW_OMEGA: f64 = 0.995;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub omega: f64,
    pub phi: f64,
    pub phi_b: f64,
    /// `Φ·(1−|ω|)^{1−1/m}`.
    pub normalized: f64,
    pub normalized_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalKernels {
    pub s_diag: f64,
    pub b_diag: f64,
    pub omega: f64,
    pub rho: f64,
    /// `|S·ρ^{1+1/m}/Φ(ω) − 1|`.
    pub s_factorization_err: f64,
    /// `|B·ρ^{2+1/m}/Φ^B(ω) − 1|`.
    pub b_factorization_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionReport {
    pub alpha: f64,
    /// `α^{−1/2m}`.
    pub omega_edge: f64,
    pub sup_inside: f64,
    pub near_one: f64,
    pub grows: bool,
}

/// Holds the table of `ln φ` on the real axis needed up to `|ω| ≤ omega_max`.
#[derive(Debug, Clone)]
pub struct ProfileEvaluator {
    order: ModelOrder,
    table: RealLnPhi,
    omega_max: f64,
}

/// `2^{(2m−1)/2m}`.
pub fn domain_scale(order: &ModelOrder) -> f64 {
    2f64.powf(order.gamma_exp())
}

fn s_cut(order: &ModelOrder, omega: f64) -> f64 {
    40.0 / (1.0 - omega.abs().powf(order.two_m()))
}

impl ProfileEvaluator {
    pub fn new(order: &ModelOrder, omega_max: f64) -> Result<Self> {
        Self::with_u_max(order, omega_max, 0.0)
    }

    /// As [`ProfileEvaluator::new`], also covering `P̃(u)` for `|u| ≤ u_max`.
    pub fn with_u_max(order: &ModelOrder, omega_max: f64, u_max: f64) -> Result<Self> {
        if !(omega_max > 0.0 && omega_max < 1.0) {
            return Err(Error::Domain(format!("omega_max must lie in (0, 1), got {}", omega_max)));
        }
        let u_max = domain_scale(order) * (omega_max * s_cut(order, omega_max).powf(1.0 / order.two_m())).max(u_max);
        let mut v_max = 64.0;
        loop {
            let table = RealLnPhi::new(order, v_max)?;
            match ln_p_real(&table, u_max) {
                Ok(_) => {
                    return Ok(ProfileEvaluator {
                        order: *order,
                        table,
                        omega_max,
                    })
                }
                Err(Error::Domain(_)) if v_max < 8192.0 => v_max *= 2.0,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn order(&self) -> &ModelOrder {
        &self.order
    }

    /// `ln P̃(u) = ln P(2^{(2m−1)/2m} u)`, `u` real.
    pub fn ln_p(&self, u: f64) -> Result<f64> {
        ln_p_real(&self.table, domain_scale(&self.order) * u)
    }

    /// `ln ∫_0^{s_max} e^{−s} P(ω s^{1/2m}) s^{e} ds`.
    fn ln_moment(&self, omega: f64, e: f64) -> Result<f64> {
        let tm = self.order.two_m();
        let g = |s: f64| -> Result<f64> {
            if s <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(-s + self.ln_p(omega * s.powf(1.0 / tm))? + e * s.ln())
        };
        let s_max = s_cut(&self.order, omega);
        // Log-integrand peak on a coarse geometric grid.
        let mut peak = f64::NEG_INFINITY;
        let mut s = 1e-3;
        while s < s_max {
            peak = peak.max(g(s)?);
            s *= 1.1;
        }
        let err = std::cell::Cell::new(None);
        let f = |x: Complex64| match g(x.re) {
            Ok(v) => Complex64::new((v - peak).exp(), 0.0),
            Err(e) => {
                err.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        };
        let spec = QuadSpec {
            rel_tol: 1e-13,
            abs_tol: 1e-300,
            max_evals: 400_000,
            oscillation_hint: None,
        };
        // Split at s = 1 so the s^{1/m} endpoint is resolved.
        let mut total = 0.0;
        let mut a = 0.0;
        for b in [1.0f64.min(s_max), s_max] {
            if b > a {
                total += integrate_segment(&f, &ContourSegment::segment(Complex64::new(a, 0.0), Complex64::new(b, 0.0)), &spec)?.value.re;
            }
            a = b;
        }
        if let Some(e) = err.take() {
            return Err(e);
        }
        Ok(total.ln() + peak)
    }

    fn check_omega(&self, omega: f64) -> Result<()> {
        let w = omega.abs();
        if !(w < 1.0) {
            return Err(Error::Domain(format!("|ω| must be < 1, got {}", omega)));
        }
        if w > self.omega_max {
            return Err(Error::Domain(format!(
                "|ω| = {} exceeds the prepared range {}",
                w, self.omega_max
            )));
        }
        if w > SLOW_OMEGA {
            log::warn!("|ω| = {} > {}: slow convergence, truncation at s = {:.3e}", w, SLOW_OMEGA, s_cut(&self.order, omega));
        }
        Ok(())
    }

    /// `Φ(ω)` (Szegő) or `Φ^B(ω)` (Bergman), constant `c = 1`.
    pub fn profile(&self, omega: f64, kind: KernelKind) -> Result<f64> {
        self.check_omega(omega)?;
        let nu = kind.nu(&self.order);
        let lead = (1.0 - omega.abs().powf(self.order.two_m())).ln() * (1.0 + nu);
        Ok((lead + self.ln_moment(omega, nu)?).exp())
    }

    pub fn sample(&self, omega: f64) -> Result<ProfileSample> {
        let phi = self.profile(omega, KernelKind::Szego)?;
        let phi_b = self.profile(omega, KernelKind::Bergman)?;
        let w = (1.0 - omega.abs()).powf(1.0 - 1.0 / self.order.m() as f64);
        Ok(ProfileSample {
            omega,
            phi,
            phi_b,
            normalized: phi * w,
            normalized_b: phi_b * w,
        })
    }

    /// `P̃(u) / ([1 + u^{2m−2}] e^{u^{2m}})`.
    pub fn haslinger_ratio(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(Error::InvalidParameter(format!("u must be ≥ 0, got {}", u)));
        }
        let tm = self.order.two_m();
        Ok((self.ln_p(u)? - (1.0 + u.powf(tm - 2.0)).ln() - u.powf(tm)).exp())
    }

    /// `S(z, z)` and `B(z, z)` at `Re z₁ = a`, `Im z₂ = b`, by direct
    /// `τ`-quadrature, checked against the profile factorization.
    pub fn diagonal_kernels(&self, a: f64, b: f64) -> Result<DiagonalKernels> {
        let tm = self.order.two_m();
        let rho = b - a.abs().powf(tm);
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("need b > a^{{2m}}, got a = {}, b = {}", a, b)));
        }
        let omega = a * b.powf(-1.0 / tm);
        let direct = |nu: f64| -> Result<f64> {
            let g = |tau: f64| -> Result<f64> { Ok(-b * tau + self.ln_p(a * tau.powf(1.0 / tm))? + nu * tau.ln()) };
            // Laplace-type peak near τ ≈ (ν+1)/ρ sets the shift.
            let t0 = (nu + 1.0) / rho;
            let shift = g(t0)?;
            let err = std::cell::Cell::new(None);
            let f = |x: Complex64| {
                if x.re <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                match g(x.re) {
                    Ok(v) => Complex64::new((v - shift).exp(), 0.0),
                    Err(e) => {
                        err.set(Some(e));
                        Complex64::new(0.0, 0.0)
                    }
                }
            };
            let spec = QuadSpec {
                rel_tol: 1e-13,
                abs_tol: 1e-300,
                max_evals: 400_000,
                oscillation_hint: None,
            };
            let head = integrate_segment(&f, &ContourSegment::segment(Complex64::new(0.0, 0.0), Complex64::new(t0, 0.0)), &spec)?;
            let tail = integrate_halfline_scaled(&f, &ContourSegment::ray_at(Complex64::new(t0, 0.0), 0.0), &spec, t0)?;
            if let Some(e) = err.take() {
                return Err(e);
            }
            Ok(((head.value + tail.value).re.ln() + shift).exp())
        };
        let nu_s = KernelKind::Szego.nu(&self.order);
        let nu_b = KernelKind::Bergman.nu(&self.order);
        let s_diag = direct(nu_s)?;
        let b_diag = direct(nu_b)?;
        let phi = self.profile(omega, KernelKind::Szego)?;
        let phi_b = self.profile(omega, KernelKind::Bergman)?;
        Ok(DiagonalKernels {
            s_diag,
            b_diag,
            omega,
            rho,
            s_factorization_err: (s_diag * rho.powf(1.0 + nu_s) / phi - 1.0).abs(),
            b_factorization_err: (b_diag * rho.powf(1.0 + nu_b) / phi_b - 1.0).abs(),
        })
    }

    /// `Φ` bounded on `|ω| ≤ α^{−1/2m}`, larger towards `|ω| = 1`.
    pub fn region_check(&self, alpha: f64, points: usize) -> Result<RegionReport> {
        if !(alpha > 1.0) || points < 2 {
            return Err(Error::InvalidParameter(format!("need α > 1 and ≥ 2 points, got α = {}", alpha)));
        }
        let edge = alpha.powf(-1.0 / self.order.two_m());
        let mut sup = 0.0f64;
        for i in 0..points {
            let w = edge * i as f64 / (points - 1) as f64;
            sup = sup.max(self.profile(w, KernelKind::Szego)?);
        }
        let near = self.profile(self.omega_max, KernelKind::Szego)?;
        Ok(RegionReport {
            alpha,
            omega_edge: edge,
            sup_inside: sup,
            near_one: near,
            grows: near > sup,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_gamma;

    fn ev() -> ProfileEvaluator {
        ProfileEvaluator::new(&ModelOrder::new(2).unwrap(), 0.99).unwrap()
    }

    #[test]
    fn origin_value() {
        let e = ev();
        let p0 = e.ln_p(0.0).unwrap().exp();
        let want = p0 * log_gamma(1.5).unwrap().exp();
        let got = e.profile(0.0, KernelKind::Szego).unwrap();
        assert!((got / want - 1.0).abs() < 1e-11, "{} {}", got, want);
    }

    #[test]
    fn factorization() {
        let e = ev();
        for (a, b) in [(0.3, 1.0), (0.5, 2.0)] {
            let d = e.diagonal_kernels(a, b).unwrap();
            assert!(d.s_factorization_err < 1e-8 && d.b_factorization_err < 1e-8, "{:?}", d);
        }
        assert!(e.diagonal_kernels(1.0, 0.5).is_err());
    }

    #[test]
    fn refuses_boundary() {
        let e = ev();
        assert!(e.profile(1.0, KernelKind::Szego).is_err());
        assert!(e.profile(-1.2, KernelKind::Szego).is_err());
    }

    #[test]
    fn haslinger_at_origin() {
        let e = ev();
        let r = e.haslinger_ratio(0.0).unwrap();
        assert!((r - e.ln_p(0.0).unwrap().exp()).abs() < 1e-14);
    }
}
