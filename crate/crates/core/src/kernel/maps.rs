//! The maps `F_±(ξ) = c2 (∓iξ)^{μ} − 1/4` and their inverses `G_±`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phi::ModelOrder;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalMaps {
    order: ModelOrder,
}

impl ConformalMaps {
    pub fn new(order: ModelOrder) -> Result<Self> {
        if order.m() < 2 {
            return Err(Error::NoZeros);
        }
        Ok(ConformalMaps { order })
    }

    pub fn order(&self) -> &ModelOrder {
        &self.order
    }

    /// `ξ ∈ D_ξ^σ`: `|arg(−σiξ)| < γπ/2`, `γ = (2m−1)/(2m)`.
    pub fn in_d_xi(&self, sigma: f64, xi: Complex64) -> bool {
        xi.norm() > 0.0 && (-Complex64::i() * sigma * xi).arg().abs() < self.order.gamma_exp() * PI / 2.0
    }

    pub fn in_d_zeta(&self, zeta: Complex64) -> bool {
        zeta.re > -0.25
    }

    /// `F_σ(ξ)` without domain checks.
    pub fn f_raw(&self, sigma: f64, xi: Complex64) -> Complex64 {
        (-Complex64::i() * sigma * xi).powf(self.order.mu()) * self.order.c2() - 0.25
    }

    pub fn f(&self, sigma: f64, xi: Complex64) -> Result<Complex64> {
        if !self.in_d_xi(sigma, xi) {
            return Err(Error::Domain(format!("ξ = {} outside D_ξ", xi)));
        }
        Ok(self.f_raw(sigma, xi))
    }

    pub fn g_raw(&self, sigma: f64, zeta: Complex64) -> Complex64 {
        Complex64::i() * sigma * ((zeta + 0.25) / self.order.c2()).powf(self.order.gamma_exp())
    }

    pub fn g(&self, sigma: f64, zeta: Complex64) -> Result<Complex64> {
        if !self.in_d_zeta(zeta) {
            return Err(Error::Domain(format!("ζ = {} outside Re ζ > −1/4", zeta)));
        }
        Ok(self.g_raw(sigma, zeta))
    }

    /// `G′_σ(ζ) = σ i γ ((ζ+1/4)/c2)^{γ−1} / c2`.
    pub fn g_prime_raw(&self, sigma: f64, zeta: Complex64) -> Complex64 {
        let g = self.order.gamma_exp();
        Complex64::i() * sigma * g * ((zeta + 0.25) / self.order.c2()).powf(g - 1.0) / self.order.c2()
    }

    pub fn g_prime(&self, sigma: f64, zeta: Complex64) -> Result<Complex64> {
        if !self.in_d_zeta(zeta) {
            return Err(Error::Domain(format!("ζ = {} outside Re ζ > −1/4", zeta)));
        }
        Ok(self.g_prime_raw(sigma, zeta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn f_inverts_g(re in -0.2499f64..40.0, im in -40.0f64..40.0, m in 2u32..5) {
            let maps = ConformalMaps::new(ModelOrder::new(m).unwrap()).unwrap();
            let z = Complex64::new(re, im);
            for s in [1.0, -1.0] {
                let back = maps.f(s, maps.g(s, z).unwrap()).unwrap();
                prop_assert!((back - z).norm() <= 1e-12 * (1.0 + z.norm()));
            }
        }

        #[test]
        fn g_inverts_f(r in 0.01f64..60.0, th in -0.999f64..0.999, m in 2u32..5) {
            let maps = ConformalMaps::new(ModelOrder::new(m).unwrap()).unwrap();
            let half = maps.order().gamma_exp() * PI / 2.0;
            for s in [1.0, -1.0] {
                let xi = Complex64::from_polar(r, s * PI / 2.0 + th * half);
                let back = maps.g(s, maps.f(s, xi).unwrap()).unwrap();
                prop_assert!((back - xi).norm() <= 1e-12 * xi.norm());
            }
        }
    }

    #[test]
    fn derivative_is_inverse_of_f_derivative() {
        // F′(G(ζ))·G′(ζ) = 1 with F′(ξ) = μ c2 (−iσ)(−iσξ)^{μ−1}.
        let o = ModelOrder::new(2).unwrap();
        let maps = ConformalMaps::new(o).unwrap();
        for s in [1.0, -1.0] {
            for z in [Complex64::new(0.3, 2.0), Complex64::new(5.0, -7.0), Complex64::new(-0.2, 0.1)] {
                let xi = maps.g(s, z).unwrap();
                let w = -Complex64::i() * s;
                let fp = w * o.mu() * o.c2() * (w * xi).powf(o.mu() - 1.0);
                assert!((fp * maps.g_prime(s, z).unwrap() - 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zeros_map_to_exponents() {
        let maps = ConformalMaps::new(ModelOrder::new(2).unwrap()).unwrap();
        let f = maps.f(1.0, Complex64::new(0.0, 2.053442056427631)).unwrap();
        assert!((f.re - 0.4298742994647695).abs() < 1e-14 && f.im.abs() < 1e-15);
        assert!(maps.f(1.0, Complex64::new(0.0, -1.0)).is_err());
        assert!(maps.g(1.0, Complex64::new(-0.3, 0.0)).is_err());
    }
}
