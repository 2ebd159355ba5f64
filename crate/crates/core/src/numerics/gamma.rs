//! Logarithm of the Gamma function.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// B_{2k}/(2k(2k-1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

fn lanczos(x: f64) -> f64 {
    // ln Γ(x) for x ≥ 0.5
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    HALF_LN_2PI + (x + 0.5) * t.ln() - t + a.ln()
}

/// `ln Γ(x)` for real `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {}", x)));
    }
    Ok(log_gamma_pos(x))
}

pub(crate) fn log_gamma_pos(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        0.0
    } else if x >= 15.0 {
        stirling(x)
    } else if x < 0.5 {
        lanczos(x + 1.0) - x.ln()
    } else {
        lanczos(x)
    }
}

/// `ln Γ(z)` for complex `z` away from the non-positive integers. The
/// imaginary part is correct modulo 2π, which is all that exponentiation needs.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_complex(1.0 - z);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        corr += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + corr - shift
}

/// `1/Γ(z)`, entire, via the complex log-gamma.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::new(0.0, 0.0);
    }
    (-ln_gamma_complex(z)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!((log_gamma(0.5).unwrap() - 0.5723649429247001).abs() < 1e-13);
        assert!((log_gamma(6.0).unwrap() - 120f64.ln()).abs() < 1e-13);
        assert!((log_gamma(0.25).unwrap() - 1.2880225246980774).abs() < 1e-13);
        assert!((log_gamma(100.0).unwrap() - 359.13420536957540).abs() < 1e-11);
    }

    #[test]
    fn domain() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn recurrence() {
        for x in [0.1, 0.5, 1.0, 3.7, 40.0, 14.5, 15.2] {
            let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - f64::ln(x);
            assert!(d.abs() < 1e-12, "x={} d={}", x, d);
        }
    }

    #[test]
    fn complex_matches_real_axis() {
        for x in [0.3, 0.75, 1.5, 4.2, 17.0, 60.0] {
            let z = ln_gamma_complex(Complex64::new(x, 0.0));
            assert!((z.re - log_gamma(x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_reflection_identity() {
        for &(a, b) in &[(0.75, 3.0), (0.75, -12.0), (-0.3, 0.7), (2.0, 25.0)] {
            let z = Complex64::new(a, b);
            let lhs = (ln_gamma_complex(z) + ln_gamma_complex(1.0 - z)).exp();
            let rhs = PI / (z * PI).sin();
            assert!((lhs / rhs - 1.0).norm() < 1e-11, "{} {} {}", z, lhs, rhs);
        }
    }

    #[test]
    fn complex_recurrence() {
        let z = Complex64::new(0.75, 4.0);
        let g1 = ln_gamma_complex(z + 1.0).exp();
        let g0 = ln_gamma_complex(z).exp();
        assert!((g1 / (g0 * z) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn recip_gamma_zero_at_poles() {
        assert_eq!(recip_gamma(Complex64::new(-2.0, 0.0)), Complex64::new(0.0, 0.0));
        assert!((recip_gamma(Complex64::new(3.0, 0.0)).re - 0.5).abs() < 1e-14);
    }
}
