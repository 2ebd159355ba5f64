//! The entire function `φ(x) = ∫ e^{-2(w^{2m} - xw)} dw` and its derivatives.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gamma::log_gamma_pos;
use crate::numerics::{integrate_halfline_scaled, integrate_segment, ContourSegment, NeumaierSum, QuadSpec};

/// Angular margin kept from the edges of the asymptotic sector.
pub const ASYMPTOTIC_SECTOR_MARGIN: f64 = PI / 16.0;

const MAX_SERIES_TERMS: usize = 10_000;

/// The order `m` of the model hypersurface and its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelOrder {
    m: u32,
    c0: f64,
    c1: f64,
    c2: f64,
    theta0: f64,
}

impl ModelOrder {
    pub fn new(m: u32) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParameter(format!("m must be >= 1, got {}", m)));
        }
        let mf = m as f64;
        let tm = 2.0 * mf;
        let theta0 = PI / (2.0 * (tm - 1.0));
        let c0 = PI.sqrt() * (tm - 1.0).powf(-0.5) * tm.powf(-1.0 / (4.0 * mf - 2.0));
        let b = (1.0 / tm).powf(1.0 / (tm - 1.0)) - (1.0 / tm).powf(tm / (tm - 1.0));
        let c1 = 2.0 * b;
        // cos θ0 vanishes for m = 1; keep it exactly zero.
        let c2 = if m == 1 { 0.0 } else { 2.0 / PI * b * theta0.cos() };
        Ok(ModelOrder {
            m,
            c0,
            c1,
            c2,
            theta0,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn theta0(&self) -> f64 {
        self.theta0
    }
    pub fn two_m(&self) -> f64 {
        2.0 * self.m as f64
    }
    /// `2m/(2m-1)`
    pub fn mu(&self) -> f64 {
        let tm = self.two_m();
        tm / (tm - 1.0)
    }
    /// `(2m-1)/(2m)`, the inverse exponent of `mu`.
    pub fn gamma_exp(&self) -> f64 {
        1.0 / self.mu()
    }
    /// Smallest `|x|` at which the asymptotic route is accepted.
    pub fn asymptotic_threshold(&self) -> f64 {
        (10.0 / self.c1).powf(self.gamma_exp())
    }
    /// Spacing of consecutive zeros near `a` implied by the counting law.
    pub fn zero_spacing(&self, a: f64) -> f64 {
        let tm = self.two_m();
        if self.c2 == 0.0 {
            return f64::INFINITY;
        }
        self.gamma_exp() * a.max(0.5).powf(-1.0 / (tm - 1.0)) / self.c2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiMethod {
    Series,
    Quadrature,
    Asymptotic,
}

impl std::str::FromStr for PhiMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(PhiMethod::Series),
            "quadrature" | "quad" => Ok(PhiMethod::Quadrature),
            "asymptotic" => Ok(PhiMethod::Asymptotic),
            _ => Err(Error::InvalidParameter(format!("unknown method '{}'", s))),
        }
    }
}

impl std::fmt::Display for PhiMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PhiMethod::Series => "series",
            PhiMethod::Quadrature => "quadrature",
            PhiMethod::Asymptotic => "asymptotic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEval {
    pub value: Complex64,
    pub method: PhiMethod,
    pub err_est: f64,
}

/// A value stored as `mantissa · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
    /// Absolute error on the mantissa.
    pub err: f64,
}

impl Scaled {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }
    pub fn ln(&self) -> Complex64 {
        self.mantissa.ln() + self.log_scale
    }
}

/// Result of a series evaluation with its rounding and truncation budget.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex64,
    pub err: f64,
    pub abs_sum: f64,
    pub terms: usize,
}

fn ln_moments(order: &ModelOrder, count: usize) -> Vec<f64> {
    let m = order.m as usize;
    let tm = order.two_m();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        if k < m {
            let s = (2 * k + 1) as f64 / tm;
            out.push(-(order.m as f64).ln() - s * std::f64::consts::LN_2 + log_gamma_pos(s));
        } else {
            let j = k - m;
            let prev = out[j];
            out.push(prev + ((2 * j + 1) as f64 / (2.0 * tm)).ln());
        }
    }
    out
}

/// `φ^{(n)}(x)` from the even-moment Taylor series.
pub fn phi_series(order: &ModelOrder, x: Complex64, n: usize) -> Result<SeriesValue> {
    let k0 = (n + 1) / 2;
    if x == Complex64::new(0.0, 0.0) {
        let value = if n % 2 == 0 {
            let lm = ln_moments(order, k0 + 1)[k0];
            Complex64::new((lm + n as f64 * std::f64::consts::LN_2).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        return Ok(SeriesValue {
            value,
            err: value.norm() * 4.0 * f64::EPSILON,
            abs_sum: value.norm(),
            terms: 1,
        });
    }
    let lnx = x.norm().ln();
    let arg = x.arg();
    let mut lm = ln_moments(order, k0 + order.m as usize);
    let mut acc = NeumaierSum::new();
    let mut abs_sum = 0.0;
    let mut ln_fact = 0.0;
    let mut small = 0;
    let mut last = f64::INFINITY;
    let mut ratio = 1.0;
    let mut peaked = false;
    for k in k0..k0 + MAX_SERIES_TERMS {
        while lm.len() <= k {
            let j = lm.len() - order.m as usize;
            let v = lm[j] + ((2 * j + 1) as f64 / (2.0 * order.two_m())).ln();
            lm.push(v);
        }
        let p = 2 * k - n;
        if p >= 1 {
            ln_fact += (p as f64).ln();
            if p >= 2 {
                ln_fact += ((p - 1) as f64).ln();
            }
        }
        let lt = lm[k] + 2.0 * k as f64 * std::f64::consts::LN_2 + p as f64 * lnx - ln_fact;
        if lt > 700.0 {
            return Err(Error::NonConvergence(format!(
                "series terms overflow at |x| = {}; use quadrature",
                x.norm()
            )));
        }
        let mag = lt.exp();
        let term = Complex64::from_polar(mag, p as f64 * arg);
        acc.add(term);
        abs_sum += mag;
        if mag > 0.0 && last.is_finite() && last > 0.0 {
            ratio = mag / last;
            if ratio < 1.0 {
                peaked = true;
            }
        }
        last = mag;
        let reference = acc.sum().norm().max(f64::EPSILON * abs_sum);
        if peaked && mag < 1e-17 * reference {
            small += 1;
        } else {
            small = 0;
        }
        if small >= 5 && ratio < 0.5 {
            let tail = mag * ratio / (1.0 - ratio);
            let value = acc.sum();
            return Ok(SeriesValue {
                value,
                err: tail + 4.0 * f64::EPSILON * abs_sum,
                abs_sum,
                terms: k - k0 + 1,
            });
        }
    }
    Err(Error::NonConvergence(format!(
        "series for φ^({}) did not terminate within {} terms",
        n, MAX_SERIES_TERMS
    )))
}

/// `φ^{(k)}(x)` by quadrature along the horizontal line through the principal
/// saddle of the exponent, returned in scaled form.
pub fn phi_quadrature_scaled(order: &ModelOrder, x: Complex64, k: usize) -> Result<Scaled> {
    let flip = x.re < 0.0;
    let xp = if flip { -x } else { x };
    let tm = order.two_m();
    let mi = order.m as i32;
    let ws = if xp == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        (xp / tm).powf(1.0 / (tm - 1.0))
    };
    let expo = |w: Complex64| -2.0 * (w.powi(2 * mi) - xp * w);
    let shift = expo(ws).re;
    let curv = 2.0 * tm * (tm - 1.0) * ws.norm().powf(tm - 2.0);
    let width = if curv > 0.0 { curv.sqrt().recip() } else { 1.0 };
    let scale = (2.0 * width).clamp(0.02, 1.0);
    let ki = k as i32;
    let f = |w: Complex64| {
        let e = (expo(w) - shift).exp();
        if k == 0 {
            e
        } else {
            e * (2.0 * w).powi(ki)
        }
    };
    let spec = QuadSpec {
        rel_tol: 1e-14,
        abs_tol: 1e-17,
        max_evals: 4_000_000,
        oscillation_hint: None,
    };
    let right = integrate_halfline_scaled(&f, &ContourSegment::ray_at(ws, 0.0), &spec, scale)?;
    // The mirror saddle −conj(ws) sits on the same line; cover the gap first.
    let w2 = Complex64::new(-ws.re - scale, ws.im);
    let gap = integrate_segment(&f, &ContourSegment::segment(ws, w2), &spec)?;
    let left = integrate_halfline_scaled(&f, &ContourSegment::ray_at(w2, PI), &spec, scale)?;
    let mut mantissa = right.value - left.value - gap.value;
    if flip && k % 2 == 1 {
        mantissa = -mantissa;
    }
    Ok(Scaled {
        mantissa,
        log_scale: shift,
        err: right.err_est + left.err_est + gap.err_est,
    })
}

/// `ln φ(x)` (imaginary part modulo 2π), safe for large `|x|`.
pub fn ln_phi(order: &ModelOrder, x: Complex64) -> Result<Complex64> {
    Ok(phi_quadrature_scaled(order, x, 0)?.ln())
}

fn asym_arg(x: Complex64) -> f64 {
    let a = x.arg();
    if a <= -PI / 2.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

fn ln_a(order: &ModelOrder, lnr: f64, arg: f64) -> Complex64 {
    let tm = order.two_m();
    let alpha = (1.0 - order.m as f64) / (tm - 1.0);
    let l = Complex64::new(lnr, arg);
    order.c0.ln() + alpha * l + order.c1 * (order.mu() * l).exp()
}

/// Logarithm of the two-term asymptotic form at `x` (single term for m=1,
/// where both terms are the same function).
pub fn ln_asymptotic(order: &ModelOrder, x: Complex64) -> Result<Complex64> {
    if x.norm() == 0.0 {
        return Err(Error::OutsideAsymptoticRegime("x = 0".into()));
    }
    let lnr = x.norm().ln();
    let arg = asym_arg(x);
    let l1 = ln_a(order, lnr, arg);
    if order.m == 1 {
        return Ok(l1);
    }
    let l2 = ln_a(order, lnr, arg - PI);
    let (hi, lo) = if l1.re >= l2.re { (l1, l2) } else { (l2, l1) };
    Ok(hi + (1.0 + (lo - hi).exp()).ln())
}

fn in_asymptotic_sector(x: Complex64) -> bool {
    let a = asym_arg(x);
    a > -PI / 2.0 + ASYMPTOTIC_SECTOR_MARGIN && a < 1.5 * PI - ASYMPTOTIC_SECTOR_MARGIN
}

/// Evaluates `φ(x)` by the requested route.
pub fn phi(order: &ModelOrder, x: Complex64, method: PhiMethod) -> Result<PhiEval> {
    match method {
        PhiMethod::Series => {
            let s = phi_series(order, x, 0)?;
            Ok(PhiEval {
                value: s.value,
                method,
                err_est: s.err,
            })
        }
        PhiMethod::Quadrature => {
            let s = phi_quadrature_scaled(order, x, 0)?;
            let value = s.value();
            if !(value.re.is_finite() && value.im.is_finite()) {
                return Err(Error::NonConvergence(format!(
                    "φ({}) overflows; use ln_phi",
                    x
                )));
            }
            Ok(PhiEval {
                value,
                method,
                err_est: s.err * s.log_scale.exp(),
            })
        }
        PhiMethod::Asymptotic => {
            if x.norm() < order.asymptotic_threshold() {
                return Err(Error::OutsideAsymptoticRegime(format!(
                    "|x| = {} below threshold {:.4}",
                    x.norm(),
                    order.asymptotic_threshold()
                )));
            }
            if !in_asymptotic_sector(x) {
                return Err(Error::OutsideAsymptoticRegime(format!(
                    "arg x = {} outside the asymptotic sector",
                    x.arg()
                )));
            }
            let l = ln_asymptotic(order, x)?;
            let value = l.exp();
            // First neglected correction is of relative order |x|^{-μ}.
            let err_est = value.norm() * x.norm().powf(-order.mu());
            Ok(PhiEval {
                value,
                method,
                err_est,
            })
        }
    }
}

/// `φ^{(k)}(x)` for `0 ≤ k ≤ 2m`. The Taylor series is used when it keeps at
/// least eleven significant digits, otherwise the saddle-line quadrature.
pub fn phi_derivative(order: &ModelOrder, x: Complex64, k: usize) -> Result<Complex64> {
    if k > 2 * order.m as usize {
        return Err(Error::InvalidParameter(format!(
            "derivative order {} exceeds 2m = {}",
            k,
            2 * order.m
        )));
    }
    if let Ok(s) = phi_series(order, x, k) {
        if s.abs_sum <= 1e5 * s.value.norm() || s.abs_sum < 1e-300 {
            return Ok(s.value);
        }
    }
    Ok(phi_quadrature_scaled(order, x, k)?.value())
}

/// Normalised residual of `y^{(2m-1)} = (2^{2m-2}/m)·x·y` at `x`.
pub fn ode_residual(order: &ModelOrder, x: Complex64) -> Result<f64> {
    let n = 2 * order.m as usize - 1;
    let y = phi_series(order, x, 0)?.value;
    let d = phi_series(order, x, n)?.value;
    let coef = 2f64.powi(2 * order.m as i32 - 2) / order.m as f64;
    Ok((d - coef * x * y).norm() / (1.0 + y.norm()))
}

/// `|φ(x)/asymptotic(x) − 1|` on a grid, compared in the log domain.
pub fn asymptotic_agreement(order: &ModelOrder, grid: &[Complex64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&x| {
            let d = ln_phi(order, x)? - ln_asymptotic(order, x)?;
            Ok((d.exp() - 1.0).norm())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn constants() {
        let o = ModelOrder::new(2).unwrap();
        assert!((o.c1() - 0.9449407874211).abs() < 1e-12);
        assert!((o.c2() - 0.2604865802839519).abs() < 1e-14);
        assert!((o.theta0() - PI / 6.0).abs() < 1e-15);
        let o1 = ModelOrder::new(1).unwrap();
        assert!((o1.c0() - (PI / 2.0).sqrt()).abs() < 1e-15);
        assert!((o1.c1() - 0.5).abs() < 1e-15);
        assert_eq!(o1.c2(), 0.0);
        assert!(ModelOrder::new(0).is_err());
    }

    #[test]
    fn m1_closed_form() {
        let o = ModelOrder::new(1).unwrap();
        let g = (PI / 2.0).sqrt();
        for x in [c(0.0, 0.0), c(2.0, 0.0), c(0.7, -1.3)] {
            let want = g * (x * x / 2.0).exp();
            for m in [PhiMethod::Series, PhiMethod::Quadrature] {
                let v = phi(&o, x, m).unwrap().value;
                assert!(rel(v, want) < 1e-12, "{:?} {} {}", m, v, want);
            }
        }
        let e2 = 2f64.exp() * g;
        assert!((phi(&o, c(2.0, 0.0), PhiMethod::Series).unwrap().value.re - e2).abs() < 1e-12);
        let d = phi_derivative(&o, c(2.0, 0.0), 1).unwrap();
        assert!((d.re - 2.0 * e2).abs() < 1e-11);
    }

    #[test]
    fn m2_at_origin() {
        let o = ModelOrder::new(2).unwrap();
        // t = 2w⁴ gives φ(0) = 2^{-1/4} Γ(1/4) / 2
        let want = 0.5 * 2f64.powf(-0.25) * log_gamma_pos(0.25).exp();
        let s = phi(&o, c(0.0, 0.0), PhiMethod::Series).unwrap().value;
        let q = phi(&o, c(0.0, 0.0), PhiMethod::Quadrature).unwrap().value;
        assert!((s.re - want).abs() < 1e-14);
        assert!((q.re - want).abs() < 1e-12);
        assert!((want - 1.5244).abs() < 1e-4);
    }

    #[test]
    fn series_quadrature_agree() {
        for m in [2, 3] {
            let o = ModelOrder::new(m).unwrap();
            for x in [c(1.0, 0.0), c(3.0, 2.0), c(-1.5, 3.5), c(0.0, 4.0), c(2.5, -2.5)] {
                let s = phi(&o, x, PhiMethod::Series).unwrap().value;
                let q = phi(&o, x, PhiMethod::Quadrature).unwrap().value;
                assert!(rel(s, q) < 1e-9, "m={} x={} {} {}", m, x, s, q);
            }
        }
    }

    #[test]
    fn derivatives_agree() {
        let o = ModelOrder::new(2).unwrap();
        for k in 1..=4 {
            for x in [c(1.0, 0.5), c(0.0, 2.0), c(-2.0, 1.0)] {
                let s = phi_series(&o, x, k).unwrap().value;
                let q = phi_quadrature_scaled(&o, x, k).unwrap().value();
                assert!(rel(s, q) < 1e-9, "k={} x={} {} {}", k, x, s, q);
            }
        }
        assert_eq!(phi_derivative(&o, c(0.0, 0.0), 1).unwrap(), c(0.0, 0.0));
        assert!(phi_derivative(&o, c(1.0, 0.0), 5).is_err());
    }

    #[test]
    fn imaginary_axis_derivative_is_imaginary() {
        let o = ModelOrder::new(2).unwrap();
        for a in [0.5, 2.0, 7.0, 30.0] {
            let d = phi_derivative(&o, c(0.0, a), 1).unwrap();
            assert!(d.re.abs() < 1e-10 * d.norm(), "a={} {}", a, d);
        }
    }

    #[test]
    fn ode_residuals() {
        let o1 = ModelOrder::new(1).unwrap();
        assert!(ode_residual(&o1, c(1.3, 0.0)).unwrap() < 1e-10);
        let o2 = ModelOrder::new(2).unwrap();
        assert!(ode_residual(&o2, c(0.0, 0.0)).unwrap() < 1e-9);
        assert!(ode_residual(&o2, c(1.0, 0.5)).unwrap() < 1e-8);
    }

    #[test]
    fn asymptotic_route() {
        let o = ModelOrder::new(2).unwrap();
        assert!(matches!(
            phi(&o, c(2.0, 0.0), PhiMethod::Asymptotic),
            Err(Error::OutsideAsymptoticRegime(_))
        ));
        let dev = asymptotic_agreement(&o, &[c(3.0, 0.0), c(6.0, 0.0)]).unwrap();
        assert!(dev[1] < dev[0]);
        let tilted = asymptotic_agreement(&o, &[Complex64::from_polar(6.0, PI / 8.0)]).unwrap();
        assert!(tilted[0].is_finite());
        let o1 = ModelOrder::new(1).unwrap();
        let d1 = asymptotic_agreement(&o1, &[c(1.0, 0.0), c(5.0, 0.0)]).unwrap();
        assert!(d1.iter().all(|d| *d < 1e-12), "{:?}", d1);
    }

    #[test]
    fn large_argument_log_domain() {
        let o = ModelOrder::new(2).unwrap();
        let l = ln_phi(&o, c(300.0, 0.0)).unwrap();
        let a = ln_asymptotic(&o, c(300.0, 0.0)).unwrap();
        assert!((l - a).norm() < 1e-3);
        assert!(phi(&o, c(300.0, 0.0), PhiMethod::Quadrature).is_err());
    }
}
