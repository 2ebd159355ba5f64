//! The Borel density `H^ν(z, t; p) = Σ_j S_j^ν p^{f_j} / (Γ(f_j+1) φ′(σia_j))`
//! and `K = ∫_0^∞ e^{−p} H dp`.
//!
//! The contour route integrates `p^ζ Φ^ν(ζ)/Γ(ζ+1)` over `N′`: the line
//! `Re ζ = −1/4` run downward, detouring to the right of `−1/4` on a
//! semicircle of radius `(f_1 + 1/4)/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::maps::ConformalMaps;
use super::{KernelKind, KernelValue, Route};
use crate::error::{Error, Result};
use crate::numerics::gamma::log_gamma_pos;
use crate::numerics::legendre::gauss_legendre;
use crate::numerics::{integrate_halfline_scaled, ln_gamma_complex, ContourSegment, NeumaierSum, QuadSpec};
use crate::phi::{phi_quadrature_scaled, ModelOrder};
use crate::singular::{s_generic, s_j, EvalPoint};
use crate::zeros::{residue_weight, ZeroTable};

/// Default crossover between the series and contour routes.
pub const DEFAULT_P_SWITCH: f64 = 2.0;

/// Terms below `largest · e^{−TERM_CUT}` are dropped.
const TERM_CUT: f64 = 40.0;
const LINE_T_MAX: f64 = 40.0;
const LINE_PANELS: usize = 80;
const ARC_NODES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityRoute {
    Series,
    Contour,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BorelDensitySample {
    pub p: f64,
    pub h: Complex64,
    pub route: DensityRoute,
    /// Series terms used, or contour nodes.
    pub count: usize,
    pub precision_loss: bool,
}

fn check_point(order: &ModelOrder, pt: &EvalPoint) -> Result<()> {
    pt.require_off_axis()?;
    if !pt.in_sector(order) {
        return Err(Error::OutsideConvergenceSector(format!(
            "z = {} lies outside |arg z ∓ π/2| < π/(2(2m−1))",
            pt.z()
        )));
    }
    Ok(())
}

/// `ln(σ c_j S_j)` for each zero of the table.
#[derive(Debug, Clone)]
pub struct HSeriesEvaluator {
    f: Vec<f64>,
    ln_coef: Vec<Complex64>,
}

impl HSeriesEvaluator {
    pub fn new(order: &ModelOrder, table: &ZeroTable, pt: &EvalPoint, nu: f64) -> Result<Self> {
        check_point(order, pt)?;
        let sigma = pt.sigma();
        let rows = (1..=table.len())
            .into_par_iter()
            .map(|j| {
                let (lm, ph) = residue_weight(table, j)?;
                let s = s_j(order, table, j, pt, nu)?;
                let mut l = Complex64::new(lm, ph) + s.ln();
                if sigma < 0.0 {
                    l += Complex64::new(0.0, PI);
                }
                Ok((table.record(j)?.f, l))
            })
            .collect::<Result<Vec<_>>>()?;
        let (f, ln_coef) = rows.into_iter().unzip();
        Ok(HSeriesEvaluator { f, ln_coef })
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// `ln` of the j-th term at `p` (1-based `j`).
    pub fn ln_term(&self, j: usize, p: f64) -> Complex64 {
        self.ln_coef[j - 1] + self.f[j - 1] * p.ln()
    }

    /// Sums the terms weighted by `w_j = exp(ln_weight(f_j))`.
    fn weighted<W: Fn(f64) -> f64>(&self, p: f64, ln_weight: W) -> Result<(Complex64, usize, bool)> {
        let logs: Vec<Complex64> = (0..self.f.len())
            .map(|i| self.ln_coef[i] + ln_weight(self.f[i]))
            .collect();
        let big = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        let last = logs.last().map(|l| l.re).unwrap_or(f64::NEG_INFINITY);
        if last > big - TERM_CUT {
            return Err(Error::NonConvergence(format!(
                "series terms at p = {} are still significant at the end of the zero table ({} zeros)",
                p,
                self.f.len()
            )));
        }
        let mut idx: Vec<usize> = (0..logs.len()).filter(|&i| logs[i].re > big - TERM_CUT).collect();
        let used = idx.last().map(|i| i + 1).unwrap_or(0);
        idx.sort_by(|&a, &b| logs[b].re.total_cmp(&logs[a].re));
        let mut acc = NeumaierSum::new();
        for i in idx {
            acc.add(logs[i].exp());
        }
        let s = acc.sum();
        let loss = s.norm() < 1e-13 * big.exp();
        Ok((s, used, loss))
    }

    pub fn eval(&self, p: f64) -> Result<BorelDensitySample> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("p must be positive, got {}", p)));
        }
        let lp = p.ln();
        let (h, used, loss) = self.weighted(p, |f| f * lp)?;
        Ok(BorelDensitySample {
            p,
            h,
            route: DensityRoute::Series,
            count: used,
            precision_loss: loss,
        })
    }

    /// `∫_0^{p0} e^{−p} H dp` term by term.
    pub fn laplace_head(&self, p0: f64) -> Result<Complex64> {
        // Σ c_j S_j Γ(f_j+1) P(f_j+1, p0), and c_j carries 1/Γ(f_j+1).
        let (s, _, _) = self.weighted(p0, |f| ln_lower_gamma_regularized(f + 1.0, p0) + log_gamma_pos(f + 1.0))?;
        Ok(s)
    }
}

/// `ln(γ(s, x)/Γ(s))` for `s > 0`, `0 < x` not much larger than `s`.
fn ln_lower_gamma_regularized(s: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-17 * sum {
        term *= x / (s + k);
        sum += term;
        k += 1.0;
    }
    s * x.ln() - x - log_gamma_pos(s + 1.0) + sum.ln()
}

/// `H` by quadrature on `N′` with `Φ^ν` precomputed at the nodes.
#[derive(Debug, Clone)]
pub struct HContourEvaluator {
    zeta: Vec<Complex64>,
    /// `w_i Φ_i / (2πi)`, `w_i` including `dζ`.
    weight: Vec<Complex64>,
    ln_recip_gamma: Vec<Complex64>,
    conj: bool,
}

impl HContourEvaluator {
    pub fn new(order: &ModelOrder, table: &ZeroTable, pt: &EvalPoint, nu: f64) -> Result<Self> {
        check_point(order, pt)?;
        let conj = pt.sigma() < 0.0;
        let pt = if conj { pt.conj() } else { *pt };
        let maps = ConformalMaps::new(*order)?;
        let f1 = table.record(1)?.f;
        let eps = 0.5 * (f1 + 0.25);
        let base = Complex64::new(-0.25, 0.0);
        let mut nodes: Vec<(Complex64, Complex64)> = Vec::new();
        let (gx, gw) = gauss_legendre(20);
        let (s0, s1) = (eps.ln(), LINE_T_MAX.ln());
        let h = (s1 - s0) / LINE_PANELS as f64;
        for k in 0..LINE_PANELS {
            let c = s0 + (k as f64 + 0.5) * h;
            for (x, w) in gx.iter().zip(&gw) {
                let t = (c + 0.5 * h * x).exp();
                let dt = 0.5 * h * w * t;
                // Upper half downward, lower half downward.
                nodes.push((base + Complex64::new(0.0, t), Complex64::new(0.0, -dt)));
                nodes.push((base - Complex64::new(0.0, t), Complex64::new(0.0, -dt)));
            }
        }
        let (ax, aw) = gauss_legendre(ARC_NODES);
        for (x, w) in ax.iter().zip(&aw) {
            let th = 0.5 * PI * x;
            let e = Complex64::from_polar(eps, th);
            // θ runs from π/2 down to −π/2.
            nodes.push((base + e, -Complex64::i() * e * (0.5 * PI * w)));
        }
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let vals = nodes
            .par_iter()
            .map(|&(z, w)| {
                let phi_v = capital_phi(order, &maps, &pt, nu, z)?;
                Ok((z, w * phi_v / two_pi_i, -ln_gamma_complex(z + 1.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut zeta = Vec::with_capacity(vals.len());
        let mut weight = Vec::with_capacity(vals.len());
        let mut lrg = Vec::with_capacity(vals.len());
        for (z, w, l) in vals {
            zeta.push(z);
            weight.push(w);
            lrg.push(l);
        }
        Ok(HContourEvaluator {
            zeta,
            weight,
            ln_recip_gamma: lrg,
            conj,
        })
    }

    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    pub fn eval(&self, p: f64) -> Result<BorelDensitySample> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("p must be positive, got {}", p)));
        }
        let h = self.h(p);
        Ok(BorelDensitySample {
            p,
            h,
            route: DensityRoute::Contour,
            count: self.zeta.len(),
            precision_loss: false,
        })
    }

    fn h(&self, p: f64) -> Complex64 {
        let lp = p.ln();
        let mut acc = NeumaierSum::new();
        for i in 0..self.zeta.len() {
            acc.add(self.weight[i] * (self.zeta[i] * lp + self.ln_recip_gamma[i]).exp());
        }
        let s = acc.sum();
        if self.conj {
            s.conj()
        } else {
            s
        }
    }

    /// `∫_0^∞ e^{−p} H dp = (1/2πi) ∫_{N′} Φ dζ` after exchanging the integrals.
    pub fn laplace_full(&self) -> Complex64 {
        let mut acc = NeumaierSum::new();
        for w in &self.weight {
            acc.add(*w);
        }
        let s = acc.sum();
        if self.conj {
            s.conj()
        } else {
            s
        }
    }

    /// `∫_{p0}^∞ e^{−p} H dp` by quadrature in `p`.
    pub fn laplace_tail(&self, p0: f64) -> Result<(Complex64, f64)> {
        let f = |q: Complex64| self.h(p0 + q.re) * (-(p0 + q.re)).exp();
        let spec = QuadSpec {
            rel_tol: 1e-11,
            abs_tol: 1e-300,
            max_evals: 20_000,
            oscillation_hint: None,
        };
        let r = integrate_halfline_scaled(f, &ContourSegment::ray_at(Complex64::new(0.0, 0.0), 0.0), &spec, 1.0)?;
        Ok((r.value, r.err_est))
    }
}

/// `Φ^ν(ζ) = S^ν(G_+(ζ)) G′_+(ζ) / φ(G_+(ζ))`.
fn capital_phi(order: &ModelOrder, maps: &ConformalMaps, pt: &EvalPoint, nu: f64, zeta: Complex64) -> Result<Complex64> {
    let xi = maps.g_raw(1.0, zeta);
    let gp = maps.g_prime_raw(1.0, zeta);
    let s = s_generic(order, xi, pt, nu)?;
    let ph = phi_quadrature_scaled(order, xi, 0)?;
    Ok(((s * gp).ln() - ph.ln()).exp())
}

pub fn h_series(order: &ModelOrder, table: &ZeroTable, pt: &EvalPoint, p: f64, nu: f64) -> Result<BorelDensitySample> {
    HSeriesEvaluator::new(order, table, pt, nu)?.eval(p)
}

pub fn h_contour(order: &ModelOrder, table: &ZeroTable, pt: &EvalPoint, p: f64, nu: f64) -> Result<BorelDensitySample> {
    HContourEvaluator::new(order, table, pt, nu)?.eval(p)
}

/// `∫_0^∞ e^{−p} H dp`: series for `p ≤ p_switch`, contour beyond.
pub fn k_borel(order: &ModelOrder, table: &ZeroTable, pt: &EvalPoint, kind: KernelKind, p_switch: f64) -> Result<KernelValue> {
    if !(p_switch > 0.0) {
        return Err(Error::InvalidParameter(format!("p_switch must be positive, got {}", p_switch)));
    }
    let nu = kind.nu(order);
    let series = HSeriesEvaluator::new(order, table, pt, nu)?;
    let contour = HContourEvaluator::new(order, table, pt, nu)?;
    let head = series.laplace_head(p_switch)?;
    let (tail, err) = contour.laplace_tail(p_switch)?;
    let value = head + tail;
    Ok(KernelValue {
        value,
        route: Route::BorelSeries,
        err_est: err + 1e-12 * value.norm(),
    })
}

/// `∫_0^∞ e^{−p} H dp` entirely on the contour (the `p`-integral done in closed form).
pub fn k_borel_contour(order: &ModelOrder, table: &ZeroTable, pt: &EvalPoint, kind: KernelKind) -> Result<KernelValue> {
    let c = HContourEvaluator::new(order, table, pt, kind.nu(order))?;
    let value = c.laplace_full();
    Ok(KernelValue {
        value,
        route: Route::BorelContour,
        err_est: 1e-10 * value.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::locate_zeros;

    fn setup() -> (ModelOrder, ZeroTable) {
        let o = ModelOrder::new(2).unwrap();
        let t = locate_zeros(&o, 60, &QuadSpec::default()).unwrap();
        (o, t)
    }

    #[test]
    fn incomplete_gamma() {
        // P(1, x) = 1 − e^{−x}; P(2, x) = 1 − (1+x)e^{−x}.
        let x: f64 = 1.3;
        assert!((ln_lower_gamma_regularized(1.0, x).exp() - (1.0 - (-x).exp())).abs() < 1e-15);
        assert!((ln_lower_gamma_regularized(2.0, x).exp() - (1.0 - (1.0 + x) * (-x).exp())).abs() < 1e-15);
    }

    #[test]
    fn routes_agree_at_moderate_p() {
        let (o, t) = setup();
        let pt = EvalPoint::new(0.0, 1.0, 0.0);
        let nu = 0.5;
        let s = HSeriesEvaluator::new(&o, &t, &pt, nu).unwrap();
        let c = HContourEvaluator::new(&o, &t, &pt, nu).unwrap();
        for p in [0.5, 1.0, 2.0] {
            let a = s.eval(p).unwrap().h;
            let b = c.eval(p).unwrap().h;
            assert!((a - b).norm() < 1e-8 * a.norm(), "p={} {} {}", p, a, b);
        }
    }

    #[test]
    fn lower_half_plane_by_reflection() {
        let (o, t) = setup();
        let pt = EvalPoint::new(0.05, 1.0, 0.3);
        let a = HSeriesEvaluator::new(&o, &t, &pt, 0.5).unwrap().eval(1.0).unwrap().h;
        let b = HSeriesEvaluator::new(&o, &t, &pt.conj(), 0.5).unwrap().eval(1.0).unwrap().h;
        let c = HContourEvaluator::new(&o, &t, &pt.conj(), 0.5).unwrap().eval(1.0).unwrap().h;
        assert!((a.conj() - b).norm() < 1e-12 * a.norm());
        assert!((b - c).norm() < 1e-8 * a.norm(), "{} {}", b, c);
    }

    #[test]
    fn density_vanishes_at_zero() {
        let (o, t) = setup();
        let s = HSeriesEvaluator::new(&o, &t, &EvalPoint::new(0.0, 1.0, 0.0), 0.5).unwrap();
        let small = s.eval(1e-6).unwrap().h.norm();
        let one = s.eval(1.0).unwrap().h.norm();
        assert!(small < 1e-2 * one);
    }

    #[test]
    fn borel_routes_match() {
        let (o, t) = setup();
        let pt = EvalPoint::new(0.0, 1.0, 0.3);
        let a = k_borel(&o, &t, &pt, KernelKind::Szego, DEFAULT_P_SWITCH).unwrap().value;
        let b = k_borel_contour(&o, &t, &pt, KernelKind::Szego).unwrap().value;
        assert!((a - b).norm() < 1e-8 * a.norm(), "{} {}", a, b);
    }

    #[test]
    fn outside_sector_is_refused() {
        let (o, t) = setup();
        assert!(HSeriesEvaluator::new(&o, &t, &EvalPoint::new(1.0, 1.0, 0.0), 0.5).is_err());
    }
}
