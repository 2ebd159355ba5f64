//! `P(u) = ∫_ℝ e^{uv}/φ(v) dv`.
//!
//! For `u = |u|e^{iα}` the real line is moved to the parallel-to-level-set
//! line `Re(e^{iα}v) = −d`, on which `|e^{uv}|` is constant. The shift stays
//! below the first zero `ia_1`, so no residues are crossed.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::legendre::gauss_legendre;
use crate::numerics::{integrate_halfline_scaled, ContourSegment, QuadSpec};
use crate::phi::{phi_quadrature_scaled, ModelOrder};
use crate::zeros::locate_zeros;

/// Fraction of `a_1` by which the line is raised on the imaginary axis.
const SHIFT_FRACTION: f64 = 0.75;

/// First zero `a_1` (m ≥ 2).
pub fn first_zero(order: &ModelOrder) -> Result<f64> {
    let t = locate_zeros(order, 1, &QuadSpec::default())?;
    t.a1()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub base: Complex64,
    pub dir: Complex64,
}

/// Integration line for `P(u)` with `arg u = alpha`.
pub fn line_for(order: &ModelOrder, a1: Option<f64>, alpha: f64) -> Line {
    let s = alpha.sin();
    let limit = order.gamma_exp() * PI / 2.0 - 0.05;
    let sgn = if s >= 0.0 { 1.0 } else { -1.0 };
    let beta = sgn * PI / 2.0 - alpha;
    let beta = (beta + PI).rem_euclid(2.0 * PI) - PI;
    let admissible = beta.abs() < limit && s.abs() > 0.2;
    if !admissible {
        return Line {
            base: Complex64::new(0.0, 0.0),
            dir: Complex64::new(1.0, 0.0),
        };
    }
    let d = match a1 {
        Some(a) => SHIFT_FRACTION * a * s.abs(),
        None => 0.0,
    };
    Line {
        base: -Complex64::from_polar(d, -alpha),
        dir: Complex64::from_polar(1.0, beta),
    }
}

/// `ln(1/φ(v))`.
fn ln_inv_phi(order: &ModelOrder, v: Complex64) -> Result<Complex64> {
    Ok(-phi_quadrature_scaled(order, v, 0)?.ln())
}

/// `P(u)` by adaptive quadrature on the line adapted to `arg u`.
pub fn p_of(order: &ModelOrder, u: Complex64) -> Result<Complex64> {
    let a1 = if order.m() >= 2 { Some(first_zero(order)?) } else { None };
    p_of_with(order, a1, u)
}

pub fn p_of_with(order: &ModelOrder, a1: Option<f64>, u: Complex64) -> Result<Complex64> {
    let line = line_for(order, a1, u.arg());
    let err = std::cell::Cell::new(None);
    let f = |v: Complex64| match ln_inv_phi(order, v) {
        Ok(l) => (u * v + l).exp(),
        Err(e) => {
            err.set(Some(e));
            Complex64::new(0.0, 0.0)
        }
    };
    let spec = QuadSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_evals: 400_000,
        oscillation_hint: None,
    };
    let scale = 0.5;
    let right = integrate_halfline_scaled(&f, &ContourSegment::Ray { start: line.base, direction: line.dir }, &spec, scale)?;
    let left = integrate_halfline_scaled(&f, &ContourSegment::Ray { start: line.base, direction: -line.dir }, &spec, scale)?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(right.value - left.value)
}

/// Fixed-node evaluator of `P(r e^{iα})` for one direction `α` and `r ≤ u_max`.
#[derive(Debug, Clone)]
pub struct PLine {
    alpha: f64,
    u_max: f64,
    nodes: Vec<Complex64>,
    weights: Vec<Complex64>,
}

impl PLine {
    pub fn new(order: &ModelOrder, a1: Option<f64>, alpha: f64, u_max: f64) -> Result<Self> {
        let line = line_for(order, a1, alpha);
        if line.base == Complex64::new(0.0, 0.0) && a1.is_some() && alpha.sin().abs() > 0.2 {
            return Err(Error::Domain(format!(
                "direction arg u = {:.4} has no admissible integration line",
                alpha
            )));
        }
        let at = |x: f64| line.base + line.dir * x;
        // Extent: drop where 1/φ is 46 e-folds below its peak.
        let probe: Vec<f64> = (-400..=400).map(|k| k as f64 * 0.25).collect();
        let lv: Vec<f64> = probe
            .par_iter()
            .map(|&x| ln_inv_phi(order, at(x)).map(|l| l.re))
            .collect::<Result<Vec<_>>>()?;
        let peak = lv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let keep: Vec<usize> = (0..lv.len()).filter(|&i| lv[i] > peak - 46.0).collect();
        let lo = probe[*keep.first().unwrap()] - 1.0;
        let hi = probe[*keep.last().unwrap()] + 1.0;
        if hi >= 99.0 || lo <= -99.0 {
            return Err(Error::Divergence(format!(
                "1/φ does not decay along the line for arg u = {}",
                alpha
            )));
        }
        let h = 0.25f64.min(10.0 / u_max.max(1e-3));
        let panels = ((hi - lo) / h).ceil() as usize;
        let h = (hi - lo) / panels as f64;
        let (gx, gw) = gauss_legendre(20);
        let mut xs = Vec::with_capacity(panels * 20);
        let mut ws = Vec::with_capacity(panels * 20);
        for p in 0..panels {
            let c = lo + (p as f64 + 0.5) * h;
            for k in 0..20 {
                xs.push(c + 0.5 * h * gx[k]);
                ws.push(0.5 * h * gw[k]);
            }
        }
        let vals: Vec<(Complex64, Complex64)> = xs
            .par_iter()
            .zip(ws.par_iter())
            .map(|(&x, &w)| {
                let v = at(x);
                ln_inv_phi(order, v).map(|l| (v, line.dir * w * l.exp()))
            })
            .collect::<Result<Vec<_>>>()?;
        let (nodes, weights) = vals.into_iter().unzip();
        Ok(PLine {
            alpha,
            u_max,
            nodes,
            weights,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (v, w) in self.nodes.iter().zip(&self.weights) {
            s += w * (u * v).exp();
        }
        s
    }
}

/// `ln P(u)` for real `u`, through a log-domain integral on the real line.
/// `P(−u) = P(u)` by evenness of `φ`.
pub fn ln_p_real(table: &RealLnPhi, u: f64) -> Result<f64> {
    let uu = u.abs();
    let vm = table.v_max();
    let g = |v: f64| if v.abs() >= vm { f64::NEG_INFINITY } else { uu * v - table.eval(v) };
    // Concave exponent: locate its maximum by golden section.
    let (mut a, mut b) = (0.0, table.v_max());
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..200 {
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
        if b - a < 1e-12 * (1.0 + b) {
            break;
        }
    }
    let vstar = 0.5 * (a + b);
    let shift = g(vstar);
    if vstar > vm - 1.0 || g(vm - 1e-9) - shift > -46.0 {
        return Err(Error::Domain(format!(
            "u = {} needs ln φ beyond the tabulated range {}",
            u,
            table.v_max()
        )));
    }
    let f = |v: Complex64| Complex64::new((g(v.re) - shift).exp(), 0.0);
    let spec = QuadSpec {
        rel_tol: 1e-13,
        abs_tol: 1e-300,
        max_evals: 200_000,
        oscillation_hint: None,
    };
    let start = Complex64::new(vstar, 0.0);
    let right = integrate_halfline_scaled(f, &ContourSegment::ray_at(start, 0.0), &spec, 0.5)?;
    let left = integrate_halfline_scaled(f, &ContourSegment::ray_at(start, PI), &spec, 0.5)?;
    Ok((right.value - left.value).re.ln() + shift)
}

/// Chebyshev interpolant of `ln φ(v)` on `[0, v_max]`, extended evenly.
#[derive(Debug, Clone)]
pub struct RealLnPhi {
    panel: f64,
    nodes: usize,
    coeffs: Vec<Vec<f64>>,
}

impl RealLnPhi {
    pub fn new(order: &ModelOrder, v_max: f64) -> Result<Self> {
        let panel = 1.0;
        let nodes = 24;
        let count = (v_max / panel).ceil().max(1.0) as usize;
        let cheb: Vec<f64> = (0..nodes)
            .map(|k| (PI * (k as f64 + 0.5) / nodes as f64).cos())
            .collect();
        let coeffs = (0..count)
            .into_par_iter()
            .map(|p| {
                let a = p as f64 * panel;
                let vals: Vec<f64> = cheb
                    .iter()
                    .map(|&x| {
                        let v = a + 0.5 * panel * (x + 1.0);
                        phi_quadrature_scaled(order, Complex64::new(v, 0.0), 0).map(|s| s.ln().re)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let n = nodes as f64;
                Ok((0..nodes)
                    .map(|j| {
                        let s: f64 = (0..nodes)
                            .map(|k| vals[k] * (PI * j as f64 * (k as f64 + 0.5) / n).cos())
                            .sum();
                        if j == 0 {
                            s / n
                        } else {
                            2.0 * s / n
                        }
                    })
                    .collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(RealLnPhi {
            panel,
            nodes,
            coeffs,
        })
    }

    pub fn v_max(&self) -> f64 {
        self.coeffs.len() as f64 * self.panel
    }

    pub fn eval(&self, v: f64) -> f64 {
        let v = v.abs();
        let p = ((v / self.panel) as usize).min(self.coeffs.len() - 1);
        let a = p as f64 * self.panel;
        let x = 2.0 * (v - a) / self.panel - 1.0;
        let c = &self.coeffs[p];
        let (mut b1, mut b2) = (0.0, 0.0);
        for j in (1..self.nodes).rev() {
            let b0 = 2.0 * x * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + c[0]
    }
}
