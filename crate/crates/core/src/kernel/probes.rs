//! Divergence of the formal residue series, the Gevrey growth of
//! `∂_t^k K(iy, 0)` and the decay of the Borel density.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::borel::{HContourEvaluator, HSeriesEvaluator, DEFAULT_P_SWITCH};
use crate::error::{Error, Result};
use crate::numerics::gamma::log_gamma_pos;
use crate::numerics::{integrate_halfline_scaled, integrate_segment, ContourSegment, QuadSpec};
use crate::phi::{phi_quadrature_scaled, ModelOrder};
use crate::singular::{gevrey_order_estimate, s_j, EvalPoint};
use crate::zeros::ZeroTable;

/// First index from which `v` is strictly increasing (or decreasing) to the end.
fn eventual_onset(v: &[f64], increasing: bool) -> Option<usize> {
    if v.len() < 2 {
        return None;
    }
    let mut i = v.len() - 1;
    while i > 0 && ((increasing && v[i] > v[i - 1]) || (!increasing && v[i] < v[i - 1])) {
        i -= 1;
    }
    if i + 1 == v.len() {
        None
    } else {
        Some(i)
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    /// `ln|S_j^ν / φ′(ia_j)|`, `j = 1, 2, …`.
    pub formal: Vec<f64>,
    /// `ln|S_j^ν / (Γ(f_j+1) φ′(ia_j))|`, the Borel terms at `p = 1`.
    pub damped: Vec<f64>,
    /// 1-based index from which the formal terms strictly increase.
    pub formal_onset: Option<usize>,
    /// 1-based index from which the damped terms strictly decrease.
    pub damped_onset: Option<usize>,
    /// `exp` of the slope of `formal` in `j` over the upper half of the table.
    pub growth_rate: f64,
    /// Largest `damped[j+1] − damped[j]` over the upper half.
    pub damped_max_step: f64,
}

pub fn divergence_probe(order: &ModelOrder, table: &ZeroTable, pt: &EvalPoint, nu: f64) -> Result<DivergenceReport> {
    if table.len() < 8 {
        return Err(Error::InvalidParameter("divergence probe needs at least 8 zeros".into()));
    }
    let series = HSeriesEvaluator::new(order, table, pt, nu)?;
    let mut formal = Vec::with_capacity(table.len());
    let mut damped = Vec::with_capacity(table.len());
    for j in 1..=table.len() {
        let r = table.record(j)?;
        let s = s_j(order, table, j, pt, nu)?.norm().ln();
        formal.push(s + r.ln_inv_phi_prime());
        damped.push(series.ln_term(j, 1.0).re);
    }
    let half = table.len() / 2;
    let js: Vec<f64> = (half..table.len()).map(|j| (j + 1) as f64).collect();
    let growth_rate = slope(&js, &formal[half..]).exp();
    let damped_max_step = damped[half..]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DivergenceReport {
        formal_onset: eventual_onset(&formal, true).map(|i| i + 1),
        damped_onset: eventual_onset(&damped, false).map(|i| i + 1),
        formal,
        damped,
        growth_rate,
        damped_max_step,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GevreyReport {
    pub ks: Vec<usize>,
    /// `ln|∂_t^k K(iy, 0)|`.
    pub log_derivative: Vec<f64>,
    /// `∂_t^k K` divided by the `j = 1` closed form `i^k 2m Γ(n_k)/(|y|a_1)^{n_k}`.
    pub ratios: Vec<Complex64>,
    /// `|ratio_k/ratio_{k+1} − 1|`.
    pub ratio_steps: Vec<f64>,
    pub s_hat: f64,
    /// `|∂_t^k R_N| / [Γ(n_k)/(|y|(a_N − ε))^{n_k}]`.
    pub remainder_quotients: Vec<f64>,
    pub n_split: usize,
}

/// `(1/2πi) ∫_{C_δ} (−iξ/δ)^{−n} / φ(ξ) dξ` for `σ = +`.
fn scaled_remainder(order: &ModelOrder, delta: f64, n: f64) -> Result<Complex64> {
    let half = order.gamma_exp() * PI / 2.0;
    let (bl, br) = (PI / 2.0 + half, PI / 2.0 - half);
    let err = std::cell::Cell::new(None);
    let f = |xi: Complex64| match phi_quadrature_scaled(order, xi, 0) {
        Ok(s) => (-n * (-Complex64::i() * xi / delta).ln() - s.ln()).exp(),
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
    let scale = delta / n.max(1.0);
    let left = integrate_halfline_scaled(&f, &ContourSegment::ray_at(Complex64::from_polar(delta, bl), bl), &spec, scale)?;
    let arc = integrate_segment(&f, &ContourSegment::arc(Complex64::new(0.0, 0.0), delta, bl, br)?, &spec)?;
    let right = integrate_halfline_scaled(&f, &ContourSegment::ray_at(Complex64::from_polar(delta, br), br), &spec, scale)?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok((-left.value + arc.value + right.value) / Complex64::new(0.0, 2.0 * PI))
}

/// Exact `t`-derivatives of the Szegő kernel at `(iy, 0)` through the
/// contour representation, split after `n_split − 1` residues.
pub fn gevrey_probe(order: &ModelOrder, table: &ZeroTable, y: f64, k_max: usize, n_split: usize) -> Result<GevreyReport> {
    if y == 0.0 {
        return Err(Error::Domain("y = 0 lies on the singular support".into()));
    }
    if n_split < 2 || n_split > table.len() {
        return Err(Error::InvalidParameter(format!(
            "split index must lie in 2..={}, got {}",
            table.len(),
            n_split
        )));
    }
    let tm = order.two_m();
    let a1 = table.a1()?;
    let an = table.a(n_split)?;
    let eps = 0.1 * (an - table.a(n_split - 1)?);
    let delta = an - eps;
    let mut ks = Vec::new();
    let mut log_derivative = Vec::new();
    let mut ratios = Vec::new();
    let mut remainder_quotients = Vec::new();
    for k in 0..=k_max {
        let n = tm * k as f64 + tm + 2.0;
        let rt = scaled_remainder(order, delta, n)?;
        // I_k a_1^n = Σ_{j<N} (a_1/a_j)^n/φ′(ia_j) + R̃ (a_1/δ)^n
        let mut ratio = rt * (n * (a1 / delta).ln()).exp();
        for j in 1..n_split {
            let r = table.record(j)?;
            ratio += (n * (a1 / r.a).ln()).exp() / r.phi_prime;
        }
        ks.push(k);
        log_derivative.push(tm.ln() + log_gamma_pos(n) - n * (y.abs() * a1).ln() + ratio.norm().ln());
        ratios.push(ratio);
        remainder_quotients.push(tm * rt.norm());
    }
    let ratio_steps = ratios.windows(2).map(|w| (w[0] / w[1] - 1.0).norm()).collect();
    let est = gevrey_order_estimate(&log_derivative, &ks)?;
    Ok(GevreyReport {
        ks,
        log_derivative,
        ratios,
        ratio_steps,
        s_hat: est.s_hat,
        remainder_quotients,
        n_split,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorelBoundReport {
    /// `(p, |H|·p^{1/4})`.
    pub samples: Vec<(f64, f64)>,
    pub sup: f64,
    /// Least-squares slope of `ln(|H|p^{1/4})` against `ln p` on the last decade.
    pub tail_slope: f64,
}

/// `|H|p^{1/4}` on a log grid of `[p_min, p_max]`, series below the switch.
pub fn borel_bound_probe(
    order: &ModelOrder,
    table: &ZeroTable,
    pt: &EvalPoint,
    nu: f64,
    p_min: f64,
    p_max: f64,
    points: usize,
) -> Result<BorelBoundReport> {
    if !(p_min > 0.0 && p_max > p_min) || points < 4 {
        return Err(Error::InvalidParameter("need 0 < p_min < p_max and at least 4 points".into()));
    }
    let series = HSeriesEvaluator::new(order, table, pt, nu)?;
    let contour = HContourEvaluator::new(order, table, pt, nu)?;
    let (l0, l1) = (p_min.ln(), p_max.ln());
    let mut samples = Vec::with_capacity(points);
    for i in 0..points {
        let p = (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp();
        let h = if p <= DEFAULT_P_SWITCH {
            series.eval(p)?.h
        } else {
            contour.eval(p)?.h
        };
        samples.push((p, h.norm() * p.powf(0.25)));
    }
    let sup = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let cut = p_max / 10.0;
    let tail: Vec<&(f64, f64)> = samples.iter().filter(|s| s.0 >= cut * (1.0 - 1e-12)).collect();
    let xs: Vec<f64> = tail.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.1.ln()).collect();
    let tail_slope = if xs.len() >= 2 { slope(&xs, &ys) } else { f64::NAN };
    Ok(BorelBoundReport {
        samples,
        sup,
        tail_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::locate_zeros;

    #[test]
    fn onset_detection() {
        assert_eq!(eventual_onset(&[3.0, 1.0, 2.0, 4.0], true), Some(1));
        assert_eq!(eventual_onset(&[1.0, 2.0, 3.0], true), Some(0));
        assert_eq!(eventual_onset(&[3.0, 2.0], true), None);
        assert_eq!(eventual_onset(&[1.0, 3.0, 2.0, 1.0], false), Some(1));
    }

    #[test]
    fn formal_terms_diverge() {
        let o = ModelOrder::new(2).unwrap();
        let t = locate_zeros(&o, 30, &QuadSpec::default()).unwrap();
        let r = divergence_probe(&o, &t, &EvalPoint::new(0.0, 1.0, 0.0), 0.5).unwrap();
        assert!(r.formal_onset.unwrap() < 20);
        assert!(r.growth_rate > 1.0);
        assert!(r.damped_onset.unwrap() < 20);
        assert!(r.damped_max_step < -1.0);
    }

    #[test]
    fn gevrey_ratio_settles() {
        let o = ModelOrder::new(2).unwrap();
        let t = locate_zeros(&o, 4, &QuadSpec::default()).unwrap();
        let r = gevrey_probe(&o, &t, 1.0, 20, 2).unwrap();
        let lim = 1.0 / t.record(1).unwrap().phi_prime;
        assert!((r.ratios[20] - lim).norm() < 1e-6 * lim.norm());
        assert!(r.ratio_steps[10..].iter().all(|s| *s < 0.05));
        assert!((r.s_hat - 4.0).abs() < 0.3, "{}", r.s_hat);
    }

    #[test]
    fn zeroth_derivative_matches_kernel() {
        // k = 0 reproduces K_borel(iy, 0) up to the 2πi relating the routes.
        use crate::kernel::{k_borel_contour, KernelKind};
        let o = ModelOrder::new(2).unwrap();
        let t = locate_zeros(&o, 60, &QuadSpec::default()).unwrap();
        let y = 1.0;
        let g = gevrey_probe(&o, &t, y, 6, 2).unwrap();
        let k = k_borel_contour(&o, &t, &EvalPoint::new(0.0, y, 0.0), KernelKind::Szego).unwrap().value;
        assert!((g.log_derivative[0] - k.norm().ln()).abs() < 1e-9, "{} {}", g.log_derivative[0], k.norm().ln());
    }
}
