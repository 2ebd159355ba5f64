use std::path::PathBuf;

use clap::{Args, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use szego_core::kernel::{
    borel_bound_probe, divergence_probe, gevrey_probe, k_borel, k_borel_contour, k_nagel, KernelKind, KernelValue,
    Route, DEFAULT_P_SWITCH,
};
use szego_core::phi::{asymptotic_agreement, phi as eval_phi, PhiMethod};
use szego_core::profile::ProfileEvaluator;
use szego_core::singular::{boundedness_probe, EvalPoint};
use szego_core::zeros::{load_table, locate_zeros, save_table, zero_law_fit, ZeroTable};
use szego_core::{Error, ModelOrder, Result};

use crate::config::RunConfig;
use crate::output::{num, Table};

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(Error::InvalidParameter(format!("{} '{}' needs {} comma-separated numbers", what, s, n))),
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let v = parse_floats(s, parts.len().clamp(1, 2), "x")?;
    Ok(Complex64::new(v[0], v.get(1).copied().unwrap_or(0.0)))
}

fn parse_point(s: &str) -> Result<EvalPoint> {
    let v = parse_floats(s, 3, "point")?;
    Ok(EvalPoint::new(v[0], v[1], v[2]))
}

fn order(cfg: &RunConfig) -> Result<ModelOrder> {
    ModelOrder::new(cfg.m)
}

/// Loads the configured table, or the default one when present and long
/// enough, or computes `min` zeros.
fn zero_table(cfg: &RunConfig, min: usize) -> Result<ZeroTable> {
    let o = order(cfg)?;
    if o.m() == 1 {
        return Err(Error::NoZeros);
    }
    if let Some(p) = &cfg.zero_table_path {
        let t = load_table(p)?;
        if t.order.m() != o.m() {
            return Err(Error::InvalidParameter(format!(
                "table {} is for m = {}, run uses m = {}",
                p.display(),
                t.order.m(),
                o.m()
            )));
        }
        if t.len() < min {
            return Err(Error::InvalidParameter(format!(
                "table {} has {} zeros, {} needed",
                p.display(),
                t.len(),
                min
            )));
        }
        return Ok(t);
    }
    let p = cfg.default_table_path();
    if p.exists() {
        if let Ok(t) = load_table(&p) {
            if t.order.m() == o.m() && t.len() >= min {
                return Ok(t);
            }
        }
    }
    locate_zeros(&o, min, &cfg.quad)
}

pub fn all_rows_failed(t: &Table) -> bool {
    match t.columns.iter().position(|c| c == "status") {
        Some(i) => t.rows.iter().all(|r| r[i].starts_with("error")),
        None => false,
    }
}

fn status<T>(r: &Result<T>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => format!("error: {}", e),
    }
}

// ---------------------------------------------------------------- phi

#[derive(Args, Debug)]
pub struct PhiArgs {
    /// Point `re` or `re,im`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    x: Vec<String>,
    /// Real grid `start:stop:count`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// auto, series, quadrature or asymptotic.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Add |φ/A − 1| against the two-term asymptotic form.
    #[arg(long)]
    compare_asymptotic: bool,
}

pub fn phi(cfg: &RunConfig, a: &PhiArgs) -> Result<Table> {
    let o = order(cfg)?;
    let mut xs: Vec<Complex64> = a.x.iter().map(|s| parse_complex(s)).collect::<Result<_>>()?;
    if let Some(g) = &a.grid {
        let p: Vec<&str> = g.split(':').collect();
        if p.len() != 3 {
            return Err(Error::InvalidParameter(format!("grid '{}' must be start:stop:count", g)));
        }
        let lo: f64 = p[0].parse().map_err(|_| Error::InvalidParameter(format!("bad grid start '{}'", p[0])))?;
        let hi: f64 = p[1].parse().map_err(|_| Error::InvalidParameter(format!("bad grid stop '{}'", p[1])))?;
        let n: usize = p[2].parse().map_err(|_| Error::InvalidParameter(format!("bad grid count '{}'", p[2])))?;
        if n < 1 {
            return Err(Error::InvalidParameter("grid count must be ≥ 1".into()));
        }
        for i in 0..n {
            let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            xs.push(Complex64::new(lo + (hi - lo) * t, 0.0));
        }
    }
    if xs.is_empty() {
        return Err(Error::InvalidParameter("give --x or --grid".into()));
    }
    let fixed: Option<PhiMethod> = if a.method == "auto" { None } else { Some(a.method.parse()?) };
    let mut cols = vec!["x_re", "x_im", "phi_re", "phi_im", "method", "err_est"];
    if a.compare_asymptotic {
        cols.push("deviation");
    }
    cols.push("status");
    let mut t = Table::new(&cols).plot(0, &[2], false, true);
    let rows: Vec<Vec<String>> = xs
        .par_iter()
        .map(|&x| {
            let m = fixed.unwrap_or(if x.norm() <= 4.0 { PhiMethod::Series } else { PhiMethod::Quadrature });
            let r = eval_phi(&o, x, m);
            let mut row = vec![num(x.re), num(x.im)];
            match &r {
                Ok(v) => row.extend([num(v.value.re), num(v.value.im), m.to_string(), num(v.err_est)]),
                Err(_) => row.extend(["nan".into(), "nan".into(), m.to_string(), "nan".into()]),
            }
            if a.compare_asymptotic {
                row.push(match asymptotic_agreement(&o, &[x]) {
                    Ok(d) => num(d[0]),
                    Err(_) => "nan".into(),
                });
            }
            row.push(status(&r));
            row
        })
        .collect();
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

// ---------------------------------------------------------------- zeros

#[derive(Args, Debug)]
pub struct ZerosArgs {
    #[arg(long, default_value_t = 40)]
    count: usize,
    /// Where to store the table (default $SZEGO_ZERO_DIR/zeros_m{m}.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn zeros(cfg: &RunConfig, a: &ZerosArgs) -> Result<Table> {
    let o = order(cfg)?;
    if o.m() == 1 {
        return Err(Error::NoZeros);
    }
    if a.count < 1 {
        return Err(Error::InvalidParameter("count must be ≥ 1".into()));
    }
    let table = locate_zeros(&o, a.count, &cfg.quad)?;
    let path = a.out.clone().unwrap_or_else(|| cfg.default_table_path());
    save_table(&table, &path)?;
    let fit = if table.len() >= 15 { Some(zero_law_fit(&table)?) } else { None };
    let mut t = Table::new(&["j", "a", "phi_prime_im", "f", "residual"]).plot(0, &[4], false, false);
    for r in &table.records {
        let res = fit
            .as_ref()
            .and_then(|f| f.residuals.iter().find(|x| x.0 == r.j))
            .map(|x| num(x.1))
            .unwrap_or_else(|| "nan".into());
        t.push(vec![r.j.to_string(), num(r.a), num(r.phi_prime.im), num(r.f), res]);
    }
    t.note("table", path.display().to_string());
    t.note("count", table.len().to_string());
    if let Some(f) = fit {
        t.note("c2_hat", num(f.c2_hat));
        t.note("c2", num(o.c2()));
        t.note("j0_hat", f.j0_hat.to_string());
        t.note("offset_mean", num(f.offset_mean));
        t.note("max_residual_upper", num(f.max_residual_upper));
        t.note("anomaly", f.anomaly.to_string());
    }
    if let Some(w) = &table.warning {
        t.note("warning", w.replace(' ', "_"));
    }
    Ok(t)
}

// ---------------------------------------------------------------- kernel

#[derive(Args, Debug)]
pub struct KernelArgs {
    /// Point `x,y,t`; repeatable. Default: {0, iy} × t for y ∈ {0.8, 1, 1.2}, t ∈ {0, 0.3}.
    #[arg(long, allow_hyphen_values = true)]
    point: Vec<String>,
    /// Comma-separated routes: nagel, borel (series head + contour tail), borel-contour.
    #[arg(long, default_value = "nagel,borel", value_delimiter = ',')]
    route: Vec<String>,
    /// szego or bergman.
    #[arg(long, default_value = "szego")]
    which: String,
    /// Emit K_nagel/K_borel per point and its relative spread.
    #[arg(long)]
    ratio: bool,
    #[arg(long, default_value_t = DEFAULT_P_SWITCH)]
    p_switch: f64,
    /// Zeros used by the series route.
    #[arg(long, default_value_t = 60)]
    count: usize,
}

pub fn default_sample() -> Vec<EvalPoint> {
    let mut v = Vec::new();
    for y in [0.8, 1.0, 1.2] {
        for t in [0.0, 0.3] {
            v.push(EvalPoint::new(0.0, y, t));
        }
    }
    v
}

/// Relative spread `max |r_i − r̄| / |r̄|`.
pub fn spread(r: &[Complex64]) -> f64 {
    let mean = r.iter().sum::<Complex64>() / r.len() as f64;
    r.iter().map(|x| (x - mean).norm()).fold(0.0, f64::max) / mean.norm()
}

fn eval_route(o: &ModelOrder, table: &Result<ZeroTable>, pt: &EvalPoint, kind: KernelKind, route: Route, ps: f64) -> Result<KernelValue> {
    let tab = || table.as_ref().map_err(|e| e.clone());
    match route {
        Route::Nagel => {
            let a1 = if o.m() >= 2 { Some(tab()?.a1()?) } else { None };
            k_nagel(o, a1, pt, kind)
        }
        Route::BorelSeries => k_borel(o, tab()?, pt, kind, ps),
        Route::BorelContour => k_borel_contour(o, tab()?, pt, kind),
    }
}

pub fn kernel(cfg: &RunConfig, a: &KernelArgs) -> Result<Table> {
    let o = order(cfg)?;
    let kind: KernelKind = a.which.parse()?;
    let routes: Vec<Route> = a.route.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let pts: Vec<EvalPoint> = if a.point.is_empty() {
        default_sample()
    } else {
        a.point.iter().map(|s| parse_point(s)).collect::<Result<_>>()?
    };
    let table = zero_table(cfg, a.count);
    if let Err(e) = &table {
        if o.m() >= 2 && !matches!(e, Error::NoZeros) {
            return Err(e.clone());
        }
    }
    if a.ratio {
        let borel = routes.iter().copied().find(|r| *r != Route::Nagel).unwrap_or(Route::BorelSeries);
        let vals: Vec<Result<Complex64>> = pts
            .par_iter()
            .map(|pt| {
                let n = eval_route(&o, &table, pt, kind, Route::Nagel, a.p_switch)?;
                let b = eval_route(&o, &table, pt, kind, borel, a.p_switch)?;
                Ok(n.value / b.value)
            })
            .collect();
        let mut t = Table::new(&["x", "y", "t", "ratio_re", "ratio_im", "status"]);
        let mut ok = Vec::new();
        for (pt, v) in pts.iter().zip(&vals) {
            let (re, im) = match v {
                Ok(r) => {
                    ok.push(*r);
                    (num(r.re), num(r.im))
                }
                Err(_) => ("nan".into(), "nan".into()),
            };
            t.push(vec![num(pt.x), num(pt.y), num(pt.t), re, im, status(v)]);
        }
        t.note("kernel", kind.to_string());
        t.note("borel_route", borel.to_string());
        if !ok.is_empty() {
            t.note("spread", num(spread(&ok)));
        }
        return Ok(t);
    }
    let jobs: Vec<(EvalPoint, Route)> = pts.iter().flat_map(|p| routes.iter().map(move |r| (*p, *r))).collect();
    let vals: Vec<Result<KernelValue>> = jobs
        .par_iter()
        .map(|(pt, r)| eval_route(&o, &table, pt, kind, *r, a.p_switch))
        .collect();
    let mut t = Table::new(&["x", "y", "t", "route", "value_re", "value_im", "err_est", "status"]);
    for ((pt, r), v) in jobs.iter().zip(&vals) {
        let (re, im, err) = match v {
            Ok(k) => (num(k.value.re), num(k.value.im), num(k.err_est)),
            Err(_) => ("nan".into(), "nan".into(), "nan".into()),
        };
        t.push(vec![num(pt.x), num(pt.y), num(pt.t), r.to_string(), re, im, err, status(v)]);
    }
    t.note("kernel", kind.to_string());
    Ok(t)
}

// ---------------------------------------------------------------- probes

#[derive(Subcommand, Debug)]
pub enum Probe {
    /// Log-magnitudes of the formal residue series and of its Borel terms at p = 1.
    Divergence {
        #[arg(long, default_value = "0,1,0", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "szego")]
        which: String,
        #[arg(long, default_value_t = 40)]
        count: usize,
    },
    /// Exact t-derivatives of K at (iy, 0) and the Gevrey order estimate.
    Gevrey {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, default_value_t = 20)]
        kmax: usize,
        /// Residues kept before the remainder contour (N).
        #[arg(long, default_value_t = 2)]
        split: usize,
    },
    /// |H|·p^{1/4} over a logarithmic p grid.
    BorelBound {
        #[arg(long, default_value = "0,1,0.3", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "szego")]
        which: String,
        #[arg(long, default_value_t = 1.0)]
        pmin: f64,
        #[arg(long, default_value_t = 1e4)]
        pmax: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long, default_value_t = 60)]
        count: usize,
    },
    /// |g_ξ(u)| on [−6, 8] at ξ = i(a_1 + offset).
    Boundedness {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        offset: f64,
    },
    /// Φ, Φ^B and their normalized values on [0, omega_max].
    Profile {
        #[arg(long, default_value_t = 0.99)]
        omega_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// α of the bounded region {Im z₂ > α (Re z₁)^{2m}}.
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
    },
    /// P̃(u)/([1 + u^{2m−2}] e^{u^{2m}}) on [0, umax].
    Haslinger {
        #[arg(long, default_value_t = 3.0)]
        umax: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
    },
}

fn band(v: &[f64]) -> (f64, f64) {
    (
        v.iter().cloned().fold(f64::INFINITY, f64::min),
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    )
}

pub fn probe(cfg: &RunConfig, p: &Probe) -> Result<Table> {
    let o = order(cfg)?;
    match p {
        Probe::Divergence { point, which, count } => {
            let pt = parse_point(point)?;
            let kind: KernelKind = which.parse()?;
            let table = zero_table(cfg, *count)?;
            let r = divergence_probe(&o, &table, &pt, kind.nu(&o))?;
            let mut t = Table::new(&["j", "a", "log_formal", "log_damped"]).plot(0, &[2, 3], false, false);
            for (i, (f, d)) in r.formal.iter().zip(&r.damped).enumerate() {
                t.push(vec![(i + 1).to_string(), num(table.a(i + 1)?), num(*f), num(*d)]);
            }
            t.note("formal_onset", r.formal_onset.map_or("none".into(), |j| j.to_string()));
            t.note("damped_onset", r.damped_onset.map_or("none".into(), |j| j.to_string()));
            t.note("growth_rate", num(r.growth_rate));
            t.note("damped_max_step", num(r.damped_max_step));
            Ok(t)
        }
        Probe::Gevrey { y, kmax, split } => {
            let table = zero_table(cfg, (*split).max(2))?;
            let r = gevrey_probe(&o, &table, *y, *kmax, *split)?;
            let mut t = Table::new(&["k", "n_k", "log_derivative", "ratio_re", "ratio_im", "ratio_step", "remainder_quotient"])
                .plot(0, &[2], false, false);
            for (i, k) in r.ks.iter().enumerate() {
                let n = o.two_m() * *k as f64 + o.two_m() + 2.0;
                let step = r.ratio_steps.get(i).map_or("nan".into(), |s| num(*s));
                t.push(vec![
                    k.to_string(),
                    num(n),
                    num(r.log_derivative[i]),
                    num(r.ratios[i].re),
                    num(r.ratios[i].im),
                    step,
                    num(r.remainder_quotients[i]),
                ]);
            }
            t.note("s_hat", num(r.s_hat));
            t.note("split", r.n_split.to_string());
            Ok(t)
        }
        Probe::BorelBound { point, which, pmin, pmax, points, count } => {
            let pt = parse_point(point)?;
            let kind: KernelKind = which.parse()?;
            let table = zero_table(cfg, *count)?;
            let r = borel_bound_probe(&o, &table, &pt, kind.nu(&o), *pmin, *pmax, *points)?;
            let mut t = Table::new(&["p", "h_p_quarter"]).plot(0, &[1], true, true);
            for (p, h) in &r.samples {
                t.push(vec![num(*p), num(*h)]);
            }
            t.note("sup", num(r.sup));
            t.note("tail_slope", num(r.tail_slope));
            Ok(t)
        }
        Probe::Boundedness { offset } => {
            let table = zero_table(cfg, 1)?;
            let xi = Complex64::new(0.0, table.a1()? + offset);
            let r = boundedness_probe(&o, xi)?;
            let mut t = Table::new(&["u", "log_abs_g"]).plot(0, &[1], false, false);
            for (u, l) in &r.samples {
                t.push(vec![num(*u), num(*l)]);
            }
            t.note("xi_im", num(xi.im));
            t.note("sup", num(r.sup));
            t.note("right_edge", num(r.right_edge));
            t.note("unbounded_at", r.unbounded_at.map_or("none".into(), num));
            t.note("bounded", r.bounded.to_string());
            Ok(t)
        }
        Probe::Profile { omega_max, points, alpha } => {
            if *points < 2 {
                return Err(Error::InvalidParameter("points must be ≥ 2".into()));
            }
            let ev = ProfileEvaluator::new(&o, *omega_max)?;
            let omegas: Vec<f64> = (0..*points).map(|i| omega_max * i as f64 / (*points - 1) as f64).collect();
            let samples = omegas.par_iter().map(|w| ev.sample(*w)).collect::<Result<Vec<_>>>()?;
            let mut t = Table::new(&["omega", "phi", "phi_b", "normalized", "normalized_b"]).plot(0, &[3, 4], false, false);
            for s in &samples {
                t.push(vec![num(s.omega), num(s.phi), num(s.phi_b), num(s.normalized), num(s.normalized_b)]);
            }
            let (l, u) = band(&samples.iter().map(|s| s.normalized).collect::<Vec<_>>());
            let (lb, ub) = band(&samples.iter().map(|s| s.normalized_b).collect::<Vec<_>>());
            t.note("normalized_ratio", num(u / l));
            t.note("normalized_b_ratio", num(ub / lb));
            let reg = ev.region_check(*alpha, 20)?;
            t.note("region_edge", num(reg.omega_edge));
            t.note("region_sup", num(reg.sup_inside));
            t.note("near_one", num(reg.near_one));
            Ok(t)
        }
        Probe::Haslinger { umax, points } => {
            if *points < 2 || !(*umax >= 0.0) {
                return Err(Error::InvalidParameter("need umax ≥ 0 and points ≥ 2".into()));
            }
            let ev = ProfileEvaluator::with_u_max(&o, 0.5, *umax)?;
            let us: Vec<f64> = (0..*points).map(|i| umax * i as f64 / (*points - 1) as f64).collect();
            let rs = us.iter().map(|u| ev.haslinger_ratio(*u)).collect::<Result<Vec<_>>>()?;
            let mut t = Table::new(&["u", "ratio"]).plot(0, &[1], false, false);
            for (u, r) in us.iter().zip(&rs) {
                t.push(vec![num(*u), num(*r)]);
            }
            let (l, u) = band(&rs);
            t.note("band_ratio", num(u / l));
            Ok(t)
        }
    }
}
