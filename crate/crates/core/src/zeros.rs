//! Zeros `±i a_j` of `φ` on the imaginary axis and the data attached to them.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::gamma::log_gamma_pos;
use crate::numerics::QuadSpec;
use crate::phi::{phi_quadrature_scaled, ModelOrder, Scaled};

pub const SCHEMA_VERSION: u32 = 1;

/// Below this log-scale, `φ′(ia)` would underflow as a plain double.
const LOG_SCALE_FLOOR: f64 = -690.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRecord {
    pub j: usize,
    pub a: f64,
    pub phi_prime: Complex64,
    pub f: f64,
    pub c_log_mag: f64,
    pub c_phase: f64,
}

impl ZeroRecord {
    /// `ln |1/φ′(ia_j)|`.
    pub fn ln_inv_phi_prime(&self) -> f64 {
        -self.phi_prime.norm().ln()
    }

    /// `1/φ′(ia_j)` as (log-magnitude, phase).
    pub fn inv_phi_prime_log(&self) -> Complex64 {
        Complex64::new(-self.phi_prime.norm().ln(), -self.phi_prime.arg())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    pub order: ModelOrder,
    pub records: Vec<ZeroRecord>,
    pub quad_tols: QuadSpec,
    pub multiplicity_flags: Vec<usize>,
    pub warning: Option<String>,
}

impl ZeroTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
    pub fn a(&self, j: usize) -> Result<f64> {
        Ok(self.record(j)?.a)
    }
    pub fn a1(&self) -> Result<f64> {
        self.a(1)
    }
    pub fn record(&self, j: usize) -> Result<&ZeroRecord> {
        if j == 0 || j > self.records.len() {
            return Err(Error::InvalidParameter(format!(
                "zero index {} outside table 1..={}",
                j,
                self.records.len()
            )));
        }
        Ok(&self.records[j - 1])
    }
}

fn psi_scaled(order: &ModelOrder, a: f64) -> Result<Scaled> {
    let s = phi_quadrature_scaled(order, Complex64::new(0.0, a), 0)?;
    if s.mantissa.im.abs() > 1e-10 * (1.0 + s.mantissa.norm()) {
        return Err(Error::Consistency(format!(
            "φ(ia) has imaginary part {:e} at a = {}",
            s.mantissa.im, a
        )));
    }
    Ok(s)
}

/// `φ(ia)`, a real number.
pub fn psi(order: &ModelOrder, a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter(format!("psi needs a >= 0, got {}", a)));
    }
    let s = psi_scaled(order, a)?;
    Ok(s.mantissa.re * s.log_scale.exp())
}

/// `d/da φ(ia) = i φ′(ia)`, a real number.
pub fn psi_prime(order: &ModelOrder, a: f64) -> Result<f64> {
    let s = phi_quadrature_scaled(order, Complex64::new(0.0, a), 1)?;
    Ok((Complex64::i() * s.mantissa).re * s.log_scale.exp())
}

/// Refines a sign change of `ψ` on `[lo, hi]` by the Illinois variant of
/// regula falsi, with values rescaled to a common exponent.
fn refine(order: &ModelOrder, mut lo: f64, mut hi: f64) -> Result<f64> {
    let base = psi_scaled(order, lo)?.log_scale;
    let val = |a: f64| -> Result<(f64, f64)> {
        let s = psi_scaled(order, a)?;
        Ok((s.mantissa.re * (s.log_scale - base).exp(), s.mantissa.re))
    };
    let (mut flo, _) = val(lo)?;
    let (mut fhi, _) = val(hi)?;
    let mut side = 0i32;
    for _ in 0..200 {
        if (hi - lo) <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mut x = (lo * fhi - hi * flo) / (fhi - flo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let (fx, mant) = val(x)?;
        if mant.abs() < 1e-15 {
            return Ok(x);
        }
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if flo.abs() < fhi.abs() { lo } else { hi })
}

fn scan_signs(order: &ModelOrder, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.par_iter()
        .map(|&a| {
            let s = psi_scaled(order, a)?;
            Ok((s.mantissa.re, s.log_scale))
        })
        .collect()
}

fn brackets_on(order: &ModelOrder, grid: &[f64]) -> Result<(Vec<(f64, f64)>, f64)> {
    let vals = scan_signs(order, grid)?;
    let mut out = Vec::new();
    for i in 1..grid.len() {
        if (vals[i - 1].0 > 0.0) != (vals[i].0 > 0.0) {
            out.push((grid[i - 1], grid[i]));
        }
    }
    let last_scale = vals.last().map(|v| v.1).unwrap_or(0.0);
    Ok((out, last_scale))
}

fn make_record(order: &ModelOrder, j: usize, a: f64) -> Result<(ZeroRecord, bool)> {
    let d = phi_quadrature_scaled(order, Complex64::new(0.0, a), 1)?;
    let phi_prime = d.value();
    let f = order.c2() * a.powf(order.mu()) - 0.25;
    let ln_abs = d.mantissa.norm().ln() + d.log_scale;
    let phase = d.mantissa.arg();
    let c_log_mag = -ln_abs - log_gamma_pos(f + 1.0);
    let simple = d.mantissa.norm() > 1e-8;
    if phi_prime.re.abs() > 1e-8 * phi_prime.norm() {
        return Err(Error::Consistency(format!(
            "φ′(ia) not purely imaginary at a = {}: {}",
            a, phi_prime
        )));
    }
    Ok((
        ZeroRecord {
            j,
            a,
            phi_prime,
            f,
            c_log_mag,
            c_phase: -phase,
        },
        simple,
    ))
}

/// Locates the first `j_max` zeros `a_j > 0` of `ψ(a) = φ(ia)`.
pub fn locate_zeros(order: &ModelOrder, j_max: usize, spec: &QuadSpec) -> Result<ZeroTable> {
    if order.m() < 2 {
        return Err(Error::NoZeros);
    }
    spec.validate()?;
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    let mut a = 0.0;
    let mut warning = None;
    let chunk = 256;
    while brackets.len() < j_max {
        let mut grid = Vec::with_capacity(chunk + 1);
        grid.push(a);
        for _ in 0..chunk {
            let h = (order.zero_spacing(a) / 4.0).min(0.1);
            a += h;
            grid.push(a);
        }
        let (b, last_scale) = brackets_on(order, &grid)?;
        brackets.extend(b);
        if last_scale < LOG_SCALE_FLOOR {
            warning = Some(format!(
                "only {} zeros found below the overflow-safe bound a = {:.3}",
                brackets.len(),
                a
            ));
            break;
        }
    }
    brackets.truncate(j_max);
    let mut roots: Vec<f64> = brackets
        .par_iter()
        .map(|&(lo, hi)| refine(order, lo, hi))
        .collect::<Result<Vec<_>>>()?;

    // Dense rescan of gaps wider than the counting law allows.
    let mut extra = Vec::new();
    for w in roots.windows(2) {
        let expected = order.zero_spacing(0.5 * (w[0] + w[1]));
        if w[1] - w[0] > 1.6 * expected {
            let step = (expected / 8.0).min(0.05);
            let n = ((w[1] - w[0]) / step).ceil() as usize;
            let grid: Vec<f64> = (0..=n).map(|i| w[0] + (w[1] - w[0]) * i as f64 / n as f64).collect();
            let inner = &grid[1..grid.len() - 1];
            if inner.len() >= 2 {
                let (b, _) = brackets_on(order, inner)?;
                for (lo, hi) in b {
                    extra.push(refine(order, lo, hi)?);
                }
            }
        }
    }
    if !extra.is_empty() {
        log::warn!("dense rescan recovered {} zeros", extra.len());
        roots.extend(extra);
        roots.sort_by(|a, b| a.total_cmp(b));
        roots.truncate(j_max);
    }

    let built: Vec<(ZeroRecord, bool)> = roots
        .par_iter()
        .enumerate()
        .map(|(i, &a)| make_record(order, i + 1, a))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::with_capacity(built.len());
    let mut multiplicity_flags = Vec::new();
    for (r, simple) in built {
        if !simple {
            multiplicity_flags.push(r.j);
        }
        records.push(r);
    }
    if let Some(w) = &warning {
        log::warn!("{}", w);
    }
    Ok(ZeroTable {
        order: *order,
        records,
        quad_tols: *spec,
        multiplicity_flags,
        warning,
    })
}

/// Least-squares check of the counting law `j ≈ c2 a_j^μ − 1/4 − j0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroLawFit {
    pub c2_hat: f64,
    pub intercept: f64,
    /// Mean of `c2 a_j^μ − 1/4 − j` over the upper half of the table.
    pub offset_mean: f64,
    pub j0_hat: i64,
    /// `r_j = j − (c2 a_j^μ − 1/4 − j0_hat)` for every record.
    pub residuals: Vec<(usize, f64)>,
    pub max_residual_upper: f64,
    /// `max |r_j − r̄|·j` over the upper half, with `r̄` the mean residual.
    pub trend_bound: f64,
    pub anomaly: bool,
}

pub fn zero_law_fit(table: &ZeroTable) -> Result<ZeroLawFit> {
    let n = table.records.len();
    if n < 15 {
        return Err(Error::InvalidParameter(format!(
            "counting-law fit needs at least 15 zeros, got {}",
            n
        )));
    }
    let mu = table.order.mu();
    let c2 = table.order.c2();
    let upper: Vec<&ZeroRecord> = table.records[n / 2..].iter().collect();
    let xs: Vec<f64> = upper.iter().map(|r| r.a.powf(mu)).collect();
    let ys: Vec<f64> = upper.iter().map(|r| r.j as f64).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let c2_hat = sxy / sxx;
    let intercept = my - c2_hat * mx;
    let offset_mean = upper
        .iter()
        .map(|r| c2 * r.a.powf(mu) - 0.25 - r.j as f64)
        .sum::<f64>()
        / k;
    let j0_hat = offset_mean.round() as i64;
    let residuals: Vec<(usize, f64)> = table
        .records
        .iter()
        .map(|r| (r.j, r.j as f64 - (c2 * r.a.powf(mu) - 0.25 - j0_hat as f64)))
        .collect();
    let up = &residuals[n / 2..];
    let max_residual_upper = up.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let rbar = up.iter().map(|r| r.1).sum::<f64>() / up.len() as f64;
    let trend_bound = up
        .iter()
        .map(|(j, r)| (r - rbar).abs() * *j as f64)
        .fold(0.0, f64::max);
    Ok(ZeroLawFit {
        c2_hat,
        intercept,
        offset_mean,
        j0_hat,
        residuals,
        max_residual_upper,
        trend_bound,
        anomaly: (offset_mean - j0_hat as f64).abs() > 0.2,
    })
}

/// The Borel weight `c_j = 1/(φ′(ia_j) Γ(f_j + 1))` as (log-magnitude, phase).
pub fn residue_weight(table: &ZeroTable, j: usize) -> Result<(f64, f64)> {
    let r = table.record(j)?;
    if table.multiplicity_flags.contains(&j) {
        return Err(Error::Domain(format!("zero {} is flagged as non-simple", j)));
    }
    Ok((r.c_log_mag, r.c_phase))
}

fn ser17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let txt = if x.is_finite() {
        format!("{:.16e}", x)
    } else {
        return Err(serde::ser::Error::custom("non-finite number in zero table"));
    };
    let raw = serde_json::value::RawValue::from_string(txt).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

#[derive(Serialize, Deserialize)]
struct RecordFile {
    j: usize,
    #[serde(serialize_with = "ser17")]
    a: f64,
    #[serde(serialize_with = "ser17")]
    phi_prime_re: f64,
    #[serde(serialize_with = "ser17")]
    phi_prime_im: f64,
    #[serde(serialize_with = "ser17")]
    f: f64,
    #[serde(serialize_with = "ser17")]
    c_log_mag: f64,
    #[serde(serialize_with = "ser17")]
    c_phase: f64,
}

#[derive(Serialize, Deserialize)]
struct QuadFile {
    #[serde(serialize_with = "ser17")]
    rel_tol: f64,
    #[serde(serialize_with = "ser17")]
    abs_tol: f64,
    max_evals: usize,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    schema_version: u32,
    m: u32,
    #[serde(serialize_with = "ser17")]
    c0: f64,
    #[serde(serialize_with = "ser17")]
    c1: f64,
    #[serde(serialize_with = "ser17")]
    c2: f64,
    quad_tols: QuadFile,
    records: Vec<RecordFile>,
    multiplicity_flags: Vec<usize>,
}

/// Serialises a table to its JSON document.
pub fn table_to_json(table: &ZeroTable) -> Result<String> {
    let doc = TableFile {
        schema_version: SCHEMA_VERSION,
        m: table.order.m(),
        c0: table.order.c0(),
        c1: table.order.c1(),
        c2: table.order.c2(),
        quad_tols: QuadFile {
            rel_tol: table.quad_tols.rel_tol,
            abs_tol: table.quad_tols.abs_tol,
            max_evals: table.quad_tols.max_evals,
        },
        records: table
            .records
            .iter()
            .map(|r| RecordFile {
                j: r.j,
                a: r.a,
                phi_prime_re: r.phi_prime.re,
                phi_prime_im: r.phi_prime.im,
                f: r.f,
                c_log_mag: r.c_log_mag,
                c_phase: r.c_phase,
            })
            .collect(),
        multiplicity_flags: table.multiplicity_flags.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn table_from_json(text: &str) -> Result<ZeroTable> {
    let doc: TableFile = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "unsupported schema_version {}",
            doc.schema_version
        )));
    }
    let order = ModelOrder::new(doc.m)?;
    for (name, got, want) in [
        ("c0", doc.c0, order.c0()),
        ("c1", doc.c1, order.c1()),
        ("c2", doc.c2, order.c2()),
    ] {
        if (got - want).abs() > 1e-14 * want.abs().max(1e-300) {
            return Err(Error::Format(format!(
                "{} = {} does not match m = {} (expected {})",
                name, got, doc.m, want
            )));
        }
    }
    let mut records = Vec::with_capacity(doc.records.len());
    for (i, r) in doc.records.into_iter().enumerate() {
        if r.j != i + 1 {
            return Err(Error::Format(format!("record {} has index {}", i + 1, r.j)));
        }
        if let Some(prev) = records.last() {
            let prev: &ZeroRecord = prev;
            if !(r.a > prev.a) {
                return Err(Error::Format("zeros are not strictly increasing".into()));
            }
        }
        records.push(ZeroRecord {
            j: r.j,
            a: r.a,
            phi_prime: Complex64::new(r.phi_prime_re, r.phi_prime_im),
            f: r.f,
            c_log_mag: r.c_log_mag,
            c_phase: r.c_phase,
        });
    }
    let quad_tols = QuadSpec {
        rel_tol: doc.quad_tols.rel_tol,
        abs_tol: doc.quad_tols.abs_tol,
        max_evals: doc.quad_tols.max_evals,
        oscillation_hint: None,
    };
    quad_tols.validate()?;
    Ok(ZeroTable {
        order,
        records,
        quad_tols,
        multiplicity_flags: doc.multiplicity_flags,
        warning: None,
    })
}

/// Writes the table atomically (temporary file in the target directory, then rename).
pub fn save_table(table: &ZeroTable, path: &Path) -> Result<()> {
    let text = table_to_json(table)?;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn load_table(path: &Path) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path)?;
    table_from_json(&text)
}
