//! Kernel evaluation: Nagel's representation, the Borel density `H`, the
//! `P_q` residue identity and the divergence/Gevrey probes.

pub mod borel;
pub mod maps;
pub mod nagel;
pub mod p;
pub mod pq;
pub mod probes;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phi::ModelOrder;

pub use borel::{h_contour, h_series, k_borel, k_borel_contour, BorelDensitySample, DensityRoute, HContourEvaluator, HSeriesEvaluator, DEFAULT_P_SWITCH};
pub use maps::ConformalMaps;
pub use nagel::k_nagel;
pub use probes::{borel_bound_probe, divergence_probe, gevrey_probe, BorelBoundReport, DivergenceReport, GevreyReport};
pub use pq::{in_region_v, pq_contour, pq_residues, ResidueSum};
pub use p::{first_zero, ln_p_real, p_of, p_of_with, PLine, RealLnPhi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Szego,
    Bergman,
}

impl KernelKind {
    /// Exponent `ν′` of `τ` in Nagel's integral.
    pub fn nu(&self, order: &ModelOrder) -> f64 {
        let base = 1.0 / order.m() as f64;
        match self {
            KernelKind::Szego => base,
            KernelKind::Bergman => 1.0 + base,
        }
    }
}

impl FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "szego" | "szegő" | "s" => Ok(KernelKind::Szego),
            "bergman" | "b" => Ok(KernelKind::Bergman),
            _ => Err(Error::InvalidParameter(format!("unknown kernel '{}'", s))),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Szego => "szego",
            KernelKind::Bergman => "bergman",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Route {
    #[serde(rename = "nagel")]
    Nagel,
    #[serde(rename = "borel-series")]
    BorelSeries,
    #[serde(rename = "borel-contour")]
    BorelContour,
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nagel" => Ok(Route::Nagel),
            "borel" | "borel-series" => Ok(Route::BorelSeries),
            "borel-contour" => Ok(Route::BorelContour),
            _ => Err(Error::InvalidParameter(format!("unknown route '{}'", s))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Nagel => "nagel",
            Route::BorelSeries => "borel-series",
            Route::BorelContour => "borel-contour",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub route: Route,
    pub err_est: f64,
}
