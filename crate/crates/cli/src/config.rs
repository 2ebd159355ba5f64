//! Run configuration: JSON file values, overridden by explicit flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use szego_core::numerics::QuadSpec;
use szego_core::{Error, Result};

use crate::output::Format;

/// Environment variable naming the default zero-table directory.
pub const ZERO_DIR_ENV: &str = "SZEGO_ZERO_DIR";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub m: Option<u32>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_evals: Option<usize>,
    pub zero_table_path: Option<PathBuf>,
    pub output: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("config {}: {}", path.display(), e)))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub m: u32,
    pub quad: QuadSpec,
    pub zero_table_path: Option<PathBuf>,
    pub format: Format,
}

pub struct Overrides {
    pub m: Option<u32>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_evals: Option<usize>,
    pub table: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn merge(file: FileConfig, flags: Overrides) -> Result<Self> {
        let d = QuadSpec::default();
        let m = flags.m.or(file.m).unwrap_or(2);
        if m < 1 {
            return Err(Error::InvalidParameter("m must be ≥ 1".into()));
        }
        let quad = QuadSpec {
            rel_tol: flags.rel_tol.or(file.rel_tol).unwrap_or(d.rel_tol),
            abs_tol: flags.abs_tol.or(file.abs_tol).unwrap_or(d.abs_tol),
            max_evals: flags.max_evals.or(file.max_evals).unwrap_or(d.max_evals),
            oscillation_hint: None,
        };
        quad.validate()?;
        let format = match flags.format {
            Some(f) => f,
            None => match file.output.as_deref() {
                Some(s) => s.parse().map_err(Error::InvalidParameter)?,
                None => Format::Csv,
            },
        };
        Ok(RunConfig {
            m,
            quad,
            zero_table_path: flags.table.or(file.zero_table_path),
            format,
        })
    }

    pub fn meta(&self) -> Vec<(String, String)> {
        vec![
            ("m".into(), self.m.to_string()),
            ("rel_tol".into(), format!("{:e}", self.quad.rel_tol)),
            ("abs_tol".into(), format!("{:e}", self.quad.abs_tol)),
            ("max_evals".into(), self.quad.max_evals.to_string()),
        ]
    }

    /// `$SZEGO_ZERO_DIR/zeros_m{m}.json`, or the working directory.
    pub fn default_table_path(&self) -> PathBuf {
        let dir = std::env::var_os(ZERO_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("zeros_m{}.json", self.m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> Overrides {
        Overrides {
            m: None,
            rel_tol: None,
            abs_tol: None,
            max_evals: None,
            table: None,
            format: None,
        }
    }

    #[test]
    fn flags_override_file() {
        let file = FileConfig {
            m: Some(3),
            rel_tol: Some(1e-6),
            output: Some("json".into()),
            ..Default::default()
        };
        let c = RunConfig::merge(file.clone(), none()).unwrap();
        assert_eq!(c.m, 3);
        assert_eq!(c.quad.rel_tol, 1e-6);
        assert_eq!(c.format, Format::Json);
        let mut o = none();
        o.m = Some(2);
        o.format = Some(Format::Csv);
        let c = RunConfig::merge(file, o).unwrap();
        assert_eq!(c.m, 2);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let mut o = none();
        o.rel_tol = Some(-1.0);
        assert!(RunConfig::merge(FileConfig::default(), o).is_err());
    }
}
