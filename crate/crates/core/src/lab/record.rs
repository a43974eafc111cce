use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fit::LineFit;
use super::thresholds::INCONCLUSIVE_RESIDUAL;
use crate::{Error, Result};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A fitted exponent with what it was compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub name: String,
    pub slope: f64,
    pub residual: f64,
    pub samples: usize,
    pub target: Option<f64>,
    pub inconclusive: bool,
}

impl FitSummary {
    pub fn new(name: impl Into<String>, fit: &LineFit, target: Option<f64>) -> Self {
        Self {
            name: name.into(),
            slope: fit.slope,
            residual: fit.residual,
            samples: fit.samples,
            target,
            inconclusive: fit.residual > INCONCLUSIVE_RESIDUAL,
        }
    }
}

/// One `(parameter, measured value)` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub param_name: String,
    pub param_value: f64,
    pub measured: f64,
}

/// The outcome of one experiment, reproducible from its parameters and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub kind: String,
    pub n: usize,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub seed: u64,
    pub grid: String,
    pub truncation: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub measured: BTreeMap<String, f64>,
    #[serde(default)]
    pub samples: Vec<Sample>,
    #[serde(default)]
    pub fits: Vec<FitSummary>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub code_version: String,
    /// Wall-clock seconds since the epoch; not part of the reproducible content.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl ExperimentRecord {
    pub fn new(kind: impl Into<String>, n: usize, alpha: (f64, f64), seed: u64) -> Self {
        Self {
            kind: kind.into(),
            n,
            alpha_re: alpha.0,
            alpha_im: alpha.1,
            seed,
            grid: String::new(),
            truncation: 0,
            params: BTreeMap::new(),
            measured: BTreeMap::new(),
            samples: Vec::new(),
            fits: Vec::new(),
            notes: Vec::new(),
            code_version: CODE_VERSION.to_string(),
            timestamp: None,
        }
    }

    pub fn with_grid(mut self, grid: impl Into<String>, truncation: usize) -> Self {
        self.grid = grid.into();
        self.truncation = truncation;
        self
    }

    pub fn param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    pub fn measure(&mut self, name: &str, v: f64) {
        self.measured.insert(name.to_string(), v);
    }

    pub fn sample(&mut self, param_name: &str, param_value: f64, measured: f64) {
        self.samples.push(Sample {
            param_name: param_name.to_string(),
            param_value,
            measured,
        });
    }

    pub fn stamped(mut self) -> Self {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.timestamp = Some(now);
        self
    }

    /// The record with its timestamp removed, for reproducibility comparisons.
    pub fn content(&self) -> Self {
        Self {
            timestamp: None,
            ..self.clone()
        }
    }

    pub fn to_json_line(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Format(e.to_string()))
    }

    /// Flat rows: one per sample, then one per scalar measurement. Every row
    /// carries the first fitted slope and its residual, if there is one.
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let fit = self.fits.first();
        let row = |param_name: String, param_value: Option<f64>, measured: f64| CsvRow {
            kind: self.kind.clone(),
            n: self.n,
            alpha_re: self.alpha_re,
            alpha_im: self.alpha_im,
            param_name,
            param_value,
            measured,
            slope: fit.map(|f| f.slope),
            residual: fit.map(|f| f.residual),
            seed: self.seed,
        };
        let mut rows: Vec<CsvRow> = self
            .samples
            .iter()
            .map(|s| row(s.param_name.clone(), Some(s.param_value), s.measured))
            .collect();
        rows.extend(self.measured.iter().map(|(k, v)| row(k.clone(), None, *v)));
        for f in self.fits.iter().skip(1) {
            let mut r = row(format!("fit:{}", f.name), f.target, f.slope);
            r.slope = Some(f.slope);
            r.residual = Some(f.residual);
            rows.push(r);
        }
        rows
    }
}

/// Column layout of the flat table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub kind: String,
    pub n: usize,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub param_name: String,
    pub param_value: Option<f64>,
    pub measured: f64,
    pub slope: Option<f64>,
    pub residual: Option<f64>,
    pub seed: u64,
}

/// Appends records as JSON lines.
pub fn append_jsonl(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    for r in records {
        writeln!(f, "{}", r.to_json_line()?)?;
    }
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<ExperimentRecord>> {
    std::fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(ExperimentRecord::from_json_line)
        .collect()
}

/// Writes the flat table, replacing any existing file.
pub fn write_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Format(e.to_string()))?;
    for r in records {
        for row in r.csv_rows() {
            w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses one JSON line; used by the fuzz target.
pub fn parse_record_line(line: &str) -> Result<ExperimentRecord> {
    let r = ExperimentRecord::from_json_line(line.trim_end_matches(['\n', '\r']))?;
    if [r.alpha_re, r.alpha_im].iter().any(|v| !v.is_finite()) {
        return Err(Error::Format("non-finite order".into()));
    }
    Ok(r)
}
