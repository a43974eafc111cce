//! Run configuration shared by the command line and configuration files.
//!
//! A configuration is a TOML document; every field has a default, so a file
//! only needs the values it changes. The experiment is a table tagged by
//! `kind`:
//!
//! ```toml
//! n = 2
//! seed = 7
//! [grid]
//! half_width = 12.0
//! nodes = 241
//! [experiment]
//! kind = "decay"
//! t = 0.5
//! regime = "l2"
//! ```

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::grushin::TimeGrid;
use crate::hermite::{GridSpec, DEFAULT_GRAM_TOLERANCE};
use crate::lab::thresholds::{energy_l2_regime, energy_sup_regime, l2_regime, lp_all_regime, sup_regime};
use crate::lab::{MaximalKind, Regime};
use crate::multiplier::KernelFamily;
use crate::specfun::BesselOrder;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    /// Nodes per axis, odd so that the origin is a node.
    pub nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 12.0,
            nodes: 241,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub period: f64,
    pub samples: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            period: 2.0 * std::f64::consts::PI,
            samples: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaConfig {
    pub re: f64,
    pub im: f64,
}

impl Default for AlphaConfig {
    fn default() -> Self {
        Self { re: 1.0, im: 0.0 }
    }
}

fn default_p() -> f64 {
    4.0
}
fn default_count() -> usize {
    8
}
fn default_t() -> f64 {
    0.5
}
fn default_lambda_min() -> f64 {
    0.5
}
fn default_lambda_max() -> f64 {
    4.0
}

/// The experiment to run with its own parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    Selftest,
    /// Applies `m_α(t²G)` to a stored field.
    Transform {
        input: PathBuf,
        output: PathBuf,
        #[serde(default = "default_t")]
        t: f64,
    },
    /// Evolves a stored field by the wave equation for time `s`.
    Propagate {
        input: PathBuf,
        output: PathBuf,
        s: f64,
    },
    /// Annulus norms of one kernel section.
    KernelScan {
        #[serde(default = "default_t")]
        t: f64,
        #[serde(default = "plain")]
        family: KernelFamily,
    },
    Decay {
        #[serde(default = "default_t")]
        t: f64,
        regime: Regime,
    },
    Maximal {
        #[serde(default = "plain_maximal")]
        family: MaximalKind,
        /// Exponent of the Hardy–Littlewood function, 1 or 2.
        #[serde(default = "default_hl")]
        hl_exponent: f64,
        #[serde(default = "default_count")]
        count: usize,
    },
    Weighted {
        #[serde(default = "default_count")]
        count: usize,
    },
    Rbound {
        #[serde(default = "default_p")]
        p: f64,
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default = "default_lambda_min")]
        lambda_min: f64,
        #[serde(default = "default_lambda_max")]
        lambda_max: f64,
    },
    RboundDeriv {
        #[serde(default = "default_p")]
        p: f64,
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default = "default_lambda_min")]
        lambda_min: f64,
        #[serde(default = "default_lambda_max")]
        lambda_max: f64,
        /// Step of the finite-difference route.
        #[serde(default = "default_h")]
        h: f64,
    },
    LpProbe {
        ps: Vec<f64>,
        truncations: Vec<usize>,
        #[serde(default = "default_band")]
        band: usize,
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default = "default_iterations")]
        iterations: usize,
    },
    N1Diag {
        #[serde(default = "default_kmin")]
        kmin: usize,
        #[serde(default = "default_kmax")]
        kmax: usize,
        #[serde(default = "default_levels")]
        levels: usize,
        #[serde(default = "default_window")]
        window: [f64; 2],
    },
    /// Writes a random field on fibers `0 < |k| ≤ band` to a container.
    SynthField {
        output: PathBuf,
        #[serde(default = "default_band")]
        band: usize,
        #[serde(default = "default_synth_level")]
        max_level: usize,
    },
}

fn plain() -> KernelFamily {
    KernelFamily::Plain
}
fn plain_maximal() -> MaximalKind {
    MaximalKind::Plain
}
fn default_hl() -> f64 {
    2.0
}
fn default_h() -> f64 {
    1e-4
}
fn default_band() -> usize {
    1
}
fn default_iterations() -> usize {
    4
}
fn default_kmin() -> usize {
    100
}
fn default_kmax() -> usize {
    2000
}
fn default_levels() -> usize {
    16
}
fn default_window() -> [f64; 2] {
    [-1.0, 1.0]
}
fn default_synth_level() -> usize {
    2
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Selftest => "selftest",
            Experiment::Transform { .. } => "transform",
            Experiment::Propagate { .. } => "propagate",
            Experiment::KernelScan { .. } => "kernel-scan",
            Experiment::Decay { .. } => "decay",
            Experiment::Maximal { .. } => "maximal",
            Experiment::Weighted { .. } => "weighted",
            Experiment::Rbound { .. } => "rbound",
            Experiment::RboundDeriv { .. } => "rbound-deriv",
            Experiment::LpProbe { .. } => "lp-probe",
            Experiment::N1Diag { .. } => "n1-diag",
            Experiment::SynthField { .. } => "synth-field",
        }
    }
}

fn default_n() -> usize {
    2
}
fn default_truncation() -> usize {
    16
}
fn default_experiment() -> Experiment {
    Experiment::Selftest
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub alpha: AlphaConfig,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; the command line falls back to `GRUSHIN_OUT`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Worker pool size; absent means one per core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_experiment")]
    pub experiment: Experiment,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: default_n(),
            grid: GridConfig::default(),
            time: TimeConfig::default(),
            truncation: default_truncation(),
            alpha: AlphaConfig::default(),
            seed: 0,
            output: None,
            workers: None,
            experiment: Experiment::Selftest,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// TOML integers are signed, so seeds above `i64::MAX` are refused.
    pub fn to_toml(&self) -> Result<String> {
        if self.seed > i64::MAX as u64 {
            return Err(Error::InvalidConfig(format!("seed {} does not fit a TOML integer", self.seed)));
        }
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn order(&self) -> BesselOrder {
        BesselOrder::new(self.alpha.re, self.alpha.im)
    }

    pub fn x_grid(&self) -> Result<Arc<GridSpec>> {
        Ok(Arc::new(GridSpec::uniform(self.n, self.grid.half_width, self.grid.nodes)?))
    }

    pub fn t_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.time.period, self.time.samples)
    }

    /// The `Re α` threshold the requested experiment is stated for.
    pub fn regime_threshold(&self) -> Option<(&'static str, f64)> {
        let n = self.n;
        match &self.experiment {
            Experiment::Decay { regime: Regime::L2, .. } => Some(("Re α > (n-1)/2", l2_regime(n))),
            Experiment::Decay { regime: Regime::Sup, .. } => Some(("Re α > n - 1/2", sup_regime(n))),
            Experiment::Maximal { family, hl_exponent, .. } => Some(match (family, *hl_exponent >= 2.0) {
                (MaximalKind::Plain, true) => ("Re α > (n-1)/2", l2_regime(n)),
                (MaximalKind::Plain, false) => ("Re α > n - 1/2", sup_regime(n)),
                (MaximalKind::Energy, true) => ("Re α > (n+1)/2", energy_l2_regime(n)),
                (MaximalKind::Energy, false) => ("Re α > n + 1/2", energy_sup_regime(n)),
            }),
            Experiment::Weighted { .. } => Some(("Re α > (n-1)/2", l2_regime(n))),
            Experiment::Rbound { .. } | Experiment::RboundDeriv { .. } => Some(("Re α > (n+1)/2", lp_all_regime(n))),
            _ => None,
        }
    }

    /// Scales at which the truncation must pass the grid certificate.
    fn certified_scales(&self) -> Vec<f64> {
        let step = 2.0 * std::f64::consts::PI / self.time.period;
        match &self.experiment {
            Experiment::KernelScan { .. }
            | Experiment::Decay { .. }
            | Experiment::Maximal { .. }
            | Experiment::Weighted { .. } => vec![1.0],
            Experiment::Rbound { lambda_min, lambda_max, .. } | Experiment::RboundDeriv { lambda_min, lambda_max, .. } => {
                vec![*lambda_min, *lambda_max]
            }
            Experiment::LpProbe { band, .. } | Experiment::SynthField { band, .. } => vec![step, step * *band as f64],
            Experiment::Transform { .. } | Experiment::Propagate { .. } => vec![step],
            Experiment::Selftest | Experiment::N1Diag { .. } => vec![],
        }
    }

    /// Checks sizes and the grid certificate. Returns warnings for an order
    /// outside the regime of the experiment; those do not stop a run.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n == 0 || self.n > 8 {
            return bad(format!("dimension must be in 1..=8, got {}", self.n));
        }
        if !(self.grid.half_width > 0.0) || !self.grid.half_width.is_finite() {
            return bad(format!("grid half-width must be positive, got {}", self.grid.half_width));
        }
        if self.grid.nodes < 3 || self.grid.nodes.is_multiple_of(2) {
            return bad(format!("nodes per axis must be odd and at least 3, got {}", self.grid.nodes));
        }
        if !(self.time.period > 0.0) || !self.time.period.is_finite() {
            return bad(format!("period must be positive, got {}", self.time.period));
        }
        if self.time.samples < 2 || !self.time.samples.is_multiple_of(2) {
            return bad(format!("t-samples must be even and at least 2, got {}", self.time.samples));
        }
        if !self.alpha.re.is_finite() || !self.alpha.im.is_finite() {
            return bad("order must be finite".into());
        }
        if self.workers == Some(0) {
            return bad("worker count must be positive".into());
        }
        match &self.experiment {
            Experiment::Transform { t, .. } | Experiment::KernelScan { t, .. } | Experiment::Decay { t, .. } if !(*t > 0.0) => {
                return bad(format!("t must be positive, got {t}"));
            }
            Experiment::Propagate { s, .. } if !s.is_finite() => return bad("s must be finite".into()),
            Experiment::Maximal { hl_exponent, count, .. } if !(*hl_exponent >= 1.0) || *count == 0 => {
                return bad("maximal needs hl_exponent ≥ 1 and a nonempty battery".into());
            }
            Experiment::Weighted { count } if *count == 0 => return bad("empty battery".into()),
            Experiment::Rbound { p, count, lambda_min, lambda_max }
            | Experiment::RboundDeriv { p, count, lambda_min, lambda_max, .. }
                if !(*p >= 1.0) || *count == 0 || !(*lambda_min > 0.0) || !(lambda_min <= lambda_max) =>
            {
                return bad("rbound needs p ≥ 1, a nonempty battery and 0 < lambda_min ≤ lambda_max".into());
            }
            Experiment::RboundDeriv { h, .. } if !(*h > 0.0) => return bad("h must be positive".into()),
            Experiment::LpProbe { ps, truncations, band, count, .. }
                if ps.is_empty() || truncations.is_empty() || *band == 0 || *count == 0 || ps.iter().any(|p| !(*p > 1.0) || !p.is_finite()) =>
            {
                return bad("lp-probe needs exponents in (1, ∞), truncations, band ≥ 1 and a nonempty battery".into());
            }
            Experiment::LpProbe { band, .. } | Experiment::SynthField { band, .. } if 2 * band >= self.time.samples => {
                return bad(format!("band {band} does not fit {} t-samples", self.time.samples));
            }
            Experiment::N1Diag { kmin, kmax, levels, window } if *kmin == 0 || kmin >= kmax || *levels < 2 || !(window[0] < window[1]) => {
                return bad("n1-diag needs 0 < kmin < kmax, at least two levels and a nonempty window".into());
            }
            _ => {}
        }
        let grid = self.x_grid()?;
        let levels: Vec<usize> = match &self.experiment {
            Experiment::LpProbe { truncations, .. } => truncations.clone(),
            Experiment::SynthField { max_level, .. } => vec![*max_level],
            _ => vec![self.truncation],
        };
        for scale in self.certified_scales() {
            for &k in &levels {
                grid.certify(k, scale, DEFAULT_GRAM_TOLERANCE)?;
            }
        }
        let mut warnings = Vec::new();
        if let Some((label, threshold)) = self.regime_threshold() {
            if !(self.alpha.re > threshold) {
                warnings.push(format!(
                    "Re α = {} is outside the regime {label} = {threshold} of {}",
                    self.alpha.re,
                    self.experiment.name()
                ));
            }
        }
        Ok(warnings)
    }
}

/// Parses and validates a configuration file.
pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    let c = RunConfig::from_toml(text)?;
    c.validate()?;
    Ok(c)
}
