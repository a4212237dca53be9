//! Versioned JSON run configuration. Every default reproduces the reference
//! study settings; command-line flags override file values.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use dte_core::events::{
    default_crises, CrisisWindow, DEFAULT_HORIZONS, REGRET_HORIZONS, SURPRISE_HORIZON,
};
use dte_core::inference::BootstrapSpec;
use dte_core::model::{GovernanceParams, RegimeParams};
use dte_core::portfolio::{default_caps, OverlayPolicy, TeTargets};
use dte_core::regime::RegimeThresholds;
use dte_core::synth::SynthParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// How a column's numbers are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    /// Total-return index or adjusted close.
    Price,
    /// Daily simple returns.
    Return,
    /// Plain level (VIX). For the risk-free role: annualized yield in percent.
    Level,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSource {
    pub path: PathBuf,
    pub column: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileSources {
    pub eq: ColumnSource,
    pub bd: ColumnSource,
    pub vix: ColumnSource,
    #[serde(default)]
    pub sectors: Vec<ColumnSource>,
    #[serde(default)]
    pub tlt: Option<ColumnSource>,
    #[serde(default)]
    pub rf: Option<ColumnSource>,
}

impl FileSources {
    pub fn roles(&self) -> Vec<(String, &ColumnSource)> {
        let mut out = vec![
            ("data.files.eq".to_string(), &self.eq),
            ("data.files.bd".to_string(), &self.bd),
            ("data.files.vix".to_string(), &self.vix),
        ];
        out.extend(
            self.sectors
                .iter()
                .enumerate()
                .map(|(i, s)| (format!("data.files.sectors[{i}]"), s)),
        );
        out.extend(self.tlt.iter().map(|s| ("data.files.tlt".to_string(), s)));
        out.extend(self.rf.iter().map(|s| ("data.files.rf".to_string(), s)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataSource {
    Synthetic(SynthParams),
    Files(FileSources),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Windows {
    pub vix_smoothing: usize,
    pub spread_vol: usize,
    pub sector_corr: usize,
    pub stock_bond_corr: usize,
}

impl Default for Windows {
    fn default() -> Self {
        Self {
            vix_smoothing: 21,
            spread_vol: 63,
            sector_corr: 63,
            stock_bond_corr: 126,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeRule {
    Thresholds { low: f64, high: f64 },
    Percentiles { low: f64, high: f64 },
}

impl Default for RegimeRule {
    fn default() -> Self {
        let t = RegimeThresholds::default();
        RegimeRule::Thresholds {
            low: t.low(),
            high: t.high(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicyConfig {
    pub static_target: f64,
    pub low: f64,
    pub neutral: f64,
    pub high: f64,
    pub theta_cap: f64,
    pub te_ceiling: Option<f64>,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            static_target: 0.02,
            low: 0.005,
            neutral: 0.02,
            high: 0.05,
            theta_cap: OverlayPolicy::DEFAULT_CAP,
            te_ceiling: None,
        }
    }
}

impl PolicyConfig {
    pub fn static_policy(&self) -> OverlayPolicy {
        OverlayPolicy {
            targets: TeTargets::Static(self.static_target),
            theta_cap: self.theta_cap,
            te_ceiling: self.te_ceiling,
        }
    }

    pub fn dynamic_policy(&self) -> OverlayPolicy {
        OverlayPolicy {
            targets: TeTargets::Regime {
                low: self.low,
                neutral: self.neutral,
                high: self.high,
            },
            theta_cap: self.theta_cap,
            te_ceiling: self.te_ceiling,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub windows: Vec<usize>,
    pub percentiles: [f64; 2],
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            windows: vec![1, 5, 21, 63],
            percentiles: [0.16, 0.76],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub alpha: [f64; 2],
    pub sigma: [f64; 2],
    pub p: f64,
    pub tau_bar: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            alpha: [0.02, 0.10],
            sigma: [0.10, 0.25],
            p: 0.3,
            tau_bar: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub data: DataSource,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub windows: Windows,
    pub regime: RegimeRule,
    pub policy: PolicyConfig,
    pub caps: Vec<f64>,
    pub horizons: Vec<usize>,
    pub surprise_horizon: usize,
    pub regret_horizons: Vec<usize>,
    pub sweep: SweepConfig,
    pub crises: Vec<CrisisWindow>,
    pub bootstrap: BootstrapSpec,
    /// Constant annual risk-free rate, used when no risk-free file is given.
    pub risk_free: f64,
    pub model: ModelConfig,
    pub markov_restarts: usize,
    pub out: PathBuf,
    /// Seeds the synthetic generator and the Markov-switching restarts.
    pub seed: u64,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: SCHEMA_VERSION,
            data: DataSource::Synthetic(SynthParams::default()),
            start: None,
            end: None,
            windows: Windows::default(),
            regime: RegimeRule::default(),
            policy: PolicyConfig::default(),
            caps: default_caps(11),
            horizons: DEFAULT_HORIZONS.to_vec(),
            surprise_horizon: SURPRISE_HORIZON,
            regret_horizons: REGRET_HORIZONS.to_vec(),
            sweep: SweepConfig::default(),
            crises: default_crises(),
            bootstrap: BootstrapSpec::default(),
            risk_free: 0.0,
            model: ModelConfig::default(),
            markov_restarts: 20,
            out: PathBuf::from("out"),
            seed: SynthParams::default().seed,
            svg: false,
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn positive_windows(field: &str, values: &[usize]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(invalid(field, "must not be empty"));
    }
    if let Some(i) = values.iter().position(|v| *v == 0) {
        return Err(invalid(&format!("{field}[{i}]"), "must be at least 1"));
    }
    Ok(())
}

fn fraction(field: &str, v: f64, allow_zero: bool) -> Result<(), CliError> {
    let ok = v.is_finite() && if allow_zero { v >= 0.0 } else { v > 0.0 };
    if ok {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!(
                "must be {} (got {v})",
                if allow_zero { ">= 0" } else { "> 0" }
            ),
        ))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid("<config>", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("--config", format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        // relative data paths resolve against the config file's directory
        if let (DataSource::Files(files), Some(dir)) = (&mut cfg.data, path.parent()) {
            let fix = |s: &mut ColumnSource| {
                if s.path.is_relative() {
                    s.path = dir.join(&s.path);
                }
            };
            fix(&mut files.eq);
            fix(&mut files.bd);
            fix(&mut files.vix);
            files.sectors.iter_mut().for_each(fix);
            files.tlt.iter_mut().for_each(fix);
            files.rf.iter_mut().for_each(fix);
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn thresholds(&self) -> Option<RegimeThresholds> {
        match self.regime {
            RegimeRule::Thresholds { low, high } => RegimeThresholds::new(low, high).ok(),
            RegimeRule::Percentiles { .. } => None,
        }
    }

    pub fn regime_params(&self) -> Result<RegimeParams, CliError> {
        RegimeParams::new(self.model.alpha, self.model.sigma, self.model.p)
            .map_err(|e| invalid("model", e.to_string()))
    }

    pub fn governance(&self) -> Result<GovernanceParams, CliError> {
        GovernanceParams::new(self.model.tau_bar)
            .map_err(|e| invalid("model.tau_bar", e.to_string()))
    }

    /// Field-level checks; the first failure is reported.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != SCHEMA_VERSION {
            return Err(invalid(
                "version",
                format!(
                    "unsupported schema version {} (expected {SCHEMA_VERSION})",
                    self.version
                ),
            ));
        }
        match &self.data {
            DataSource::Synthetic(p) => p
                .validate()
                .map_err(|e| invalid("data.synthetic", e.to_string()))?,
            DataSource::Files(files) => {
                for (field, src) in files.roles() {
                    if !src.path.is_file() {
                        return Err(invalid(
                            &format!("{field}.path"),
                            format!("{} does not exist", src.path.display()),
                        ));
                    }
                    if src.column.trim().is_empty() {
                        return Err(invalid(&format!("{field}.column"), "must name a column"));
                    }
                }
                if files.vix.kind != ColumnKind::Level {
                    return Err(invalid(
                        "data.files.vix.kind",
                        "VIX must be read as a level",
                    ));
                }
                for (field, src) in [("data.files.eq", &files.eq), ("data.files.bd", &files.bd)] {
                    if src.kind == ColumnKind::Level {
                        return Err(invalid(&format!("{field}.kind"), "must be price or return"));
                    }
                }
            }
        }
        if let (Some(s), Some(e)) = (self.start, self.end) {
            if s > e {
                return Err(invalid("start", format!("{s} is after end {e}")));
            }
        }
        let w = &self.windows;
        positive_windows("windows.vix_smoothing", &[w.vix_smoothing])?;
        positive_windows("windows.sector_corr", &[w.sector_corr])?;
        positive_windows("windows.stock_bond_corr", &[w.stock_bond_corr])?;
        if w.spread_vol < 2 {
            return Err(invalid("windows.spread_vol", "must be at least 2"));
        }
        match self.regime {
            RegimeRule::Thresholds { low, high } => {
                RegimeThresholds::new(low, high)
                    .map_err(|e| invalid("regime.thresholds", e.to_string()))?;
            }
            RegimeRule::Percentiles { low, high } => {
                if !(0.0 < low && low < high && high < 1.0) {
                    return Err(invalid(
                        "regime.percentiles",
                        "must satisfy 0 < low < high < 1",
                    ));
                }
            }
        }
        let p = &self.policy;
        fraction("policy.static_target", p.static_target, true)?;
        fraction("policy.low", p.low, true)?;
        fraction("policy.neutral", p.neutral, true)?;
        fraction("policy.high", p.high, true)?;
        if !(p.theta_cap > 0.0 && p.theta_cap <= 1.0) {
            return Err(invalid(
                "policy.theta_cap",
                format!("must lie in (0, 1] (got {})", p.theta_cap),
            ));
        }
        if let Some(c) = p.te_ceiling {
            fraction("policy.te_ceiling", c, false)?;
        }
        if self.caps.is_empty() {
            return Err(invalid("caps", "must not be empty"));
        }
        for (i, c) in self.caps.iter().enumerate() {
            fraction(&format!("caps[{i}]"), *c, false)?;
        }
        positive_windows("horizons", &self.horizons)?;
        positive_windows("regret_horizons", &self.regret_horizons)?;
        if self.surprise_horizon < 2 {
            return Err(invalid("surprise_horizon", "must be at least 2"));
        }
        positive_windows("sweep.windows", &self.sweep.windows)?;
        let [lo, hi] = self.sweep.percentiles;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(invalid(
                "sweep.percentiles",
                "must satisfy 0 < low < high < 1",
            ));
        }
        for (i, c) in self.crises.iter().enumerate() {
            if c.start > c.end {
                return Err(invalid(
                    &format!("crises[{i}]"),
                    format!("{} starts after it ends", c.name),
                ));
            }
        }
        self.bootstrap
            .validate()
            .map_err(|e| invalid("bootstrap", e.to_string()))?;
        if !self.risk_free.is_finite() {
            return Err(invalid("risk_free", "must be finite"));
        }
        self.regime_params()?;
        self.governance()?;
        if self.markov_restarts == 0 {
            return Err(invalid("markov_restarts", "must be at least 1"));
        }
        Ok(())
    }
}
