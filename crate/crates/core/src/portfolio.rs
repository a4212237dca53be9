//! Monthly-rebalanced benchmark, TE-targeted overlay sizing and the
//! constraint-spectrum sweep.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::regime::{RegimeLabel, RegimePath};
use crate::rolling::{rolling_vol, RollingError, WindowSpec};
use crate::series::{Series, SeriesError, TradingCalendar, Unit};
use crate::stats::TRADING_DAYS;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PortfolioError {
    #[error("calendars do not match: {0}")]
    Misaligned(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("negative input to overlay sizing: {name} = {value}")]
    NegativeInput { name: &'static str, value: f64 },
    #[error("no day has both {window} days of spread history and a regime label")]
    MissingWarmUp { window: usize },
    #[error("empty cap list")]
    EmptyCaps,
    #[error("equity weight {0} outside [0, 1]")]
    InvalidWeight(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Rolling(#[from] RollingError),
}

/// Annualized TE targets: one constant or one per regime label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TeTargets {
    Static(f64),
    Regime { low: f64, neutral: f64, high: f64 },
}

impl TeTargets {
    pub fn for_label(&self, label: RegimeLabel) -> f64 {
        match (*self, label) {
            (TeTargets::Static(t), _) => t,
            (TeTargets::Regime { low, .. }, RegimeLabel::Low) => low,
            (TeTargets::Regime { neutral, .. }, RegimeLabel::Neutral) => neutral,
            (TeTargets::Regime { high, .. }, RegimeLabel::High) => high,
        }
    }

    fn values(&self) -> Vec<f64> {
        match *self {
            TeTargets::Static(t) => vec![t],
            TeTargets::Regime { low, neutral, high } => vec![low, neutral, high],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayPolicy {
    pub targets: TeTargets,
    pub theta_cap: f64,
    pub te_ceiling: Option<f64>,
}

impl OverlayPolicy {
    pub const DEFAULT_CAP: f64 = 0.25;

    /// Constant target, no ceiling.
    pub fn static_te(target: f64) -> Self {
        Self {
            targets: TeTargets::Static(target),
            theta_cap: Self::DEFAULT_CAP,
            te_ceiling: None,
        }
    }

    /// 0.5% / 2% / 5% for Low / Neutral / High, no ceiling.
    pub fn dynamic() -> Self {
        Self {
            targets: TeTargets::Regime {
                low: 0.005,
                neutral: 0.02,
                high: 0.05,
            },
            theta_cap: Self::DEFAULT_CAP,
            te_ceiling: None,
        }
    }

    pub fn with_ceiling(mut self, tau_bar: f64) -> Self {
        self.te_ceiling = Some(tau_bar);
        self
    }

    pub fn with_cap(mut self, theta_cap: f64) -> Self {
        self.theta_cap = theta_cap;
        self
    }

    /// Targets must be finite and non-negative; a zero target keeps the
    /// portfolio on its benchmark.
    pub fn validate(&self) -> Result<(), PortfolioError> {
        for t in self.targets.values() {
            if !(t.is_finite() && t >= 0.0) {
                return Err(PortfolioError::InvalidPolicy(format!(
                    "TE target {t} must be finite and >= 0"
                )));
            }
        }
        if !(self.theta_cap > 0.0 && self.theta_cap <= 1.0) {
            return Err(PortfolioError::InvalidPolicy(format!(
                "theta cap {} outside (0, 1]",
                self.theta_cap
            )));
        }
        if let Some(tau) = self.te_ceiling {
            if !(tau > 0.0) {
                return Err(PortfolioError::InvalidPolicy(format!(
                    "TE ceiling {tau} must be > 0"
                )));
            }
        }
        Ok(())
    }

    /// Target for `label` after clipping to the TE ceiling.
    pub fn target(&self, label: RegimeLabel) -> f64 {
        let t = self.targets.for_label(label);
        match self.te_ceiling {
            Some(tau) => t.min(tau),
            None => t,
        }
    }
}

/// `min(target / vol, cap)`; a zero vol means unbounded demand, so the cap binds.
pub fn overlay_weight(
    target_te: f64,
    spread_vol_lagged: f64,
    theta_cap: f64,
) -> Result<f64, PortfolioError> {
    for (name, value) in [
        ("target_te", target_te),
        ("spread_vol_lagged", spread_vol_lagged),
        ("theta_cap", theta_cap),
    ] {
        if !(value >= 0.0) {
            return Err(PortfolioError::NegativeInput { name, value });
        }
    }
    if spread_vol_lagged == 0.0 {
        return Ok(theta_cap);
    }
    Ok((target_te / spread_vol_lagged).min(theta_cap))
}

/// Daily returns of a two-asset mix reset to `w_eq / (1 - w_eq)` on the first
/// trading day of each calendar month (and on the first day of the data),
/// drifting with relative performance in between.
#[derive(Debug, Clone, PartialEq)]
pub struct RebalancedMix {
    pub returns: Series,
    /// Equity weight at the start of each day.
    pub eq_weight: Vec<f64>,
}

fn new_month(prev: NaiveDate, d: NaiveDate) -> bool {
    (prev.year(), prev.month()) != (d.year(), d.month())
}

pub fn rebalanced_mix(
    eq: &Series,
    bd: &Series,
    w_eq: f64,
) -> Result<RebalancedMix, PortfolioError> {
    if !(0.0..=1.0).contains(&w_eq) {
        return Err(PortfolioError::InvalidWeight(w_eq));
    }
    if eq.calendar() != bd.calendar() {
        return Err(PortfolioError::Misaligned(
            "equity and bond calendars differ".into(),
        ));
    }
    eq.require_unit(Unit::SimpleReturn)?;
    bd.require_unit(Unit::SimpleReturn)?;
    let dates = eq.dates();
    let (re, rb) = (eq.values(), bd.values());
    let mut returns = Vec::with_capacity(re.len());
    let mut weights = Vec::with_capacity(re.len());
    let mut w = w_eq;
    for t in 0..re.len() {
        if t == 0 || new_month(dates[t - 1], dates[t]) {
            w = w_eq;
        }
        let r = w * re[t] + (1.0 - w) * rb[t];
        weights.push(w);
        returns.push(r);
        w = w * (1.0 + re[t]) / (1.0 + r);
    }
    Ok(RebalancedMix {
        returns: Series::new(eq.calendar().clone(), returns, Unit::SimpleReturn)?,
        eq_weight: weights,
    })
}

/// One simulated portfolio. For a benchmark-only result `theta` is zero and
/// there is no policy or realized-TE path.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub portfolio: Series,
    pub benchmark: Series,
    /// Active weight applied on each day.
    pub theta: Vec<f64>,
    /// TE target in force on each day, after any ceiling.
    pub targets: Vec<f64>,
    /// Lagged spread vol used for sizing on each day.
    pub sizing_vol: Vec<f64>,
    /// Exact active return `theta_t * spread_t`.
    pub active: Vec<f64>,
    pub realized_te: Option<Series>,
    pub policy: Option<OverlayPolicy>,
    /// Annualized sum of absolute daily changes in theta.
    pub turnover: f64,
}

impl SimResult {
    pub fn calendar(&self) -> &TradingCalendar {
        self.portfolio.calendar()
    }

    pub fn len(&self) -> usize {
        self.portfolio.len()
    }

    pub fn is_empty(&self) -> bool {
        self.portfolio.is_empty()
    }

    /// Restricts every per-day field to dates on or after `date`. The realized
    /// TE path is re-sliced, not recomputed.
    pub fn starting_at(&self, date: NaiveDate) -> Result<Self, PortfolioError> {
        let start = self.portfolio.dates().partition_point(|d| *d < date);
        let n = self.len();
        let theta = self.theta[start..].to_vec();
        Ok(Self {
            portfolio: self.portfolio.slice(start..n)?,
            benchmark: self.benchmark.slice(start..n)?,
            turnover: turnover(&theta),
            theta,
            targets: self.targets[start..].to_vec(),
            sizing_vol: self.sizing_vol[start..].to_vec(),
            active: self.active[start..].to_vec(),
            realized_te: self
                .realized_te
                .as_ref()
                .map(|te| te.starting_at(date))
                .transpose()?,
            policy: self.policy.clone(),
        })
    }
}

fn turnover(theta: &[f64]) -> f64 {
    if theta.len() < 2 {
        return 0.0;
    }
    let total: f64 = theta.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    total * TRADING_DAYS / (theta.len() - 1) as f64
}

/// 70/30 equity/bond benchmark rebalanced monthly.
pub fn benchmark_7030(
    eq_returns: &Series,
    bd_returns: &Series,
) -> Result<SimResult, PortfolioError> {
    let mix = rebalanced_mix(eq_returns, bd_returns, 0.70)?;
    let n = mix.returns.len();
    Ok(SimResult {
        portfolio: mix.returns.clone(),
        benchmark: mix.returns,
        theta: vec![0.0; n],
        targets: vec![0.0; n],
        sizing_vol: vec![f64::NAN; n],
        active: vec![0.0; n],
        realized_te: None,
        policy: None,
        turnover: 0.0,
    })
}

/// Overlays `theta_t * spread_t` on the benchmark.
///
/// On day `t` the position uses the regime label of day `t - 1` and the spread
/// vol over the window ending at `t - 1`, so nothing dated `t` or later enters
/// the decision. The result covers the days where both are available.
pub fn simulate_overlay(
    benchmark: &SimResult,
    spread: &Series,
    regimes: &RegimePath,
    policy: &OverlayPolicy,
    vol_window: WindowSpec,
) -> Result<SimResult, PortfolioError> {
    policy.validate()?;
    spread.require_unit(Unit::SimpleReturn)?;
    let bench = &benchmark.portfolio;
    let calendar = bench.calendar();
    let spread = spread
        .align_to(calendar)
        .map_err(|e| PortfolioError::Misaligned(format!("spread: {e}")))?;
    let n = calendar.len();
    if n < vol_window.min_periods() + 1 {
        return Err(PortfolioError::MissingWarmUp {
            window: vol_window.length(),
        });
    }

    let vol = rolling_vol(&spread, vol_window)?;
    let vol_offset = n - vol.len();
    let vol_at = |i: usize| {
        (i >= vol_offset)
            .then(|| vol.values()[i - vol_offset])
            .filter(|v| !v.is_nan())
    };
    let labels = regimes.labels();
    let label_at = |i: usize| {
        let k = regimes.calendar().index_of(calendar.dates()[i])?;
        (!regimes.signal().values()[k].is_nan()).then(|| labels[k])
    };

    let first = (1..n)
        .find(|&t| vol_at(t - 1).is_some() && label_at(t - 1).is_some())
        .ok_or(PortfolioError::MissingWarmUp {
            window: vol_window.length(),
        })?;

    let days = n - first;
    let mut theta = Vec::with_capacity(days);
    let mut targets = Vec::with_capacity(days);
    let mut sizing_vol = Vec::with_capacity(days);
    let mut active = Vec::with_capacity(days);
    let mut port = Vec::with_capacity(days);
    let (b, s) = (bench.values(), spread.values());
    for t in first..n {
        let prev = calendar.dates()[t - 1];
        let label = label_at(t - 1)
            .ok_or_else(|| PortfolioError::Misaligned(format!("no regime label on {prev}")))?;
        let v = vol_at(t - 1)
            .ok_or_else(|| PortfolioError::Misaligned(format!("no spread vol on {prev}")))?;
        let target = policy.target(label);
        let th = overlay_weight(target, v, policy.theta_cap)?;
        let a = th * s[t];
        theta.push(th);
        targets.push(target);
        sizing_vol.push(v);
        active.push(a);
        port.push(b[t] + a);
    }

    let active_cal = calendar.slice(first..n)?;
    let active_series = Series::new(active_cal.clone(), active.clone(), Unit::SimpleReturn)?;
    let realized_te = if active_series.len() >= vol_window.min_periods() {
        Some(rolling_vol(&active_series, vol_window)?)
    } else {
        None
    };
    Ok(SimResult {
        portfolio: Series::new(active_cal, port, Unit::SimpleReturn)?,
        benchmark: bench.slice(first..n)?,
        turnover: turnover(&theta),
        theta,
        targets,
        sizing_vol,
        active,
        realized_te,
        policy: Some(policy.clone()),
    })
}

/// `count` evenly spaced TE ceilings from 0.5% to 5%, computed in basis points
/// so the endpoints are exact.
pub fn default_caps(count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![0.05],
        _ => {
            let step = 45.0 / (count - 1) as f64;
            (0..count)
                .map(|i| (5.0 + step * i as f64) / 1000.0)
                .collect()
        }
    }
}

/// Everything a spectrum run shares across caps.
#[derive(Debug, Clone)]
pub struct SpectrumInputs<'a> {
    pub benchmark: &'a SimResult,
    pub spread: &'a Series,
    pub regimes: &'a RegimePath,
    /// Policy whose ceiling is replaced by each cap.
    pub policy: &'a OverlayPolicy,
    pub vol_window: WindowSpec,
}

/// One overlay simulation per TE ceiling, in cap order.
pub fn constraint_spectrum(
    inputs: &SpectrumInputs<'_>,
    caps: &[f64],
) -> Result<Vec<SimResult>, PortfolioError> {
    constraint_spectrum_with(inputs, caps, Execution::default())
}

pub fn constraint_spectrum_with(
    inputs: &SpectrumInputs<'_>,
    caps: &[f64],
    exec: Execution,
) -> Result<Vec<SimResult>, PortfolioError> {
    if caps.is_empty() {
        return Err(PortfolioError::EmptyCaps);
    }
    exec.map_slice(caps, |&cap| {
        let policy = inputs.policy.clone().with_ceiling(cap);
        simulate_overlay(
            inputs.benchmark,
            inputs.spread,
            inputs.regimes,
            &policy,
            inputs.vol_window,
        )
    })
    .into_iter()
    .collect()
}
