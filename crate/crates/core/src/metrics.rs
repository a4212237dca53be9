//! Performance statistics and the level / volatility / cyclicality summary of
//! a realized tracking-error path.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rolling::{rolling_vol, RollingError, WindowSpec};
use crate::series::{Series, SeriesError, Unit};
use crate::stats::{mean, pearson, sample_std, TRADING_DAYS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("no observations")]
    Empty,
    #[error("need at least {needed} observations, have {have}")]
    TooShort { needed: usize, have: usize },
    #[error("return {value} at index {index} is not above -1")]
    TotalLoss { index: usize, value: f64 },
    #[error("zero volatility: Sharpe ratio undefined")]
    ZeroVolatility,
    #[error("zero variance: correlation undefined")]
    ZeroVariance,
    #[error("inputs are not aligned: {0}")]
    Misaligned(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Rolling(#[from] RollingError),
}

/// Risk-free rate for excess returns.
#[derive(Debug, Clone, PartialEq)]
pub enum RiskFree {
    /// Annualized rate, converted to a daily simple rate by dividing by 252.
    Constant(f64),
    /// Daily simple returns covering every date of the evaluated series.
    Series(Series),
}

impl Default for RiskFree {
    fn default() -> Self {
        RiskFree::Constant(0.0)
    }
}

/// `(prod(1 + r))^(252 / n) - 1`, accumulated in log space.
pub fn cagr(returns: &[f64]) -> Result<f64, MetricsError> {
    if returns.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut log_growth = 0.0;
    for (index, &value) in returns.iter().enumerate() {
        if !(value > -1.0) {
            return Err(MetricsError::TotalLoss { index, value });
        }
        log_growth += value.ln_1p();
    }
    Ok((log_growth * TRADING_DAYS / returns.len() as f64).exp_m1())
}

/// Sample standard deviation scaled by sqrt(252).
pub fn annualized_vol(returns: &[f64]) -> Result<f64, MetricsError> {
    sample_std(returns)
        .map(|sd| sd * TRADING_DAYS.sqrt())
        .ok_or(MetricsError::TooShort {
            needed: 2,
            have: returns.len(),
        })
}

/// Annualized Sharpe ratio of already-computed excess returns.
pub fn sharpe_excess(excess: &[f64]) -> Result<f64, MetricsError> {
    let vol = annualized_vol(excess)?;
    if vol == 0.0 {
        return Err(MetricsError::ZeroVolatility);
    }
    Ok(mean(excess) * TRADING_DAYS / vol)
}

/// Annualized Sharpe ratio against a constant annualized risk-free rate.
pub fn sharpe_ratio(returns: &[f64], rf_annual: f64) -> Result<f64, MetricsError> {
    let daily = rf_annual / TRADING_DAYS;
    if daily == 0.0 {
        return sharpe_excess(returns);
    }
    let excess: Vec<f64> = returns.iter().map(|r| r - daily).collect();
    sharpe_excess(&excess)
}

pub fn sharpe(returns: &Series, rf: &RiskFree) -> Result<f64, MetricsError> {
    match rf {
        RiskFree::Constant(rate) => sharpe_ratio(returns.values(), *rate),
        RiskFree::Series(rf) => {
            let rf = rf.align_to(returns.calendar())?;
            let excess: Vec<f64> = returns
                .values()
                .iter()
                .zip(rf.values())
                .map(|(r, f)| r - f)
                .collect();
            sharpe_excess(&excess)
        }
    }
}

/// Largest peak-to-trough loss of the wealth path that starts at 1, as a
/// non-negative magnitude.
pub fn max_drawdown(returns: &[f64]) -> f64 {
    let mut wealth = 1.0_f64;
    let mut peak = 1.0_f64;
    let mut worst = 0.0_f64;
    for r in returns {
        wealth *= 1.0 + r;
        peak = peak.max(wealth);
        worst = worst.max(1.0 - wealth / peak);
    }
    worst
}

/// Rolling annualized volatility of `portfolio - benchmark`.
pub fn realized_te(
    portfolio: &Series,
    benchmark: &Series,
    w: WindowSpec,
) -> Result<Series, MetricsError> {
    if portfolio.calendar() != benchmark.calendar() {
        return Err(MetricsError::Misaligned(
            "portfolio and benchmark calendars differ".into(),
        ));
    }
    let diff = portfolio
        .values()
        .iter()
        .zip(benchmark.values())
        .map(|(p, b)| p - b)
        .collect();
    let active = Series::new(portfolio.calendar().clone(), diff, Unit::SimpleReturn)?;
    Ok(rolling_vol(&active, w)?)
}

/// Level, volatility and cyclicality of a tracking-error path.
#[derive(Debug, Clone, PartialEq)]
pub struct TePolicyStats {
    pub level: f64,
    pub sigma_te: f64,
    /// Correlation with the smoothed VIX; undefined when either input is constant.
    pub cyclicality: Result<f64, MetricsError>,
    pub observations: usize,
}

/// Uses the dates where `te` has a value; `smoothed_vix` must have a value on each.
pub fn te_policy_stats(te: &Series, smoothed_vix: &Series) -> Result<TePolicyStats, MetricsError> {
    let mut t = Vec::with_capacity(te.len());
    let mut v = Vec::with_capacity(te.len());
    for (date, value) in te.valid() {
        let s = smoothed_vix
            .get(date)
            .filter(|s| !s.is_nan())
            .ok_or_else(|| {
                MetricsError::Misaligned(format!("smoothed VIX has no value on {date}"))
            })?;
        t.push(value);
        v.push(s);
    }
    let sigma_te = sample_std(&t).ok_or(MetricsError::TooShort {
        needed: 2,
        have: t.len(),
    })?;
    Ok(TePolicyStats {
        level: mean(&t),
        sigma_te,
        cyclicality: pearson(&t, &v).ok_or(MetricsError::ZeroVariance),
        observations: t.len(),
    })
}

/// One portfolio's summary row. Drawdown is stored as a non-negative magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub label: String,
    pub cagr: f64,
    pub vol: f64,
    pub sharpe: f64,
    pub max_drawdown: f64,
    pub cagr_over_maxdd: Option<f64>,
    pub te_level: Option<f64>,
    pub te_sigma: Option<f64>,
    pub te_cyclicality: Option<f64>,
}

impl MetricsReport {
    /// Column order of [`MetricsReport::csv_row`].
    pub const COLUMNS: [&'static str; 9] = [
        "portfolio",
        "cagr",
        "vol",
        "sharpe",
        "max_drawdown",
        "cagr_over_maxdd",
        "te_level",
        "te_sigma",
        "te_cyclicality",
    ];

    pub fn from_returns(
        label: &str,
        returns: &Series,
        rf: &RiskFree,
    ) -> Result<Self, MetricsError> {
        let r = returns.values();
        let cagr = cagr(r)?;
        let max_drawdown = max_drawdown(r);
        Ok(Self {
            label: label.to_string(),
            cagr,
            vol: annualized_vol(r)?,
            sharpe: sharpe(returns, rf)?,
            max_drawdown,
            cagr_over_maxdd: (max_drawdown > 0.0).then(|| cagr / max_drawdown),
            te_level: None,
            te_sigma: None,
            te_cyclicality: None,
        })
    }

    pub fn with_te(mut self, stats: &TePolicyStats) -> Self {
        self.te_level = Some(stats.level);
        self.te_sigma = Some(stats.sigma_te);
        self.te_cyclicality = stats.cyclicality.as_ref().ok().copied();
        self
    }

    pub fn csv_header() -> String {
        Self::COLUMNS.join(",")
    }

    /// Values in [`MetricsReport::COLUMNS`] order; absent values are empty cells.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.10}")).unwrap_or_default();
        format!(
            "{},{:.10},{:.10},{:.10},{:.10},{},{},{},{}",
            self.label,
            self.cagr,
            self.vol,
            self.sharpe,
            self.max_drawdown,
            opt(self.cagr_over_maxdd),
            opt(self.te_level),
            opt(self.te_sigma),
            opt(self.te_cyclicality)
        )
    }
}
