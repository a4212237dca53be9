//! VIX-quintile forward-return study, volatility-surprise regression, crisis
//! troughs with de-risking regret, and the smoothing-window sweep.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::inference::{hac_ols, newey_west_mean_test, InferenceError, OlsFit};
use crate::metrics::{self, MetricsError, RiskFree};
use crate::portfolio::{
    rebalanced_mix, simulate_overlay, OverlayPolicy, PortfolioError, SimResult,
};
use crate::regime::{classify_signal, percentile_thresholds, RegimeError, RegimeThresholds};
use crate::rolling::{moving_average, RollingError, WindowSpec};
use crate::series::{Series, SeriesError, TradingCalendar, Unit};
use crate::stats::{quantile_sorted, sample_std, TRADING_DAYS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EventError {
    #[error("series has no values")]
    Empty,
    #[error("VIX contains NaN on {0}")]
    MissingValue(NaiveDate),
    #[error("horizon {horizon} needs more than {horizon} observations, have {len}")]
    HorizonTooLong { horizon: usize, len: usize },
    #[error("quintile Q{quintile} has no observations at horizon {horizon}")]
    EmptyQuintile { horizon: usize, quintile: usize },
    #[error("window {start}..{end} contains no trading days")]
    EmptyWindow { start: NaiveDate, end: NaiveDate },
    #[error("{crisis}: {horizon} days after the trough run past the data")]
    InsufficientForward { crisis: String, horizon: usize },
    #[error("inputs are not aligned: {0}")]
    Misaligned(String),
    #[error("no windows to sweep")]
    NoWindows,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Rolling(#[from] RollingError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Portfolio(#[from] PortfolioError),
    #[error(transparent)]
    Regime(#[from] RegimeError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// 1M, 3M, 6M and 12M in trading days.
pub const DEFAULT_HORIZONS: [usize; 4] = [21, 63, 126, 252];
pub const REGRET_HORIZONS: [usize; 3] = [63, 126, 252];
pub const SURPRISE_HORIZON: usize = 42;

/// Full-sample quintile boundaries and a 1-based quintile per day.
#[derive(Debug, Clone, PartialEq)]
pub struct Quintiles {
    pub calendar: TradingCalendar,
    pub boundaries: [f64; 4],
    pub labels: Vec<usize>,
}

impl Quintiles {
    pub fn counts(&self) -> [usize; 5] {
        let mut c = [0; 5];
        for &q in &self.labels {
            c[q - 1] += 1;
        }
        c
    }
}

/// A value equal to a boundary belongs to the lower quintile.
pub fn quintile_of(value: f64, boundaries: &[f64; 4]) -> usize {
    1 + boundaries.iter().filter(|b| value > **b).count()
}

/// Boundaries at the 20/40/60/80 linear-interpolation percentiles.
pub fn vix_quintiles(vix: &Series) -> Result<Quintiles, EventError> {
    if vix.is_empty() {
        return Err(EventError::Empty);
    }
    if let Some((d, _)) = vix
        .dates()
        .iter()
        .zip(vix.values())
        .find(|(_, v)| v.is_nan())
    {
        return Err(EventError::MissingValue(*d));
    }
    let mut sorted = vix.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let boundaries = [0.2, 0.4, 0.6, 0.8].map(|p| quantile_sorted(&sorted, p));
    Ok(Quintiles {
        calendar: vix.calendar().clone(),
        labels: vix
            .values()
            .iter()
            .map(|v| quintile_of(*v, &boundaries))
            .collect(),
        boundaries,
    })
}

/// Cumulative return over the next `horizon` days, `p_{t+h} / p_t - 1`, dated
/// at `t`. The result covers the first `n - horizon` dates.
pub fn forward_return(prices: &Series, horizon: usize) -> Result<Series, EventError> {
    prices.require_unit(Unit::Price)?;
    let n = prices.len();
    if horizon == 0 || horizon >= n {
        return Err(EventError::HorizonTooLong { horizon, len: n });
    }
    let p = prices.values();
    let values = (0..n - horizon)
        .map(|t| p[t + horizon] / p[t] - 1.0)
        .collect();
    Ok(Series::new(
        prices.calendar().slice(0..n - horizon)?,
        values,
        Unit::Level,
    )?)
}

/// `(1 + cum)^(252 / horizon) - 1`.
pub fn annualize(cum: f64, horizon: usize) -> f64 {
    (1.0 + cum).powf(TRADING_DAYS / horizon as f64) - 1.0
}

fn common_pair(a: &Series, b: &Series) -> Result<(Series, Series), EventError> {
    let cal = a.calendar().intersect(b.calendar())?;
    Ok((a.align_to(&cal)?, b.align_to(&cal)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonRow {
    pub horizon: usize,
    /// Mean annualized forward return per quintile.
    pub means: [f64; 5],
    pub counts: [usize; 5],
    /// Q5 mean minus Q1 mean.
    pub spread: f64,
    pub nw_se: f64,
    pub nw_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuintileReport {
    pub boundaries: [f64; 4],
    /// Days per quintile over the whole classified sample.
    pub counts: [usize; 5],
    pub rows: Vec<HorizonRow>,
}

impl QuintileReport {
    pub const COLUMNS: [&'static str; 10] = [
        "horizon_days",
        "q1",
        "q2",
        "q3",
        "q4",
        "q5",
        "q5_minus_q1",
        "nw_se",
        "nw_t",
        "observations",
    ];

    pub fn to_csv(&self) -> String {
        let mut out = Self::COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let means: Vec<String> = r.means.iter().map(|m| format!("{m:.10}")).collect();
            out.push_str(&format!(
                "{},{},{:.10},{:.10},{:.6},{}\n",
                r.horizon,
                means.join(","),
                r.spread,
                r.nw_se,
                r.nw_t,
                r.counts.iter().sum::<usize>()
            ));
        }
        out
    }

    /// Quintile boundaries and full-sample counts.
    pub fn boundaries_csv(&self) -> String {
        let mut out = String::from("quintile,lower,upper,count\n");
        for q in 0..5 {
            let lower = if q == 0 {
                String::new()
            } else {
                format!("{:.6}", self.boundaries[q - 1])
            };
            let upper = if q == 4 {
                String::new()
            } else {
                format!("{:.6}", self.boundaries[q])
            };
            out.push_str(&format!("Q{},{lower},{upper},{}\n", q + 1, self.counts[q]));
        }
        out
    }
}

/// Forward-return means by VIX quintile with a Newey-West test of Q5 - Q1.
///
/// The test series is `z_t = 1{Q5} f_t / p5 - 1{Q1} f_t / p1`, where `f_t` is
/// the annualized forward return and `p_k` the share of the horizon's days in
/// quintile `k`; its mean is exactly the Q5 - Q1 spread. Bandwidth = horizon.
pub fn omega_table(
    vix: &Series,
    prices: &Series,
    horizons: &[usize],
) -> Result<QuintileReport, EventError> {
    let (vix, prices) = common_pair(vix, prices)?;
    let q = vix_quintiles(&vix)?;
    let rows = Execution::default()
        .map_slice(horizons, |&h| horizon_row(&q, &prices, h))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuintileReport {
        boundaries: q.boundaries,
        counts: q.counts(),
        rows,
    })
}

fn horizon_row(q: &Quintiles, prices: &Series, h: usize) -> Result<HorizonRow, EventError> {
    let fwd = forward_return(prices, h)?;
    let m = fwd.len();
    let f: Vec<f64> = fwd.values().iter().map(|c| annualize(*c, h)).collect();
    let labels = &q.labels[..m];
    let mut sums = [0.0; 5];
    let mut counts = [0usize; 5];
    for (&l, &v) in labels.iter().zip(&f) {
        sums[l - 1] += v;
        counts[l - 1] += 1;
    }
    for k in [0, 4] {
        if counts[k] == 0 {
            return Err(EventError::EmptyQuintile {
                horizon: h,
                quintile: k + 1,
            });
        }
    }
    let means = std::array::from_fn(|k| {
        if counts[k] > 0 {
            sums[k] / counts[k] as f64
        } else {
            f64::NAN
        }
    });
    let (p1, p5) = (counts[0] as f64 / m as f64, counts[4] as f64 / m as f64);
    let z: Vec<f64> = labels
        .iter()
        .zip(&f)
        .map(|(&l, &v)| match l {
            5 => v / p5,
            1 => -v / p1,
            _ => 0.0,
        })
        .collect();
    let test = newey_west_mean_test(&z, h)?;
    Ok(HorizonRow {
        horizon: h,
        spread: means[4] - means[0],
        means,
        counts,
        nw_se: test.se,
        nw_t: test.t,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolSurpriseFit {
    /// Intercept, lagged implied vol, vol surprise.
    pub fit: OlsFit,
    pub horizon: usize,
}

impl VolSurpriseFit {
    pub const TERMS: [&'static str; 3] = ["intercept", "implied_vol", "vol_surprise"];

    pub fn surprise_coef(&self) -> f64 {
        self.fit.coefs[2]
    }

    pub fn surprise_t(&self) -> f64 {
        self.fit.t[2]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("term,coef,hac_se,t\n");
        for (k, name) in Self::TERMS.iter().enumerate() {
            out.push_str(&format!(
                "{name},{:.10},{:.10},{:.6}\n",
                self.fit.coefs[k], self.fit.se[k], self.fit.t[k]
            ));
        }
        out
    }
}

/// Regresses the forward `h`-day return (percentage points) on implied vol
/// at the start date and the surprise `realized - implied` (both in vol
/// points), where realized vol is the annualized sample std of the daily
/// returns inside the forward window. HAC bandwidth = `h`.
pub fn vol_surprise_regression(
    prices: &Series,
    implied_vol: &Series,
    realized_window: WindowSpec,
) -> Result<VolSurpriseFit, EventError> {
    let (prices, iv) = common_pair(prices, implied_vol)?;
    prices.require_unit(Unit::Price)?;
    let h = realized_window.length();
    let n = prices.len();
    if h < 2 || h >= n {
        return Err(EventError::HorizonTooLong { horizon: h, len: n });
    }
    let p = prices.values();
    let daily: Vec<f64> = p.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    let ann = TRADING_DAYS.sqrt() * 100.0;
    let mut y = Vec::with_capacity(n - h);
    let mut implied = Vec::with_capacity(n - h);
    let mut surprise = Vec::with_capacity(n - h);
    for t in 0..n - h {
        let iv_t = iv.values()[t];
        if iv_t.is_nan() {
            continue;
        }
        // daily[k] is the return into day k + 1
        let rv = sample_std(&daily[t..t + h]).unwrap_or(0.0) * ann;
        y.push((p[t + h] / p[t] - 1.0) * 100.0);
        implied.push(iv_t);
        surprise.push(rv - iv_t);
    }
    let fit = hac_ols(&y, &[implied, surprise], h)?;
    Ok(VolSurpriseFit { fit, horizon: h })
}

/// Realized forward vol in vol points, dated at the window start; the
/// regressor [`vol_surprise_regression`] builds internally.
pub fn forward_realized_vol(prices: &Series, horizon: usize) -> Result<Series, EventError> {
    prices.require_unit(Unit::Price)?;
    let n = prices.len();
    if horizon < 2 || horizon >= n {
        return Err(EventError::HorizonTooLong { horizon, len: n });
    }
    let p = prices.values();
    let daily: Vec<f64> = p.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    let ann = TRADING_DAYS.sqrt() * 100.0;
    let values = (0..n - horizon)
        .map(|t| sample_std(&daily[t..t + horizon]).unwrap_or(0.0) * ann)
        .collect();
    Ok(Series::new(
        prices.calendar().slice(0..n - horizon)?,
        values,
        Unit::Level,
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrisisWindow {
    pub name: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl CrisisWindow {
    pub fn new(name: &str, start: NaiveDate, end: NaiveDate) -> Self {
        Self {
            name: name.to_string(),
            start,
            end,
        }
    }
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}

/// GFC, COVID and the 2022 rate shock.
pub fn default_crises() -> Vec<CrisisWindow> {
    vec![
        CrisisWindow::new("2008 GFC", ymd(2007, 10, 1), ymd(2009, 6, 30)),
        CrisisWindow::new("2020 COVID", ymd(2020, 1, 1), ymd(2020, 6, 30)),
        CrisisWindow::new("2022 Rate Shock", ymd(2022, 1, 1), ymd(2022, 12, 31)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trough {
    pub crisis: String,
    pub date: NaiveDate,
    /// Drawdown from the running peak of the whole history, as a magnitude.
    pub max_drawdown: f64,
    pub vix: Option<f64>,
}

/// Index within `range` of the deepest drawdown of `wealth` measured against
/// the running peak since index 0 (seeded at `initial_peak`). Ties resolve to
/// the earliest day.
pub fn deepest_drawdown(
    wealth: &[f64],
    initial_peak: f64,
    range: std::ops::Range<usize>,
) -> Option<(usize, f64)> {
    let mut peak = initial_peak;
    let mut best: Option<(usize, f64)> = None;
    for (i, &w) in wealth.iter().enumerate().take(range.end) {
        peak = peak.max(w);
        if i >= range.start {
            let dd = 1.0 - w / peak;
            if best.is_none_or(|(_, b)| dd > b) {
                best = Some((i, dd));
            }
        }
    }
    best
}

/// Deepest point of the benchmark's wealth path (starting at 1) within the
/// crisis window, with the VIX close on that date when supplied.
pub fn find_trough(
    benchmark: &SimResult,
    vix: Option<&Series>,
    window: &CrisisWindow,
) -> Result<Trough, EventError> {
    let dates = benchmark.portfolio.dates();
    let start = dates.partition_point(|d| *d < window.start);
    let end = dates.partition_point(|d| *d <= window.end);
    if start >= end {
        return Err(EventError::EmptyWindow {
            start: window.start,
            end: window.end,
        });
    }
    let wealth: Vec<f64> = crate::series::compound(benchmark.portfolio.values(), 1.0)[1..].to_vec();
    let (i, dd) = deepest_drawdown(&wealth, 1.0, start..end).ok_or(EventError::EmptyWindow {
        start: window.start,
        end: window.end,
    })?;
    Ok(Trough {
        crisis: window.name.clone(),
        date: dates[i],
        max_drawdown: dd,
        vix: vix.and_then(|v| v.get(dates[i])),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretSpec {
    pub stay_eq: f64,
    pub derisk_eq: f64,
}

impl Default for RegretSpec {
    fn default() -> Self {
        Self {
            stay_eq: 0.70,
            derisk_eq: 0.30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRow {
    pub horizon: usize,
    pub stay: f64,
    pub derisk: f64,
    /// `(stay - derisk) * 100` from unrounded returns.
    pub regret_pp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub trough: Trough,
    pub rows: Vec<RegretRow>,
}

pub const REGRET_COLUMNS: [&str; 8] = [
    "crisis",
    "trough_date",
    "max_drawdown",
    "vix",
    "horizon_days",
    "stay",
    "derisk",
    "regret_pp",
];

pub fn regret_csv(reports: &[RegretReport]) -> String {
    let mut out = REGRET_COLUMNS.join(",");
    out.push('\n');
    for rep in reports {
        for row in &rep.rows {
            out.push_str(&format!(
                "{},{},{:.6},{},{},{:.10},{:.10},{:.6}\n",
                rep.trough.crisis,
                rep.trough.date,
                -rep.trough.max_drawdown,
                rep.trough
                    .vix
                    .map(|v| format!("{v:.2}"))
                    .unwrap_or_default(),
                row.horizon,
                row.stay,
                row.derisk,
                row.regret_pp
            ));
        }
    }
    out
}

/// Cumulative returns over the `h` days after each trough close for the stay
/// and de-risk mixes, both rebalanced monthly from the day after the trough.
pub fn regret_table(
    eq: &Series,
    bd: &Series,
    troughs: &[Trough],
    horizons: &[usize],
    spec: RegretSpec,
) -> Result<Vec<RegretReport>, EventError> {
    let (eq, bd) = common_pair(eq, bd)?;
    troughs
        .iter()
        .map(|trough| {
            let i = eq.calendar().index_of(trough.date).ok_or_else(|| {
                EventError::Misaligned(format!("trough date {} not in return data", trough.date))
            })?;
            let rows = horizons
                .iter()
                .map(|&h| {
                    if i + h >= eq.len() {
                        return Err(EventError::InsufficientForward {
                            crisis: trough.crisis.clone(),
                            horizon: h,
                        });
                    }
                    let (e, b) = (eq.slice(i + 1..i + h + 1)?, bd.slice(i + 1..i + h + 1)?);
                    let cum = |w: f64| -> Result<f64, EventError> {
                        let mix = rebalanced_mix(&e, &b, w)?;
                        Ok(mix
                            .returns
                            .values()
                            .iter()
                            .fold(1.0, |acc, r| acc * (1.0 + r))
                            - 1.0)
                    };
                    let (stay, derisk) = (cum(spec.stay_eq)?, cum(spec.derisk_eq)?);
                    Ok(RegretRow {
                        horizon: h,
                        stay,
                        derisk,
                        regret_pp: (stay - derisk) * 100.0,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(RegretReport {
                trough: trough.clone(),
                rows,
            })
        })
        .collect()
}

/// Data and policies shared by every row of a window sweep.
#[derive(Debug, Clone)]
pub struct SweepInputs<'a> {
    pub benchmark: &'a SimResult,
    pub spread: &'a Series,
    pub vix: &'a Series,
    pub dynamic: &'a OverlayPolicy,
    pub static_policy: &'a OverlayPolicy,
    pub vol_window: WindowSpec,
    pub rf: &'a RiskFree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub window: usize,
    pub thresholds: RegimeThresholds,
    pub cagr: f64,
    pub excess_cagr_bps: f64,
    pub sharpe: f64,
    pub cagr_over_maxdd: f64,
    pub matches_sharpe: bool,
    pub matches_cagr_over_maxdd: bool,
}

impl SweepRow {
    pub fn passes_both(&self) -> bool {
        self.matches_sharpe && self.matches_cagr_over_maxdd
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub start: NaiveDate,
    pub static_cagr: f64,
    pub static_sharpe: f64,
    pub static_cagr_over_maxdd: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub const COLUMNS: [&'static str; 10] = [
        "window",
        "threshold_low",
        "threshold_high",
        "cagr",
        "excess_cagr_bps",
        "sharpe",
        "cagr_over_maxdd",
        "matches_sharpe",
        "matches_cagr_over_maxdd",
        "passes_both",
    ];

    pub fn to_csv(&self) -> String {
        let mut out = Self::COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.10},{:.4},{:.6},{:.6},{},{},{}\n",
                r.window,
                r.thresholds.low(),
                r.thresholds.high(),
                r.cagr,
                r.excess_cagr_bps,
                r.sharpe,
                r.cagr_over_maxdd,
                r.matches_sharpe,
                r.matches_cagr_over_maxdd,
                r.passes_both()
            ));
        }
        out.push_str(&format!(
            "static,,,{:.10},0.0000,{:.6},{:.6},,,\n",
            self.static_cagr, self.static_sharpe, self.static_cagr_over_maxdd
        ));
        out
    }
}

fn calmar(r: &[f64]) -> Result<f64, EventError> {
    let dd = metrics::max_drawdown(r);
    let c = metrics::cagr(r)?;
    Ok(if dd > 0.0 { c / dd } else { f64::INFINITY })
}

/// Re-runs the dynamic policy with the VIX smoothed over each window and
/// thresholds re-derived at the same percentiles of that window's smoothed
/// distribution. All rows and the static comparison are evaluated from the
/// latest first-active date among the windows.
pub fn window_sweep(
    inputs: &SweepInputs<'_>,
    windows: &[usize],
    percentiles: (f64, f64),
) -> Result<SweepReport, EventError> {
    if windows.is_empty() {
        return Err(EventError::NoWindows);
    }
    let runs = Execution::default()
        .map_slice(windows, |&w| -> Result<_, EventError> {
            let smoothed = moving_average(inputs.vix, WindowSpec::new(w)?)?;
            let thresholds = percentile_thresholds(&smoothed, percentiles.0, percentiles.1)?;
            let path = classify_signal(&smoothed, thresholds)?;
            let sim = simulate_overlay(
                inputs.benchmark,
                inputs.spread,
                &path,
                inputs.dynamic,
                inputs.vol_window,
            )?;
            Ok((w, thresholds, path, sim))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let latest = runs
        .iter()
        .max_by_key(|r| r.3.calendar().first())
        .expect("non-empty windows");
    let start = latest.3.calendar().first();
    let static_sim = simulate_overlay(
        inputs.benchmark,
        inputs.spread,
        &latest.2,
        inputs.static_policy,
        inputs.vol_window,
    )?
    .starting_at(start)?;
    let sr = static_sim.portfolio.values();
    let static_cagr = metrics::cagr(sr)?;
    let static_sharpe = metrics::sharpe(&static_sim.portfolio, inputs.rf)?;
    let static_calmar = calmar(sr)?;

    let rows = runs
        .iter()
        .map(|(w, thresholds, _, sim)| {
            let sim = sim.starting_at(start)?;
            let r = sim.portfolio.values();
            let cagr = metrics::cagr(r)?;
            let sharpe = metrics::sharpe(&sim.portfolio, inputs.rf)?;
            let c = calmar(r)?;
            Ok(SweepRow {
                window: *w,
                thresholds: *thresholds,
                cagr,
                excess_cagr_bps: (cagr - static_cagr) * 1e4,
                sharpe,
                cagr_over_maxdd: c,
                matches_sharpe: sharpe >= static_sharpe,
                matches_cagr_over_maxdd: c >= static_calmar,
            })
        })
        .collect::<Result<Vec<_>, EventError>>()?;
    Ok(SweepReport {
        start,
        static_cagr,
        static_sharpe,
        static_cagr_over_maxdd: static_calmar,
        rows,
    })
}
