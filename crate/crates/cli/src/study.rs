//! The baseline run: regime path, 70/30 benchmark, static and dynamic overlays.

use chrono::NaiveDate;
use dte_core::metrics::{te_policy_stats, MetricsReport, RiskFree};
use dte_core::portfolio::{benchmark_7030, simulate_overlay, OverlayPolicy, SimResult};
use dte_core::regime::{classify_signal, percentile_thresholds, RegimePath, RegimeThresholds};
use dte_core::rolling::{moving_average, WindowSpec};
use dte_core::Series;

use crate::config::{RegimeRule, RunConfig};
use crate::data::Dataset;
use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct MainRun {
    pub smoothed_vix: Series,
    pub regimes: RegimePath,
    pub benchmark: SimResult,
    pub static_run: SimResult,
    pub dynamic_run: SimResult,
    pub static_policy: OverlayPolicy,
    pub dynamic_policy: OverlayPolicy,
    pub vol_window: WindowSpec,
    /// First date on which both overlays hold a position.
    pub start: NaiveDate,
}

pub fn regime_path(
    vix: &Series,
    window: usize,
    rule: RegimeRule,
) -> Result<(Series, RegimePath), CliError> {
    let smoothed = moving_average(vix, WindowSpec::new(window)?)?;
    let thresholds = match rule {
        RegimeRule::Thresholds { low, high } => RegimeThresholds::new(low, high)?,
        RegimeRule::Percentiles { low, high } => percentile_thresholds(&smoothed, low, high)?,
    };
    let path = classify_signal(&smoothed, thresholds)?;
    Ok((smoothed, path))
}

pub fn main_run(ds: &Dataset, cfg: &RunConfig) -> Result<MainRun, CliError> {
    let (smoothed_vix, regimes) = regime_path(&ds.vix, cfg.windows.vix_smoothing, cfg.regime)?;
    let benchmark = benchmark_7030(&ds.eq, &ds.bd)?;
    let vol_window = WindowSpec::new(cfg.windows.spread_vol)?;
    let static_policy = cfg.policy.static_policy();
    let dynamic_policy = cfg.policy.dynamic_policy();
    let static_run =
        simulate_overlay(&benchmark, &ds.spread, &regimes, &static_policy, vol_window)?;
    let dynamic_run = simulate_overlay(
        &benchmark,
        &ds.spread,
        &regimes,
        &dynamic_policy,
        vol_window,
    )?;
    let start = static_run
        .calendar()
        .first()
        .max(dynamic_run.calendar().first());
    Ok(MainRun {
        static_run: static_run.starting_at(start)?,
        dynamic_run: dynamic_run.starting_at(start)?,
        smoothed_vix,
        regimes,
        benchmark,
        static_policy,
        dynamic_policy,
        vol_window,
        start,
    })
}

/// Summary row for a simulated portfolio with its TE policy statistics.
pub fn summarize(
    label: &str,
    sim: &SimResult,
    smoothed_vix: &Series,
    rf: &RiskFree,
) -> Result<MetricsReport, CliError> {
    let report = MetricsReport::from_returns(label, &sim.portfolio, rf)?;
    Ok(match &sim.realized_te {
        Some(te) => report.with_te(&te_policy_stats(te, smoothed_vix)?),
        None => report,
    })
}

impl MainRun {
    /// Benchmark, static and dynamic rows over the common active sample.
    pub fn performance(&self, rf: &RiskFree) -> Result<Vec<MetricsReport>, CliError> {
        let bench = self.benchmark.starting_at(self.start)?;
        Ok(vec![
            MetricsReport::from_returns("benchmark_70_30", &bench.portfolio, rf)?,
            summarize("static_te", &self.static_run, &self.smoothed_vix, rf)?,
            summarize("dynamic_te", &self.dynamic_run, &self.smoothed_vix, rf)?,
        ])
    }
}
