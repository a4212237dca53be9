use chrono::Datelike;
use serde::{Deserialize, Serialize};

use super::RegimeError;
use crate::inference::spearman;
use crate::rolling::{moving_average, WindowSpec};
use crate::series::{Series, TradingCalendar, Unit};
use crate::stats::quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    Low,
    Neutral,
    High,
}

impl RegimeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeLabel::Low => "Low",
            RegimeLabel::Neutral => "Neutral",
            RegimeLabel::High => "High",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    low: f64,
    high: f64,
}

impl RegimeThresholds {
    pub fn new(low: f64, high: f64) -> Result<Self, RegimeError> {
        if !(low > 0.0 && low < high && high.is_finite()) {
            return Err(RegimeError::InvalidThresholds { low, high });
        }
        Ok(Self { low, high })
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    /// Strict inequalities: a signal equal to either threshold is Neutral.
    pub fn label(&self, signal: f64) -> RegimeLabel {
        if signal < self.low {
            RegimeLabel::Low
        } else if signal > self.high {
            RegimeLabel::High
        } else {
            RegimeLabel::Neutral
        }
    }
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            low: 13.0,
            high: 22.0,
        }
    }
}

/// Per-day labels together with the smoothed signal and thresholds behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimePath {
    signal: Series,
    labels: Vec<RegimeLabel>,
    thresholds: RegimeThresholds,
}

impl RegimePath {
    pub fn calendar(&self) -> &TradingCalendar {
        self.signal.calendar()
    }

    pub fn signal(&self) -> &Series {
        &self.signal
    }

    pub fn labels(&self) -> &[RegimeLabel] {
        &self.labels
    }

    pub fn thresholds(&self) -> RegimeThresholds {
        self.thresholds
    }

    pub fn label_at(&self, date: chrono::NaiveDate) -> Option<RegimeLabel> {
        self.calendar().index_of(date).map(|i| self.labels[i])
    }
}

/// Thresholds at the `p_low` / `p_high` linear-interpolation quantiles of the
/// smoothed signal (NaN entries ignored).
pub fn percentile_thresholds(
    smoothed: &Series,
    p_low: f64,
    p_high: f64,
) -> Result<RegimeThresholds, RegimeError> {
    if !(0.0 < p_low && p_low < p_high && p_high < 1.0) {
        return Err(RegimeError::InvalidPercentiles { p_low, p_high });
    }
    let lo = quantile(smoothed.values(), p_low).ok_or(RegimeError::Empty)?;
    let hi = quantile(smoothed.values(), p_high).ok_or(RegimeError::Empty)?;
    RegimeThresholds::new(lo, hi)
}

/// Labels an already-smoothed signal pointwise.
pub fn classify_signal(
    signal: &Series,
    thresholds: RegimeThresholds,
) -> Result<RegimePath, RegimeError> {
    if signal.values().iter().any(|v| v.is_nan()) {
        return Err(RegimeError::Misaligned(
            "signal contains missing values".into(),
        ));
    }
    let labels = signal
        .values()
        .iter()
        .map(|&v| thresholds.label(v))
        .collect();
    Ok(RegimePath {
        signal: signal.clone(),
        labels,
        thresholds,
    })
}

/// Smooths `vix` with a trailing moving average and labels each day.
pub fn classify(
    vix: &Series,
    window: WindowSpec,
    thresholds: RegimeThresholds,
) -> Result<RegimePath, RegimeError> {
    let smoothed = moving_average(vix, window)?;
    classify_signal(&smoothed, thresholds)
}

/// Compounds daily simple returns within each ISO week; each weekly value is
/// dated on the last trading day of its week.
pub fn weekly_returns(daily: &Series) -> Result<Series, RegimeError> {
    daily.require_unit(Unit::SimpleReturn)?;
    let mut dates = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut current = None;
    for (d, r) in daily.dates().iter().zip(daily.values()) {
        let week = d.iso_week();
        let key = (week.year(), week.week());
        if current == Some(key) {
            let last = values.last_mut().expect("week started");
            *last = (1.0 + *last) * (1.0 + r) - 1.0;
            *dates.last_mut().expect("week started") = *d;
        } else {
            current = Some(key);
            dates.push(*d);
            values.push(*r);
        }
    }
    Ok(Series::new(
        TradingCalendar::new(dates)?,
        values,
        Unit::SimpleReturn,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub spearman: f64,
    /// Share of weeks where `label == High` agrees with `prob > 0.5`.
    pub concordance: f64,
    pub weeks: usize,
}

/// Compares the smoothed-VIX signal, sampled on the probability series' dates,
/// with Markov-switching high-state probabilities.
pub fn signal_agreement(vix_path: &RegimePath, ms_prob: &Series) -> Result<Agreement, RegimeError> {
    let mut sig = Vec::with_capacity(ms_prob.len());
    let mut agree = 0usize;
    for (d, p) in ms_prob.dates().iter().zip(ms_prob.values()) {
        let i = vix_path
            .calendar()
            .index_of(*d)
            .ok_or_else(|| RegimeError::Misaligned(format!("no regime signal on {d}")))?;
        sig.push(vix_path.signal.values()[i]);
        if (vix_path.labels[i] == RegimeLabel::High) == (*p > 0.5) {
            agree += 1;
        }
    }
    let rho = spearman(&sig, ms_prob.values())?;
    Ok(Agreement {
        spearman: rho,
        concordance: agree as f64 / ms_prob.len() as f64,
        weeks: ms_prob.len(),
    })
}
