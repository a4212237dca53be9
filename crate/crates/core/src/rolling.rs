//! Trailing-window statistics: moving average, annualized volatility, Pearson
//! correlation and the average pairwise correlation of a panel.
//!
//! Each output value is computed directly from its own window (two-pass
//! mean/deviation), so there is no incremental-update drift. Output calendars
//! are suffixes of the input calendar starting at the first date whose window
//! holds `min_periods` observations; undefined statistics are NaN.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::series::{AssetPanel, Series, SeriesError, Unit};
use crate::stats::{mean, pearson, sample_std, TRADING_DAYS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RollingError {
    #[error("invalid window: length {length}, min_periods {min_periods}")]
    InvalidWindow { length: usize, min_periods: usize },
    #[error("input has {have} observations, window needs {needed}")]
    TooShort { needed: usize, have: usize },
    #[error("inputs are on different calendars")]
    CalendarMismatch,
    #[error("need at least two symbols, got {0}")]
    TooFewSymbols(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    length: usize,
    min_periods: usize,
}

impl WindowSpec {
    /// Window requiring a full `length` observations.
    pub fn new(length: usize) -> Result<Self, RollingError> {
        Self::with_min_periods(length, length)
    }

    pub fn with_min_periods(length: usize, min_periods: usize) -> Result<Self, RollingError> {
        if min_periods < 1 || min_periods > length {
            return Err(RollingError::InvalidWindow {
                length,
                min_periods,
            });
        }
        Ok(Self {
            length,
            min_periods,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn min_periods(&self) -> usize {
        self.min_periods
    }

    /// Index range of the trailing window ending at `i` (inclusive).
    fn bounds(&self, i: usize) -> std::ops::Range<usize> {
        (i + 1).saturating_sub(self.length)..i + 1
    }

    fn check(&self, n: usize) -> Result<usize, RollingError> {
        if n < self.min_periods {
            return Err(RollingError::TooShort {
                needed: self.min_periods,
                have: n,
            });
        }
        Ok(self.min_periods - 1)
    }
}

fn roll<F>(s: &Series, w: WindowSpec, f: F) -> Result<Series, RollingError>
where
    F: Fn(std::ops::Range<usize>) -> f64 + Sync + Send,
{
    let first = w.check(s.len())?;
    let values = Execution::default().map_indices(s.len() - first, |k| f(w.bounds(first + k)));
    let calendar = s.calendar().slice(first..s.len())?;
    Ok(Series::new(calendar, values, Unit::Level)?)
}

pub fn moving_average(s: &Series, w: WindowSpec) -> Result<Series, RollingError> {
    let x = s.values();
    roll(s, w, |r| mean(&x[r]))
}

/// Trailing sample standard deviation scaled by sqrt(252).
pub fn rolling_vol(r: &Series, w: WindowSpec) -> Result<Series, RollingError> {
    r.require_unit(Unit::SimpleReturn)?;
    let x = r.values();
    let ann = TRADING_DAYS.sqrt();
    roll(r, w, |rg| {
        sample_std(&x[rg]).map_or(f64::NAN, |sd| sd * ann)
    })
}

pub fn rolling_corr(a: &Series, b: &Series, w: WindowSpec) -> Result<Series, RollingError> {
    if a.calendar() != b.calendar() {
        return Err(RollingError::CalendarMismatch);
    }
    let (x, y) = (a.values(), b.values());
    roll(a, w, |r| pearson(&x[r.clone()], &y[r]).unwrap_or(f64::NAN))
}

/// Mean of the n(n-1)/2 trailing pairwise correlations; pairs with an undefined
/// correlation in a window are left out of that window's average.
pub fn rolling_avg_pairwise_corr(
    panel: &AssetPanel,
    w: WindowSpec,
) -> Result<Series, RollingError> {
    let cols = panel.series();
    if cols.len() < 2 {
        return Err(RollingError::TooFewSymbols(cols.len()));
    }
    let pairs: Vec<(usize, usize)> = (0..cols.len())
        .flat_map(|i| (i + 1..cols.len()).map(move |j| (i, j)))
        .collect();
    roll(&cols[0], w, |r| {
        let (sum, count) = pairs
            .iter()
            .filter_map(|&(i, j)| {
                pearson(&cols[i].values()[r.clone()], &cols[j].values()[r.clone()])
            })
            .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if count == 0 {
            f64::NAN
        } else {
            sum / count as f64
        }
    })
}
