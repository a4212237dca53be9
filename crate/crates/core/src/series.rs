//! Calendar-aligned containers: trading calendars, single series and panels
//! of series sharing one calendar.

use std::ops::Range;
use std::sync::Arc;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("calendar is empty")]
    EmptyCalendar,
    #[error("calendar dates not strictly increasing at {0}")]
    NotIncreasing(NaiveDate),
    #[error("{0} is not a weekday")]
    Weekend(NaiveDate),
    #[error("length mismatch: calendar has {calendar} dates, values has {values}")]
    LengthMismatch { calendar: usize, values: usize },
    #[error("invalid {unit:?} value {value} on {date}")]
    InvalidValue {
        unit: Unit,
        value: f64,
        date: NaiveDate,
    },
    #[error("expected a {expected:?} series, got {actual:?}")]
    WrongUnit { expected: Unit, actual: Unit },
    #[error("series too short: need at least {needed} observations, have {have}")]
    TooShort { needed: usize, have: usize },
    #[error("calendars do not match")]
    CalendarMismatch,
    #[error("date {0} not present in calendar")]
    MissingDate(NaiveDate),
    #[error("duplicate symbol {0}")]
    DuplicateSymbol(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("no common dates")]
    EmptyIntersection,
}

/// Ordered set of trading dates. Cheap to clone.
#[derive(Debug, Clone)]
pub struct TradingCalendar {
    dates: Arc<[NaiveDate]>,
}

impl PartialEq for TradingCalendar {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.dates, &other.dates) || self.dates == other.dates
    }
}

impl TradingCalendar {
    pub fn new(dates: Vec<NaiveDate>) -> Result<Self, SeriesError> {
        if dates.is_empty() {
            return Err(SeriesError::EmptyCalendar);
        }
        for (i, d) in dates.iter().enumerate() {
            if matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
                return Err(SeriesError::Weekend(*d));
            }
            if i > 0 && dates[i - 1] >= *d {
                return Err(SeriesError::NotIncreasing(*d));
            }
        }
        Ok(Self {
            dates: dates.into(),
        })
    }

    /// `n` consecutive weekdays starting at `start` (rolled forward off a weekend).
    pub fn weekdays_from(start: NaiveDate, n: usize) -> Result<Self, SeriesError> {
        let mut dates = Vec::with_capacity(n);
        let mut d = start;
        while dates.len() < n {
            if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
                dates.push(d);
            }
            d = d.succ_opt().expect("date overflow");
        }
        Self::new(dates)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn first(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    pub fn slice(&self, range: Range<usize>) -> Result<Self, SeriesError> {
        Self::new(self.dates[range].to_vec())
    }

    /// Dates present in both calendars.
    pub fn intersect(&self, other: &Self) -> Result<Self, SeriesError> {
        if self == other {
            return Ok(self.clone());
        }
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.len() && j < other.len() {
            match self.dates[i].cmp(&other.dates[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.dates[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        if out.is_empty() {
            return Err(SeriesError::EmptyIntersection);
        }
        Self::new(out)
    }

    /// True when `other` is this calendar with a prefix removed.
    pub fn ends_with(&self, other: &Self) -> bool {
        other.len() <= self.len() && self.dates[self.len() - other.len()..] == other.dates[..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unit {
    Price,
    SimpleReturn,
    /// Any level (index values, VIX, estimator outputs). NaN marks "no value".
    Level,
}

/// One value per calendar date.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    calendar: TradingCalendar,
    values: Arc<[f64]>,
    unit: Unit,
}

impl Series {
    pub fn new(
        calendar: TradingCalendar,
        values: Vec<f64>,
        unit: Unit,
    ) -> Result<Self, SeriesError> {
        if calendar.len() != values.len() {
            return Err(SeriesError::LengthMismatch {
                calendar: calendar.len(),
                values: values.len(),
            });
        }
        for (d, &v) in calendar.dates().iter().zip(&values) {
            let ok = match unit {
                Unit::Price => v.is_finite() && v > 0.0,
                Unit::SimpleReturn => v.is_finite() && v > -1.0,
                Unit::Level => !v.is_infinite(),
            };
            if !ok {
                return Err(SeriesError::InvalidValue {
                    unit,
                    value: v,
                    date: *d,
                });
            }
        }
        Ok(Self {
            calendar,
            values: values.into(),
            unit,
        })
    }

    pub fn calendar(&self) -> &TradingCalendar {
        &self.calendar
    }

    pub fn dates(&self) -> &[NaiveDate] {
        self.calendar.dates()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.calendar.index_of(date).map(|i| self.values[i])
    }

    pub fn require_unit(&self, expected: Unit) -> Result<(), SeriesError> {
        if self.unit != expected {
            return Err(SeriesError::WrongUnit {
                expected,
                actual: self.unit,
            });
        }
        Ok(())
    }

    /// Reinterprets the values under another unit, re-running validation.
    pub fn with_unit(&self, unit: Unit) -> Result<Self, SeriesError> {
        Self::new(self.calendar.clone(), self.values.to_vec(), unit)
    }

    pub fn slice(&self, range: Range<usize>) -> Result<Self, SeriesError> {
        Ok(Self {
            calendar: self.calendar.slice(range.clone())?,
            values: self.values[range].into(),
            unit: self.unit,
        })
    }

    /// Observations dated on or before `date`.
    pub fn truncate_after(&self, date: NaiveDate) -> Result<Self, SeriesError> {
        let end = self.dates().partition_point(|d| *d <= date);
        self.slice(0..end)
    }

    /// Observations dated on or after `date`.
    pub fn starting_at(&self, date: NaiveDate) -> Result<Self, SeriesError> {
        let start = self.dates().partition_point(|d| *d < date);
        self.slice(start..self.len())
    }

    /// Samples this series at every date of `calendar`; all dates must exist.
    pub fn align_to(&self, calendar: &TradingCalendar) -> Result<Self, SeriesError> {
        if &self.calendar == calendar {
            return Ok(self.clone());
        }
        let values = calendar
            .dates()
            .iter()
            .map(|d| self.get(*d).ok_or(SeriesError::MissingDate(*d)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            calendar: calendar.clone(),
            values: values.into(),
            unit: self.unit,
        })
    }

    /// (date, value) pairs with NaN ("no value") entries skipped.
    pub fn valid(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates()
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .filter(|(_, v)| !v.is_nan())
    }
}

/// Simple returns `p_t / p_{t-1} - 1`; the output starts at the second date.
pub fn returns_from_prices(prices: &Series) -> Result<Series, SeriesError> {
    prices.require_unit(Unit::Price)?;
    if prices.len() < 2 {
        return Err(SeriesError::TooShort {
            needed: 2,
            have: prices.len(),
        });
    }
    let p = prices.values();
    let r = p.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    Series::new(
        prices.calendar().slice(1..prices.len())?,
        r,
        Unit::SimpleReturn,
    )
}

/// Compounds returns from `start`; returns `n + 1` levels beginning with `start`.
pub fn compound(returns: &[f64], start: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(returns.len() + 1);
    let mut level = start;
    out.push(level);
    for r in returns {
        level *= 1.0 + r;
        out.push(level);
    }
    out
}

/// End-of-day wealth `W_t = prod_{s <= t} (1 + r_s)` on the returns' calendar,
/// usable wherever a total-return price index is expected.
pub fn wealth_index(returns: &Series) -> Result<Series, SeriesError> {
    returns.require_unit(Unit::SimpleReturn)?;
    let w = compound(returns.values(), 1.0);
    Series::new(returns.calendar().clone(), w[1..].to_vec(), Unit::Price)
}

/// Named series on one shared calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetPanel {
    calendar: TradingCalendar,
    symbols: Vec<String>,
    series: Vec<Series>,
}

impl AssetPanel {
    pub fn new(
        calendar: TradingCalendar,
        columns: Vec<(String, Vec<f64>, Unit)>,
    ) -> Result<Self, SeriesError> {
        let mut symbols = Vec::with_capacity(columns.len());
        let mut series = Vec::with_capacity(columns.len());
        for (sym, values, unit) in columns {
            if symbols.contains(&sym) {
                return Err(SeriesError::DuplicateSymbol(sym));
            }
            series.push(Series::new(calendar.clone(), values, unit)?);
            symbols.push(sym);
        }
        Ok(Self {
            calendar,
            symbols,
            series,
        })
    }

    /// Builds a panel from series that already share a calendar.
    pub fn from_series(named: Vec<(String, Series)>) -> Result<Self, SeriesError> {
        let calendar = named
            .first()
            .ok_or(SeriesError::EmptyCalendar)?
            .1
            .calendar()
            .clone();
        let mut symbols = Vec::with_capacity(named.len());
        let mut series = Vec::with_capacity(named.len());
        for (sym, s) in named {
            if s.calendar() != &calendar {
                return Err(SeriesError::CalendarMismatch);
            }
            if symbols.contains(&sym) {
                return Err(SeriesError::DuplicateSymbol(sym));
            }
            symbols.push(sym);
            series.push(s);
        }
        Ok(Self {
            calendar,
            symbols,
            series,
        })
    }

    pub fn calendar(&self) -> &TradingCalendar {
        &self.calendar
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn series(&self) -> &[Series] {
        &self.series
    }

    pub fn get(&self, symbol: &str) -> Option<&Series> {
        self.symbols
            .iter()
            .position(|s| s == symbol)
            .map(|i| &self.series[i])
    }

    pub fn require(&self, symbol: &str) -> Result<&Series, SeriesError> {
        self.get(symbol)
            .ok_or_else(|| SeriesError::UnknownSymbol(symbol.to_string()))
    }

    /// Sub-panel holding `symbols` in the given order.
    pub fn select(&self, symbols: &[&str]) -> Result<Self, SeriesError> {
        let named = symbols
            .iter()
            .map(|s| Ok((s.to_string(), self.require(s)?.clone())))
            .collect::<Result<Vec<_>, SeriesError>>()?;
        Self::from_series(named)
    }

    /// Restricts every series to `calendar`, which must be a subset of ours.
    pub fn align_to(&self, calendar: &TradingCalendar) -> Result<Self, SeriesError> {
        let named = self
            .symbols
            .iter()
            .zip(&self.series)
            .map(|(sym, s)| Ok((sym.clone(), s.align_to(calendar)?)))
            .collect::<Result<Vec<_>, SeriesError>>()?;
        Self::from_series(named)
    }
}
