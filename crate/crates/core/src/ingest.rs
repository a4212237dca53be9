//! Wide-format CSV ingestion (`date,SYM1,SYM2,...`) onto a common calendar,
//! and the matching writer.
//!
//! Rows where any symbol is missing are dropped rather than filled; the number
//! of dropped rows is reported so the caller can audit it.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{AssetPanel, SeriesError, TradingCalendar, Unit};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("header must be `date,SYM1,...` with at least one symbol")]
    BadHeader,
    #[error("line {line}: malformed date {value:?}")]
    MalformedDate { line: usize, value: String },
    #[error("line {line}: {date} is not a weekday")]
    NonTradingDate { line: usize, date: NaiveDate },
    #[error("line {line}: duplicate date {date}")]
    DuplicateDate { line: usize, date: NaiveDate },
    #[error("line {line}, column {column}: non-numeric cell {value:?}")]
    NonNumeric {
        line: usize,
        column: String,
        value: String,
    },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no date has values for every symbol")]
    EmptyIntersection,
    #[error("gap of {weekdays} weekdays between {from} and {to} exceeds {limit}")]
    Gap {
        from: NaiveDate,
        to: NaiveDate,
        weekdays: usize,
        limit: usize,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// How to interpret the numeric columns of a wide CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvFormat {
    pub default_unit: Unit,
    /// Per-symbol unit overrides.
    pub units: BTreeMap<String, Unit>,
    /// Largest tolerated run of missing weekdays between consecutive retained dates.
    pub max_gap_weekdays: usize,
}

impl Default for CsvFormat {
    fn default() -> Self {
        Self {
            default_unit: Unit::Price,
            units: BTreeMap::new(),
            max_gap_weekdays: 10,
        }
    }
}

impl CsvFormat {
    pub fn with_unit(mut self, symbol: &str, unit: Unit) -> Self {
        self.units.insert(symbol.to_string(), unit);
        self
    }

    fn unit_for(&self, symbol: &str) -> Unit {
        self.units.get(symbol).copied().unwrap_or(self.default_unit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub panel: AssetPanel,
    /// Rows discarded because at least one symbol had no value.
    pub dropped_rows: usize,
}

pub fn ingest_csv(path: impl AsRef<Path>, format: &CsvFormat) -> Result<Ingested, IngestError> {
    let file = std::fs::File::open(path)?;
    ingest_reader(file, format)
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty()
        || ["na", "nan", "null", "#n/a"]
            .iter()
            .any(|m| cell.eq_ignore_ascii_case(m))
}

pub fn ingest_reader<R: Read>(reader: R, format: &CsvFormat) -> Result<Ingested, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 2 || !header[0].trim().eq_ignore_ascii_case("date") {
        return Err(IngestError::BadHeader);
    }
    let symbols: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();

    let mut rows: Vec<(NaiveDate, usize, Vec<f64>)> = Vec::new();
    let mut dropped = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != header.len() {
            return Err(IngestError::RaggedRow {
                line,
                expected: header.len(),
                found: rec.len(),
            });
        }
        let raw_date = rec[0].trim();
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|_| {
            IngestError::MalformedDate {
                line,
                value: raw_date.to_string(),
            }
        })?;
        if matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
            return Err(IngestError::NonTradingDate { line, date });
        }
        let mut values = Vec::with_capacity(symbols.len());
        let mut complete = true;
        for (j, cell) in rec.iter().skip(1).enumerate() {
            let cell = cell.trim();
            if is_missing(cell) {
                complete = false;
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| IngestError::NonNumeric {
                line,
                column: symbols[j].clone(),
                value: cell.to_string(),
            })?;
            values.push(v);
        }
        if complete {
            rows.push((date, line, values));
        } else {
            dropped += 1;
        }
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyIntersection);
    }
    rows.sort_by_key(|r| r.0);
    for w in rows.windows(2) {
        let (prev, next) = (w[0].0, w[1].0);
        if prev == next {
            return Err(IngestError::DuplicateDate {
                line: w[1].1,
                date: next,
            });
        }
        let missing = weekdays_between(prev, next);
        if missing > format.max_gap_weekdays {
            return Err(IngestError::Gap {
                from: prev,
                to: next,
                weekdays: missing,
                limit: format.max_gap_weekdays,
            });
        }
    }

    let calendar = TradingCalendar::new(rows.iter().map(|r| r.0).collect())?;
    let columns = symbols
        .iter()
        .enumerate()
        .map(|(j, sym)| {
            (
                sym.clone(),
                rows.iter().map(|r| r.2[j]).collect(),
                format.unit_for(sym),
            )
        })
        .collect();
    Ok(Ingested {
        panel: AssetPanel::new(calendar, columns)?,
        dropped_rows: dropped,
    })
}

/// Weekdays strictly between two dates.
fn weekdays_between(a: NaiveDate, b: NaiveDate) -> usize {
    let mut n = 0;
    let mut d = a.succ_opt().expect("date overflow");
    while d < b {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            n += 1;
        }
        d = d.succ_opt().expect("date overflow");
    }
    n
}

/// Writes a panel in the same wide format `ingest_reader` accepts.
pub fn write_panel_csv<W: Write>(panel: &AssetPanel, out: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["date".to_string()];
    header.extend(panel.symbols().iter().cloned());
    w.write_record(&header)?;
    for (i, date) in panel.calendar().dates().iter().enumerate() {
        let mut rec = vec![date.format("%Y-%m-%d").to_string()];
        rec.extend(panel.series().iter().map(|s| format_value(s.values()[i])));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        // shortest representation that round-trips
        format!("{v:?}")
    }
}
