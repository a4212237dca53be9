//! Resolves a [`RunConfig`] data source into aligned series.

use std::collections::BTreeMap;
use std::path::PathBuf;

use dte_core::ingest::{ingest_reader, CsvFormat};
use dte_core::metrics::RiskFree;
use dte_core::series::{returns_from_prices, wealth_index};
use dte_core::synth::{
    synth_regime_panel, HiddenState, SynthParams, BENCH_BD, BENCH_EQ, SPREAD, VIX,
};
use dte_core::{AssetPanel, Series, TradingCalendar, Unit};

use crate::config::{ColumnKind, ColumnSource, DataSource, RunConfig};
use crate::error::CliError;

/// Everything the studies read. Return series share `calendar`; the equity
/// price and VIX histories may extend further back for the quintile study.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub calendar: TradingCalendar,
    pub eq: Series,
    pub bd: Series,
    /// Active bet: equity minus bond return, or the synthetic spread column.
    pub spread: Series,
    pub vix: Series,
    pub eq_prices_full: Series,
    pub vix_full: Series,
    pub sectors: Option<AssetPanel>,
    pub tlt: Option<Series>,
    pub rf: RiskFree,
    /// Hidden states of a synthetic panel, aligned with `calendar`.
    pub states: Option<Vec<HiddenState>>,
    /// Rows dropped per input file for missing values.
    pub dropped_rows: BTreeMap<PathBuf, usize>,
}

fn clip(s: &Series, cfg: &RunConfig) -> Result<Series, CliError> {
    let mut s = s.clone();
    if let Some(start) = cfg.start {
        s = s.starting_at(start)?;
    }
    if let Some(end) = cfg.end {
        s = s.truncate_after(end)?;
    }
    Ok(s)
}

impl Dataset {
    pub fn load(cfg: &RunConfig) -> Result<Self, CliError> {
        match &cfg.data {
            DataSource::Synthetic(params) => Self::synthetic(
                &SynthParams {
                    seed: cfg.seed,
                    ..params.clone()
                },
                cfg,
            ),
            DataSource::Files(_) => Self::from_files(cfg),
        }
    }

    pub fn synthetic(params: &SynthParams, cfg: &RunConfig) -> Result<Self, CliError> {
        let out = synth_regime_panel(params)?;
        let get = |s: &str| -> Result<Series, CliError> { clip(out.panel.require(s)?, cfg) };
        let (eq, bd, spread, vix) = (get(BENCH_EQ)?, get(BENCH_BD)?, get(SPREAD)?, get(VIX)?);
        let offset = out
            .panel
            .calendar()
            .index_of(eq.calendar().first())
            .unwrap_or(0);
        let states = out.states[offset..offset + eq.len()].to_vec();
        let eq_prices_full = wealth_index(&eq)?;
        Ok(Self {
            calendar: eq.calendar().clone(),
            vix_full: vix.clone(),
            eq,
            bd,
            spread,
            vix,
            eq_prices_full,
            sectors: None,
            tlt: None,
            rf: RiskFree::Constant(cfg.risk_free),
            states: Some(states),
            dropped_rows: BTreeMap::new(),
        })
    }

    fn from_files(cfg: &RunConfig) -> Result<Self, CliError> {
        let DataSource::Files(files) = &cfg.data else {
            unreachable!("caller checked the source");
        };
        let mut loader = Loader::default();
        let eq_raw = loader.column(&files.eq)?;
        let bd_raw = loader.column(&files.bd)?;
        let vix_full = clip(&loader.column(&files.vix)?, cfg)?;
        let eq_full = clip(&eq_raw, cfg)?;
        let (eq_prices_full, eq_returns_full) = match files.eq.kind {
            ColumnKind::Price => (eq_full.clone(), returns_from_prices(&eq_full)?),
            _ => (wealth_index(&eq_full)?, eq_full.clone()),
        };
        let bd_returns = as_returns(&clip(&bd_raw, cfg)?, files.bd.kind)?;

        let mut cal = eq_returns_full
            .calendar()
            .intersect(bd_returns.calendar())?;
        cal = cal.intersect(vix_full.calendar())?;
        let sectors = if files.sectors.is_empty() {
            None
        } else {
            let mut named = Vec::new();
            for src in &files.sectors {
                let s = as_returns(&clip(&loader.column(src)?, cfg)?, src.kind)?;
                named.push((src.column.clone(), s));
            }
            let mut scal = named[0].1.calendar().clone();
            for (_, s) in &named[1..] {
                scal = scal.intersect(s.calendar())?;
            }
            let aligned = named
                .into_iter()
                .map(|(n, s)| Ok((n, s.align_to(&scal)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            Some(AssetPanel::from_series(aligned)?)
        };
        let tlt = match &files.tlt {
            Some(src) => Some(as_returns(&clip(&loader.column(src)?, cfg)?, src.kind)?),
            None => None,
        };
        let rf = match &files.rf {
            Some(src) => {
                let raw = clip(&loader.column(src)?, cfg)?;
                let daily = match src.kind {
                    ColumnKind::Level => Series::new(
                        raw.calendar().clone(),
                        raw.values().iter().map(|y| y / 100.0 / 252.0).collect(),
                        Unit::SimpleReturn,
                    )?,
                    kind => as_returns(&raw, kind)?,
                };
                cal = cal.intersect(daily.calendar())?;
                RiskFree::Series(daily)
            }
            None => RiskFree::Constant(cfg.risk_free),
        };
        let eq = eq_returns_full.align_to(&cal)?;
        let bd = bd_returns.align_to(&cal)?;
        let spread = Series::new(
            cal.clone(),
            eq.values()
                .iter()
                .zip(bd.values())
                .map(|(e, b)| e - b)
                .collect(),
            Unit::SimpleReturn,
        )?;
        Ok(Self {
            vix: vix_full.align_to(&cal)?,
            calendar: cal,
            eq,
            bd,
            spread,
            eq_prices_full,
            vix_full,
            sectors,
            tlt,
            rf,
            states: None,
            dropped_rows: loader.dropped,
        })
    }

    pub fn is_synthetic(&self) -> bool {
        self.states.is_some()
    }
}

fn as_returns(s: &Series, kind: ColumnKind) -> Result<Series, CliError> {
    match kind {
        ColumnKind::Price => Ok(returns_from_prices(s)?),
        ColumnKind::Return => Ok(s.clone()),
        ColumnKind::Level => Ok(returns_from_prices(&s.with_unit(Unit::Price)?)?),
    }
}

#[derive(Default)]
struct Loader {
    panels: BTreeMap<(PathBuf, String), Series>,
    dropped: BTreeMap<PathBuf, usize>,
}

impl Loader {
    /// Reads one column; a file is parsed once per requested column so that
    /// missing cells in unrelated columns never drop rows.
    fn column(&mut self, src: &ColumnSource) -> Result<Series, CliError> {
        let key = (src.path.clone(), src.column.clone());
        if let Some(s) = self.panels.get(&key) {
            return Ok(s.clone());
        }
        let unit = match src.kind {
            ColumnKind::Price => Unit::Price,
            ColumnKind::Return => Unit::SimpleReturn,
            ColumnKind::Level => Unit::Level,
        };
        let text = std::fs::read_to_string(&src.path)?;
        let projected = project(&text, &src.column).ok_or_else(|| CliError::Config {
            field: format!("column {}", src.column),
            message: format!(
                "missing from {} or the file is not a readable CSV",
                src.path.display()
            ),
        })?;
        let format = CsvFormat {
            default_unit: unit,
            ..Default::default()
        };
        let ingested =
            ingest_reader(projected.as_bytes(), &format).map_err(|e| CliError::Ingest {
                context: src.path.display().to_string(),
                source: e,
            })?;
        *self.dropped.entry(src.path.clone()).or_default() += ingested.dropped_rows;
        let s = ingested.panel.require(&src.column)?.clone();
        self.panels.insert(key, s.clone());
        Ok(s)
    }
}

/// Keeps the date column and one named column of a wide CSV.
fn project(text: &str, column: &str) -> Option<String> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = rdr.headers().ok()?.clone();
    let idx = header.iter().position(|h| h.trim() == column)?;
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record([header.get(0)?, column]).ok()?;
    for rec in rdr.records() {
        let rec = rec.ok()?;
        out.write_record([rec.get(0).unwrap_or(""), rec.get(idx).unwrap_or("")])
            .ok()?;
    }
    String::from_utf8(out.into_inner().ok()?).ok()
}
