//! Deterministic engine for dynamic tracking-error research: calendar-aligned
//! series, rolling statistics, VIX regime classification, TE-targeted overlay
//! simulation, event studies, inference and closed-form model checks.

pub mod events;
pub mod exec;
pub mod inference;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod portfolio;
pub mod regime;
pub mod rolling;
pub mod series;
pub mod stats;
pub mod synth;

pub use exec::Execution;
pub use series::{AssetPanel, Series, TradingCalendar, Unit};
