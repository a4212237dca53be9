//! CSV tables, optional SVG charts, and content-hashed output files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// File name prefix, e.g. `exhibit3` or `exhibit5_boundaries`.
    pub stem: String,
    pub csv: String,
    pub svg: Option<String>,
}

impl Artifact {
    pub fn new(stem: impl Into<String>, csv: String) -> Self {
        Self {
            stem: stem.into(),
            csv,
            svg: None,
        }
    }

    pub fn with_svg(mut self, svg: String) -> Self {
        self.svg = Some(svg);
        self
    }

    /// First 16 hex digits of the SHA-256 of the CSV bytes.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.csv.as_bytes()))[..16].to_string()
    }

    pub fn file_name(&self) -> String {
        format!("{}_{}.csv", self.stem, self.hash())
    }

    pub fn header(&self) -> &str {
        self.csv.lines().next().unwrap_or("")
    }

    /// Writes the CSV (and SVG when `svg` is set) and returns the paths written.
    pub fn write(&self, dir: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(self.file_name());
        std::fs::write(&csv_path, &self.csv)?;
        let mut out = vec![csv_path];
        if let (true, Some(chart)) = (svg, &self.svg) {
            let p = dir.join(format!("{}_{}.svg", self.stem, self.hash()));
            std::fs::write(&p, chart)?;
            out.push(p);
        }
        Ok(out)
    }
}

/// Builds a CSV with proper quoting from a header and string rows.
pub fn csv_table<S: AsRef<str>>(header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(|c| c.as_ref()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

/// Fixed-precision cell; NaN becomes an empty cell.
pub fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.10}")
    }
}

pub fn opt_cell(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}

/// One named line of a time-series chart.
pub struct Line<'a> {
    pub name: &'a str,
    pub dates: &'a [NaiveDate],
    pub values: &'a [f64],
}

const W: f64 = 900.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Minimal line chart on a shared date axis. NaN values break the line.
pub fn line_chart(title: &str, lines: &[Line<'_>]) -> String {
    let all_dates = lines.iter().flat_map(|l| l.dates.iter());
    let (Some(d0), Some(d1)) = (all_dates.clone().min(), all_dates.max()) else {
        return String::new();
    };
    let finite = lines
        .iter()
        .flat_map(|l| l.values.iter().copied())
        .filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo < hi {
        (lo, hi)
    } else {
        (lo - 1.0, lo + 1.0)
    };
    let span = (*d1 - *d0).num_days().max(1) as f64;
    let x = |d: &NaiveDate| PAD + (W - 2.0 * PAD) * (*d - *d0).num_days() as f64 / span;
    let y = |v: f64| H - PAD - (H - 2.0 * PAD) * (v - lo) / (hi - lo);

    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = write!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(
        s,
        r#"<text x="{PAD}" y="20" font-size="14">{}</text>"#,
        escape(title)
    );
    let _ = write!(
        s,
        r#"<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = write!(s, r#"<text x="4" y="{:.1}">{hi:.4}</text>"#, PAD + 4.0);
    let _ = write!(s, r#"<text x="4" y="{:.1}">{lo:.4}</text>"#, H - PAD);
    let _ = write!(
        s,
        r#"<text x="{PAD}" y="{:.1}">{d0}</text>"#,
        H - PAD + 16.0
    );
    let _ = write!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{d1}</text>"#,
        W - PAD,
        H - PAD + 16.0
    );
    for (k, line) in lines.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut segment = String::new();
        let flush = |seg: &mut String, s: &mut String| {
            if !seg.is_empty() {
                let _ = write!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
                    seg.trim_end()
                );
                seg.clear();
            }
        };
        for (d, v) in line.dates.iter().zip(line.values) {
            if v.is_finite() {
                let _ = write!(segment, "{:.1},{:.1} ", x(d), y(*v));
            } else {
                flush(&mut segment, &mut s);
            }
        }
        flush(&mut segment, &mut s);
        let _ = write!(
            s,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            W - PAD - 160.0,
            PAD + 14.0 * k as f64,
            escape(line.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
