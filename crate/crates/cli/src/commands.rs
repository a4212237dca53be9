use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::artifact::Artifact;
use crate::config::RunConfig;
use crate::data::Dataset;
use crate::error::CliError;
use crate::exhibits;

#[derive(Debug, Parser)]
#[command(name = "dte", version, about = "Dynamic tracking-error studies")]
pub struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the synthetic panel and the Markov-switching restarts
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated TE ceilings, e.g. `0.005,0.01,0.05`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub caps: Option<Vec<f64>>,
    /// Comma-separated smoothing windows for the sweep.
    #[arg(long, global = true, value_delimiter = ',')]
    pub windows: Option<Vec<usize>>,
    /// Comma-separated forward-return horizons in trading days.
    #[arg(long, global = true, value_delimiter = ',')]
    pub horizons: Option<Vec<usize>>,
    /// Also write SVG charts where an exhibit has one.
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Write a synthetic regime-switching panel and its hidden states.
    Synth,
    /// Reproduce one exhibit (1-7), or `all`.
    Exhibit { which: String },
    /// Constraint spectrum with bootstrap Sharpe intervals.
    Converge,
    /// VIX-quintile forward returns and the vol-surprise regression.
    Omega,
    /// De-risking regret at crisis troughs.
    Regret,
    /// Smoothing-window robustness sweep.
    Sweep,
    /// Model proposition report.
    Props,
    /// Markov-switching fit and agreement with the VIX signal.
    Markov,
    /// Print the effective configuration as JSON.
    Config,
}

impl Cli {
    /// File values with command-line overrides applied, validated.
    pub fn resolve_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(caps) = &self.caps {
            cfg.caps = caps.clone();
        }
        if let Some(w) = &self.windows {
            cfg.sweep.windows = w.clone();
        }
        if let Some(h) = &self.horizons {
            cfg.horizons = h.clone();
        }
        cfg.svg |= self.svg;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exhibit_numbers(which: &str) -> Result<Vec<u8>, CliError> {
    if which.eq_ignore_ascii_case("all") {
        return Ok((1..=7).collect());
    }
    match which.parse::<u8>() {
        Ok(n) if (1..=7).contains(&n) => Ok(vec![n]),
        _ => Err(CliError::Config {
            field: "exhibit".into(),
            message: format!("expected 1-7 or `all`, got {which:?}"),
        }),
    }
}

/// Produces the artifacts of one command without touching the file system.
pub fn artifacts(command: &Command, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    match command {
        Command::Synth => exhibits::synth(cfg),
        Command::Props => exhibits::props(cfg),
        Command::Config => Ok(Vec::new()),
        other => {
            let ds = Dataset::load(cfg)?;
            match other {
                Command::Exhibit { which } => {
                    let mut out = Vec::new();
                    let numbers = exhibit_numbers(which)?;
                    let all = numbers.len() > 1;
                    for n in numbers {
                        match exhibits::exhibit(n, &ds, cfg) {
                            Ok(a) => out.extend(a),
                            Err(CliError::Unavailable(msg)) if all => {
                                eprintln!("skipping exhibit {n}: {msg}")
                            }
                            Err(e) => return Err(e),
                        }
                    }
                    Ok(out)
                }
                Command::Converge => exhibits::converge(&ds, cfg),
                Command::Omega => exhibits::omega(&ds, cfg),
                Command::Regret => exhibits::regret(&ds, cfg),
                Command::Sweep => exhibits::sweep(&ds, cfg),
                Command::Markov => exhibits::markov(&ds, cfg),
                Command::Synth | Command::Props | Command::Config => unreachable!("handled above"),
            }
        }
    }
}

/// Writes one line to stdout; a closed pipe downstream is not an error.
pub fn print_line(line: &str) -> Result<(), CliError> {
    match writeln!(std::io::stdout().lock(), "{line}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

/// Runs a parsed command line and returns the paths written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = cli.resolve_config()?;
    if let Command::Config = cli.command {
        print_line(&cfg.to_json())?;
        return Ok(Vec::new());
    }
    let mut written = Vec::new();
    for a in artifacts(&cli.command, &cfg)? {
        written.extend(a.write(&cfg.out, cfg.svg)?);
    }
    Ok(written)
}
