//! Circular block bootstrap with percentile confidence intervals.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::InferenceError;
use crate::exec::Execution;
use crate::metrics;
use crate::stats::quantile_sorted;

/// Redraws allowed per iteration when the statistic is undefined on a resample.
const MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapSpec {
    pub block: usize,
    pub iterations: usize,
    pub seed: u64,
    pub confidence: f64,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        Self {
            block: 63,
            iterations: 10_000,
            seed: 20_260_201,
            confidence: 0.95,
        }
    }
}

impl BootstrapSpec {
    pub fn validate(&self) -> Result<(), InferenceError> {
        if self.block < 1 {
            return Err(InferenceError::InvalidSpec("block must be >= 1".into()));
        }
        if self.iterations < 1 {
            return Err(InferenceError::InvalidSpec(
                "iterations must be >= 1".into(),
            ));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(InferenceError::InvalidSpec(format!(
                "confidence {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

pub type StatFn = dyn Fn(&[f64]) -> Option<f64> + Send + Sync;

/// Statistic evaluated on each resample; `None` marks an undefined value.
#[derive(Clone)]
pub enum Statistic {
    /// Annualized Sharpe ratio against a constant annualized risk-free rate.
    Sharpe {
        rf: f64,
    },
    Cagr,
    Custom(Arc<StatFn>),
}

impl fmt::Debug for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Sharpe { rf } => write!(f, "Sharpe {{ rf: {rf} }}"),
            Statistic::Cagr => write!(f, "Cagr"),
            Statistic::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Statistic {
    fn eval(&self, x: &[f64]) -> Option<f64> {
        match self {
            Statistic::Sharpe { rf } => metrics::sharpe_ratio(x, *rf).ok(),
            Statistic::Cagr => metrics::cagr(x).ok(),
            Statistic::Custom(f) => f(x),
        }
        .filter(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub point: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub iterations: usize,
}

impl BootstrapCi {
    pub fn width(&self) -> f64 {
        self.ci_hi - self.ci_lo
    }
}

/// Concatenates blocks of `block` consecutive observations starting at
/// uniformly drawn offsets, wrapping past the end, until `n` values are drawn.
fn resample_into(x: &[f64], block: usize, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
    let n = x.len();
    out.clear();
    while out.len() < n {
        let start = rng.random_range(0..n);
        let take = block.min(n - out.len());
        out.extend((0..take).map(|k| x[(start + k) % n]));
    }
}

pub fn circular_block_bootstrap(
    returns: &[f64],
    spec: &BootstrapSpec,
    statistic: &Statistic,
) -> Result<BootstrapCi, InferenceError> {
    circular_block_bootstrap_with(returns, spec, statistic, Execution::default())
}

/// Iteration `i` draws from RNG stream `i` of `spec.seed`, so the interval
/// does not depend on how iterations are scheduled.
pub fn circular_block_bootstrap_with(
    returns: &[f64],
    spec: &BootstrapSpec,
    statistic: &Statistic,
    exec: Execution,
) -> Result<BootstrapCi, InferenceError> {
    spec.validate()?;
    if returns.len() < spec.block {
        return Err(InferenceError::TooShort {
            needed: spec.block,
            have: returns.len(),
        });
    }
    let point = statistic
        .eval(returns)
        .ok_or(InferenceError::UndefinedStatistic)?;
    let draws = exec.map_indices(spec.iterations, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(i as u64);
        let mut buf = Vec::with_capacity(returns.len());
        for _ in 0..MAX_RETRIES {
            resample_into(returns, spec.block, &mut rng, &mut buf);
            if let Some(v) = statistic.eval(&buf) {
                return Some(v);
            }
        }
        None
    });
    let mut values = draws
        .into_iter()
        .collect::<Option<Vec<f64>>>()
        .ok_or(InferenceError::RetryLimit(MAX_RETRIES))?;
    values.sort_by(f64::total_cmp);
    let tail = (1.0 - spec.confidence) / 2.0;
    Ok(BootstrapCi {
        point,
        ci_lo: quantile_sorted(&values, tail),
        ci_hi: quantile_sorted(&values, 1.0 - tail),
        iterations: spec.iterations,
    })
}
