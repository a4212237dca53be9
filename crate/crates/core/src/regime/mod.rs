//! Market-regime identification: the smoothed-VIX three-state classifier and
//! a two-state Markov-switching baseline fitted by EM.

mod classify;
mod markov;

pub use classify::{
    classify, classify_signal, percentile_thresholds, signal_agreement, weekly_returns, Agreement,
    RegimeLabel, RegimePath, RegimeThresholds,
};
pub use markov::{
    fit_markov_switching, fit_markov_switching_with, run_em, single_gaussian_loglik,
    smoothed_high_prob, smoothed_probs, EmRun, MsFit, MsModel, MsOptions,
};

use thiserror::Error;

use crate::inference::InferenceError;
use crate::rolling::RollingError;
use crate::series::SeriesError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegimeError {
    #[error("thresholds must satisfy 0 < low < high (got {low}, {high})")]
    InvalidThresholds { low: f64, high: f64 },
    #[error("percentiles must satisfy 0 < p_low < p_high < 1 (got {p_low}, {p_high})")]
    InvalidPercentiles { p_low: f64, p_high: f64 },
    #[error("series has no values")]
    Empty,
    #[error("need at least {needed} observations, have {have}")]
    TooShort { needed: usize, have: usize },
    #[error("signal and probability series do not line up: {0}")]
    Misaligned(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("every restart collapsed to a degenerate variance")]
    AllRestartsDegenerate,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Rolling(#[from] RollingError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}
