//! Inference shared by the studies: Newey-West long-run variance, HAC
//! regression, circular block bootstrap, Sharpe-equality test, rank correlation.

mod bootstrap;
mod hac;
mod rank;

pub use bootstrap::{
    circular_block_bootstrap, circular_block_bootstrap_with, BootstrapCi, BootstrapSpec, Statistic,
};
pub use hac::{hac_ols, newey_west_mean_test, MeanTest, OlsFit};
pub use rank::{average_ranks, spearman};
pub use sharpe_test::{sharpe_equality_test, SharpeTest};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("need more than {needed} observations, have {have}")]
    TooShort { needed: usize, have: usize },
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("zero variance")]
    ZeroVariance,
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("invalid bootstrap spec: {0}")]
    InvalidSpec(String),
    #[error("statistic undefined on the original sample")]
    UndefinedStatistic,
    #[error("statistic undefined on {0} consecutive resamples")]
    RetryLimit(usize),
    #[error("series are perfectly dependent with different Sharpe ratios")]
    Degenerate,
}
