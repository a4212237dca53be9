use dte_core::events::EventError;
use dte_core::inference::InferenceError;
use dte_core::ingest::IngestError;
use dte_core::metrics::MetricsError;
use dte_core::model::ModelError;
use dte_core::portfolio::PortfolioError;
use dte_core::regime::RegimeError;
use dte_core::rolling::RollingError;
use dte_core::series::SeriesError;
use dte_core::synth::SynthError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{0}")]
    Unavailable(String),
    #[error("{context}: {source}")]
    Ingest {
        context: String,
        #[source]
        source: IngestError,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Rolling(#[from] RollingError),
    #[error(transparent)]
    Regime(#[from] RegimeError),
    #[error(transparent)]
    Portfolio(#[from] PortfolioError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Events(#[from] EventError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything that fails at run time.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Unavailable(_) => 2,
            _ => 1,
        }
    }
}
