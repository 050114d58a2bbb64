//! Heralded photon counting and the statistics built on it.

mod bootstrap;
mod estimate;
mod notation;
mod report;
mod simulate;

pub use bootstrap::bootstrap_sigma;
pub use estimate::{
    correlation, joint_probabilities, single_expectation, CorrelationEstimate, Estimate,
    JointProbabilities, RatioEstimator, CHANNELS,
};
pub use notation::{compact, parse_compact};
pub use report::{
    build_report, combine, EstimateSource, InequalityReport, ObservableEstimates, TrackedEstimate,
};
pub use simulate::{
    click_probabilities, click_probabilities_with, post_select, sample_counts, simulate_counts,
    stream_seed, triple_channel, ClickDistribution, CountRecord, SimulationOptions,
    DEFAULT_TRIPLE_SUPPRESSION, DETECTOR_PAIRS,
};

use crate::optics::OpticsError;

#[derive(Debug, thiserror::Error)]
pub enum CountingError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no coincidences recorded for {0}")]
    EmptySample(String),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

pub type Result<T> = std::result::Result<T, CountingError>;
