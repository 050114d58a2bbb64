//! Campaign orchestration: configuration, end-to-end runs, table output and
//! the identity self-test.

mod config;
mod run;
mod tables;
mod verify;

pub use config::{
    Campaign, CampaignFile, Number, PreparedState, Preset, StateSpec, DEFAULT_MEAN_HERALDS,
    DEFAULT_SEED,
};
pub use run::{
    correlation_label, estimator_map, expectation_label, run_campaign, setting_plan,
    CampaignMetadata, EstimatorMap, ObservableRow, PlannedSetting, ResultBundle, Runner,
    StateResult,
};
pub use tables::{emit_tables, state_text, summary_text};
pub use verify::{
    verify_identities, verify_identities_with, IdentityCheck, IdentityReport, IDENTITY_TOLERANCE,
};

use crate::counting::CountingError;
use crate::optics::OpticsError;

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("state {state}: {source}")]
    Preparation { state: String, source: OpticsError },
    #[error("state {state}: {source}")]
    Counting {
        state: String,
        source: CountingError,
    },
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CampaignError>;
