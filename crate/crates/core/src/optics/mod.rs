//! Jones-calculus model of the preparation and measurement optics.

mod apparatus;
mod measurement;
pub mod tables;
mod waveplate;

pub use apparatus::{
    apparatus_forward, heralded_signal, path_encoder, prepare_mixed, prepare_pure,
    pump_polarization, rho9_pump_angle_deg, ApparatusConfig, MixedPreset, PhaseAveraging,
};
pub use measurement::{
    detection_basis, detection_projectors, direct_h_settings, measurement_settings,
    solve_measurement_angles, BasisExchange, MeasurementSetting, COMPLETENESS_TOLERANCE,
    REALIZATION_FIDELITY,
};
pub use waveplate::{hwp_transform, PlateRole, PolarizationAmplitudes, WavePlate};

use crate::qutrit::QutritError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpticsError {
    #[error("state cannot be prepared: {0}")]
    UnsupportedState(String),
    #[error("invalid apparatus configuration: {0}")]
    InvalidConfig(String),
    #[error("setting {setting}: {reason}")]
    InvalidSetting { setting: String, reason: String },
    #[error("setting {setting} is not realizable: D{detector} cannot project onto {projector}")]
    Unrealizable {
        setting: String,
        detector: usize,
        projector: String,
    },
    #[error(transparent)]
    Qutrit(#[from] QutritError),
}

pub type Result<T> = std::result::Result<T, OpticsError>;
