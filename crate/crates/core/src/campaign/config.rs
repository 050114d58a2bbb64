//! Campaign configuration and the state-spec grammar.
//!
//! A state is either a preset name (`"psi1"` … `"psi7"`, `"rho8"`, `"rho9"`),
//! a named amplitude triple, or a named 3×3 density matrix. Each number may be
//! a real or a `[re, im]` pair:
//!
//! ```json
//! { "states": ["psi7", "rho9",
//!              { "name": "tilted", "amplitudes": [1, 2, 0] },
//!              { "name": "half", "density": [[0.5, 0, 0], [0, 0, 0], [0, 0, 0.5]] }],
//!   "mean_heralds": 100000, "efficiency": 1.0, "seed": 1729 }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CampaignError, Result};
use crate::counting::{SimulationOptions, DEFAULT_TRIPLE_SUPPRESSION};
use crate::optics::{apparatus_forward, prepare_mixed, ApparatusConfig, MixedPreset};
use crate::qutrit::{DensityMatrix, Ket};

pub const DEFAULT_SEED: u64 = 1729;
pub const DEFAULT_MEAN_HERALDS: f64 = 1e5;

/// The nine benchmark states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// |0⟩
    Psi1,
    /// |1⟩
    Psi2,
    /// |2⟩
    Psi3,
    /// (|0⟩+|1⟩)/√2
    Psi4,
    /// (|0⟩+|2⟩)/√2
    Psi5,
    /// (|1⟩+|2⟩)/√2
    Psi6,
    /// (|0⟩+|1⟩+|2⟩)/√3
    Psi7,
    /// (|0⟩⟨0|+|2⟩⟨2|)/2
    Rho8,
    /// I/3
    Rho9,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::Psi1,
        Preset::Psi2,
        Preset::Psi3,
        Preset::Psi4,
        Preset::Psi5,
        Preset::Psi6,
        Preset::Psi7,
        Preset::Rho8,
        Preset::Rho9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Psi1 => "psi1",
            Preset::Psi2 => "psi2",
            Preset::Psi3 => "psi3",
            Preset::Psi4 => "psi4",
            Preset::Psi5 => "psi5",
            Preset::Psi6 => "psi6",
            Preset::Psi7 => "psi7",
            Preset::Rho8 => "rho8",
            Preset::Rho9 => "rho9",
        }
    }

    /// Real amplitudes for the pure presets.
    pub fn amplitudes(self) -> Option<[f64; 3]> {
        Some(match self {
            Preset::Psi1 => [1.0, 0.0, 0.0],
            Preset::Psi2 => [0.0, 1.0, 0.0],
            Preset::Psi3 => [0.0, 0.0, 1.0],
            Preset::Psi4 => [1.0, 1.0, 0.0],
            Preset::Psi5 => [1.0, 0.0, 1.0],
            Preset::Psi6 => [0.0, 1.0, 1.0],
            Preset::Psi7 => [1.0, 1.0, 1.0],
            Preset::Rho8 | Preset::Rho9 => return None,
        })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = CampaignError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CampaignError::Config(format!("unknown state preset {s:?}")))
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Number> for Complex64 {
    fn from(n: Number) -> Self {
        match n {
            Number::Real(x) => Complex64::new(x, 0.0),
            Number::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset(Preset),
    Amplitudes {
        name: String,
        amplitudes: [Number; 3],
    },
    Density {
        name: String,
        density: [[Number; 3]; 3],
    },
}

/// A state ready for measurement, with the optics that produced it.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub name: String,
    pub density: DensityMatrix,
    /// `None` for literal density matrices, which bypass the optics model.
    pub apparatus: Option<ApparatusConfig>,
}

impl StateSpec {
    pub fn name(&self) -> &str {
        match self {
            StateSpec::Preset(p) => p.name(),
            StateSpec::Amplitudes { name, .. } | StateSpec::Density { name, .. } => name,
        }
    }

    /// Runs the preparation optics, or validates a literal density matrix.
    pub fn prepare(&self) -> Result<PreparedState> {
        let name = self.name().to_owned();
        let wrap = |e: crate::optics::OpticsError| CampaignError::Preparation {
            state: name.clone(),
            source: e,
        };
        let through_optics = |config: ApparatusConfig| -> Result<PreparedState> {
            let density = apparatus_forward(&config).map_err(wrap)?;
            Ok(PreparedState {
                name: name.clone(),
                density,
                apparatus: Some(config),
            })
        };
        match self {
            StateSpec::Preset(Preset::Rho8) => through_optics(prepare_mixed(MixedPreset::Rho8)),
            StateSpec::Preset(Preset::Rho9) => through_optics(prepare_mixed(MixedPreset::Rho9)),
            StateSpec::Preset(p) => {
                let ket = Ket::from_real(p.amplitudes().expect("pure preset"))
                    .expect("preset amplitudes are nonzero");
                through_optics(ApparatusConfig::for_ket(&ket).map_err(wrap)?)
            }
            StateSpec::Amplitudes { amplitudes, .. } => {
                let [a, b, c] = amplitudes.map(Complex64::from);
                let ket = Ket::new(a, b, c).map_err(|e| wrap(e.into()))?;
                through_optics(ApparatusConfig::for_ket(&ket).map_err(wrap)?)
            }
            StateSpec::Density { density, .. } => {
                let m = Matrix3::from_fn(|r, c| Complex64::from(density[r][c]));
                let density = DensityMatrix::new(m).map_err(|e| wrap(e.into()))?;
                Ok(PreparedState {
                    name: name.clone(),
                    density,
                    apparatus: None,
                })
            }
        }
    }
}

impl FromStr for StateSpec {
    type Err = CampaignError;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(StateSpec::Preset)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub states: Vec<StateSpec>,
    pub mean_heralds: f64,
    pub efficiency: f64,
    pub seed: u64,
    /// Drop three-fold counts from the correlation estimator.
    pub zero_triple_counts: bool,
    /// Measure ⟨A_{yμ±}A_{hα}⟩ (μ = 1, 2) with ideal direct projectors
    /// instead of the basis-exchange settings.
    pub direct_h_correlations: bool,
    pub output_dir: PathBuf,
}

impl Default for Campaign {
    fn default() -> Self {
        Self {
            states: Preset::ALL.map(StateSpec::Preset).to_vec(),
            mean_heralds: DEFAULT_MEAN_HERALDS,
            efficiency: 1.0,
            seed: DEFAULT_SEED,
            zero_triple_counts: false,
            direct_h_correlations: false,
            output_dir: PathBuf::from("results"),
        }
    }
}

/// Config-file form of [`Campaign`]: present fields replace the base values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignFile {
    pub states: Option<Vec<StateSpec>>,
    pub mean_heralds: Option<f64>,
    pub efficiency: Option<f64>,
    pub seed: Option<u64>,
    pub zero_triple_counts: Option<bool>,
    pub direct_h_correlations: Option<bool>,
    pub output_dir: Option<PathBuf>,
}

impl CampaignFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CampaignError::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CampaignError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(self, base: &mut Campaign) {
        if let Some(v) = self.states {
            base.states = v;
        }
        if let Some(v) = self.mean_heralds {
            base.mean_heralds = v;
        }
        if let Some(v) = self.efficiency {
            base.efficiency = v;
        }
        if let Some(v) = self.seed {
            base.seed = v;
        }
        if let Some(v) = self.zero_triple_counts {
            base.zero_triple_counts = v;
        }
        if let Some(v) = self.direct_h_correlations {
            base.direct_h_correlations = v;
        }
        if let Some(v) = self.output_dir {
            base.output_dir = v;
        }
    }
}

impl Campaign {
    pub fn with_states(states: Vec<StateSpec>) -> Self {
        Self {
            states,
            ..Self::default()
        }
    }

    /// Parses a comma-separated preset list such as `psi1,psi7,rho9`.
    pub fn parse_state_list(list: &str) -> Result<Vec<StateSpec>> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(CampaignError::Config("campaign has no states".into()));
        }
        if !(self.mean_heralds >= 1.0 && self.mean_heralds.is_finite()) {
            return Err(CampaignError::Config(format!(
                "mean_heralds must be at least 1, got {}",
                self.mean_heralds
            )));
        }
        self.simulation_options()
            .validate()
            .map_err(|e| CampaignError::Config(e.to_string()))?;
        let mut seen = std::collections::HashSet::new();
        for s in &self.states {
            let name = s.name();
            let file_safe = !name.is_empty()
                && name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
                && !name.starts_with('.');
            if !file_safe {
                return Err(CampaignError::Config(format!(
                    "state name {name:?} must be non-empty ASCII letters, digits, '-', '_' or '.'"
                )));
            }
            if !seen.insert(name) {
                return Err(CampaignError::Config(format!(
                    "duplicate state name {name:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn simulation_options(&self) -> SimulationOptions {
        SimulationOptions {
            mean_heralds: self.mean_heralds,
            efficiency: self.efficiency,
            triple_suppression: DEFAULT_TRIPLE_SUPPRESSION,
        }
    }
}
