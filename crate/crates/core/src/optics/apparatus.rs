//! Heralded source, preparation optics and interferometer phases.
//!
//! Model, in order:
//!
//! 1. The pump leaves the laser in |V⟩ and passes HWP0.
//! 2. Type-I down-conversion in the crossed crystal pair maps pump |V⟩ to
//!    |HH⟩ and pump |H⟩ to e^{iφ}|VV⟩ (signal ⊗ idler). A D0 click on the idler
//!    traces it out.
//! 3. The signal passes HWP1 and PBS1. The transmitted (H) port is path |0⟩.
//!    The reflected (V) port passes HWP2 and PBS2: its reflected port is
//!    path |1⟩ and its transmitted port is path |2⟩. Every PBS reflection adds
//!    a π phase, which makes all amplitudes non-negative for plate angles in
//!    [0°, 45°]:
//!    `c0 = cos2θ1`, `c1 = sin2θ1·cos2θ2`, `c2 = sin2θ1·sin2θ2`.
//! 4. Tilting HWP3 adds a phase to path |1⟩, tilting HWP4 to path |2⟩.
//!    With phase randomization on, the HWP3 phase is uniform over [0, 2π) and
//!    averaged out.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Matrix3, Matrix3x2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::waveplate::{PolarizationAmplitudes, WavePlate};
use super::{OpticsError, Result};
use crate::qutrit::{DensityMatrix, Ket};

/// Amplitudes this close to the supported class are snapped onto it.
const AMPLITUDE_TOLERANCE: f64 = 1e-12;

/// How the random HWP3 phase is averaged when randomization is on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PhaseAveraging {
    /// Exact integral over a uniform phase.
    #[default]
    Analytic,
    /// Mean over `samples` uniformly drawn phases.
    Sampled { samples: usize, seed: u64 },
}

/// Complete wave-plate configuration of the setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApparatusConfig {
    #[serde(default)]
    pub hwp0: WavePlate,
    #[serde(default)]
    pub hwp1: WavePlate,
    #[serde(default)]
    pub hwp2: WavePlate,
    #[serde(default)]
    pub hwp3: WavePlate,
    #[serde(default)]
    pub hwp4: WavePlate,
    #[serde(default)]
    pub hwp5: WavePlate,
    #[serde(default)]
    pub hwp6: WavePlate,
    /// Relative phase φ of the |VV⟩ term of the down-converted pair.
    #[serde(default)]
    pub pump_entangled_phase: f64,
    #[serde(default)]
    pub phase_randomization: bool,
    #[serde(default)]
    pub phase_averaging: PhaseAveraging,
}

impl Default for ApparatusConfig {
    fn default() -> Self {
        Self {
            hwp0: WavePlate::default(),
            hwp1: WavePlate::default(),
            hwp2: WavePlate::default(),
            hwp3: WavePlate::default(),
            hwp4: WavePlate::default(),
            hwp5: WavePlate::default(),
            hwp6: WavePlate::default(),
            pump_entangled_phase: 0.0,
            phase_randomization: false,
            phase_averaging: PhaseAveraging::Analytic,
        }
    }
}

impl ApparatusConfig {
    /// Pure-state preparation: pump |V⟩, HWP1 and HWP2 at the given angles.
    pub fn pure(theta1_deg: f64, theta2_deg: f64) -> Self {
        Self {
            hwp1: WavePlate::at(theta1_deg),
            hwp2: WavePlate::at(theta2_deg),
            ..Self::default()
        }
    }

    pub fn for_ket(ket: &Ket) -> Result<Self> {
        let (t1, t2) = prepare_pure(ket)?;
        Ok(Self::pure(t1, t2))
    }

    pub fn validate(&self) -> Result<()> {
        let plates = [
            &self.hwp0, &self.hwp1, &self.hwp2, &self.hwp3, &self.hwp4, &self.hwp5, &self.hwp6,
        ];
        if let Some(k) = plates.iter().position(|p| !p.is_finite()) {
            return Err(OpticsError::InvalidConfig(format!(
                "HWP{k} has a non-finite angle or phase"
            )));
        }
        if !self.pump_entangled_phase.is_finite() {
            return Err(OpticsError::InvalidConfig(
                "pump_entangled_phase is not finite".into(),
            ));
        }
        if let PhaseAveraging::Sampled { samples: 0, .. } = self.phase_averaging {
            return Err(OpticsError::InvalidConfig(
                "sampled phase averaging needs at least one sample".into(),
            ));
        }
        Ok(())
    }
}

/// Named mixed states with a preparation recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixedPreset {
    /// (|0⟩⟨0| + |2⟩⟨2|)/2
    Rho8,
    /// I/3
    Rho9,
}

/// HWP0 angle putting weight 1/3 on pump |V⟩: ½·arccos(1/√3) ≈ 27.37°.
pub fn rho9_pump_angle_deg() -> f64 {
    0.5 * (1.0 / 3f64.sqrt()).acos().to_degrees()
}

pub fn prepare_mixed(which: MixedPreset) -> ApparatusConfig {
    match which {
        MixedPreset::Rho8 => ApparatusConfig {
            hwp0: WavePlate::at(22.5),
            hwp1: WavePlate::at(0.0),
            hwp2: WavePlate::at(45.0),
            ..ApparatusConfig::default()
        },
        MixedPreset::Rho9 => ApparatusConfig {
            hwp0: WavePlate::at(rho9_pump_angle_deg()),
            hwp1: WavePlate::at(0.0),
            hwp2: WavePlate::at(22.5),
            phase_randomization: true,
            ..ApparatusConfig::default()
        },
    }
}

/// HWP1/HWP2 angles (degrees, each in [0°, 45°]) preparing `ket`.
///
/// Only kets with real non-negative amplitudes are supported.
pub fn prepare_pure(ket: &Ket) -> Result<(f64, f64)> {
    let amps = ket.amplitudes();
    let mut c = [0.0f64; 3];
    for (k, a) in amps.iter().enumerate() {
        if a.im.abs() > AMPLITUDE_TOLERANCE || a.re < -AMPLITUDE_TOLERANCE {
            return Err(OpticsError::UnsupportedState(format!(
                "amplitude c{k} = {a} is not real and non-negative"
            )));
        }
        c[k] = a.re.max(0.0);
    }
    let rest = c[1].hypot(c[2]);
    let theta1 = 0.5 * rest.atan2(c[0]).to_degrees();
    let theta2 = if rest > 0.0 {
        0.5 * c[2].atan2(c[1]).to_degrees()
    } else {
        0.0
    };
    Ok((theta1, theta2))
}

/// Pump polarization after HWP0, for a laser emitting |V⟩.
pub fn pump_polarization(config: &ApparatusConfig) -> PolarizationAmplitudes {
    PolarizationAmplitudes::V.through(&config.hwp0)
}

/// Signal polarization density matrix after the idler is heralded at D0.
pub fn heralded_signal(config: &ApparatusConfig) -> Matrix2<Complex64> {
    let pump = pump_polarization(config);
    let phase = Complex64::from_polar(1.0, config.pump_entangled_phase);
    // Rows: signal H/V; columns: idler H/V.
    let pair = Matrix2::new(
        pump.v,
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        pump.h * phase,
    );
    let rho = pair * pair.adjoint();
    rho.unscale(rho.trace().re)
}

/// Linear map from signal polarization to path amplitudes (|0⟩, |1⟩, |2⟩).
pub fn path_encoder(config: &ApparatusConfig) -> Matrix3x2<Complex64> {
    let m1 = config.hwp1.matrix();
    let (s2, c2) = (2.0 * config.hwp2.theta_deg.to_radians()).sin_cos();
    // PBS1 reflection (−1), HWP2 on pure V, PBS2 reflection (−1) for |1⟩.
    let k = Matrix3x2::new(
        m1[(0, 0)],
        m1[(0, 1)],
        c2 * m1[(1, 0)],
        c2 * m1[(1, 1)],
        s2 * m1[(1, 0)],
        s2 * m1[(1, 1)],
    );
    k.map(|x| Complex64::new(x, 0.0))
}

fn path_phases(phi1: f64, phi2: f64) -> Matrix3<Complex64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(1.0, phi1),
        Complex64::from_polar(1.0, phi2),
    ))
}

/// Qutrit state on the three paths entering the measurement stage.
pub fn apparatus_forward(config: &ApparatusConfig) -> Result<DensityMatrix> {
    config.validate()?;
    let k = path_encoder(config);
    let rho_paths: Matrix3<Complex64> = k * heralded_signal(config) * k.adjoint();
    let phased = |extra: f64| {
        let d = path_phases(config.hwp3.tilt_phase + extra, config.hwp4.tilt_phase);
        d * rho_paths * d.adjoint()
    };
    let out = if !config.phase_randomization {
        phased(0.0)
    } else {
        match config.phase_averaging {
            PhaseAveraging::Analytic => {
                let mut m = phased(0.0);
                for (r, c) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
                    m[(r, c)] = Complex64::new(0.0, 0.0);
                }
                m
            }
            PhaseAveraging::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sum = (0..samples).fold(Matrix3::zeros(), |acc, _| {
                    acc + phased(rng.random_range(0.0..TAU))
                });
                sum.unscale(samples as f64)
            }
        }
    };
    Ok(DensityMatrix::from_trusted(out))
}
