//! Half-wave plates in the rotation convention
//! `|H⟩ → cos2θ|H⟩ + sin2θ|V⟩`, `|V⟩ → cos2θ|V⟩ − sin2θ|H⟩`.
//!
//! This is a proper rotation (det = +1) rather than the reflection of a
//! physical plate; all angle tables in this crate assume it.

use std::fmt;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Jones matrix acting on `(h, v)` column vectors.
pub fn hwp_transform(theta_deg: f64) -> Matrix2<f64> {
    let (s, c) = (2.0 * theta_deg.to_radians()).sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Polarization amplitudes in the {|H⟩, |V⟩} basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationAmplitudes {
    pub h: Complex64,
    pub v: Complex64,
}

impl PolarizationAmplitudes {
    pub const H: Self = Self {
        h: Complex64::new(1.0, 0.0),
        v: Complex64::new(0.0, 0.0),
    };
    pub const V: Self = Self {
        h: Complex64::new(0.0, 0.0),
        v: Complex64::new(1.0, 0.0),
    };

    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    pub fn through(&self, plate: &WavePlate) -> Self {
        let m = hwp_transform(plate.theta_deg).map(|x| Complex64::new(x, 0.0));
        let out = m * Vector2::new(self.h, self.v);
        Self {
            h: out[0],
            v: out[1],
        }
    }
}

/// Which plate of the setup a [`WavePlate`] stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlateRole {
    Hwp0,
    Hwp1,
    Hwp2,
    Hwp3,
    Hwp4,
    Hwp5,
    Hwp6,
}

impl fmt::Display for PlateRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = *self as u8;
        write!(f, "HWP{n}")
    }
}

/// A half-wave plate at angle `theta_deg` (mod 180°). `tilt_phase` is the
/// extra optical phase (radians) picked up by tilting it; only HWP3 and HWP4
/// use it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePlate {
    pub theta_deg: f64,
    #[serde(default)]
    pub tilt_phase: f64,
}

impl WavePlate {
    pub fn at(theta_deg: f64) -> Self {
        Self {
            theta_deg,
            tilt_phase: 0.0,
        }
    }

    pub fn tilted(theta_deg: f64, tilt_phase: f64) -> Self {
        Self {
            theta_deg,
            tilt_phase,
        }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        hwp_transform(self.theta_deg)
    }

    pub fn is_finite(&self) -> bool {
        self.theta_deg.is_finite() && self.tilt_phase.is_finite()
    }
}

impl Default for WavePlate {
    fn default() -> Self {
        Self::at(0.0)
    }
}
