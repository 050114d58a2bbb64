//! Measurement settings and the two-stage interferometric network.
//!
//! HWP5 mixes paths |0⟩,|1⟩ and HWP6 then mixes paths |1⟩,|2⟩. Each stage
//! merges two paths into orthogonal polarizations of one beam, rotates them
//! with the plate, and separates them again on a PBS, so it acts on the pair
//! of path amplitudes as [`hwp_transform`](super::hwp_transform). Detectors
//! D1, D2, D3 sit on output paths 0, 1, 2, hence detector `k` projects onto
//! row `k` of `U = R₁₂(θ6)·R₀₁(θ5)`:
//!
//! ```text
//! D1: ( cos2θ5,         −sin2θ5,          0      )
//! D2: ( cos2θ6·sin2θ5,   cos2θ6·cos2θ5,  −sin2θ6 )
//! D3: ( sin2θ6·sin2θ5,   sin2θ6·cos2θ5,   cos2θ6 )
//! ```

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::waveplate::hwp_transform;
use super::{OpticsError, Result};
use crate::qutrit::{h_completion, projector, Projector, Ray, YuOh};

/// Fidelity a realized detector projector must reach against its target.
pub const REALIZATION_FIDELITY: f64 = 1.0 - 1e-10;
/// Tolerance for a setting's projectors to form a resolution of identity.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-12;

/// Relabeling of the input state used to reach correlations the network
/// cannot measure directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisExchange {
    /// |2⟩ ↔ |0⟩
    #[serde(rename = "2<->0")]
    Swap20,
    /// |2⟩ ↔ |1⟩
    #[serde(rename = "2<->1")]
    Swap21,
}

impl BasisExchange {
    /// `perm[k]` is the image of basis index `k`. Both are involutions.
    pub fn permutation(self) -> [usize; 3] {
        match self {
            BasisExchange::Swap20 => [2, 1, 0],
            BasisExchange::Swap21 => [0, 2, 1],
        }
    }
}

impl fmt::Display for BasisExchange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisExchange::Swap20 => "2<->0",
            BasisExchange::Swap21 => "2<->1",
        })
    }
}

/// One configuration of the detectors: the projectors D1, D2, D3 realize, and
/// an optional basis exchange applied to the input state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    pub name: String,
    pub detector_projectors: [Projector; 3],
    pub relabeling: Option<BasisExchange>,
}

impl MeasurementSetting {
    pub fn new(
        name: impl Into<String>,
        rays: [Ray; 3],
        relabeling: Option<BasisExchange>,
    ) -> Result<Self> {
        let [a, b, c] = rays;
        let setting = Self {
            name: name.into(),
            detector_projectors: [projector(&a)?, projector(&b)?, projector(&c)?],
            relabeling,
        };
        setting.validate()?;
        Ok(setting)
    }

    /// Checks mutual orthogonality and completeness.
    pub fn validate(&self) -> Result<()> {
        let sum = self
            .detector_projectors
            .iter()
            .fold(Matrix3::zeros(), |acc, p| acc + p.matrix());
        let dev = (sum - Matrix3::<Complex64>::identity()).camax();
        if dev > COMPLETENESS_TOLERANCE {
            return Err(OpticsError::InvalidSetting {
                setting: self.name.clone(),
                reason: format!("projectors sum to identity only within {dev:e}"),
            });
        }
        for i in 0..3 {
            for j in i + 1..3 {
                let o = self.detector_projectors[i].overlap(&self.detector_projectors[j]);
                if o.abs() > COMPLETENESS_TOLERANCE {
                    return Err(OpticsError::InvalidSetting {
                        setting: self.name.clone(),
                        reason: format!("D{} and D{} overlap by {o:e}", i + 1, j + 1),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn ray_at(&self, detector: usize) -> &Ray {
        self.detector_projectors[detector].source()
    }

    /// The Yu–Oh observable detector `detector` reports on, in the frame of
    /// the original (un-relabeled) state.
    pub fn observable_at(&self, detector: usize) -> Option<YuOh> {
        let ray = self.ray_at(detector);
        let comps = match self.relabeling {
            None => ray.components,
            Some(x) => ray.permuted(x.permutation(), "").components,
        };
        YuOh::parallel_to(comps)
    }

    pub fn detector_of(&self, y: YuOh) -> Option<usize> {
        (0..3).find(|&d| self.observable_at(d) == Some(y))
    }

    /// Detector pairs reporting on two Yu–Oh observables, as
    /// `((detector_i, detector_j), (observable_i, observable_j))`.
    pub fn observable_pairs(&self) -> Vec<((usize, usize), (YuOh, YuOh))> {
        let mut out = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                if let (Some(a), Some(b)) = (self.observable_at(i), self.observable_at(j)) {
                    out.push(((i, j), (a, b)));
                }
            }
        }
        out
    }
}

fn setting(name: &str, rays: [Ray; 3], relabeling: Option<BasisExchange>) -> MeasurementSetting {
    MeasurementSetting::new(name, rays, relabeling).expect("built-in settings are complete")
}

fn h_setting(y: YuOh, h: YuOh, relabeling: Option<BasisExchange>) -> MeasurementSetting {
    let name = match relabeling {
        None => h.label().to_uppercase(),
        Some(x) => format!("{}[{x}]", h.label().to_uppercase()),
    };
    setting(
        &name,
        [y.ray(), h.ray(), h_completion(h).expect("h ray")],
        relabeling,
    )
}

/// The eight directly realizable settings followed by the eight relabeled
/// ones. Together they yield all 13 ⟨A_i⟩ and all 24 ⟨A_iA_j⟩.
pub fn measurement_settings() -> Vec<MeasurementSetting> {
    use YuOh::*;
    let mut out = vec![
        setting("Z", [Z1.ray(), Z2.ray(), Z3.ray()], None),
        setting("Y1", [Z1.ray(), Y1Minus.ray(), Y1Plus.ray()], None),
        setting("Y2", [Z2.ray(), Y2Minus.ray(), Y2Plus.ray()], None),
        setting("Y3", [Y3Minus.ray(), Y3Plus.ray(), Z3.ray()], None),
    ];
    let h_pairs = [(Y3Minus, H0), (Y3Plus, H1), (Y3Plus, H2), (Y3Minus, H3)];
    for (y, h) in h_pairs {
        out.push(h_setting(y, h, None));
    }
    for x in [BasisExchange::Swap20, BasisExchange::Swap21] {
        for (y, h) in h_pairs {
            out.push(h_setting(y, h, Some(x)));
        }
    }
    out
}

/// Settings measuring the eight ⟨A_{yμ±}A_{hα}⟩ (μ = 1, 2) with ideal
/// projectors {y, h, y×h}, bypassing the relabeling. The two-stage network
/// cannot realize these; they serve as a cross-check.
pub fn direct_h_settings() -> Vec<MeasurementSetting> {
    use YuOh::*;
    let pairs = [
        (Y1Minus, H0),
        (Y1Minus, H1),
        (Y1Plus, H2),
        (Y1Plus, H3),
        (Y2Minus, H0),
        (Y2Minus, H2),
        (Y2Plus, H1),
        (Y2Plus, H3),
    ];
    pairs
        .iter()
        .map(|&(y, h)| {
            let c = y
                .ray()
                .cross(&h.ray(), format!("{}x{}", y.label(), h.label()));
            setting(
                &format!("D:{},{}", y.label(), h.label()),
                [y.ray(), h.ray(), c],
                None,
            )
        })
        .collect()
}

/// Unit detection vectors for D1, D2, D3 at the given plate angles.
pub fn detection_basis(theta5_deg: f64, theta6_deg: f64) -> [Vector3<f64>; 3] {
    let r5 = hwp_transform(theta5_deg);
    let r6 = hwp_transform(theta6_deg);
    let mut stage5 = Matrix3::<f64>::identity();
    stage5.fixed_view_mut::<2, 2>(0, 0).copy_from(&r5);
    let mut stage6 = Matrix3::<f64>::identity();
    stage6.fixed_view_mut::<2, 2>(1, 1).copy_from(&r6);
    let u = stage6 * stage5;
    [0, 1, 2].map(|k| u.row(k).transpose())
}

pub fn detection_projectors(theta5_deg: f64, theta6_deg: f64) -> [Matrix3<Complex64>; 3] {
    detection_basis(theta5_deg, theta6_deg).map(|v| {
        let c = v.map(|x| Complex64::new(x, 0.0));
        c * c.adjoint()
    })
}

/// Unit vector of a rank-one projector with its largest entry real positive.
fn unit_vector(p: &Projector) -> Vector3<Complex64> {
    let m = p.matrix();
    let k = (0..3)
        .max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))
        .expect("3 entries");
    m.column(k).unscale(m[(k, k)].re.sqrt())
}

/// Folds `2θ` (degrees) into `θ ∈ [0°, 90°)`.
fn half_angle(two_theta_deg: f64) -> f64 {
    let t = 0.5 * two_theta_deg.rem_euclid(180.0);
    // Fold values a rounding error below 90° back to 0° and drop the sign of -0.
    if t > 90.0 - 1e-9 {
        0.0
    } else {
        t + 0.0
    }
}

/// HWP5/HWP6 angles realizing `setting`, each in [0°, 90°).
pub fn solve_measurement_angles(setting: &MeasurementSetting) -> Result<(f64, f64)> {
    let unrealizable = |detector: usize| OpticsError::Unrealizable {
        setting: setting.name.clone(),
        detector: detector + 1,
        projector: setting.ray_at(detector).to_string(),
    };
    // D1 must lie in the span of paths 0 and 1.
    let u1 = unit_vector(&setting.detector_projectors[0]);
    if u1[2].norm_sqr() > 1.0 - REALIZATION_FIDELITY {
        return Err(unrealizable(0));
    }
    let theta5 = half_angle((-u1[1].re).atan2(u1[0].re).to_degrees());

    let (s5, c5) = (2.0 * theta5.to_radians()).sin_cos();
    let w1 = Vector3::new(s5, c5, 0.0).map(|x| Complex64::new(x, 0.0));
    let u2 = unit_vector(&setting.detector_projectors[1]);
    let alpha = w1.dotc(&u2);
    let beta = u2[2];
    // Strip a common phase so both coefficients are real.
    let anchor = if alpha.norm() >= beta.norm() {
        alpha
    } else {
        beta
    };
    let phase = anchor.conj() / anchor.norm();
    let (a, b) = ((alpha * phase).re, (beta * phase).re);
    let theta6 = half_angle((-b).atan2(a).to_degrees());

    let realized = detection_projectors(theta5, theta6);
    for (d, target) in setting.detector_projectors.iter().enumerate() {
        let f = (realized[d] * target.matrix()).trace().re;
        if f < REALIZATION_FIDELITY {
            return Err(unrealizable(d));
        }
    }
    Ok((theta5, theta6))
}
