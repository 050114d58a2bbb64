//! Heralded coincidence counts for one measurement setting.

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{CountingError, Result};
use crate::optics::{BasisExchange, MeasurementSetting};
use crate::qutrit::DensityMatrix;

/// Three-fold coincidences relative to the geometric mean of the two
/// two-fold rates involved.
pub const DEFAULT_TRIPLE_SUPPRESSION: f64 = 1e-4;

/// Detector pairs in the order used by [`CountRecord::n_triple`].
pub const DETECTOR_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub mean_heralds: f64,
    /// Per-path transmission η; a lost photon produces no D1–D3 click.
    pub efficiency: f64,
    pub triple_suppression: f64,
}

impl SimulationOptions {
    pub fn new(mean_heralds: f64, efficiency: f64) -> Self {
        Self {
            mean_heralds,
            efficiency,
            triple_suppression: DEFAULT_TRIPLE_SUPPRESSION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_heralds > 0.0 && self.mean_heralds.is_finite()) {
            return Err(CountingError::InvalidParameter(format!(
                "mean_heralds must be positive, got {}",
                self.mean_heralds
            )));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(CountingError::InvalidParameter(format!(
                "efficiency must lie in (0, 1], got {}",
                self.efficiency
            )));
        }
        if !(self.triple_suppression >= 0.0 && self.triple_suppression.is_finite()) {
            return Err(CountingError::InvalidParameter(format!(
                "triple_suppression must be non-negative, got {}",
                self.triple_suppression
            )));
        }
        Ok(())
    }
}

/// Raw counts of one simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting_name: String,
    pub n_heralds: u64,
    pub n_d1: u64,
    pub n_d2: u64,
    pub n_d3: u64,
    /// ⟨D0,D1,D2⟩, ⟨D0,D1,D3⟩, ⟨D0,D2,D3⟩.
    pub n_triple: [u64; 3],
    pub n_noclick: u64,
    pub rng_seed: u64,
}

impl CountRecord {
    pub fn detector_counts(&self) -> [u64; 3] {
        [self.n_d1, self.n_d2, self.n_d3]
    }

    pub fn total_coincidences(&self) -> u64 {
        self.n_d1 + self.n_d2 + self.n_d3
    }

    pub fn triple(&self, di: usize, dj: usize) -> u64 {
        self.n_triple[triple_channel(di, dj) - 3]
    }

    /// Counts in channel order D1, D2, D3, T12, T13, T23.
    pub fn channels(&self) -> [f64; 6] {
        [
            self.n_d1 as f64,
            self.n_d2 as f64,
            self.n_d3 as f64,
            self.n_triple[0] as f64,
            self.n_triple[1] as f64,
            self.n_triple[2] as f64,
        ]
    }
}

/// Channel index of the three-fold count for detectors `di`, `dj`.
pub fn triple_channel(di: usize, dj: usize) -> usize {
    let key = (di.min(dj), di.max(dj));
    3 + DETECTOR_PAIRS
        .iter()
        .position(|p| *p == key)
        .unwrap_or_else(|| panic!("no detector pair ({di}, {dj})"))
}

/// Born-rule click probabilities `[D1, D2, D3, no-click]` for detection
/// projectors applied to the (optionally relabeled) state.
pub fn click_probabilities_with(
    state: &DensityMatrix,
    projectors: &[Matrix3<Complex64>; 3],
    relabeling: Option<BasisExchange>,
    efficiency: f64,
) -> [f64; 4] {
    let rho = match relabeling {
        Some(x) => state.permuted(x.permutation()),
        None => state.clone(),
    };
    let mut p = [0.0; 4];
    for (k, proj) in projectors.iter().enumerate() {
        p[k] = efficiency * (rho.matrix() * proj).trace().re.clamp(0.0, 1.0);
    }
    p[3] = (1.0 - p[0] - p[1] - p[2]).max(0.0);
    p
}

pub fn click_probabilities(
    state: &DensityMatrix,
    setting: &MeasurementSetting,
    efficiency: f64,
) -> Result<[f64; 4]> {
    setting.validate()?;
    let projectors = [0, 1, 2].map(|k| *setting.detector_projectors[k].matrix());
    Ok(click_probabilities_with(
        state,
        &projectors,
        setting.relabeling,
        efficiency,
    ))
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p).expect("p in (0,1)").sample(rng)
    }
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean)
            .expect("positive finite mean")
            .sample(rng) as u64
    }
}

/// Draws one run from precomputed click probabilities `[D1, D2, D3, no-click]`.
pub fn sample_counts(
    setting_name: &str,
    probabilities: [f64; 4],
    options: &SimulationOptions,
    seed: u64,
) -> Result<CountRecord> {
    options.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_heralds = poisson(&mut rng, options.mean_heralds);
    // Multinomial split by successive conditional binomials.
    let mut remaining = n_heralds;
    let mut mass = 1.0;
    let mut d = [0u64; 3];
    for k in 0..3 {
        let p = if mass > 0.0 {
            (probabilities[k] / mass).min(1.0)
        } else {
            0.0
        };
        d[k] = binomial(&mut rng, remaining, p);
        remaining -= d[k];
        mass -= probabilities[k];
    }
    let n_triple = DETECTOR_PAIRS.map(|(i, j)| {
        let mean = options.triple_suppression * ((d[i] as f64) * (d[j] as f64)).sqrt();
        poisson(&mut rng, mean)
    });
    Ok(CountRecord {
        setting_name: setting_name.to_owned(),
        n_heralds,
        n_d1: d[0],
        n_d2: d[1],
        n_d3: d[2],
        n_triple,
        n_noclick: remaining,
        rng_seed: seed,
    })
}

/// Simulates heralded counts for `setting` on `state`.
pub fn simulate_counts(
    state: &DensityMatrix,
    setting: &MeasurementSetting,
    options: &SimulationOptions,
    seed: u64,
) -> Result<CountRecord> {
    options.validate()?;
    let p = click_probabilities(state, setting, options.efficiency)?;
    sample_counts(&setting.name, p, options, seed)
}

/// Click distribution conditioned on at least one of D1–D3 firing.
///
/// Discarding no-click heralds is only unbiased under the fair-sampling
/// assumption: detected photons must represent all heralded photons. The
/// simulator's path-independent loss satisfies it by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickDistribution {
    pub probabilities: [f64; 3],
    pub clicks: u64,
    pub heralds: u64,
}

impl ClickDistribution {
    pub fn detection_fraction(&self) -> f64 {
        if self.heralds == 0 {
            0.0
        } else {
            self.clicks as f64 / self.heralds as f64
        }
    }
}

pub fn post_select(record: &CountRecord) -> Result<ClickDistribution> {
    let total = record.total_coincidences();
    if total == 0 {
        return Err(CountingError::EmptySample(record.setting_name.clone()));
    }
    let t = total as f64;
    Ok(ClickDistribution {
        probabilities: record.detector_counts().map(|n| n as f64 / t),
        clicks: total,
        heralds: record.n_heralds,
    })
}

/// Per-run seed derived from the master seed and the run's coordinates with
/// SplitMix64 finalizers, so a run's stream does not depend on how many other
/// runs exist or in which order they execute.
pub fn stream_seed(master: u64, state_index: u64, setting_index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(master) ^ state_index) ^ setting_index.rotate_left(32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::measurement_settings;
    use crate::qutrit::Ket;

    fn z_setting() -> MeasurementSetting {
        measurement_settings().remove(0)
    }

    #[test]
    fn eigenstate_clicks_only_d1() {
        let rec = simulate_counts(
            &Ket::basis(0).density(),
            &z_setting(),
            &SimulationOptions::new(1e4, 1.0),
            3,
        )
        .unwrap();
        assert_eq!(rec.n_d2 + rec.n_d3 + rec.n_noclick, 0);
        assert_eq!(rec.n_d1, rec.n_heralds);
        assert_eq!(rec.n_triple, [0, 0, 0]);
    }

    #[test]
    fn uniform_state_splits_evenly() {
        let rec = simulate_counts(
            &Ket::uniform().density(),
            &z_setting(),
            &SimulationOptions::new(3e5, 1.0),
            5,
        )
        .unwrap();
        let n = rec.n_heralds as f64;
        let sd = (n * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in rec.detector_counts() {
            assert!((c as f64 - n / 3.0).abs() < 5.0 * sd);
        }
        // Poisson herald total.
        assert!((n - 3e5).abs() < 5.0 * 3e5f64.sqrt());
    }

    #[test]
    fn seeded_runs_are_identical() {
        let opts = SimulationOptions::new(1e4, 0.7);
        let s = Ket::uniform().density();
        let a = simulate_counts(&s, &z_setting(), &opts, 99).unwrap();
        let b = simulate_counts(&s, &z_setting(), &opts, 99).unwrap();
        let c = simulate_counts(&s, &z_setting(), &opts, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn counts_never_exceed_heralds() {
        let rec = simulate_counts(
            &Ket::uniform().density(),
            &z_setting(),
            &SimulationOptions::new(1e4, 0.3),
            1,
        )
        .unwrap();
        assert!(rec.total_coincidences() + rec.n_noclick <= rec.n_heralds);
    }

    #[test]
    fn triple_counts_are_rare() {
        let rec = simulate_counts(
            &Ket::uniform().density(),
            &z_setting(),
            &SimulationOptions::new(1e6, 1.0),
            8,
        )
        .unwrap();
        let ratio = rec.n_triple[0] as f64 / rec.n_d1 as f64;
        assert!(ratio > 2e-5 && ratio < 5e-4, "{ratio}");
    }

    #[test]
    fn probabilities_with_loss_sum_to_one() {
        let p = click_probabilities(&Ket::uniform().density(), &z_setting(), 0.4).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p[3] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        let s = Ket::uniform().density();
        for opts in [
            SimulationOptions::new(0.0, 1.0),
            SimulationOptions::new(10.0, 0.0),
            SimulationOptions::new(10.0, 1.5),
        ] {
            assert!(matches!(
                simulate_counts(&s, &z_setting(), &opts, 0),
                Err(CountingError::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn invalid_setting_rejected() {
        let mut bad = z_setting();
        bad.detector_projectors[2] = bad.detector_projectors[1].clone();
        assert!(matches!(
            simulate_counts(
                &Ket::uniform().density(),
                &bad,
                &SimulationOptions::new(10.0, 1.0),
                0
            ),
            Err(CountingError::Optics(_))
        ));
    }

    #[test]
    fn post_selection() {
        let opts = SimulationOptions::new(1e4, 1.0);
        let rec = simulate_counts(&Ket::uniform().density(), &z_setting(), &opts, 2).unwrap();
        let ps = post_select(&rec).unwrap();
        assert_eq!(ps.clicks, rec.n_heralds);
        assert_eq!(ps.detection_fraction(), 1.0);
        assert!((ps.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let empty = CountRecord {
            setting_name: "Z".into(),
            n_heralds: 10,
            n_d1: 0,
            n_d2: 0,
            n_d3: 0,
            n_triple: [0; 3],
            n_noclick: 10,
            rng_seed: 0,
        };
        assert!(matches!(post_select(&empty), Err(CountingError::EmptySample(s)) if s == "Z"));
    }

    #[test]
    fn half_efficiency_keeps_normalized_distribution() {
        let s = Ket::uniform().density();
        let full = post_select(
            &simulate_counts(&s, &z_setting(), &SimulationOptions::new(2e5, 1.0), 4).unwrap(),
        )
        .unwrap();
        let half_rec =
            simulate_counts(&s, &z_setting(), &SimulationOptions::new(2e5, 0.5), 4).unwrap();
        let half = post_select(&half_rec).unwrap();
        for k in 0..3 {
            let sd =
                ((1.0 / 3.0) * (2.0 / 3.0) * (1.0 / full.clicks as f64 + 1.0 / half.clicks as f64))
                    .sqrt();
            assert!((full.probabilities[k] - half.probabilities[k]).abs() < 4.0 * sd);
        }
        assert!((half.detection_fraction() - 0.5).abs() < 0.01);
    }

    #[test]
    fn stream_seeds_differ_by_coordinate() {
        let a = stream_seed(1, 0, 0);
        assert_ne!(a, stream_seed(1, 0, 1));
        assert_ne!(a, stream_seed(1, 1, 0));
        assert_ne!(stream_seed(1, 1, 0), stream_seed(1, 0, 1));
        assert_eq!(a, stream_seed(1, 0, 0));
    }
}
