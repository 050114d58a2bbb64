//! Estimators built from coincidence counts, with first-order Poisson errors.
//!
//! Every estimate here is a ratio of linear combinations of channel counts,
//! `Σ_l a_l n_l / Σ_l b_l n_l`, where the channels are D1, D2, D3 and the
//! three-fold counts T12, T13, T23. Treating the counts as independent
//! Poisson variables, the delta method gives
//! `Var = Σ_l (∂E/∂n_l)² n_l` with `∂E/∂n_l = (a_l − E·b_l) / Σ b n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::notation::compact;
use super::simulate::{triple_channel, CountRecord};
use super::{CountingError, Result};

pub const CHANNELS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

impl Estimate {
    pub fn new(value: f64, sigma: f64) -> Self {
        Self { value, sigma }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, sigma: 0.0 }
    }

    /// `value(err)` with the error rounded to two significant digits.
    pub fn compact(&self) -> String {
        compact(self.value, self.sigma)
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.compact())
    }
}

/// `Σ a·n / Σ b·n` over the six count channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimator {
    pub numerator: [f64; CHANNELS],
    pub denominator: [f64; CHANNELS],
}

impl RatioEstimator {
    /// `⟨A⟩ = 1 − 2 n_d / (n1 + n2 + n3)` for the observable on detector `d`.
    pub fn expectation(detector: usize) -> Self {
        let mut numerator = [0.0; CHANNELS];
        let mut denominator = [0.0; CHANNELS];
        for k in 0..3 {
            numerator[k] = if k == detector { -1.0 } else { 1.0 };
            denominator[k] = 1.0;
        }
        Self {
            numerator,
            denominator,
        }
    }

    /// `⟨A_iA_j⟩ = P(++) + P(−−) − P(+−) − P(−+)` for observables on
    /// detectors `di`, `dj`, with the third detector supplying `P(++)`.
    pub fn correlation(di: usize, dj: usize, include_triples: bool) -> Self {
        let mut numerator = [0.0; CHANNELS];
        let mut denominator = [0.0; CHANNELS];
        for k in 0..3 {
            numerator[k] = if k == di || k == dj { -1.0 } else { 1.0 };
            denominator[k] = 1.0;
        }
        if include_triples {
            let t = triple_channel(di, dj);
            numerator[t] = 1.0;
            denominator[t] = 1.0;
        }
        Self {
            numerator,
            denominator,
        }
    }

    fn dot(w: &[f64; CHANNELS], n: &[f64; CHANNELS]) -> f64 {
        w.iter().zip(n).map(|(a, b)| a * b).sum()
    }

    pub fn value(&self, counts: &[f64; CHANNELS]) -> Option<f64> {
        let den = Self::dot(&self.denominator, counts);
        (den > 0.0).then(|| Self::dot(&self.numerator, counts) / den)
    }

    pub fn gradient(&self, counts: &[f64; CHANNELS]) -> Option<[f64; CHANNELS]> {
        let den = Self::dot(&self.denominator, counts);
        let e = self.value(counts)?;
        let mut g = [0.0; CHANNELS];
        for (l, gl) in g.iter_mut().enumerate() {
            *gl = (self.numerator[l] - e * self.denominator[l]) / den;
        }
        Some(g)
    }

    pub fn estimate(&self, counts: &[f64; CHANNELS]) -> Option<Estimate> {
        let value = self.value(counts)?;
        let g = self.gradient(counts)?;
        let var: f64 = g.iter().zip(counts).map(|(gl, n)| gl * gl * n).sum();
        Some(Estimate::new(value, var.sqrt()))
    }
}

/// The four joint probabilities of two compatible dichotomic observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointProbabilities {
    pub p_pp: Estimate,
    pub p_pm: Estimate,
    pub p_mp: Estimate,
    pub p_mm: Estimate,
    /// Counts behind `(p_pp, p_pm, p_mp, p_mm)`.
    pub counts: [f64; 4],
}

impl JointProbabilities {
    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Builds from raw counts `(n_pp, n_pm, n_mp, n_mm)`.
    pub fn from_counts(counts: [f64; 4]) -> Option<Self> {
        let total: f64 = counts.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let est = |n: f64| {
            let p = n / total;
            Estimate::new(p, (p * (1.0 - p) / total).sqrt())
        };
        Some(Self {
            p_pp: est(counts[0]),
            p_pm: est(counts[1]),
            p_mp: est(counts[2]),
            p_mm: est(counts[3]),
            counts,
        })
    }
}

/// Joint probabilities for the observables on detectors `(di, dj)`.
///
/// `P(−,+)` is the ⟨D0,Di⟩ rate, `P(+,−)` the ⟨D0,Dj⟩ rate, `P(+,+)` the rate
/// of the remaining detector and `P(−,−)` the three-fold ⟨D0,Di,Dj⟩ rate, all
/// normalized by their sum. `include_triples = false` zeroes `P(−,−)`.
pub fn joint_probabilities(
    record: &CountRecord,
    pair: (usize, usize),
    include_triples: bool,
) -> Result<JointProbabilities> {
    let (di, dj) = pair;
    if di == dj || di > 2 || dj > 2 {
        return Err(CountingError::InvalidParameter(format!(
            "detector pair ({di}, {dj}) is not two distinct detectors"
        )));
    }
    let dk = 3 - di - dj;
    let n = record.detector_counts().map(|c| c as f64);
    let n_mm = if include_triples {
        record.triple(di, dj) as f64
    } else {
        0.0
    };
    JointProbabilities::from_counts([n[dk], n[dj], n[di], n_mm])
        .ok_or_else(|| CountingError::EmptySample(record.setting_name.clone()))
}

/// A correlation or single-observable expectation with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub sigma: f64,
    pub setting_name: Option<String>,
    pub rng_seed: Option<u64>,
}

impl CorrelationEstimate {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.sigma)
    }

    pub fn with_source(mut self, record: &CountRecord) -> Self {
        self.setting_name = Some(record.setting_name.clone());
        self.rng_seed = Some(record.rng_seed);
        self
    }
}

/// `⟨A_iA_j⟩` from the four joint probabilities, with delta-method error over
/// the four underlying Poisson counts.
pub fn correlation(jp: &JointProbabilities) -> CorrelationEstimate {
    let signs = [1.0, -1.0, -1.0, 1.0];
    let p = [jp.p_pp.value, jp.p_pm.value, jp.p_mp.value, jp.p_mm.value];
    let value: f64 = signs.iter().zip(&p).map(|(s, p)| s * p).sum();
    let total = jp.total();
    let var: f64 = signs
        .iter()
        .zip(&jp.counts)
        .map(|(s, n)| (s - value).powi(2) * n)
        .sum::<f64>()
        / (total * total);
    CorrelationEstimate {
        value,
        sigma: var.sqrt(),
        setting_name: None,
        rng_seed: None,
    }
}

/// `⟨A⟩ = 1 − 2⟨B⟩` for the observable on detector `d`.
pub fn single_expectation(record: &CountRecord, detector: usize) -> Result<CorrelationEstimate> {
    let e = RatioEstimator::expectation(detector)
        .estimate(&record.channels())
        .ok_or_else(|| CountingError::EmptySample(record.setting_name.clone()))?;
    Ok(CorrelationEstimate {
        value: e.value,
        sigma: e.sigma,
        setting_name: None,
        rng_seed: None,
    }
    .with_source(record))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: [u64; 3], t: [u64; 3]) -> CountRecord {
        CountRecord {
            setting_name: "test".into(),
            n_heralds: n.iter().sum(),
            n_d1: n[0],
            n_d2: n[1],
            n_d3: n[2],
            n_triple: t,
            n_noclick: 0,
            rng_seed: 0,
        }
    }

    #[test]
    fn perfect_correlation() {
        let jp = JointProbabilities::from_counts([10.0, 0.0, 0.0, 0.0]).unwrap();
        let c = correlation(&jp);
        assert_eq!(c.value, 1.0);
        assert_eq!(c.sigma, 0.0);
    }

    #[test]
    fn ideal_uniform_z_pair() {
        let rec = record([1000, 1000, 1000], [0; 3]);
        let jp = joint_probabilities(&rec, (0, 1), true).unwrap();
        assert!((jp.p_mp.value - 1.0 / 3.0).abs() < 1e-15);
        assert!((jp.p_pm.value - 1.0 / 3.0).abs() < 1e-15);
        assert!((jp.p_pp.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(jp.p_mm.value, 0.0);
        assert!((correlation(&jp).value + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn joint_probabilities_sum_to_one() {
        let rec = record([500, 300, 200], [3, 1, 0]);
        for pair in [(0, 1), (0, 2), (1, 2), (2, 0)] {
            for tri in [true, false] {
                let jp = joint_probabilities(&rec, pair, tri).unwrap();
                let s = jp.p_pp.value + jp.p_pm.value + jp.p_mp.value + jp.p_mm.value;
                assert!((s - 1.0).abs() < 1e-9);
            }
        }
        let jp = joint_probabilities(&rec, (0, 1), true).unwrap();
        assert!((jp.p_mm.value - 3.0 / 1003.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_routes_agree() {
        let rec = record([4120, 2981, 2899], [1, 2, 0]);
        for (di, dj) in [(0, 1), (0, 2), (1, 2)] {
            for tri in [true, false] {
                let via_jp = correlation(&joint_probabilities(&rec, (di, dj), tri).unwrap());
                let via_ratio = RatioEstimator::correlation(di, dj, tri)
                    .estimate(&rec.channels())
                    .unwrap();
                assert!((via_jp.value - via_ratio.value).abs() < 1e-14);
                assert!((via_jp.sigma - via_ratio.sigma).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn expectation_sigma_matches_binomial() {
        let rec = record([300, 350, 350], [0; 3]);
        let e = single_expectation(&rec, 0).unwrap();
        let p = 0.3;
        assert!((e.value - (1.0 - 2.0 * p)).abs() < 1e-15);
        assert!((e.sigma - 2.0 * (p * (1.0 - p) / 1000.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.setting_name.as_deref(), Some("test"));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let est = RatioEstimator::correlation(0, 2, true);
        let n = [120.0, 80.0, 300.0, 2.0, 5.0, 1.0];
        let g = est.gradient(&n).unwrap();
        for l in 0..CHANNELS {
            let h = 1e-4;
            let mut up = n;
            let mut dn = n;
            up[l] += h;
            dn[l] -= h;
            let fd = (est.value(&up).unwrap() - est.value(&dn).unwrap()) / (2.0 * h);
            assert!((fd - g[l]).abs() < 1e-9, "channel {l}");
        }
    }

    #[test]
    fn empty_record_is_an_error() {
        let rec = record([0, 0, 0], [0; 3]);
        assert!(matches!(
            joint_probabilities(&rec, (0, 1), true),
            Err(CountingError::EmptySample(_))
        ));
        assert!(single_expectation(&rec, 0).is_err());
        assert!(joint_probabilities(&record([1, 1, 1], [0; 3]), (1, 1), true).is_err());
    }

    #[test]
    fn compact_display() {
        assert_eq!(Estimate::new(0.328, 0.018).to_string(), "0.328(18)");
    }
}
