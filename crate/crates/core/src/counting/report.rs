//! Inequality left-hand sides assembled from per-setting estimates.
//!
//! Estimates drawn from the same run share counts and are correlated, so the
//! variance of a linear combination is computed run by run: the gradients of
//! all terms using one run are summed before squaring. Different runs are
//! independent.

use serde::{Deserialize, Serialize};

use super::estimate::{Estimate, RatioEstimator, CHANNELS};
use super::simulate::CountRecord;
use super::{CountingError, Result};
use crate::qutrit::{
    CompatibilityGraph, YuOh, CLASSICAL_BOUND_2, CLASSICAL_BOUND_3, EDGE_WEIGHT, QUANTUM_VALUE_2,
    QUANTUM_VALUE_3,
};

/// Where an estimate came from: the index of its run and the estimator used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateSource {
    pub record: usize,
    pub estimator: RatioEstimator,
}

/// An estimate that optionally remembers its counts. Untracked estimates are
/// treated as independent of everything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackedEstimate {
    pub estimate: Estimate,
    pub source: Option<EstimateSource>,
}

impl TrackedEstimate {
    pub fn untracked(estimate: Estimate) -> Self {
        Self {
            estimate,
            source: None,
        }
    }

    pub fn from_record(
        records: &[CountRecord],
        record: usize,
        estimator: RatioEstimator,
    ) -> Result<Self> {
        let rec = records
            .get(record)
            .ok_or_else(|| CountingError::InvalidParameter(format!("no record {record}")))?;
        let estimate = estimator
            .estimate(&rec.channels())
            .ok_or_else(|| CountingError::EmptySample(rec.setting_name.clone()))?;
        Ok(Self {
            estimate,
            source: Some(EstimateSource { record, estimator }),
        })
    }
}

/// `constant + Σ w·x` with setting-aware error propagation.
pub fn combine(
    constant: f64,
    terms: &[(f64, &TrackedEstimate)],
    records: &[CountRecord],
) -> Result<Estimate> {
    let mut value = constant;
    let mut independent_var = 0.0;
    let mut grads: Vec<Option<[f64; CHANNELS]>> = vec![None; records.len()];
    for (w, t) in terms {
        value += w * t.estimate.value;
        match &t.source {
            None => independent_var += (w * t.estimate.sigma).powi(2),
            Some(src) => {
                let rec = records.get(src.record).ok_or_else(|| {
                    CountingError::InvalidParameter(format!("no record {}", src.record))
                })?;
                let g = src
                    .estimator
                    .gradient(&rec.channels())
                    .ok_or_else(|| CountingError::EmptySample(rec.setting_name.clone()))?;
                let acc = grads[src.record].get_or_insert([0.0; CHANNELS]);
                for l in 0..CHANNELS {
                    acc[l] += w * g[l];
                }
            }
        }
    }
    let tracked_var: f64 = grads
        .iter()
        .zip(records)
        .filter_map(|(g, rec)| g.map(|g| (g, rec.channels())))
        .map(|(g, n)| g.iter().zip(&n).map(|(gl, nl)| gl * gl * nl).sum::<f64>())
        .sum();
    Ok(Estimate::new(value, (independent_var + tracked_var).sqrt()))
}

/// All 13 ⟨A_i⟩ (graph node order) and all ⟨A_iA_j⟩ (graph edge order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableEstimates {
    pub expectations: Vec<TrackedEstimate>,
    pub correlations: Vec<TrackedEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs2: Estimate,
    pub lhs3: Estimate,
    pub classical_bound2: f64,
    pub quantum_prediction2: f64,
    pub classical_bound3: f64,
    pub quantum_prediction3: f64,
    /// `(lhs − bound)/σ`; absent when σ = 0.
    pub violation_sigmas2: Option<f64>,
    pub violation_sigmas3: Option<f64>,
}

fn significance(e: &Estimate, bound: f64) -> Option<f64> {
    (e.sigma > 0.0).then(|| (e.value - bound) / e.sigma)
}

/// `lhs2 = Σ⟨A_i⟩ − ½ Σ_edges ⟨A_iA_j⟩` (every edge stands for two ordered
/// pairs of weight ¼) and `lhs3 = Σ_α (1 − ⟨A_{h_α}⟩)/2`.
pub fn build_report(
    estimates: &ObservableEstimates,
    graph: &CompatibilityGraph,
    records: &[CountRecord],
) -> Result<InequalityReport> {
    if estimates.expectations.len() != graph.len()
        || estimates.correlations.len() != graph.edges().len()
    {
        return Err(CountingError::InvalidParameter(format!(
            "need {} expectations and {} correlations, got {} and {}",
            graph.len(),
            graph.edges().len(),
            estimates.expectations.len(),
            estimates.correlations.len()
        )));
    }
    let mut terms2: Vec<(f64, &TrackedEstimate)> =
        estimates.expectations.iter().map(|e| (1.0, e)).collect();
    terms2.extend(estimates.correlations.iter().map(|c| (-EDGE_WEIGHT, c)));
    let lhs2 = combine(0.0, &terms2, records)?;

    let terms3 = YuOh::H_RAYS
        .iter()
        .map(|h| {
            graph
                .index_of(h.label())
                .map(|i| (-0.5, &estimates.expectations[i]))
                .ok_or_else(|| CountingError::InvalidParameter(format!("graph lacks {h}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let lhs3 = combine(0.5 * terms3.len() as f64, &terms3, records)?;

    Ok(InequalityReport {
        violation_sigmas2: significance(&lhs2, CLASSICAL_BOUND_2),
        violation_sigmas3: significance(&lhs3, CLASSICAL_BOUND_3),
        lhs2,
        lhs3,
        classical_bound2: CLASSICAL_BOUND_2,
        quantum_prediction2: QUANTUM_VALUE_2,
        classical_bound3: CLASSICAL_BOUND_3,
        quantum_prediction3: QUANTUM_VALUE_3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qutrit::{expectation, observable, yu_oh_graph, Ket};

    fn ideal(rho: &crate::qutrit::DensityMatrix, sigma: f64) -> ObservableEstimates {
        let g = yu_oh_graph();
        let obs: Vec<_> = g
            .rays()
            .iter()
            .map(|r| *observable(r).unwrap().matrix())
            .collect();
        ObservableEstimates {
            expectations: obs
                .iter()
                .map(|a| TrackedEstimate::untracked(Estimate::new(expectation(rho, a), sigma)))
                .collect(),
            correlations: g
                .edges()
                .iter()
                .map(|&(i, j)| {
                    TrackedEstimate::untracked(Estimate::new(
                        expectation(rho, &(obs[i] * obs[j])),
                        sigma,
                    ))
                })
                .collect(),
        }
    }

    #[test]
    fn ideal_inputs_give_quantum_values() {
        let g = yu_oh_graph();
        let r = build_report(&ideal(&Ket::uniform().density(), 0.0), &g, &[]).unwrap();
        assert!((r.lhs2.value - 25.0 / 3.0).abs() < 1e-12);
        assert!((r.lhs3.value - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.lhs2.sigma, 0.0);
        assert_eq!(r.violation_sigmas2, None);
    }

    #[test]
    fn huge_errors_kill_significance() {
        let g = yu_oh_graph();
        let r = build_report(&ideal(&Ket::basis(1).density(), 1e12), &g, &[]).unwrap();
        assert!(r.violation_sigmas2.unwrap().abs() < 1e-9);
        assert!(r.violation_sigmas3.unwrap().abs() < 1e-9);
    }

    #[test]
    fn independent_sigmas_add_in_quadrature() {
        let g = yu_oh_graph();
        let r = build_report(&ideal(&Ket::uniform().density(), 0.01), &g, &[]).unwrap();
        let expected = (13.0 * 1e-4 + 24.0 * 0.25 * 1e-4f64).sqrt();
        assert!((r.lhs2.sigma - expected).abs() < 1e-12);
        assert!((r.lhs3.sigma - (4.0 * 0.25 * 1e-4f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn shared_counts_are_combined_before_squaring() {
        let rec = CountRecord {
            setting_name: "Z".into(),
            n_heralds: 3000,
            n_d1: 1000,
            n_d2: 1000,
            n_d3: 1000,
            n_triple: [0; 3],
            n_noclick: 0,
            rng_seed: 0,
        };
        let records = vec![rec];
        let a1 = TrackedEstimate::from_record(&records, 0, RatioEstimator::expectation(0)).unwrap();
        let a2 = TrackedEstimate::from_record(&records, 0, RatioEstimator::expectation(1)).unwrap();
        let a3 = TrackedEstimate::from_record(&records, 0, RatioEstimator::expectation(2)).unwrap();
        // ⟨A1⟩+⟨A2⟩+⟨A3⟩ = 3 − 2 = 1 identically, so its variance vanishes.
        let sum = combine(0.0, &[(1.0, &a1), (1.0, &a2), (1.0, &a3)], &records).unwrap();
        assert!((sum.value - 1.0).abs() < 1e-15);
        assert!(sum.sigma < 1e-12);
        let naive = (3.0 * a1.estimate.sigma.powi(2)).sqrt();
        assert!(naive > 0.01);
    }

    #[test]
    fn size_mismatch_rejected() {
        let g = yu_oh_graph();
        let mut e = ideal(&Ket::uniform().density(), 0.0);
        e.correlations.pop();
        assert!(build_report(&e, &g, &[]).is_err());
    }
}
