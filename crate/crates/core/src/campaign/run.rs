//! End-to-end campaign: prepare each state, simulate every setting, estimate
//! all observables and assemble both inequality reports.

use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Campaign, PreparedState};
use super::{CampaignError, Result};
use crate::counting::{
    build_report, click_probabilities_with, sample_counts, stream_seed, CountRecord,
    InequalityReport, ObservableEstimates, RatioEstimator, SimulationOptions, TrackedEstimate,
};
use crate::optics::tables::PreparationRow;
use crate::optics::{
    detection_projectors, direct_h_settings, measurement_settings, solve_measurement_angles,
    MeasurementSetting,
};
use crate::qutrit::{
    evaluate_ineq2, evaluate_ineq3, expectation, observable, yu_oh_graph, CompatibilityGraph,
    DensityMatrix, YuOh,
};

/// Offset of the direct-h settings in the seed index space, so their streams
/// never coincide with those of the network settings.
const DIRECT_H_SEED_OFFSET: u64 = 1000;

/// One setting as it will be run: the projectors the detectors realize and
/// the index feeding the per-run seed.
#[derive(Debug, Clone)]
pub struct PlannedSetting {
    pub setting: MeasurementSetting,
    pub projectors: [Matrix3<Complex64>; 3],
    /// HWP5/HWP6 angles; `None` for ideal projectors the network cannot realize.
    pub angles: Option<(f64, f64)>,
    pub seed_index: u64,
}

impl PlannedSetting {
    /// Projectors realized by the solved HWP5/HWP6 angles.
    pub fn network(setting: MeasurementSetting, seed_index: u64) -> Result<Self> {
        let (t5, t6) = solve_measurement_angles(&setting).map_err(CampaignError::Optics)?;
        Ok(Self {
            projectors: detection_projectors(t5, t6),
            setting,
            angles: Some((t5, t6)),
            seed_index,
        })
    }

    /// The setting's ideal projectors, without going through the network.
    pub fn ideal(setting: MeasurementSetting, seed_index: u64) -> Self {
        Self {
            projectors: [0, 1, 2].map(|k| *setting.detector_projectors[k].matrix()),
            setting,
            angles: None,
            seed_index,
        }
    }
}

/// The ordered list of settings a campaign runs for every state.
///
/// By default: the 8 direct and 8 basis-exchanged network settings. With
/// `direct_h` the basis-exchanged ones are replaced by the 8 ideal direct-h
/// settings.
pub fn setting_plan(direct_h: bool) -> Result<Vec<PlannedSetting>> {
    let mut plan = Vec::new();
    for (k, s) in measurement_settings().into_iter().enumerate() {
        if direct_h && s.relabeling.is_some() {
            continue;
        }
        plan.push(PlannedSetting::network(s, k as u64)?);
    }
    if direct_h {
        for (k, s) in direct_h_settings().into_iter().enumerate() {
            plan.push(PlannedSetting::ideal(s, DIRECT_H_SEED_OFFSET + k as u64));
        }
    }
    Ok(plan)
}

/// Where each observable and each edge correlation is read from: the first
/// setting in plan order that provides it. Single expectations only come
/// from settings without basis exchange.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorMap {
    /// `(setting, detector)` per graph node.
    pub expectations: Vec<(usize, usize)>,
    /// `(setting, (detector_i, detector_j))` per graph edge, detectors in the
    /// edge's node order.
    pub correlations: Vec<(usize, (usize, usize))>,
}

pub fn estimator_map(plan: &[PlannedSetting], graph: &CompatibilityGraph) -> Result<EstimatorMap> {
    let node = |y: YuOh| {
        graph
            .index_of(y.label())
            .ok_or_else(|| CampaignError::Config(format!("graph lacks {y}")))
    };
    let mut expectations = vec![None; graph.len()];
    let mut correlations = vec![None; graph.edges().len()];
    for (s, p) in plan.iter().enumerate() {
        if p.setting.relabeling.is_none() {
            for d in 0..3 {
                if let Some(y) = p.setting.observable_at(d) {
                    expectations[node(y)?].get_or_insert((s, d));
                }
            }
        }
        for ((di, dj), (a, b)) in p.setting.observable_pairs() {
            let (ia, ib) = (node(a)?, node(b)?);
            let key = (ia.min(ib), ia.max(ib));
            if let Some(e) = graph.edges().iter().position(|&edge| edge == key) {
                let dets = if ia < ib { (di, dj) } else { (dj, di) };
                correlations[e].get_or_insert((s, dets));
            }
        }
    }
    let missing =
        |what: &str, k: usize| CampaignError::Config(format!("no setting measures {what} {k}"));
    Ok(EstimatorMap {
        expectations: expectations
            .into_iter()
            .enumerate()
            .map(|(k, e)| e.ok_or_else(|| missing("observable", k)))
            .collect::<Result<_>>()?,
        correlations: correlations
            .into_iter()
            .enumerate()
            .map(|(k, e)| e.ok_or_else(|| missing("edge", k)))
            .collect::<Result<_>>()?,
    })
}

/// One line of a per-state table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRow {
    pub observable: String,
    pub exact: f64,
    pub estimate: f64,
    pub sigma: f64,
    pub setting: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateResult {
    pub name: String,
    /// Preparation plate angles; absent for literal density matrices.
    pub preparation: Option<PreparationRow>,
    /// Prepared density matrix as `[re, im]` entries, row-major.
    pub density: [[[f64; 2]; 3]; 3],
    pub records: Vec<CountRecord>,
    /// 13 rows in graph node order.
    pub expectations: Vec<ObservableRow>,
    /// 24 rows in graph edge order.
    pub correlations: Vec<ObservableRow>,
    pub report: InequalityReport,
    pub exact_lhs2: f64,
    pub exact_lhs3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignMetadata {
    pub version: String,
    pub seed: u64,
    pub mean_heralds: f64,
    pub efficiency: f64,
    pub triple_suppression: f64,
    pub zero_triple_counts: bool,
    pub direct_h_correlations: bool,
    pub settings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub metadata: CampaignMetadata,
    pub states: Vec<StateResult>,
}

impl ResultBundle {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn state(&self, name: &str) -> Option<&StateResult> {
        self.states.iter().find(|s| s.name == name)
    }
}

pub fn expectation_label(graph: &CompatibilityGraph, i: usize) -> String {
    format!("A[{}]", graph.rays()[i].label)
}

pub fn correlation_label(graph: &CompatibilityGraph, (i, j): (usize, usize)) -> String {
    format!("A[{}]A[{}]", graph.rays()[i].label, graph.rays()[j].label)
}

/// Everything fixed across the states of one campaign.
#[derive(Debug, Clone)]
pub struct Runner {
    pub graph: CompatibilityGraph,
    pub plan: Vec<PlannedSetting>,
    pub map: EstimatorMap,
    pub options: SimulationOptions,
    pub master_seed: u64,
    pub include_triples: bool,
}

impl Runner {
    pub fn new(campaign: &Campaign) -> Result<Self> {
        let graph = yu_oh_graph();
        let plan = setting_plan(campaign.direct_h_correlations)?;
        let map = estimator_map(&plan, &graph)?;
        Ok(Self {
            graph,
            plan,
            map,
            options: campaign.simulation_options(),
            master_seed: campaign.seed,
            include_triples: !campaign.zero_triple_counts,
        })
    }

    /// Simulates every planned setting on one state and builds its report.
    pub fn run_state(&self, prepared: &PreparedState, state_index: usize) -> Result<StateResult> {
        let Runner {
            graph,
            plan,
            map,
            options,
            master_seed,
            include_triples,
        } = self;
        let (master_seed, include_triples) = (*master_seed, *include_triples);
        let counting_err = |e| CampaignError::Counting {
            state: prepared.name.clone(),
            source: e,
        };
        let records = plan
            .par_iter()
            .map(|p| {
                let probs = click_probabilities_with(
                    &prepared.density,
                    &p.projectors,
                    p.setting.relabeling,
                    options.efficiency,
                );
                let seed = stream_seed(master_seed, state_index as u64, p.seed_index);
                sample_counts(&p.setting.name, probs, options, seed)
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(counting_err)?;

        let tracked = |s: usize, est: RatioEstimator| {
            TrackedEstimate::from_record(&records, s, est).map_err(counting_err)
        };
        let estimates = ObservableEstimates {
            expectations: map
                .expectations
                .iter()
                .map(|&(s, d)| tracked(s, RatioEstimator::expectation(d)))
                .collect::<Result<_>>()?,
            correlations: map
                .correlations
                .iter()
                .map(|&(s, (di, dj))| {
                    tracked(s, RatioEstimator::correlation(di, dj, include_triples))
                })
                .collect::<Result<_>>()?,
        };
        let report = build_report(&estimates, graph, &records).map_err(counting_err)?;

        let obs: Vec<Matrix3<Complex64>> = graph
            .rays()
            .iter()
            .map(|r| observable(r).map(|o| *o.matrix()))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| CampaignError::Optics(e.into()))?;
        let rho = &prepared.density;
        let row = |label: String, exact: f64, t: &TrackedEstimate, s: usize| ObservableRow {
            observable: label,
            exact,
            estimate: t.estimate.value,
            sigma: t.estimate.sigma,
            setting: plan[s].setting.name.clone(),
        };
        let expectations = (0..graph.len())
            .map(|i| {
                row(
                    expectation_label(graph, i),
                    expectation(rho, &obs[i]),
                    &estimates.expectations[i],
                    map.expectations[i].0,
                )
            })
            .collect();
        let correlations = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(i, j))| {
                row(
                    correlation_label(graph, (i, j)),
                    expectation(rho, &(obs[i] * obs[j])),
                    &estimates.correlations[e],
                    map.correlations[e].0,
                )
            })
            .collect();

        Ok(StateResult {
            name: prepared.name.clone(),
            preparation: prepared
                .apparatus
                .as_ref()
                .map(|a| PreparationRow::new(prepared.name.clone(), a)),
            density: density_entries(rho),
            records,
            expectations,
            correlations,
            report,
            exact_lhs2: evaluate_ineq2(rho),
            exact_lhs3: evaluate_ineq3(rho),
        })
    }
}

fn density_entries(rho: &DensityMatrix) -> [[[f64; 2]; 3]; 3] {
    let m = rho.matrix();
    std::array::from_fn(|r| std::array::from_fn(|c| [m[(r, c)].re, m[(r, c)].im]))
}

pub fn run_campaign(campaign: &Campaign) -> Result<ResultBundle> {
    campaign.validate()?;
    let runner = Runner::new(campaign)?;
    let prepared = campaign
        .states
        .iter()
        .map(|s| s.prepare())
        .collect::<Result<Vec<_>>>()?;
    let states = prepared
        .par_iter()
        .enumerate()
        .map(|(k, p)| runner.run_state(p, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultBundle {
        metadata: CampaignMetadata {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: campaign.seed,
            mean_heralds: campaign.mean_heralds,
            efficiency: campaign.efficiency,
            triple_suppression: runner.options.triple_suppression,
            zero_triple_counts: campaign.zero_triple_counts,
            direct_h_correlations: campaign.direct_h_correlations,
            settings: runner.plan.iter().map(|p| p.setting.name.clone()).collect(),
        },
        states,
    })
}
