//! One simulated diagnosis session.

use std::time::Instant;

use rand::Rng;

use crate::auc::{rank_objects, roc_curve, select_query_auc, select_query_auc_exact, AucMethod};
use crate::belief::{SingleFaultBelief, LIKELIHOOD_FLOOR};
use crate::entropy::select_query_entropy_sf;
use crate::model::{DiagnosisGraph, NoiseModel, ObservationLog, StateVector};
use crate::oracle::ExactOracle;

use super::config::Selector;
use super::metrics::empirical_auc;
use super::HarnessError;

/// A sampled true state together with the response every query would give.
///
/// Drawing all responses up front lets several selectors face the same
/// realization.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub state: StateVector,
    pub responses: Vec<bool>,
}

impl GroundTruth {
    pub fn sample<R: Rng + ?Sized>(
        model: &NoiseModel,
        graph: &DiagnosisGraph,
        rng: &mut R,
    ) -> Self {
        let state = model.sample_state(rng);
        let responses = (0..graph.num_queries())
            .map(|j| {
                model
                    .sample_response(graph, j, &state, rng)
                    .expect("query index and state length are valid")
            })
            .collect();
        Self { state, responses }
    }

    /// Ground-truth AUC is undefined unless there is at least one fault and
    /// one working object.
    pub fn is_degenerate(&self) -> bool {
        let faults = self.state.fault_count();
        faults == 0 || faults == self.state.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeSettings {
    pub budget: usize,
    pub likelihood_floor: bool,
    pub oracle_size_limit: usize,
    pub oracle_metrics: bool,
    pub record_timing: bool,
}

/// Metrics after `step` responses. Step 0 is the prior and has no query.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub query: Option<usize>,
    pub response: Option<bool>,
    pub empirical_auc: f64,
    pub estimated_auc: f64,
    pub exact_entropy: Option<f64>,
    pub select_time_us: Option<u128>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub realization: usize,
    pub selector: Selector,
    pub faults: Vec<usize>,
    /// `steps[0]` is the prior; `steps[t]` follows the `t`th response.
    pub steps: Vec<StepRecord>,
}

impl EpisodeRecord {
    pub fn queries(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().filter_map(|s| s.query)
    }

    pub fn auc_curve(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.empirical_auc).collect()
    }
}

struct Session<'a> {
    graph: &'a DiagnosisGraph,
    model: &'a NoiseModel,
    settings: EpisodeSettings,
    belief: SingleFaultBelief,
    log: ObservationLog,
}

impl<'a> Session<'a> {
    fn select<R: Rng + ?Sized>(&self, selector: Selector, rng: &mut R) -> Result<usize, HarnessError> {
        let candidates = self.log.unobserved();
        let oracle = || {
            ExactOracle::new(self.graph, self.model).with_size_limit(self.settings.oracle_size_limit)
        };
        Ok(match selector {
            Selector::AucSf => select_query_auc(&self.belief, self.model, self.graph, &candidates, rng)?,
            Selector::EntropySf => {
                select_query_entropy_sf(&self.belief, self.model, self.graph, &candidates, rng)?
            }
            Selector::ExactEntropy => {
                oracle().select_query_exact_entropy(self.log.entries(), &candidates, rng)?
            }
            Selector::ExactAuc => select_query_auc_exact(&oracle(), self.log.entries(), &candidates, rng)?,
            Selector::Random => {
                if candidates.is_empty() {
                    return Err(HarnessError::Config("no queries left to select".into()));
                }
                candidates[rng.gen_range(0..candidates.len())]
            }
        })
    }

    fn observe(&mut self, query: usize, response: bool) -> Result<(), HarnessError> {
        let floor = self.settings.likelihood_floor.then_some(LIKELIHOOD_FLOOR);
        self.belief = self
            .belief
            .update_floored(self.model, self.graph, query, response, floor)?;
        self.log.push(query, response)?;
        Ok(())
    }

    fn record<R: Rng + ?Sized>(
        &self,
        truth: &StateVector,
        step: usize,
        rng: &mut R,
    ) -> Result<StepRecord, HarnessError> {
        let ranked = rank_objects(self.belief.posterior(), rng)?;
        let empirical = empirical_auc(&ranked, truth)?;
        let estimated = roc_curve(&ranked)?.auc(AucMethod::UpperRect).area_under;
        let exact_entropy = if self.settings.oracle_metrics {
            let oracle =
                ExactOracle::new(self.graph, self.model).with_size_limit(self.settings.oracle_size_limit);
            Some(oracle.exact_conditional_entropy(self.log.entries())?)
        } else {
            None
        };
        let last = self.log.entries().last();
        Ok(StepRecord {
            step,
            query: last.map(|o| o.query),
            response: last.map(|o| o.response),
            empirical_auc: empirical,
            estimated_auc: estimated,
            exact_entropy,
            select_time_us: None,
        })
    }
}

/// Runs `selector` for `min(budget, N)` steps against a fixed ground truth.
///
/// The belief driving the ranking is always the single-fault posterior, even
/// for the exact selectors; only query choice differs between selectors.
pub fn run_episode<R: Rng + ?Sized>(
    settings: EpisodeSettings,
    graph: &DiagnosisGraph,
    model: &NoiseModel,
    selector: Selector,
    truth: &GroundTruth,
    realization: usize,
    rng: &mut R,
) -> Result<EpisodeRecord, HarnessError> {
    let mut session = Session {
        graph,
        model,
        settings,
        belief: SingleFaultBelief::new(model, graph)?,
        log: ObservationLog::new(graph.num_queries()),
    };
    let mut steps = vec![session.record(&truth.state, 0, rng)?];
    for step in 1..=settings.budget.min(graph.num_queries()) {
        // The clock is only read on request; it is unavailable in some targets.
        let started = settings.record_timing.then(Instant::now);
        let query = session.select(selector, rng)?;
        let elapsed = started.map(|t| t.elapsed().as_micros());
        session.observe(query, truth.responses[query])?;
        let mut record = session.record(&truth.state, step, rng)?;
        record.select_time_us = elapsed;
        steps.push(record);
    }
    Ok(EpisodeRecord {
        realization,
        selector,
        faults: truth.state.faults().collect(),
        steps,
    })
}
