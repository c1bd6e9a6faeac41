//! Browser bindings for the diagnosis library. Every export returns JSON so
//! the page can stay framework-free.

use activediag::auc::rank_objects_stable;
use activediag::harness::{
    empirical_auc, run_experiment_on, ExperimentConfig, GraphSource, Selector, DEFAULT_EDGES_PER_QUERY,
};
use activediag::{
    area_above_closed_form, generate_pa_bdg, roc_curve, select_query_auc, select_query_entropy_sf,
    AucMethod, DiagnosisGraph, NoiseModel, ObservationLog, SingleFaultBelief, StateVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
struct RocReport {
    order: Vec<usize>,
    miss: Vec<f64>,
    false_alarm: Vec<f64>,
    upper_rect: f64,
    lower_rect: f64,
    linear: f64,
    area_above: f64,
}

/// ROC estimate for comma- or space-separated fault probabilities.
#[wasm_bindgen]
pub fn roc_analysis(marginals: &str) -> Result<String, String> {
    let values = marginals
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    let ranked = rank_objects_stable(&values).map_err(|e| e.to_string())?;
    let curve = roc_curve(&ranked).map_err(|e| e.to_string())?;
    let report = RocReport {
        order: ranked.order().to_vec(),
        upper_rect: curve.auc(AucMethod::UpperRect).area_under,
        lower_rect: curve.auc(AucMethod::LowerRect).area_under,
        linear: curve.auc(AucMethod::Linear).area_under,
        area_above: area_above_closed_form(&ranked).map_err(|e| e.to_string())?,
        miss: curve.miss,
        false_alarm: curve.false_alarm,
    };
    to_json(&report)
}

#[derive(Debug, Serialize)]
struct Curve {
    selector: &'static str,
    mean_auc: Vec<f64>,
    stderr_auc: Vec<Option<f64>>,
}

#[derive(Debug, Serialize)]
struct Comparison {
    episodes: usize,
    skipped: usize,
    curves: Vec<Curve>,
}

/// Mean empirical AUC per step for the AUC, entropy and random selectors on
/// one generated graph.
#[wasm_bindgen]
pub fn compare_selectors(
    objects: usize,
    queries: usize,
    prior: f64,
    noise: f64,
    budget: usize,
    realizations: usize,
    seed: u32,
) -> Result<String, String> {
    let mut config = ExperimentConfig::new(
        GraphSource::Generate {
            objects,
            queries,
            edges_per_query: DEFAULT_EDGES_PER_QUERY.min(objects),
        },
        seed.into(),
    );
    config.prior = Some(prior);
    config.leak = Some(noise);
    config.inhibition = Some(noise);
    config.budget = budget.min(queries);
    config.realizations = realizations;
    config.selectors = vec![Selector::AucSf, Selector::EntropySf, Selector::Random];
    let (graph, model) = activediag::harness::prepare(&config).map_err(|e| e.to_string())?;
    let report = run_experiment_on(&config, &graph, &model).map_err(|e| e.to_string())?;
    let curves = config
        .selectors
        .iter()
        .map(|&s| {
            let rows: Vec<_> = report.summary_for(s).collect();
            Curve {
                selector: s.as_str(),
                mean_auc: rows.iter().map(|r| r.mean_auc).collect(),
                stderr_auc: rows.iter().map(|r| r.stderr_auc).collect(),
            }
        })
        .collect();
    to_json(&Comparison {
        episodes: realizations - report.skipped.len(),
        skipped: report.skipped.len(),
        curves,
    })
}

#[derive(Debug, Serialize)]
struct SessionView {
    posterior: Vec<f64>,
    order: Vec<usize>,
    observed: Vec<(usize, bool)>,
    estimated_auc: f64,
    /// Ground-truth AUC; absent when the hidden state has no faults.
    empirical_auc: Option<f64>,
    remaining: usize,
}

/// An interactive session against a hidden multi-fault state.
#[wasm_bindgen]
pub struct DiagnosisSession {
    graph: DiagnosisGraph,
    model: NoiseModel,
    truth: StateVector,
    belief: SingleFaultBelief,
    log: ObservationLog,
    rng: ChaCha8Rng,
}

#[wasm_bindgen]
impl DiagnosisSession {
    #[wasm_bindgen(constructor)]
    pub fn new(objects: usize, queries: usize, prior: f64, noise: f64, seed: u32) -> Result<DiagnosisSession, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.into());
        let graph = generate_pa_bdg(objects, queries, DEFAULT_EDGES_PER_QUERY.min(objects), &mut rng)
            .map_err(|e| e.to_string())?;
        let model = NoiseModel::uniform(&graph, prior, noise, noise).map_err(|e| e.to_string())?;
        // prefer a state with at least one fault, so there is something to find
        let mut truth = model.sample_state(&mut rng);
        for _ in 0..1000 {
            if truth.fault_count() > 0 {
                break;
            }
            truth = model.sample_state(&mut rng);
        }
        let belief = SingleFaultBelief::new(&model, &graph).map_err(|e| e.to_string())?;
        Ok(Self {
            log: ObservationLog::new(graph.num_queries()),
            graph,
            model,
            truth,
            belief,
            rng,
        })
    }

    /// Query the named selector (`auc_sf`, `entropy_sf` or `random`) would ask next.
    pub fn suggest(&mut self, selector: &str) -> Result<usize, String> {
        let candidates = self.log.unobserved();
        if candidates.is_empty() {
            return Err("every query has been asked".into());
        }
        let selector: Selector = selector.parse().map_err(|e: activediag::harness::HarnessError| e.to_string())?;
        match selector {
            Selector::AucSf => select_query_auc(&self.belief, &self.model, &self.graph, &candidates, &mut self.rng)
                .map_err(|e| e.to_string()),
            Selector::EntropySf => {
                select_query_entropy_sf(&self.belief, &self.model, &self.graph, &candidates, &mut self.rng)
                    .map_err(|e| e.to_string())
            }
            Selector::Random => Ok(candidates[self.rng.gen_range(0..candidates.len())]),
            other => Err(format!("{other} is not available in the browser")),
        }
    }

    /// Asks `query` of the hidden state and returns the noisy response.
    pub fn observe(&mut self, query: usize) -> Result<bool, String> {
        if self.log.contains(query) {
            return Err(format!("query {query} was already asked"));
        }
        let response = self
            .model
            .sample_response(&self.graph, query, &self.truth, &mut self.rng)
            .map_err(|e| e.to_string())?;
        self.belief = self
            .belief
            .update(&self.model, &self.graph, query, response)
            .map_err(|e| e.to_string())?;
        self.log.push(query, response).map_err(|e| e.to_string())?;
        Ok(response)
    }

    /// Current posterior, ranking and AUC figures as JSON.
    pub fn view(&self) -> Result<String, String> {
        let ranked = rank_objects_stable(self.belief.posterior()).map_err(|e| e.to_string())?;
        let estimated = roc_curve(&ranked)
            .map(|c| c.auc(AucMethod::UpperRect).area_under)
            .map_err(|e| e.to_string())?;
        to_json(&SessionView {
            posterior: self.belief.posterior().to_vec(),
            order: ranked.order().to_vec(),
            observed: self.log.entries().iter().map(|o| (o.query, o.response)).collect(),
            estimated_auc: estimated,
            empirical_auc: empirical_auc(&ranked, &self.truth).ok(),
            remaining: self.log.unobserved().len(),
        })
    }

    /// Indices of the truly faulty objects.
    pub fn reveal(&self) -> Vec<usize> {
        self.truth.faults().collect()
    }

    pub fn parents(&self, query: usize) -> Result<Vec<usize>, String> {
        self.graph.check_query(query).map_err(|e| e.to_string())?;
        Ok(self.graph.parents(query).to_vec())
    }
}
