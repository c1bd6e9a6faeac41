#![allow(dead_code)]

use activediag::{DiagnosisGraph, NoiseModel, Observation, StateVector};
use rand::seq::index::sample;
use rand::Rng;

pub struct Instance {
    pub graph: DiagnosisGraph,
    pub model: NoiseModel,
}

/// Random graph with 1..=3 parents per query and noisy parameters bounded
/// away from 0 and 1, so no response is ever impossible.
pub fn random_instance<R: Rng>(rng: &mut R, max_objects: usize, max_queries: usize) -> Instance {
    let m = rng.gen_range(2..=max_objects);
    let n = rng.gen_range(1..=max_queries);
    let parents: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=m.min(3));
            sample(rng, m, k).into_vec()
        })
        .collect();
    let graph = DiagnosisGraph::new(m, parents).unwrap();
    let prior = (0..m).map(|_| rng.gen_range(0.02..0.5)).collect();
    let leak_complement = (0..n).map(|_| rng.gen_range(0.5..0.99)).collect();
    let inhibition = graph
        .parent_sets()
        .iter()
        .map(|p| p.iter().map(|_| rng.gen_range(0.01..0.5)).collect())
        .collect();
    let model = NoiseModel::new(&graph, prior, leak_complement, inhibition).unwrap();
    Instance { graph, model }
}

/// Responses to `len` distinct random queries, drawn from the model given `truth`.
pub fn random_observations<R: Rng>(
    rng: &mut R,
    inst: &Instance,
    truth: &StateVector,
    len: usize,
) -> Vec<Observation> {
    sample(rng, inst.graph.num_queries(), len)
        .into_iter()
        .map(|query| Observation {
            query,
            response: inst.model.sample_response(&inst.graph, query, truth, rng).unwrap(),
        })
        .collect()
}
