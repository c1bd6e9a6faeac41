//! Entropy-based query selection under the single-fault restriction.
//!
//! The expected posterior entropy after querying `j` differs from
//! `sum_i p_i H(q_ij) - H(sum_i p_i q_ij)` only by a query-independent
//! constant, where `q_ij = Pr(Z_j = 0 | X = I_i)`. That score is minus the
//! mutual information between the hypothesis and the response, so it is
//! never positive.

use rand::Rng;
use thiserror::Error;

use crate::belief::{hypothesis_zero_probs, SingleFaultBelief};
use crate::model::{DiagnosisGraph, NoiseModel};
use crate::selection::pick_minimizer;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("{0} is not a probability")]
    Domain(f64),
    #[error("no candidate queries to choose from")]
    EmptyCandidates,
}

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64, EntropyError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EntropyError::Domain(p));
    }
    Ok(h2(p))
}

fn h2(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

pub fn entropy_sf_score(
    belief: &SingleFaultBelief,
    model: &NoiseModel,
    graph: &DiagnosisGraph,
    query: usize,
) -> f64 {
    let zero_probs = hypothesis_zero_probs(model, graph, query);
    let (conditional, mixture) = belief
        .posterior()
        .iter()
        .zip(&zero_probs)
        .fold((0.0, 0.0), |(c, m), (&p, &q)| (c + p * h2(q), m + p * q));
    conditional - h2(mixture.clamp(0.0, 1.0))
}

pub fn select_query_entropy_sf<R: Rng + ?Sized>(
    belief: &SingleFaultBelief,
    model: &NoiseModel,
    graph: &DiagnosisGraph,
    candidates: &[usize],
    tiebreak: &mut R,
) -> Result<usize, EntropyError> {
    if candidates.is_empty() {
        return Err(EntropyError::EmptyCandidates);
    }
    let scores: Vec<f64> = candidates
        .iter()
        .map(|&j| entropy_sf_score(belief, model, graph, j))
        .collect();
    Ok(candidates[pick_minimizer(&scores, tiebreak)])
}
