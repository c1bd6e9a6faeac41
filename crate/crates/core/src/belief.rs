//! Posterior over the single-fault hypotheses.
//!
//! Under the single-fault restriction the hidden state is one of the `M`
//! vectors with exactly one faulty object, so the posterior is a length-`M`
//! distribution and `Pr(X_i = 1 | z_A)` is simply its `i`th entry. Evidence
//! is accumulated as unnormalized log weights and renormalized with a max
//! shift after every update.

use thiserror::Error;

use crate::model::{DiagnosisGraph, ModelError, NoiseModel, ObservationLog};

/// Floor applied to likelihoods when the caller opts in to flooring.
pub const LIKELIHOOD_FLOOR: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeliefError {
    #[error("every prior fault probability is zero; no single-fault hypothesis has mass")]
    DegeneratePrior,
    #[error("observing query {query} = {response} gives every hypothesis zero likelihood")]
    ContradictoryEvidence { query: usize, response: u8 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleFaultBelief {
    log_weights: Vec<f64>,
    posterior: Vec<f64>,
}

impl SingleFaultBelief {
    /// Prior restricted to the single-fault hypotheses:
    /// `Pr(I_i) ∝ α_i · prod_{k != i} (1 - α_k)`.
    pub fn new(model: &NoiseModel, graph: &DiagnosisGraph) -> Result<Self, BeliefError> {
        let prior = model.prior();
        debug_assert_eq!(prior.len(), graph.num_objects());
        let certain = prior.iter().filter(|&&a| a >= 1.0).count();
        let others: f64 = prior
            .iter()
            .filter(|&&a| a < 1.0)
            .map(|&a| (1.0 - a).ln())
            .sum();
        let log_weights = prior
            .iter()
            .map(|&a| {
                let own_certain = usize::from(a >= 1.0);
                if certain > own_certain {
                    f64::NEG_INFINITY
                } else if a >= 1.0 {
                    others
                } else {
                    a.ln() + others - (1.0 - a).ln()
                }
            })
            .collect();
        Self::from_log_weights(log_weights).ok_or(BeliefError::DegeneratePrior)
    }

    /// Replays a whole observation log from the prior.
    pub fn from_log(
        model: &NoiseModel,
        graph: &DiagnosisGraph,
        log: &ObservationLog,
    ) -> Result<Self, BeliefError> {
        let mut belief = Self::new(model, graph)?;
        for o in log.entries() {
            belief = belief.update(model, graph, o.query, o.response)?;
        }
        Ok(belief)
    }

    fn from_log_weights(log_weights: Vec<f64>) -> Option<Self> {
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return None;
        }
        let mut posterior: Vec<f64> = log_weights.iter().map(|&w| (w - max).exp()).collect();
        let total: f64 = posterior.iter().sum();
        posterior.iter_mut().for_each(|p| *p /= total);
        Some(Self {
            log_weights,
            posterior,
        })
    }

    /// `Pr(X = I_i | z_A)` for every object `i`, equal to `Pr(X_i = 1 | z_A)`.
    pub fn posterior(&self) -> &[f64] {
        &self.posterior
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn num_objects(&self) -> usize {
        self.posterior.len()
    }

    /// Bayes update with one observed response. Returns a new belief.
    pub fn update(
        &self,
        model: &NoiseModel,
        graph: &DiagnosisGraph,
        query: usize,
        response: bool,
    ) -> Result<Self, BeliefError> {
        self.update_floored(model, graph, query, response, None)
    }

    /// Like [`update`](Self::update), but likelihoods below `floor` are
    /// raised to it before taking logs.
    pub fn update_floored(
        &self,
        model: &NoiseModel,
        graph: &DiagnosisGraph,
        query: usize,
        response: bool,
        floor: Option<f64>,
    ) -> Result<Self, BeliefError> {
        graph.check_query(query)?;
        let lift = |l: f64| match floor {
            Some(f) => l.max(f),
            None => l,
        };
        let base = lift(response_prob(model.leak_complement(query), response)).ln();
        let mut log_weights: Vec<f64> = self.log_weights.iter().map(|&w| w + base).collect();
        for (&i, &rho) in graph.parents(query).iter().zip(model.inhibition(query)) {
            let lik = lift(response_prob(model.leak_complement(query) * rho, response));
            log_weights[i] = self.log_weights[i] + lik.ln();
        }
        Self::from_log_weights(log_weights).ok_or(BeliefError::ContradictoryEvidence {
            query,
            response: u8::from(response),
        })
    }

    /// `(Pr(Z_j = 0 | z_A), Pr(Z_j = 1 | z_A))` as a mixture over hypotheses.
    pub fn predictive(&self, model: &NoiseModel, graph: &DiagnosisGraph, query: usize) -> (f64, f64) {
        let zero_probs = hypothesis_zero_probs(model, graph, query);
        self.posterior
            .iter()
            .zip(&zero_probs)
            .fold((0.0, 0.0), |(zero, one), (&p, &q0)| {
                (zero + p * q0, one + p * (1.0 - q0))
            })
    }

    /// `Pr(X_i = 0 | z_A)` summed over objects; `M - 1` under the restriction.
    pub fn total_non_fault_mass(&self) -> f64 {
        self.posterior.iter().map(|p| 1.0 - p).sum()
    }
}

fn response_prob(zero_prob: f64, response: bool) -> f64 {
    if response {
        1.0 - zero_prob
    } else {
        zero_prob
    }
}

/// `Pr(Z_j = z | X = I_i)`.
pub fn single_fault_likelihood(
    model: &NoiseModel,
    graph: &DiagnosisGraph,
    query: usize,
    response: bool,
    object: usize,
) -> Result<f64, ModelError> {
    graph.check_query(query)?;
    Ok(response_prob(
        single_fault_zero_prob(model, graph, query, object),
        response,
    ))
}

/// `Pr(Z_j = 0 | X = I_i)` for every hypothesis `i`.
pub(crate) fn hypothesis_zero_probs(
    model: &NoiseModel,
    graph: &DiagnosisGraph,
    query: usize,
) -> Vec<f64> {
    let leak = model.leak_complement(query);
    let mut probs = vec![leak; graph.num_objects()];
    for (&k, &rho) in graph.parents(query).iter().zip(model.inhibition(query)) {
        probs[k] = leak * rho;
    }
    probs
}

/// `Pr(Z_j = 0 | X = I_i)`.
pub(crate) fn single_fault_zero_prob(
    model: &NoiseModel,
    graph: &DiagnosisGraph,
    query: usize,
    object: usize,
) -> f64 {
    let leak = model.leak_complement(query);
    match graph.parents(query).iter().position(|&k| k == object) {
        Some(e) => leak * model.inhibition(query)[e],
        None => leak,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::toy_graph;
    use crate::model::Observation;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn model_with_prior(g: &DiagnosisGraph, prior: Vec<f64>) -> NoiseModel {
        let n = g.num_queries();
        let inh = g.parent_sets().iter().map(|p| vec![0.05; p.len()]).collect();
        NoiseModel::new(g, prior, vec![0.95; n], inh).unwrap()
    }

    #[test]
    fn uniform_prior_gives_uniform_belief() {
        let g = toy_graph();
        let m = NoiseModel::uniform(&g, 0.03, 0.05, 0.05).unwrap();
        let b = SingleFaultBelief::new(&m, &g).unwrap();
        for &p in b.posterior() {
            assert_abs_diff_eq!(p, 0.2, epsilon = 1e-15);
        }
    }

    #[test]
    fn prior_odds_normalization() {
        let g = DiagnosisGraph::new(2, vec![vec![0]]).unwrap();
        let b = SingleFaultBelief::new(&model_with_prior(&g, vec![0.5, 0.25]), &g).unwrap();
        assert_abs_diff_eq!(b.posterior()[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(b.posterior()[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn certain_fault_gives_indicator() {
        let g = toy_graph();
        let b =
            SingleFaultBelief::new(&model_with_prior(&g, vec![1.0, 0.3, 0.3, 0.0, 0.9]), &g).unwrap();
        assert_eq!(b.posterior(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn degenerate_priors_error() {
        let g = toy_graph();
        assert_eq!(
            SingleFaultBelief::new(&model_with_prior(&g, vec![0.0; 5]), &g),
            Err(BeliefError::DegeneratePrior)
        );
        // two certain faults exclude every single-fault hypothesis
        assert_eq!(
            SingleFaultBelief::new(&model_with_prior(&g, vec![1.0, 1.0, 0.1, 0.1, 0.1]), &g),
            Err(BeliefError::DegeneratePrior)
        );
    }

    #[test]
    fn likelihood_examples() {
        let g = DiagnosisGraph::new(2, vec![vec![0]]).unwrap();
        let m = NoiseModel::uniform(&g, 0.03, 0.05, 0.05).unwrap();
        assert_abs_diff_eq!(
            single_fault_likelihood(&m, &g, 0, true, 0).unwrap(),
            0.9525,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            single_fault_likelihood(&m, &g, 0, true, 1).unwrap(),
            0.05,
            epsilon = 1e-15
        );
        let blocked = NoiseModel::uniform(&g, 0.03, 0.0, 1.0).unwrap();
        assert_eq!(single_fault_likelihood(&blocked, &g, 0, false, 0).unwrap(), 1.0);
    }

    #[test]
    fn hand_bayes_update() {
        let g = DiagnosisGraph::new(2, vec![vec![0]]).unwrap();
        let m = NoiseModel::uniform(&g, 0.03, 0.05, 0.05).unwrap();
        let b = SingleFaultBelief::new(&m, &g).unwrap().update(&m, &g, 0, true).unwrap();
        assert_abs_diff_eq!(b.posterior()[0], 0.9525 / 1.0025, epsilon = 1e-15);
        assert_abs_diff_eq!(b.posterior()[1], 0.05 / 1.0025, epsilon = 1e-15);
    }

    #[test]
    fn empty_parent_query_is_uninformative() {
        let g = DiagnosisGraph::new(3, vec![vec![], vec![1]]).unwrap();
        let m = model_with_prior(&g, vec![0.1, 0.2, 0.3]);
        let b = SingleFaultBelief::new(&m, &g).unwrap().update(&m, &g, 1, true).unwrap();
        for z in [false, true] {
            let after = b.update(&m, &g, 0, z).unwrap();
            for (x, y) in after.posterior().iter().zip(b.posterior()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-15);
            }
        }
        let (p0, p1) = b.predictive(&m, &g, 0);
        assert_abs_diff_eq!(p0, 0.95, epsilon = 1e-15);
        assert_abs_diff_eq!(p1, 0.05, epsilon = 1e-15);
    }

    #[test]
    fn contradictory_evidence_is_typed() {
        let g = DiagnosisGraph::new(2, vec![vec![0, 1]]).unwrap();
        // noiseless: both hypotheses put a fault under query 0, so Z = 0 is impossible
        let m = NoiseModel::uniform(&g, 0.1, 0.0, 0.0).unwrap();
        let b = SingleFaultBelief::new(&m, &g).unwrap();
        assert_eq!(
            b.update(&m, &g, 0, false),
            Err(BeliefError::ContradictoryEvidence { query: 0, response: 0 })
        );
        let floored = b
            .update_floored(&m, &g, 0, false, Some(LIKELIHOOD_FLOOR))
            .unwrap();
        assert_abs_diff_eq!(floored.posterior()[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn predictive_mixture() {
        let g = DiagnosisGraph::new(2, vec![vec![0]]).unwrap();
        let m = model_with_prior(&g, vec![0.5, 0.25]);
        let b = SingleFaultBelief::new(&m, &g).unwrap();
        let (p0, p1) = b.predictive(&m, &g, 0);
        assert_abs_diff_eq!(p0, 0.273125, epsilon = 1e-15);
        assert_abs_diff_eq!(p0 + p1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn predictive_point_mass_is_exact_likelihood() {
        let g = toy_graph();
        let m = model_with_prior(&g, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = SingleFaultBelief::new(&m, &g).unwrap();
        for j in 0..4 {
            let (p0, _) = b.predictive(&m, &g, j);
            assert_eq!(p0, single_fault_likelihood(&m, &g, j, false, 2).unwrap());
        }
    }

    fn arb_instance() -> impl Strategy<Value = (DiagnosisGraph, NoiseModel, Vec<Observation>)> {
        (2usize..9, 1usize..10).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(proptest::sample::subsequence((0..m).collect::<Vec<_>>(), 0..=m), n),
                proptest::collection::vec(0.01f64..0.6, m),
                proptest::collection::vec(0.5f64..1.0, n),
                proptest::collection::vec(0.0f64..0.5, n * m),
                proptest::collection::vec(any::<bool>(), n),
                Just(m),
            )
                .prop_map(move |(parents, prior, leak, inh, responses, m)| {
                    let g = DiagnosisGraph::new(m, parents).unwrap();
                    let inhibition = g
                        .parent_sets()
                        .iter()
                        .enumerate()
                        .map(|(j, p)| (0..p.len()).map(|e| inh[j * m + e]).collect())
                        .collect();
                    let model = NoiseModel::new(&g, prior, leak, inhibition).unwrap();
                    let obs = responses
                        .into_iter()
                        .enumerate()
                        .map(|(query, response)| Observation { query, response })
                        .collect();
                    (g, model, obs)
                })
        })
    }

    proptest! {
        #[test]
        fn sums_hold_after_every_update((g, m, obs) in arb_instance()) {
            let mut b = SingleFaultBelief::new(&m, &g).unwrap();
            for o in &obs {
                b = b.update(&m, &g, o.query, o.response).unwrap();
                let s: f64 = b.posterior().iter().sum();
                prop_assert!((s - 1.0).abs() <= 1e-12);
                prop_assert!((b.total_non_fault_mass() - (g.num_objects() as f64 - 1.0)).abs() <= 1e-12);
                prop_assert!(b.posterior().iter().all(|&p| p >= 0.0));
            }
        }

        #[test]
        fn replay_order_does_not_matter((g, m, obs) in arb_instance(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let forward = ObservationLog::from_entries(g.num_queries(), obs.clone()).unwrap();
            let mut shuffled = obs;
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let shuffled = ObservationLog::from_entries(g.num_queries(), shuffled).unwrap();
            let a = SingleFaultBelief::from_log(&m, &g, &forward).unwrap();
            let b = SingleFaultBelief::from_log(&m, &g, &shuffled).unwrap();
            for (x, y) in a.posterior().iter().zip(b.posterior()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
