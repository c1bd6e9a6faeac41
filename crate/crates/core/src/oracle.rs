//! Exact inference by enumerating all `2^M` object states.
//!
//! Only usable on small instances. Serves as the reference that the
//! single-fault machinery is checked against, and as the exact
//! entropy-based selector.
//!
//! States are indexed by bitmask: bit `i` of the index is `x_i`.

use rand::Rng;
use thiserror::Error;

use crate::model::{DiagnosisGraph, NoiseModel, Observation, StateVector};
use crate::selection::pick_minimizer;

pub const DEFAULT_SIZE_LIMIT: usize = 15;

/// Largest `M` the oracle will ever enumerate, whatever the configured limit.
pub const HARD_SIZE_LIMIT: usize = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{objects} objects exceeds the exact-inference limit of {limit}")]
    Capacity { objects: usize, limit: usize },
    #[error("observations have zero probability under the model")]
    ContradictoryEvidence,
    #[error("no candidate queries to choose from")]
    EmptyCandidates,
}

/// Which states carry prior mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// The full independent prior over `{0,1}^M`.
    Full,
    /// The independent prior conditioned on exactly one fault.
    SingleFault,
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOracle<'a> {
    graph: &'a DiagnosisGraph,
    model: &'a NoiseModel,
    size_limit: usize,
    support: Support,
}

impl<'a> ExactOracle<'a> {
    pub fn new(graph: &'a DiagnosisGraph, model: &'a NoiseModel) -> Self {
        Self {
            graph,
            model,
            size_limit: DEFAULT_SIZE_LIMIT,
            support: Support::Full,
        }
    }

    pub fn with_size_limit(mut self, size_limit: usize) -> Self {
        self.size_limit = size_limit.min(HARD_SIZE_LIMIT);
        self
    }

    /// Restricts the prior to the single-fault states before any evidence.
    pub fn single_fault_conditioned(mut self) -> Self {
        self.support = Support::SingleFault;
        self
    }

    pub fn support(&self) -> Support {
        self.support
    }

    fn check_capacity(&self) -> Result<(), OracleError> {
        let objects = self.graph.num_objects();
        if objects > self.size_limit {
            Err(OracleError::Capacity {
                objects,
                limit: self.size_limit,
            })
        } else {
            Ok(())
        }
    }

    /// `Pr(Z_j = 0 | x)` for the state encoded by `mask`.
    fn zero_prob(&self, query: usize, mask: usize) -> f64 {
        self.model
            .zero_prob_unchecked(self.graph, query, |k| mask >> k & 1 == 1)
    }

    fn log_prior(&self, mask: usize) -> f64 {
        if self.support == Support::SingleFault && mask.count_ones() != 1 {
            return f64::NEG_INFINITY;
        }
        self.model
            .prior()
            .iter()
            .enumerate()
            .map(|(i, &a)| if mask >> i & 1 == 1 { a.ln() } else { (1.0 - a).ln() })
            .sum()
    }

    /// `Pr(x | z_A)` over every state, computed in the log domain.
    pub fn exact_posterior(&self, observations: &[Observation]) -> Result<ExactPosterior, OracleError> {
        self.check_capacity()?;
        let m = self.graph.num_objects();
        let log_weights: Vec<f64> = (0..1usize << m)
            .map(|mask| {
                let mut w = self.log_prior(mask);
                if w == f64::NEG_INFINITY {
                    return w;
                }
                for o in observations {
                    let p0 = self.zero_prob(o.query, mask);
                    w += if o.response { (1.0 - p0).ln() } else { p0.ln() };
                }
                w
            })
            .collect();
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(OracleError::ContradictoryEvidence);
        }
        let probs: Vec<f64> = log_weights.iter().map(|&w| (w - max).exp()).collect();
        Ok(ExactPosterior::normalized(m, probs).expect("max-shifted weights include a 1"))
    }

    pub fn exact_marginals(&self, observations: &[Observation]) -> Result<Vec<f64>, OracleError> {
        Ok(self.exact_posterior(observations)?.marginals())
    }

    /// `H(X | z_A)` in bits.
    pub fn exact_conditional_entropy(&self, observations: &[Observation]) -> Result<f64, OracleError> {
        Ok(self.exact_posterior(observations)?.entropy_bits())
    }

    /// `(Pr(Z_j = 0 | z_A), Pr(Z_j = 1 | z_A))`.
    pub fn predictive(&self, posterior: &ExactPosterior, query: usize) -> (f64, f64) {
        posterior
            .probs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(zero, one), (mask, &p)| {
                let p0 = self.zero_prob(query, mask);
                (zero + p * p0, one + p * (1.0 - p0))
            })
    }

    /// Bayes update of an existing posterior by one more response.
    pub fn condition(
        &self,
        posterior: &ExactPosterior,
        query: usize,
        response: bool,
    ) -> Result<ExactPosterior, OracleError> {
        let weights = posterior
            .probs
            .iter()
            .enumerate()
            .map(|(mask, &p)| {
                let p0 = self.zero_prob(query, mask);
                p * if response { 1.0 - p0 } else { p0 }
            })
            .collect();
        ExactPosterior::normalized(posterior.num_objects, weights)
            .ok_or(OracleError::ContradictoryEvidence)
    }

    /// `sum_z Pr(Z_j = z | z_A) H(X | z_A, z)`, the quantity minimized by
    /// entropy-based selection.
    pub fn expected_entropy(&self, posterior: &ExactPosterior, query: usize) -> f64 {
        let (p0, p1) = self.predictive(posterior, query);
        [(false, p0), (true, p1)]
            .into_iter()
            .filter(|&(_, pz)| pz > 0.0)
            .map(|(z, pz)| {
                let h = self
                    .condition(posterior, query, z)
                    .map(|post| post.entropy_bits())
                    .unwrap_or(0.0);
                pz * h
            })
            .sum()
    }

    /// `I(X; Z_j | z_A)` in bits.
    pub fn mutual_information(
        &self,
        observations: &[Observation],
        query: usize,
    ) -> Result<f64, OracleError> {
        let posterior = self.exact_posterior(observations)?;
        Ok(posterior.entropy_bits() - self.expected_entropy(&posterior, query))
    }

    /// Picks the candidate with the smallest expected posterior entropy.
    pub fn select_query_exact_entropy<R: Rng + ?Sized>(
        &self,
        observations: &[Observation],
        candidates: &[usize],
        rng: &mut R,
    ) -> Result<usize, OracleError> {
        if candidates.is_empty() {
            return Err(OracleError::EmptyCandidates);
        }
        let posterior = self.exact_posterior(observations)?;
        let scores: Vec<f64> = candidates
            .iter()
            .map(|&j| self.expected_entropy(&posterior, j))
            .collect();
        Ok(candidates[pick_minimizer(&scores, rng)])
    }

    /// Most probable state; ties go to the lexicographically smallest
    /// `(x_0, x_1, ...)`.
    pub fn map_estimate(&self, observations: &[Observation]) -> Result<StateVector, OracleError> {
        let posterior = self.exact_posterior(observations)?;
        Ok(posterior.map_state())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactPosterior {
    num_objects: usize,
    probs: Vec<f64>,
}

/// Relative tolerance under which two state probabilities count as tied.
const MAP_TIE_TOLERANCE: f64 = 1e-12;

impl ExactPosterior {
    fn normalized(num_objects: usize, mut weights: Vec<f64>) -> Option<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return None;
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Some(Self {
            num_objects,
            probs: weights,
        })
    }

    /// Probabilities indexed by state bitmask.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_objects(&self) -> usize {
        self.num_objects
    }

    pub fn prob(&self, state: &StateVector) -> f64 {
        let mask = state
            .bits()
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i));
        self.probs[mask]
    }

    /// `Pr(X_i = 1 | z_A)` for every object.
    pub fn marginals(&self) -> Vec<f64> {
        let mut marginals = vec![0.0; self.num_objects];
        for (mask, &p) in self.probs.iter().enumerate() {
            for (i, m) in marginals.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *m += p;
                }
            }
        }
        marginals
    }

    pub fn entropy_bits(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    }

    pub fn map_state(&self) -> StateVector {
        let max = self.probs.iter().copied().fold(0.0, f64::max);
        let reversed = |mask: usize| mask.reverse_bits() >> (usize::BITS as usize - self.num_objects.max(1));
        let best = (0..self.probs.len())
            .filter(|&mask| self.probs[mask] >= max * (1.0 - MAP_TIE_TOLERANCE))
            .min_by_key(|&mask| reversed(mask))
            .expect("posterior is nonempty");
        StateVector::from_mask(self.num_objects, best as u64)
    }
}
