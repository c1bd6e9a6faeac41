//! Rank-based ROC estimates and AUC-maximizing query selection.
//!
//! Objects are ranked by posterior fault probability `p_i`. Declaring the
//! top `t` objects faulty gives an estimated miss rate
//! `MR_t = sum_{rank > t} p / sum p` and false-alarm rate
//! `FAR_t = sum_{rank <= t} (1 - p) / sum (1 - p)`. The area above the
//! resulting step curve,
//!
//! ```text
//! sum_{i < j} (1 - p_r(i)) p_r(j) / (sum p · sum (1 - p)),
//! ```
//!
//! can be evaluated in O(M) once the ranking is known:
//!
//! ```text
//! 1/2 + (sum_i (2i - M - 2) p_r(i) + sum_i p_i^2) / (2 · sum p · sum (1 - p))
//! ```
//!
//! with `i` the 1-based rank. Greedy selection picks the query that
//! minimizes the expected area above the curve after its response.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::belief::{BeliefError, SingleFaultBelief};
use crate::model::{DiagnosisGraph, NoiseModel, Observation};
use crate::oracle::{ExactOracle, ExactPosterior, OracleError};
use crate::selection::pick_minimizer;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AucError {
    #[error("marginal {index} = {value} is not a probability")]
    InvalidMarginal { index: usize, value: f64 },
    #[error("marginals are all 0 or all 1; miss or false-alarm rate is undefined")]
    DegenerateMarginals,
    #[error("no candidate queries to choose from")]
    EmptyCandidates,
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Objects ordered by descending posterior fault probability.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedEstimate {
    marginals: Vec<f64>,
    order: Vec<usize>,
}

fn check_marginals(marginals: &[f64]) -> Result<(), AucError> {
    match marginals
        .iter()
        .position(|p| !(0.0..=1.0).contains(p))
    {
        Some(index) => Err(AucError::InvalidMarginal {
            index,
            value: marginals[index],
        }),
        None => Ok(()),
    }
}

/// Ranks objects by descending marginal, breaking ties with a seeded shuffle.
pub fn rank_objects<R: Rng + ?Sized>(
    marginals: &[f64],
    tiebreak: &mut R,
) -> Result<RankedEstimate, AucError> {
    check_marginals(marginals)?;
    let mut keys: Vec<usize> = (0..marginals.len()).collect();
    keys.shuffle(tiebreak);
    let mut priority = vec![0; marginals.len()];
    for (rank, &i) in keys.iter().enumerate() {
        priority[i] = rank;
    }
    let mut order: Vec<usize> = (0..marginals.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        marginals[b]
            .total_cmp(&marginals[a])
            .then(priority[a].cmp(&priority[b]))
    });
    Ok(RankedEstimate {
        marginals: marginals.to_vec(),
        order,
    })
}

/// Ranks objects by descending marginal; ties keep index order.
pub fn rank_objects_stable(marginals: &[f64]) -> Result<RankedEstimate, AucError> {
    check_marginals(marginals)?;
    let mut order: Vec<usize> = (0..marginals.len()).collect();
    order.sort_by(|&a, &b| marginals[b].total_cmp(&marginals[a]));
    Ok(RankedEstimate {
        marginals: marginals.to_vec(),
        order,
    })
}

impl RankedEstimate {
    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    /// `order[t]` is the object at 0-based rank `t`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Marginals in rank order (nonincreasing).
    pub fn sorted_marginals(&self) -> impl Iterator<Item = f64> + '_ {
        self.order.iter().map(|&i| self.marginals[i])
    }

    /// `(sum p, sum (1 - p))`, or an error when either vanishes.
    fn denominators(&self) -> Result<(f64, f64), AucError> {
        mass_totals(&self.marginals).ok_or(AucError::DegenerateMarginals)
    }
}

fn mass_totals(values: &[f64]) -> Option<(f64, f64)> {
    let faulty: f64 = values.iter().sum();
    let healthy: f64 = values.iter().map(|p| 1.0 - p).sum();
    (faulty > 0.0 && healthy > 0.0).then_some((faulty, healthy))
}

/// Estimated miss and false-alarm rates for thresholds `t = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub miss: Vec<f64>,
    pub false_alarm: Vec<f64>,
}

pub fn roc_curve(ranked: &RankedEstimate) -> Result<RocCurve, AucError> {
    ranked.denominators()?;
    let sorted: Vec<f64> = ranked.sorted_marginals().collect();
    let m = sorted.len();

    // suffix[t] = sum of p over ranks t.., so suffix[0] is the total and suffix[M] = 0
    let mut suffix = vec![0.0; m + 1];
    for t in (0..m).rev() {
        suffix[t] = suffix[t + 1] + sorted[t];
    }
    let mut prefix = vec![0.0; m + 1];
    for t in 0..m {
        prefix[t + 1] = prefix[t] + (1.0 - sorted[t]);
    }
    let faulty = suffix[0];
    let healthy = prefix[m];
    Ok(RocCurve {
        miss: suffix.iter().map(|s| s / faulty).collect(),
        false_alarm: prefix.iter().map(|s| s / healthy).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AucMethod {
    /// Right-endpoint heights `1 - MR_{t+1}`; used for selection.
    UpperRect,
    /// Left-endpoint heights `1 - MR_t`.
    LowerRect,
    /// Trapezoids, the mean of the two rectangle rules.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucEstimate {
    pub area_under: f64,
    pub area_above: f64,
    pub method: AucMethod,
}

impl RocCurve {
    pub fn auc(&self, method: AucMethod) -> AucEstimate {
        let steps = self.false_alarm.windows(2).zip(self.miss.windows(2));
        let (mut above_upper, mut under_lower, mut above_lower) = (0.0, 0.0, 0.0);
        for (far, mr) in steps {
            let width = far[1] - far[0];
            above_upper += mr[1] * width;
            above_lower += mr[0] * width;
            under_lower += (1.0 - mr[0]) * width;
        }
        let (area_under, area_above) = match method {
            AucMethod::UpperRect => (1.0 - above_upper, above_upper),
            AucMethod::LowerRect => (under_lower, above_lower),
            AucMethod::Linear => {
                let under = (1.0 - above_upper + under_lower) / 2.0;
                (under, (above_upper + above_lower) / 2.0)
            }
        };
        AucEstimate {
            area_under,
            area_above,
            method,
        }
    }
}

pub fn auc_estimate(ranked: &RankedEstimate, method: AucMethod) -> Result<AucEstimate, AucError> {
    Ok(roc_curve(ranked)?.auc(method))
}

/// Area above the estimated ROC curve, by the pairwise double sum.
pub fn area_above_double_sum(ranked: &RankedEstimate) -> Result<f64, AucError> {
    let (faulty, healthy) = ranked.denominators()?;
    let sorted: Vec<f64> = ranked.sorted_marginals().collect();
    let mut total = 0.0;
    for (i, &hi) in sorted.iter().enumerate() {
        for &lo in &sorted[i + 1..] {
            total += (1.0 - hi) * lo;
        }
    }
    Ok(total / (faulty * healthy))
}

/// Area above the estimated ROC curve, by the O(M) rank-weighted form.
pub fn area_above_closed_form(ranked: &RankedEstimate) -> Result<f64, AucError> {
    let sorted: Vec<f64> = ranked.sorted_marginals().collect();
    closed_form_sorted(&sorted).ok_or(AucError::DegenerateMarginals)
}

fn closed_form_sorted(sorted: &[f64]) -> Option<f64> {
    let (faulty, healthy) = mass_totals(sorted)?;
    let m = sorted.len() as f64;
    let mut weighted = 0.0;
    let mut squares = 0.0;
    for (rank0, &p) in sorted.iter().enumerate() {
        let rank = rank0 as f64 + 1.0;
        weighted += (2.0 * rank - m - 2.0) * p;
        squares += p * p;
    }
    Some(0.5 + (weighted + squares) / (2.0 * faulty * healthy))
}

/// Area above the curve for unsorted marginals. A posterior with no
/// uncertain mass on one side (all 0 or all 1) ranks perfectly and scores 0.
pub fn area_above_of(marginals: &[f64]) -> f64 {
    let mut sorted = marginals.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    closed_form_sorted(&sorted).unwrap_or(0.0)
}

/// `sum_z Pr(Z_j = z | z_A) · A̅(z_A ∪ z)` under the single-fault belief.
pub fn expected_area_above(
    belief: &SingleFaultBelief,
    model: &NoiseModel,
    graph: &DiagnosisGraph,
    query: usize,
) -> Result<f64, AucError> {
    graph.check_query(query).map_err(BeliefError::from)?;
    let (p0, p1) = belief.predictive(model, graph, query);
    let mut expected = 0.0;
    for (response, weight) in [(false, p0), (true, p1)] {
        if weight <= 0.0 {
            continue;
        }
        match belief.update(model, graph, query, response) {
            Ok(next) => {
                let area = area_above_of(next.posterior());
                debug_assert!(
                    (next.posterior().iter().sum::<f64>() - 1.0).abs() < 1e-9,
                    "single-fault posterior must sum to one"
                );
                expected += weight * area;
            }
            Err(BeliefError::ContradictoryEvidence { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(expected)
}

/// Greedy AUC selection under the single-fault belief.
pub fn select_query_auc<R: Rng + ?Sized>(
    belief: &SingleFaultBelief,
    model: &NoiseModel,
    graph: &DiagnosisGraph,
    candidates: &[usize],
    tiebreak: &mut R,
) -> Result<usize, AucError> {
    if candidates.is_empty() {
        return Err(AucError::EmptyCandidates);
    }
    let scores = candidates
        .iter()
        .map(|&j| expected_area_above(belief, model, graph, j))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(candidates[pick_minimizer(&scores, tiebreak)])
}

/// Expected area above the curve using exact multi-fault marginals.
pub fn expected_area_above_exact(
    oracle: &ExactOracle<'_>,
    posterior: &ExactPosterior,
    query: usize,
) -> f64 {
    let (p0, p1) = oracle.predictive(posterior, query);
    [(false, p0), (true, p1)]
        .into_iter()
        .filter(|&(_, w)| w > 0.0)
        .map(|(z, w)| match oracle.condition(posterior, query, z) {
            Ok(next) => w * area_above_of(&next.marginals()),
            Err(_) => 0.0,
        })
        .sum()
}

/// Greedy AUC selection driven by exact marginals from the oracle.
pub fn select_query_auc_exact<R: Rng + ?Sized>(
    oracle: &ExactOracle<'_>,
    observations: &[Observation],
    candidates: &[usize],
    tiebreak: &mut R,
) -> Result<usize, AucError> {
    if candidates.is_empty() {
        return Err(AucError::EmptyCandidates);
    }
    let posterior = oracle.exact_posterior(observations)?;
    let scores: Vec<f64> = candidates
        .iter()
        .map(|&j| expected_area_above_exact(oracle, &posterior, j))
        .collect();
    Ok(candidates[pick_minimizer(&scores, tiebreak)])
}
