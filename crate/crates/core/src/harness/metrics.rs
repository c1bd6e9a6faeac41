//! Ground-truth AUC of a ranked estimate.

use thiserror::Error;

use crate::auc::RankedEstimate;
use crate::model::StateVector;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("AUC is undefined: truth has {faults} faults among {objects} objects")]
pub struct UndefinedAuc {
    pub faults: usize,
    pub objects: usize,
}

/// Probability that a random fault is ranked above a random non-fault,
/// counting objects with equal marginals as half a win (Mann-Whitney with
/// mid-ranks).
pub fn empirical_auc(ranked: &RankedEstimate, truth: &StateVector) -> Result<f64, UndefinedAuc> {
    let objects = ranked.len();
    let faults = ranked.order().iter().filter(|&&i| truth.is_faulty(i)).count();
    let healthy = objects - faults;
    if faults == 0 || healthy == 0 {
        return Err(UndefinedAuc { faults, objects });
    }

    // Walk the ranking in groups of equal marginal, counting pairs where a
    // non-fault sits strictly above a fault and pairs that share a group.
    let marginals = ranked.marginals();
    let order = ranked.order();
    let mut healthy_above: u64 = 0;
    let mut losses: u64 = 0;
    let mut ties: u64 = 0;
    let mut start = 0;
    while start < order.len() {
        let value = marginals[order[start]];
        let end = start
            + order[start..]
                .iter()
                .take_while(|&&i| marginals[i] == value)
                .count();
        let group_faults = order[start..end].iter().filter(|&&i| truth.is_faulty(i)).count() as u64;
        let group_healthy = (end - start) as u64 - group_faults;
        losses += group_faults * healthy_above;
        ties += group_faults * group_healthy;
        healthy_above += group_healthy;
        start = end;
    }
    let pairs = faults as u64 * healthy as u64;
    Ok((2 * (pairs - losses) - ties) as f64 / (2 * pairs) as f64)
}
