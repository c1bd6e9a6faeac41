//! Random bipartite diagnosis graphs by preferential attachment.

use rand::Rng;
use thiserror::Error;

use crate::model::DiagnosisGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("need at least one object and one query")]
    Empty,
    #[error("edges per query must be at least 1")]
    NoEdges,
    #[error("{edges_per_query} edges per query exceeds the {num_objects} objects")]
    TooManyEdges {
        edges_per_query: usize,
        num_objects: usize,
    },
}

/// Each query in turn draws `edges_per_query` distinct parents. A draw picks
/// object `i` with weight `degree(i) + 1`, where degree counts edges placed
/// by earlier queries; objects already chosen for the current query are
/// excluded.
pub fn generate_pa_bdg<R: Rng + ?Sized>(
    num_objects: usize,
    num_queries: usize,
    edges_per_query: usize,
    rng: &mut R,
) -> Result<DiagnosisGraph, GenerateError> {
    if num_objects == 0 || num_queries == 0 {
        return Err(GenerateError::Empty);
    }
    if edges_per_query == 0 {
        return Err(GenerateError::NoEdges);
    }
    if edges_per_query > num_objects {
        return Err(GenerateError::TooManyEdges {
            edges_per_query,
            num_objects,
        });
    }

    let mut weight = vec![1u64; num_objects];
    let mut total: u64 = num_objects as u64;
    let mut parents = Vec::with_capacity(num_queries);
    for _ in 0..num_queries {
        let mut chosen: Vec<usize> = Vec::with_capacity(edges_per_query);
        let mut available = total;
        for _ in 0..edges_per_query {
            let mut ticket = rng.gen_range(0..available);
            let pick = (0..num_objects)
                .filter(|i| !chosen.contains(i))
                .find(|&i| {
                    if ticket < weight[i] {
                        true
                    } else {
                        ticket -= weight[i];
                        false
                    }
                })
                .expect("ticket lies within the available weight");
            available -= weight[pick];
            chosen.push(pick);
        }
        for &i in &chosen {
            weight[i] += 1;
            total += 1;
        }
        parents.push(chosen);
    }
    Ok(DiagnosisGraph::new(num_objects, parents).expect("generated parents are distinct and in range"))
}
