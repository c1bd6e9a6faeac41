use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::auc::select_query_auc;
use crate::belief::SingleFaultBelief;
use crate::model::NoiseModel;
use crate::netgen::generate_pa_bdg;

use super::config::{DEFAULT_NOISE, DEFAULT_PRIOR};
use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub num_objects: usize,
    pub median: Duration,
    pub samples: Vec<Duration>,
}

/// Median wall time of one AUC selection over all queries of a generated
/// graph with as many queries as objects, starting from the prior belief.
pub fn timing_probe(
    sizes: &[usize],
    edges_per_query: usize,
    repeats: usize,
    seed: u64,
) -> Result<Vec<TimingRow>, HarnessError> {
    if repeats == 0 {
        return Err(HarnessError::Config("timing needs at least one repeat".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &m in sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = generate_pa_bdg(m, m, edges_per_query.min(m), &mut rng)?;
        let model = NoiseModel::uniform(&graph, DEFAULT_PRIOR, DEFAULT_NOISE, DEFAULT_NOISE)?;
        let belief = SingleFaultBelief::new(&model, &graph)?;
        let candidates: Vec<usize> = (0..m).collect();
        let mut samples = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            let started = Instant::now();
            let pick = select_query_auc(&belief, &model, &graph, &candidates, &mut rng)?;
            samples.push(started.elapsed());
            std::hint::black_box(pick);
        }
        let mut sorted = samples.clone();
        sorted.sort_unstable();
        let median = if repeats % 2 == 1 {
            sorted[repeats / 2]
        } else {
            (sorted[repeats / 2 - 1] + sorted[repeats / 2]) / 2
        };
        rows.push(TimingRow {
            num_objects: m,
            median,
            samples,
        });
    }
    Ok(rows)
}
