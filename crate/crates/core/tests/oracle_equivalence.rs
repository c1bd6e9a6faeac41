//! Single-fault fast paths checked against brute-force enumeration.

mod common;

use activediag::auc::{expected_area_above, expected_area_above_exact};
use activediag::{
    entropy_sf_score, select_query_auc, select_query_auc_exact, ExactOracle, ObservationLog,
    SingleFaultBelief, StateVector,
};
use approx::assert_abs_diff_eq;
use common::{random_instance, random_observations};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn entropy_score_is_negative_information_gain() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, 8, 10);
        let m = inst.graph.num_objects();
        let truth = StateVector::single_fault(m, rng.gen_range(0..m));
        let len = rng.gen_range(0..=inst.graph.num_queries().min(4));
        let obs = random_observations(&mut rng, &inst, &truth, len);
        let log = ObservationLog::from_entries(inst.graph.num_queries(), obs.iter().copied()).unwrap();
        let belief = SingleFaultBelief::from_log(&inst.model, &inst.graph, &log).unwrap();
        let oracle = ExactOracle::new(&inst.graph, &inst.model).single_fault_conditioned();
        for j in 0..inst.graph.num_queries() {
            let score = entropy_sf_score(&belief, &inst.model, &inst.graph, j);
            let info = oracle.mutual_information(&obs, j).unwrap();
            assert_abs_diff_eq!(score, -info, epsilon = 1e-10);
        }
    }
}

#[test]
fn exact_auc_agrees_with_single_fault_auc_on_conditioned_prior() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for case in 0..200u64 {
        let inst = random_instance(&mut rng, 8, 10);
        let m = inst.graph.num_objects();
        let truth = StateVector::single_fault(m, rng.gen_range(0..m));
        let len = rng.gen_range(0..=inst.graph.num_queries().min(4));
        let obs = random_observations(&mut rng, &inst, &truth, len);
        let log = ObservationLog::from_entries(inst.graph.num_queries(), obs.iter().copied()).unwrap();
        let belief = SingleFaultBelief::from_log(&inst.model, &inst.graph, &log).unwrap();
        let oracle = ExactOracle::new(&inst.graph, &inst.model).single_fault_conditioned();
        let posterior = oracle.exact_posterior(&obs).unwrap();

        for j in 0..inst.graph.num_queries() {
            let fast = expected_area_above(&belief, &inst.model, &inst.graph, j).unwrap();
            let exact = expected_area_above_exact(&oracle, &posterior, j);
            assert_abs_diff_eq!(fast, exact, epsilon = 1e-10);
        }
        let candidates = log.unobserved();
        if candidates.is_empty() {
            continue;
        }
        let a = select_query_auc(&belief, &inst.model, &inst.graph, &candidates, &mut ChaCha8Rng::seed_from_u64(case))
            .unwrap();
        let b = select_query_auc_exact(&oracle, &obs, &candidates, &mut ChaCha8Rng::seed_from_u64(case)).unwrap();
        let gap = (expected_area_above_exact(&oracle, &posterior, a) - expected_area_above_exact(&oracle, &posterior, b))
            .abs();
        assert!(a == b || gap <= 1e-9, "case {case}: {a} vs {b}, gap {gap}");
    }
}

#[test]
fn map_estimate_recovers_noiseless_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let graph = activediag::DiagnosisGraph::new(4, (0..4).map(|i| vec![i]).collect()).unwrap();
    let model = activediag::NoiseModel::uniform(&graph, 0.2, 0.0, 0.0).unwrap();
    for mask in 0..16u64 {
        let truth = StateVector::from_mask(4, mask);
        let obs: Vec<_> = (0..4)
            .map(|j| activediag::Observation {
                query: j,
                response: model.sample_response(&graph, j, &truth, &mut rng).unwrap(),
            })
            .collect();
        let map = ExactOracle::new(&graph, &model).map_estimate(&obs).unwrap();
        assert_eq!(map, truth);
    }
}
