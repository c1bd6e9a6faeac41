//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line to
//! the real stdout (bypassing libtest capture), then asserts.
//!
//! Tests take a shared lock so the timing check never competes with the
//! heavier simulations for the CPU.

mod common;

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use activediag::auc::{area_above_of, rank_objects_stable};
use activediag::harness::{
    empirical_auc, run_experiment, timing_probe, ExperimentConfig, GraphSource, Selector,
    DEFAULT_EDGES_PER_QUERY, DEFAULT_NOISE, DEFAULT_PRIOR,
};
use activediag::{
    area_above_closed_form, area_above_double_sum, auc_estimate, generate_pa_bdg, rank_objects,
    roc_curve, select_query_auc, select_query_entropy_sf, AucMethod, ExactOracle,
    NoiseModel, ObservationLog, SingleFaultBelief, StateVector,
};
use common::{random_instance, random_observations};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(name: &str, pass: bool, detail: impl std::fmt::Display) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "acceptance {verdict} {name}: {detail}").unwrap();
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn closed_form_area_matches_pairwise_sum() {
    let _guard = serial();
    let started = Instant::now();
    let mut r = rng(0xA1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let m = r.gen_range(2..=50);
        let marginals: Vec<f64> = (0..m).map(|_| r.gen()).collect();
        let ranked = rank_objects(&marginals, &mut r).unwrap();
        let diff = (area_above_closed_form(&ranked).unwrap() - area_above_double_sum(&ranked).unwrap()).abs();
        worst = worst.max(diff);
    }
    let elapsed = started.elapsed();
    let pass = worst <= 1e-10 && elapsed < Duration::from_secs(1);
    report(
        "closed_form_area",
        pass,
        format!("max |closed - pairwise| = {worst:.3e} over 1000 vectors in {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn single_fault_belief_matches_conditioned_oracle() {
    let _guard = serial();
    let started = Instant::now();
    let mut r = rng(0xA2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let inst = random_instance(&mut r, 10, 15);
        let truth = inst.model.sample_state(&mut r);
        let len = r.gen_range(0..=inst.graph.num_queries().min(8));
        let obs = random_observations(&mut r, &inst, &truth, len);
        let log = ObservationLog::from_entries(inst.graph.num_queries(), obs.iter().copied()).unwrap();
        let belief = SingleFaultBelief::from_log(&inst.model, &inst.graph, &log).unwrap();
        let exact = ExactOracle::new(&inst.graph, &inst.model)
            .single_fault_conditioned()
            .exact_marginals(&obs)
            .unwrap();
        for (a, b) in belief.posterior().iter().zip(&exact) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = started.elapsed();
    let pass = worst <= 1e-10 && elapsed < Duration::from_secs(10);
    report(
        "single_fault_vs_oracle",
        pass,
        format!("max abs error {worst:.3e} over 100 instances in {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn single_fault_entropy_selection_matches_exact_entropy() {
    let _guard = serial();
    let started = Instant::now();
    let mut r = rng(0xA3);
    let mut disagreements = Vec::new();
    for case in 0..100 {
        let inst = random_instance(&mut r, 8, 12);
        let m = inst.graph.num_objects();
        let truth = StateVector::single_fault(m, r.gen_range(0..m));
        let len = r.gen_range(0..inst.graph.num_queries());
        let obs = random_observations(&mut r, &inst, &truth, len.min(4));
        let log = ObservationLog::from_entries(inst.graph.num_queries(), obs.iter().copied()).unwrap();
        let candidates = log.unobserved();
        let belief = SingleFaultBelief::from_log(&inst.model, &inst.graph, &log).unwrap();
        let oracle = ExactOracle::new(&inst.graph, &inst.model).single_fault_conditioned();

        let fast = select_query_entropy_sf(&belief, &inst.model, &inst.graph, &candidates, &mut rng(case)).unwrap();
        let exact = oracle.select_query_exact_entropy(&obs, &candidates, &mut rng(case)).unwrap();
        let posterior = oracle.exact_posterior(&obs).unwrap();
        let gap = (oracle.expected_entropy(&posterior, fast) - oracle.expected_entropy(&posterior, exact)).abs();
        if fast != exact && gap > 1e-9 {
            disagreements.push((case, fast, exact, gap));
        }
    }
    let elapsed = started.elapsed();
    let pass = disagreements.is_empty() && elapsed < Duration::from_secs(30);
    report(
        "entropy_selection_agreement",
        pass,
        format!(
            "{}/100 argmins agree up to 1e-9 ties in {elapsed:.2?}{}",
            100 - disagreements.len(),
            if disagreements.is_empty() { String::new() } else { format!("; disagreements {disagreements:?}") }
        ),
    );
    assert!(pass);
}

struct MonotoneCheck {
    pointwise: Vec<String>,
    expectation: Vec<String>,
}

/// Greedy AUC trajectories with a single true fault, tracking the estimated
/// area under the curve after every response.
fn run_monotonicity_trajectories() -> MonotoneCheck {
    let methods = [AucMethod::LowerRect, AucMethod::Linear];
    let area = |b: &SingleFaultBelief, method| {
        auc_estimate(&rank_objects_stable(b.posterior()).unwrap(), method)
            .unwrap()
            .area_under
    };
    let mut check = MonotoneCheck {
        pointwise: Vec::new(),
        expectation: Vec::new(),
    };
    for trajectory in 0..500u64 {
        let mut r = rng(0xA4_0000 + trajectory);
        let graph = generate_pa_bdg(20, 30, DEFAULT_EDGES_PER_QUERY, &mut r).unwrap();
        let model = NoiseModel::uniform(&graph, DEFAULT_PRIOR, DEFAULT_NOISE, DEFAULT_NOISE).unwrap();
        let truth = StateVector::single_fault(20, r.gen_range(0..20));
        let mut belief = SingleFaultBelief::new(&model, &graph).unwrap();
        let mut log = ObservationLog::new(30);
        for step in 1..=15 {
            let query = select_query_auc(&belief, &model, &graph, &log.unobserved(), &mut r).unwrap();
            let (p0, p1) = belief.predictive(&model, &graph, query);
            let branches = [
                belief.update(&model, &graph, query, false).unwrap(),
                belief.update(&model, &graph, query, true).unwrap(),
            ];
            let response = model.sample_response(&graph, query, &truth, &mut r).unwrap();
            let next = branches[usize::from(response)].clone();
            for method in methods {
                let before = area(&belief, method);
                let after = area(&next, method);
                if after < before - 1e-12 {
                    check.pointwise.push(format!(
                        "trajectory {trajectory} step {step} {method:?} query {query} response {} {before:.17} -> {after:.17}",
                        u8::from(response)
                    ));
                }
                let expected = p0 * area(&branches[0], method) + p1 * area(&branches[1], method);
                if expected < before - 1e-12 {
                    check.expectation.push(format!(
                        "trajectory {trajectory} step {step} {method:?} {before:.17} -> E {expected:.17}"
                    ));
                }
            }
            log.push(query, response).unwrap();
            belief = next;
        }
    }
    check
}

#[test]
fn estimated_auc_is_monotone_along_trajectories() {
    let _guard = serial();
    let check = run_monotonicity_trajectories();
    let pass = check.pointwise.is_empty();
    report(
        "estimated_auc_monotone_pointwise",
        pass,
        format!("{} step-to-step decreases beyond 1e-12 over 500 trajectories", check.pointwise.len()),
    );
    let mut out = std::io::stdout().lock();
    for v in &check.pointwise {
        writeln!(out, "  decrease: {v}").unwrap();
    }
    // The in-expectation form is reported alongside, it is not the criterion.
    writeln!(
        out,
        "acceptance INFO estimated_auc_monotone_in_expectation: {} expected decreases beyond 1e-12",
        check.expectation.len()
    )
    .unwrap();
    for v in &check.expectation {
        writeln!(out, "  expected decrease: {v}").unwrap();
    }
    drop(out);
    assert!(pass, "{} pointwise decreases", check.pointwise.len());
}

/// Two-sample standard error of a difference of means with pooled variance.
fn pooled_stderr(a: &[f64], b: &[f64]) -> f64 {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled_var = (ss(a, mean(a)) + ss(b, mean(b))) / (na + nb - 2.0);
    (pooled_var * (1.0 / na + 1.0 / nb)).sqrt()
}

#[test]
fn auc_selection_competes_on_preferential_attachment_networks() {
    let _guard = serial();
    let started = Instant::now();
    let mut config = ExperimentConfig::new(
        GraphSource::Generate {
            objects: 100,
            queries: 100,
            edges_per_query: DEFAULT_EDGES_PER_QUERY,
        },
        2011,
    );
    config.prior = Some(0.03);
    config.leak = Some(0.05);
    config.inhibition = Some(0.05);
    config.realizations = 200;
    config.budget = 50;
    config.selectors = vec![Selector::AucSf, Selector::EntropySf, Selector::Random];
    let report_ = run_experiment(&config).unwrap();
    let elapsed = started.elapsed();

    let curve = |selector: Selector, step: usize| -> Vec<f64> {
        report_
            .episodes
            .iter()
            .filter(|e| e.selector == selector)
            .map(|e| e.steps[step].empirical_auc)
            .collect()
    };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;

    let mut worst_margin = f64::INFINITY;
    let mut worst_step = 0;
    for step in 1..=50 {
        let (auc, ent) = (curve(Selector::AucSf, step), curve(Selector::EntropySf, step));
        let margin = mean(&auc) - mean(&ent) + pooled_stderr(&auc, &ent);
        if margin < worst_margin {
            worst_margin = margin;
            worst_step = step;
        }
    }
    let at30 = |s| mean(&curve(s, 30));
    let (auc30, ent30, rand30) = (at30(Selector::AucSf), at30(Selector::EntropySf), at30(Selector::Random));
    let ordering = worst_margin >= 0.0;
    let dominance = auc30 - rand30 >= 0.03 && ent30 - rand30 >= 0.03;
    let pass = ordering && dominance && elapsed < Duration::from_secs(600);
    report(
        "selector_comparison",
        pass,
        format!(
            "{} episodes per selector ({} skipped); min over steps of auc_sf - entropy_sf + pooled SE = {worst_margin:.4} at step {worst_step}; \
             step 30 mean AUC auc_sf {auc30:.4}, entropy_sf {ent30:.4}, random {rand30:.4}; {elapsed:.1?}",
            200 - report_.skipped.len(),
            report_.skipped.len()
        ),
    );
    assert!(pass);
}

#[test]
fn auc_selection_time_scales_gently() {
    let _guard = serial();
    let started = Instant::now();
    let rows = timing_probe(&[250, 500, 1000, 2000], DEFAULT_EDGES_PER_QUERY, 5, 7).unwrap();
    let elapsed = started.elapsed();
    let medians: Vec<Duration> = rows.iter().map(|r| r.median).collect();
    let ratios: Vec<f64> = medians
        .windows(2)
        .map(|w| w[1].as_secs_f64() / w[0].as_secs_f64())
        .collect();
    let pass = medians[3] < Duration::from_secs(5)
        && ratios.iter().all(|&q| q <= 5.0)
        && elapsed < Duration::from_secs(300);
    report(
        "selection_timing",
        pass,
        format!(
            "medians {:?} for M = 250/500/1000/2000, doubling ratios {:.2?}",
            medians, ratios
        ),
    );
    assert!(pass);
}

#[test]
fn roc_estimator_worked_examples() {
    let _guard = serial();
    let started = Instant::now();
    let mut failures = Vec::new();

    let marginals = [0.3, 0.15, 0.35, 0.15, 0.05];
    let ranked = rank_objects_stable(&marginals).unwrap();
    if ranked.order() != [2, 0, 1, 3, 4] {
        failures.push(format!("order {:?}", ranked.order()));
    }
    let curve = roc_curve(&ranked).unwrap();
    if (curve.miss[2] - 0.35).abs() > 1e-12 || (curve.false_alarm[2] - 0.3375).abs() > 1e-12 {
        failures.push(format!("threshold 2: miss {} false alarm {}", curve.miss[2], curve.false_alarm[2]));
    }

    for m in [2usize, 5, 10] {
        let want = (m - 1) as f64 / (2 * m) as f64;
        for p in [0.1, 0.37, 0.9] {
            let flat = vec![p; m];
            let ranked = rank_objects_stable(&flat).unwrap();
            let got = [
                area_above_closed_form(&ranked).unwrap(),
                area_above_double_sum(&ranked).unwrap(),
                auc_estimate(&ranked, AucMethod::UpperRect).unwrap().area_above,
                area_above_of(&flat),
            ];
            if got.iter().any(|g| (g - want).abs() > 1e-12) {
                failures.push(format!("uniform M={m} p={p}: {got:?} vs {want}"));
            }
        }
    }
    let elapsed = started.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(1);
    report(
        "roc_worked_examples",
        pass,
        if failures.is_empty() { format!("all exact to 1e-12 in {elapsed:.2?}") } else { failures.join("; ") },
    );
    assert!(pass);
}

#[test]
fn empirical_auc_matches_all_pairs_count() {
    let _guard = serial();
    let started = Instant::now();
    let mut r = rng(0xA8);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let m = r.gen_range(2..=50);
        // coarse levels force plenty of ties
        let levels = r.gen_range(1..=6);
        let marginals: Vec<f64> = (0..m).map(|_| r.gen_range(0..levels) as f64 / levels as f64).collect();
        let mut bits: Vec<bool> = (0..m).map(|_| r.gen_bool(0.3)).collect();
        bits[0] = true;
        bits[1] = false;
        let truth = StateVector::new(bits);
        let ranked = rank_objects(&marginals, &mut r).unwrap();

        let (mut twice_wins, mut pairs) = (0u64, 0u64);
        for f in truth.faults() {
            for h in (0..m).filter(|&h| !truth.is_faulty(h)) {
                pairs += 1;
                twice_wins += match marginals[f].partial_cmp(&marginals[h]).unwrap() {
                    std::cmp::Ordering::Greater => 2,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Less => 0,
                };
            }
        }
        let got = empirical_auc(&ranked, &truth).unwrap();
        // got * 2 * pairs must be exactly the integer count
        if got * (2 * pairs) as f64 != twice_wins as f64 && (got - twice_wins as f64 / (2 * pairs) as f64).abs() > 1e-12 {
            mismatches += 1;
        }
    }
    let elapsed = started.elapsed();
    let pass = mismatches == 0 && elapsed < Duration::from_secs(5);
    report(
        "empirical_auc_all_pairs",
        pass,
        format!("{mismatches} mismatches over 1000 instances in {elapsed:.2?}"),
    );
    assert!(pass);
}
