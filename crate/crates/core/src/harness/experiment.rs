//! Running many realizations and writing the results.

use std::fs::File;
use std::io::{BufReader, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::format::load_graph;
use crate::model::{DiagnosisGraph, NoiseModel};
use crate::netgen::generate_pa_bdg;
use crate::oracle::HARD_SIZE_LIMIT;

use super::config::{ExperimentConfig, GraphSource, Selector, DEFAULT_NOISE, DEFAULT_PRIOR};
use super::episode::{run_episode, EpisodeRecord, EpisodeSettings, GroundTruth};
use super::HarnessError;

pub const EPISODES_HEADER: [&str; 9] = [
    "realization",
    "step",
    "selector",
    "query",
    "response",
    "empirical_auc",
    "estimated_auc",
    "exact_entropy",
    "select_time_us",
];
pub const SUMMARY_HEADER: [&str; 5] = ["selector", "step", "mean_auc", "stderr_auc", "episodes"];

/// Independent random streams derived from the master seed.
///
/// Truth for realization `r` does not depend on which selectors run, and each
/// selector's tie-breaking stream depends only on `(selector, r)`, so adding a
/// selector to a run leaves the other selectors' episodes unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedPlan {
    pub master: u64,
}

impl SeedPlan {
    fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(stream);
        rng
    }

    pub fn graph_rng(self) -> ChaCha8Rng {
        self.stream(0)
    }

    pub fn truth_rng(self, realization: usize) -> ChaCha8Rng {
        self.stream((1 << 32) | realization as u64)
    }

    pub fn selector_rng(self, selector: Selector, realization: usize) -> ChaCha8Rng {
        let index = Selector::ALL
            .iter()
            .position(|&s| s == selector)
            .expect("every selector is listed") as u64;
        self.stream(((2 + index) << 32) | realization as u64)
    }
}

/// Loads or generates the graph and applies the configured noise parameters.
pub fn prepare(config: &ExperimentConfig) -> Result<(DiagnosisGraph, NoiseModel), HarnessError> {
    config.validate()?;
    match &config.graph {
        GraphSource::Generate {
            objects,
            queries,
            edges_per_query,
        } => {
            let graph = generate_pa_bdg(
                *objects,
                *queries,
                *edges_per_query,
                &mut SeedPlan { master: config.seed }.graph_rng(),
            )?;
            let model = NoiseModel::uniform(
                &graph,
                config.prior.unwrap_or(DEFAULT_PRIOR),
                config.leak.unwrap_or(DEFAULT_NOISE),
                config.inhibition.unwrap_or(DEFAULT_NOISE),
            )?;
            Ok((graph, model))
        }
        GraphSource::File(path) => {
            let file = File::open(path)?;
            let (graph, mut model) = load_graph(BufReader::new(file))?;
            if config.leak.is_some() || config.inhibition.is_some() {
                let leak_complement = match config.leak {
                    Some(leak) => vec![1.0 - leak; graph.num_queries()],
                    None => model.leak_complements().to_vec(),
                };
                let inhibition = (0..graph.num_queries())
                    .map(|j| match config.inhibition {
                        Some(rho) => vec![rho; graph.parents(j).len()],
                        None => model.inhibition(j).to_vec(),
                    })
                    .collect();
                model = NoiseModel::new(&graph, model.prior().to_vec(), leak_complement, inhibition)?;
            }
            if let Some(prior) = config.prior {
                model = model.with_uniform_prior(prior)?;
            }
            Ok((graph, model))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub selector: Selector,
    pub step: usize,
    pub mean_auc: f64,
    /// `None` when fewer than two episodes contribute.
    pub stderr_auc: Option<f64>,
    pub episodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub num_objects: usize,
    pub num_queries: usize,
    /// Ordered by realization, then by the configured selector order.
    pub episodes: Vec<EpisodeRecord>,
    /// Realizations whose sampled truth had no faults or no working objects.
    pub skipped: Vec<usize>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentReport {
    pub fn summary_for(&self, selector: Selector) -> impl Iterator<Item = &SummaryRow> {
        self.summary.iter().filter(move |r| r.selector == selector)
    }
}

fn check_against_graph(config: &ExperimentConfig, graph: &DiagnosisGraph) -> Result<(), HarnessError> {
    if config.budget > graph.num_queries() {
        return Err(HarnessError::Config(format!(
            "budget {} exceeds the {} queries",
            config.budget,
            graph.num_queries()
        )));
    }
    let needs_oracle = config.oracle_metrics || config.selectors.iter().any(|s| s.needs_oracle());
    if needs_oracle {
        let limit = config.oracle_size_limit.min(HARD_SIZE_LIMIT);
        if graph.num_objects() > limit {
            return Err(HarnessError::Config(format!(
                "exact inference needs at most {limit} objects, graph has {}",
                graph.num_objects()
            )));
        }
    }
    Ok(())
}

pub fn run_experiment_on(
    config: &ExperimentConfig,
    graph: &DiagnosisGraph,
    model: &NoiseModel,
) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    check_against_graph(config, graph)?;
    let plan = SeedPlan { master: config.seed };
    let settings = EpisodeSettings {
        budget: config.budget,
        likelihood_floor: config.likelihood_floor,
        oracle_size_limit: config.oracle_size_limit,
        oracle_metrics: config.oracle_metrics,
        record_timing: config.record_timing,
    };

    let mut episodes = Vec::with_capacity(config.realizations * config.selectors.len());
    let mut skipped = Vec::new();
    for r in 0..config.realizations {
        let truth = GroundTruth::sample(model, graph, &mut plan.truth_rng(r));
        if truth.is_degenerate() {
            skipped.push(r);
            continue;
        }
        for &selector in &config.selectors {
            let mut rng = plan.selector_rng(selector, r);
            episodes.push(run_episode(settings, graph, model, selector, &truth, r, &mut rng)?);
        }
    }
    let summary = summarize(&config.selectors, config.budget, &episodes);
    Ok(ExperimentReport {
        num_objects: graph.num_objects(),
        num_queries: graph.num_queries(),
        episodes,
        skipped,
        summary,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let (graph, model) = prepare(config)?;
    run_experiment_on(config, &graph, &model)
}

fn summarize(selectors: &[Selector], budget: usize, episodes: &[EpisodeRecord]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for &selector in selectors {
        for step in 1..=budget {
            let values: Vec<f64> = episodes
                .iter()
                .filter(|e| e.selector == selector)
                .filter_map(|e| e.steps.get(step).map(|s| s.empirical_auc))
                .collect();
            let n = values.len();
            if n == 0 {
                continue;
            }
            let mean = values.iter().sum::<f64>() / n as f64;
            let stderr_auc = (n > 1).then(|| {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            });
            rows.push(SummaryRow {
                selector,
                step,
                mean_auc: mean,
                stderr_auc,
                episodes: n,
            });
        }
    }
    rows
}

fn opt<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_episodes_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EPISODES_HEADER)?;
    for e in &report.episodes {
        for s in &e.steps {
            w.write_record([
                e.realization.to_string(),
                s.step.to_string(),
                e.selector.to_string(),
                opt(s.query),
                opt(s.response.map(u8::from)),
                s.empirical_auc.to_string(),
                s.estimated_auc.to_string(),
                opt(s.exact_entropy),
                opt(s.select_time_us),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for row in &report.summary {
        w.write_record([
            row.selector.to_string(),
            row.step.to_string(),
            row.mean_auc.to_string(),
            opt(row.stderr_auc),
            row.episodes.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `key=value` lines describing the run, including skipped realizations.
pub fn write_metadata<W: Write>(
    config: &ExperimentConfig,
    report: &ExperimentReport,
    mut out: W,
) -> Result<(), HarnessError> {
    let selectors: Vec<&str> = config.selectors.iter().map(|s| s.as_str()).collect();
    let skipped: Vec<String> = report.skipped.iter().map(ToString::to_string).collect();
    writeln!(out, "seed={}", config.seed)?;
    writeln!(out, "objects={}", report.num_objects)?;
    writeln!(out, "queries={}", report.num_queries)?;
    writeln!(out, "selectors={}", selectors.join(","))?;
    writeln!(out, "budget={}", config.budget)?;
    writeln!(out, "realizations={}", config.realizations)?;
    writeln!(out, "likelihood_floor={}", config.likelihood_floor)?;
    writeln!(out, "oracle_metrics={}", config.oracle_metrics)?;
    writeln!(out, "skipped_count={}", report.skipped.len())?;
    writeln!(out, "skipped_realizations={}", skipped.join(","))?;
    Ok(())
}
