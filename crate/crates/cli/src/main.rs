use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use activediag::format::save_graph;
use activediag::generate_pa_bdg;
use activediag::harness::{
    prepare, run_experiment_on, timing_probe, write_episodes_csv, write_metadata, write_summary_csv,
    ExperimentConfig, GraphSource, SeedPlan, Selector, DEFAULT_EDGES_PER_QUERY, DEFAULT_NOISE,
    DEFAULT_PRIOR,
};
use activediag::oracle::DEFAULT_SIZE_LIMIT;
use activediag::NoiseModel;
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

/// Active fault diagnosis on noisy-OR bipartite networks.
#[derive(Debug, Parser)]
#[command(name = "activediag", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a preferential-attachment graph and write it as `BDG v1`.
    Gen(GenArgs),
    /// Run query-selection episodes and write CSV results.
    Run(RunArgs),
    /// Measure AUC selection time on generated graphs with N = M.
    Time(TimeArgs),
}

#[derive(Debug, Args)]
struct GeneratorArgs {
    /// Number of objects.
    #[arg(long, default_value_t = 100)]
    objects: usize,
    /// Number of queries.
    #[arg(long, default_value_t = 100)]
    queries: usize,
    /// Parents drawn for each query.
    #[arg(long, default_value_t = DEFAULT_EDGES_PER_QUERY)]
    edges_per_query: usize,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Fault prior for every object.
    #[arg(long, default_value_t = DEFAULT_PRIOR)]
    prior: f64,
    /// Leak (spontaneous alarm) probability for every query.
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    leak: f64,
    /// Inhibition probability for every edge.
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    inhibition: f64,
    /// Master seed; `run --seed` with the same value generates the same graph.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Master seed for graph generation, ground truth and tie-breaking.
    #[arg(long)]
    seed: u64,
    /// Read the graph and noise model from a `BDG v1` file instead of generating one.
    #[arg(long, conflicts_with_all = ["objects", "queries", "edges_per_query"])]
    graph: Option<PathBuf>,
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Fault prior for every object [default: 0.03, or the file's values].
    #[arg(long)]
    prior: Option<f64>,
    /// Leak probability for every query [default: 0.05, or the file's values].
    #[arg(long)]
    leak: Option<f64>,
    /// Inhibition probability for every edge [default: 0.05, or the file's values].
    #[arg(long)]
    inhibition: Option<f64>,
    /// Comma-separated selectors: auc_sf, entropy_sf, exact_entropy, exact_auc, random.
    #[arg(long, value_delimiter = ',', default_value = "auc_sf,entropy_sf")]
    selectors: Vec<Selector>,
    /// Queries per episode.
    #[arg(long, default_value_t = 10)]
    budget: usize,
    /// Number of sampled ground truths.
    #[arg(long, default_value_t = 1)]
    realizations: usize,
    /// Floor zero likelihoods instead of failing on contradictory evidence.
    #[arg(long)]
    likelihood_floor: bool,
    /// Record the exact conditional entropy after every step (small graphs only).
    #[arg(long)]
    oracle: bool,
    /// Largest object count the exact oracle will enumerate.
    #[arg(long, default_value_t = DEFAULT_SIZE_LIMIT)]
    oracle_limit: usize,
    /// Record per-selection wall time (output is then not reproducible).
    #[arg(long)]
    timing: bool,
    /// Directory for episodes.csv, summary.csv and metadata.txt.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct TimeArgs {
    /// Comma-separated object counts.
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_EDGES_PER_QUERY)]
    edges_per_query: usize,
    /// Timed selections per size; the median is reported.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn gen(args: GenArgs) -> Result<()> {
    let g = &args.generator;
    let graph = generate_pa_bdg(
        g.objects,
        g.queries,
        g.edges_per_query,
        &mut SeedPlan { master: args.seed }.graph_rng(),
    )?;
    let model = NoiseModel::uniform(&graph, args.prior, args.leak, args.inhibition)?;
    match args.out {
        Some(path) => {
            let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut out = BufWriter::new(file);
            save_graph(&graph, &model, &mut out)?;
            out.flush()?;
        }
        None => save_graph(&graph, &model, io::stdout().lock())?,
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let graph = match args.graph {
        Some(path) => GraphSource::File(path),
        None => GraphSource::Generate {
            objects: args.generator.objects,
            queries: args.generator.queries,
            edges_per_query: args.generator.edges_per_query,
        },
    };
    let mut config = ExperimentConfig::new(graph, args.seed);
    config.prior = args.prior;
    config.leak = args.leak;
    config.inhibition = args.inhibition;
    config.selectors = args.selectors;
    config.budget = args.budget;
    config.realizations = args.realizations;
    config.likelihood_floor = args.likelihood_floor;
    config.oracle_metrics = args.oracle;
    config.oracle_size_limit = args.oracle_limit;
    config.record_timing = args.timing;

    let (graph, model) = prepare(&config)?;
    let report = run_experiment_on(&config, &graph, &model)?;

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let create = |name: &str| -> Result<BufWriter<File>> {
        let path = args.out_dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(file))
    };
    write_episodes_csv(&report, create("episodes.csv")?)?;
    write_summary_csv(&report, create("summary.csv")?)?;
    let mut meta = create("metadata.txt")?;
    write_metadata(&config, &report, &mut meta)?;
    meta.flush()?;

    eprintln!(
        "{} episodes written to {}; {} of {} realizations skipped (no faults or all faulty)",
        report.episodes.len(),
        args.out_dir.display(),
        report.skipped.len(),
        config.realizations
    );
    Ok(())
}

fn time(args: TimeArgs) -> Result<()> {
    let rows = timing_probe(&args.sizes, args.edges_per_query, args.repeats, args.seed)?;
    let mut out = io::stdout().lock();
    writeln!(out, "objects,median_us")?;
    for row in rows {
        writeln!(out, "{},{}", row.num_objects, row.median.as_micros())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Run(args) => run(args),
        Command::Time(args) => time(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
