//! Simulation harness: sampled ground truth, selector episodes, aggregation
//! over realizations and CSV output.

mod config;
mod episode;
mod experiment;
mod metrics;
mod timing;

use thiserror::Error;

use crate::auc::AucError;
use crate::belief::BeliefError;
use crate::entropy::EntropyError;
use crate::format::FormatError;
use crate::model::ModelError;
use crate::netgen::GenerateError;
use crate::oracle::OracleError;

pub use config::{
    ExperimentConfig, GraphSource, Selector, DEFAULT_EDGES_PER_QUERY, DEFAULT_NOISE, DEFAULT_PRIOR,
};
pub use episode::{run_episode, EpisodeRecord, EpisodeSettings, GroundTruth, StepRecord};
pub use experiment::{
    prepare, run_experiment, run_experiment_on, write_episodes_csv, write_metadata, write_summary_csv,
    ExperimentReport, SeedPlan, SummaryRow, EPISODES_HEADER, SUMMARY_HEADER,
};
pub use metrics::{empirical_auc, UndefinedAuc};
pub use timing::{timing_probe, TimingRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Auc(#[from] AucError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    UndefinedAuc(#[from] UndefinedAuc),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
