use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::oracle::DEFAULT_SIZE_LIMIT;

use super::HarnessError;

/// Fault prior used by the network experiments.
pub const DEFAULT_PRIOR: f64 = 0.03;
/// Leak and inhibition probability used by the network experiments.
pub const DEFAULT_NOISE: f64 = 0.05;
pub const DEFAULT_EDGES_PER_QUERY: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    /// Expected area above the ROC curve under the single-fault belief.
    AucSf,
    /// Single-fault entropy reduction.
    EntropySf,
    /// Exact multi-fault entropy reduction by enumeration.
    ExactEntropy,
    /// AUC criterion with exact multi-fault marginals.
    ExactAuc,
    /// Uniformly random unobserved query.
    Random,
}

impl Selector {
    pub const ALL: [Selector; 5] = [
        Selector::AucSf,
        Selector::EntropySf,
        Selector::ExactEntropy,
        Selector::ExactAuc,
        Selector::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Selector::AucSf => "auc_sf",
            Selector::EntropySf => "entropy_sf",
            Selector::ExactEntropy => "exact_entropy",
            Selector::ExactAuc => "exact_auc",
            Selector::Random => "random",
        }
    }

    pub fn needs_oracle(self) -> bool {
        matches!(self, Selector::ExactEntropy | Selector::ExactAuc)
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Selector {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Selector::ALL
            .into_iter()
            .find(|sel| sel.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown selector `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    /// A `BDG v1` file; its noise model is used unless overridden.
    File(PathBuf),
    Generate {
        objects: usize,
        queries: usize,
        edges_per_query: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    /// Broadcast prior; defaults to [`DEFAULT_PRIOR`] for generated graphs.
    pub prior: Option<f64>,
    /// Broadcast leak probability (`1 - leak complement`).
    pub leak: Option<f64>,
    /// Broadcast inhibition probability.
    pub inhibition: Option<f64>,
    pub selectors: Vec<Selector>,
    pub budget: usize,
    pub realizations: usize,
    pub seed: u64,
    /// Floor zero likelihoods instead of failing on contradictory evidence.
    pub likelihood_floor: bool,
    pub oracle_size_limit: usize,
    /// Record the exact conditional entropy after each step.
    pub oracle_metrics: bool,
    /// Record per-selection wall time. Makes output nondeterministic.
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(graph: GraphSource, seed: u64) -> Self {
        Self {
            graph,
            prior: None,
            leak: None,
            inhibition: None,
            selectors: vec![Selector::AucSf, Selector::EntropySf],
            budget: 10,
            realizations: 1,
            seed,
            likelihood_floor: false,
            oracle_size_limit: DEFAULT_SIZE_LIMIT,
            oracle_metrics: false,
            record_timing: false,
        }
    }

    /// Checks the settings that do not depend on the loaded graph.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.realizations == 0 {
            return Err(HarnessError::Config("realizations must be at least 1".into()));
        }
        if self.selectors.is_empty() {
            return Err(HarnessError::Config("no selectors given".into()));
        }
        for (name, value) in [("prior", self.prior), ("leak", self.leak), ("inhibition", self.inhibition)] {
            if let Some(v) = value {
                if !(0.0..=1.0).contains(&v) {
                    return Err(HarnessError::Config(format!("{name} {v} is not a probability")));
                }
            }
        }
        Ok(())
    }
}
