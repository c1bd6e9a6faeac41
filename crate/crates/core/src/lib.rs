//! Active query selection for fault diagnosis in noisy-OR bipartite networks.
//!
//! Objects (possible faults) are linked to binary queries whose outcome is a
//! noisy OR of their parent objects. Queries are chosen greedily, one at a
//! time, to sharpen a ranking of objects by posterior fault probability.

pub mod auc;
pub mod belief;
pub mod entropy;
pub mod format;
pub mod harness;
pub mod model;
pub mod netgen;
pub mod oracle;
pub mod selection;

pub use auc::{
    area_above_closed_form, area_above_double_sum, auc_estimate, rank_objects, roc_curve,
    select_query_auc, select_query_auc_exact, AucError, AucEstimate, AucMethod, RankedEstimate,
    RocCurve,
};
pub use belief::{BeliefError, SingleFaultBelief, LIKELIHOOD_FLOOR};
pub use entropy::{binary_entropy, entropy_sf_score, select_query_entropy_sf, EntropyError};
pub use format::{load_graph, save_graph, FormatError};
pub use model::{
    validate, DiagnosisGraph, DiagnosisSpec, ModelError, NoiseModel, Observation, ObservationLog,
    StateVector, Violation,
};
pub use netgen::{generate_pa_bdg, GenerateError};
pub use oracle::{ExactOracle, ExactPosterior, OracleError, Support};
