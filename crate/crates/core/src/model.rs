//! Bipartite diagnosis graphs and the noisy-OR (QMR-DT) response model.
//!
//! Objects are the hidden binary states (1 = faulty); queries are the
//! observable probes. Query `j` is connected to the objects in its parent
//! set, and responds 0 with probability
//! `leak_complement[j] * prod_{k in parents(j), x_k = 1} inhibition[k][j]`.
//!
//! All indices are 0-based.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("query {query} out of range (graph has {num_queries} queries)")]
    QueryOutOfRange { query: usize, num_queries: usize },
    #[error("state vector has length {got}, expected {expected}")]
    StateLength { got: usize, expected: usize },
    #[error("query {query} already observed")]
    DuplicateObservation { query: usize },
    #[error("invalid diagnosis model: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// A single broken invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoObjects,
    NoQueries,
    ParentOutOfRange { query: usize, object: usize },
    DuplicateParent { query: usize, object: usize },
    PriorLength { got: usize, expected: usize },
    LeakLength { got: usize, expected: usize },
    ProbabilityOutOfRange { what: &'static str, index: (usize, usize), value: f64 },
    InhibitionOnNonEdge { object: usize, query: usize },
    MissingInhibition { object: usize, query: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoObjects => write!(f, "graph has no objects"),
            Violation::NoQueries => write!(f, "graph has no queries"),
            Violation::ParentOutOfRange { query, object } => {
                write!(f, "query {query} has parent {object} out of range")
            }
            Violation::DuplicateParent { query, object } => {
                write!(f, "query {query} lists parent {object} more than once")
            }
            Violation::PriorLength { got, expected } => {
                write!(f, "prior has {got} entries, expected {expected}")
            }
            Violation::LeakLength { got, expected } => {
                write!(f, "leak complement has {got} entries, expected {expected}")
            }
            Violation::ProbabilityOutOfRange { what, index, value } => {
                write!(f, "{what} {index:?} = {value} is not in [0, 1]")
            }
            Violation::InhibitionOnNonEdge { object, query } => {
                write!(f, "inhibition given for non-edge (object {object}, query {query})")
            }
            Violation::MissingInhibition { object, query } => {
                write!(f, "no inhibition for edge (object {object}, query {query})")
            }
        }
    }
}

/// Objects, queries and the parent set of every query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosisGraph {
    num_objects: usize,
    parents: Vec<Vec<usize>>,
    max_parent_degree: usize,
}

impl DiagnosisGraph {
    /// Builds a graph, rejecting out-of-range or repeated parents.
    pub fn new(num_objects: usize, parents: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let violations = graph_violations(num_objects, &parents);
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        let max_parent_degree = parents.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            num_objects,
            parents,
            max_parent_degree,
        })
    }

    pub fn num_objects(&self) -> usize {
        self.num_objects
    }

    pub fn num_queries(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, query: usize) -> &[usize] {
        &self.parents[query]
    }

    pub fn parent_sets(&self) -> &[Vec<usize>] {
        &self.parents
    }

    /// Largest parent-set size over all queries.
    pub fn max_parent_degree(&self) -> usize {
        self.max_parent_degree
    }

    /// Number of queries each object is connected to.
    pub fn object_degrees(&self) -> Vec<usize> {
        let mut degrees = vec![0; self.num_objects];
        for parents in &self.parents {
            for &k in parents {
                degrees[k] += 1;
            }
        }
        degrees
    }

    pub fn num_edges(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn check_query(&self, query: usize) -> Result<(), ModelError> {
        if query < self.num_queries() {
            Ok(())
        } else {
            Err(ModelError::QueryOutOfRange {
                query,
                num_queries: self.num_queries(),
            })
        }
    }
}

fn graph_violations(num_objects: usize, parents: &[Vec<usize>]) -> Vec<Violation> {
    let mut violations = Vec::new();
    if num_objects == 0 {
        violations.push(Violation::NoObjects);
    }
    if parents.is_empty() {
        violations.push(Violation::NoQueries);
    }
    for (query, set) in parents.iter().enumerate() {
        let mut seen = std::collections::BTreeSet::new();
        for &object in set {
            if object >= num_objects {
                violations.push(Violation::ParentOutOfRange { query, object });
            } else if !seen.insert(object) {
                violations.push(Violation::DuplicateParent { query, object });
            }
        }
    }
    violations
}

fn check_probability(
    violations: &mut Vec<Violation>,
    what: &'static str,
    index: (usize, usize),
    value: f64,
) {
    if !(0.0..=1.0).contains(&value) {
        violations.push(Violation::ProbabilityOutOfRange { what, index, value });
    }
}

/// QMR-DT noise parameters for a specific graph.
///
/// Inhibition is stored per edge, aligned with the graph's parent lists:
/// `inhibition[j][e]` belongs to the edge `(parents(j)[e], j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    prior: Vec<f64>,
    leak_complement: Vec<f64>,
    inhibition: Vec<Vec<f64>>,
}

impl NoiseModel {
    /// Scalar parameters broadcast over every object, query and edge.
    ///
    /// `leak` is the spontaneous-alarm probability, so the stored leak
    /// complement is `1 - leak`.
    pub fn uniform(
        graph: &DiagnosisGraph,
        prior: f64,
        leak: f64,
        inhibition: f64,
    ) -> Result<Self, ModelError> {
        Self::new(
            graph,
            vec![prior; graph.num_objects()],
            vec![1.0 - leak; graph.num_queries()],
            graph
                .parent_sets()
                .iter()
                .map(|p| vec![inhibition; p.len()])
                .collect(),
        )
    }

    /// Per-element parameters; `inhibition` must be aligned with the parent lists.
    pub fn new(
        graph: &DiagnosisGraph,
        prior: Vec<f64>,
        leak_complement: Vec<f64>,
        inhibition: Vec<Vec<f64>>,
    ) -> Result<Self, ModelError> {
        let mut edges = BTreeMap::new();
        let mut violations = Vec::new();
        for (j, parents) in graph.parent_sets().iter().enumerate() {
            let row = inhibition.get(j).map(Vec::as_slice).unwrap_or(&[]);
            for (e, &k) in parents.iter().enumerate() {
                match row.get(e) {
                    Some(&rho) => {
                        edges.insert((k, j), rho);
                    }
                    None => violations.push(Violation::MissingInhibition { object: k, query: j }),
                }
            }
        }
        let spec = DiagnosisSpec {
            num_objects: graph.num_objects(),
            parents: graph.parent_sets().to_vec(),
            prior,
            leak_complement,
            inhibition: edges,
        };
        if let Err(more) = spec.validate() {
            violations.extend(more);
        }
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        Ok(Self {
            prior: spec.prior,
            leak_complement: spec.leak_complement,
            inhibition,
        })
    }

    /// Replaces the prior with a scalar broadcast.
    pub fn with_uniform_prior(mut self, prior: f64) -> Result<Self, ModelError> {
        let mut violations = Vec::new();
        check_probability(&mut violations, "prior", (0, 0), prior);
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        self.prior.iter_mut().for_each(|a| *a = prior);
        Ok(self)
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn leak_complement(&self, query: usize) -> f64 {
        self.leak_complement[query]
    }

    pub fn leak_complements(&self) -> &[f64] {
        &self.leak_complement
    }

    /// Inhibition values of query `j`, aligned with `graph.parents(j)`.
    pub fn inhibition(&self, query: usize) -> &[f64] {
        &self.inhibition[query]
    }

    /// `Pr(Z_j = 0 | x)`. Depends only on the parents of `j`.
    pub fn conditional_zero_prob(
        &self,
        graph: &DiagnosisGraph,
        query: usize,
        state: &StateVector,
    ) -> Result<f64, ModelError> {
        graph.check_query(query)?;
        if state.len() != graph.num_objects() {
            return Err(ModelError::StateLength {
                got: state.len(),
                expected: graph.num_objects(),
            });
        }
        Ok(self.zero_prob_unchecked(graph, query, |k| state.bits[k]))
    }

    /// Product formula over a predicate telling which objects are faulty.
    pub(crate) fn zero_prob_unchecked(
        &self,
        graph: &DiagnosisGraph,
        query: usize,
        faulty: impl Fn(usize) -> bool,
    ) -> f64 {
        graph
            .parents(query)
            .iter()
            .zip(&self.inhibition[query])
            .filter(|(&k, _)| faulty(k))
            .fold(self.leak_complement[query], |acc, (_, &rho)| acc * rho)
    }

    /// Draws every object independently with its prior fault probability.
    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> StateVector {
        StateVector {
            bits: self.prior.iter().map(|&a| rng.gen::<f64>() < a).collect(),
        }
    }

    /// Draws a noisy response to `query` given the true state.
    pub fn sample_response<R: Rng + ?Sized>(
        &self,
        graph: &DiagnosisGraph,
        query: usize,
        state: &StateVector,
        rng: &mut R,
    ) -> Result<bool, ModelError> {
        let p0 = self.conditional_zero_prob(graph, query, state)?;
        Ok(rng.gen::<f64>() >= p0)
    }
}

/// Unvalidated graph and noise parameters, with inhibition keyed by
/// `(object, query)`. This is the shape of a model read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisSpec {
    pub num_objects: usize,
    pub parents: Vec<Vec<usize>>,
    pub prior: Vec<f64>,
    pub leak_complement: Vec<f64>,
    pub inhibition: BTreeMap<(usize, usize), f64>,
}

impl DiagnosisSpec {
    /// Reports every violated invariant.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut violations = graph_violations(self.num_objects, &self.parents);
        if self.prior.len() != self.num_objects {
            violations.push(Violation::PriorLength {
                got: self.prior.len(),
                expected: self.num_objects,
            });
        }
        if self.leak_complement.len() != self.parents.len() {
            violations.push(Violation::LeakLength {
                got: self.leak_complement.len(),
                expected: self.parents.len(),
            });
        }
        for (i, &a) in self.prior.iter().enumerate() {
            check_probability(&mut violations, "prior", (i, i), a);
        }
        for (j, &r) in self.leak_complement.iter().enumerate() {
            check_probability(&mut violations, "leak complement", (j, j), r);
        }
        for (&(k, j), &rho) in &self.inhibition {
            let is_edge = self.parents.get(j).is_some_and(|p| p.contains(&k));
            if !is_edge {
                violations.push(Violation::InhibitionOnNonEdge { object: k, query: j });
            }
            check_probability(&mut violations, "inhibition", (k, j), rho);
        }
        for (j, parents) in self.parents.iter().enumerate() {
            for &k in parents {
                if !self.inhibition.contains_key(&(k, j)) {
                    violations.push(Violation::MissingInhibition { object: k, query: j });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn build(self) -> Result<(DiagnosisGraph, NoiseModel), ModelError> {
        self.validate().map_err(ModelError::Invalid)?;
        let inhibition = self
            .parents
            .iter()
            .enumerate()
            .map(|(j, p)| p.iter().map(|&k| self.inhibition[&(k, j)]).collect())
            .collect();
        let graph = DiagnosisGraph::new(self.num_objects, self.parents)?;
        let model = NoiseModel {
            prior: self.prior,
            leak_complement: self.leak_complement,
            inhibition,
        };
        Ok((graph, model))
    }

    pub fn from_parts(graph: &DiagnosisGraph, model: &NoiseModel) -> Self {
        let mut inhibition = BTreeMap::new();
        for (j, parents) in graph.parent_sets().iter().enumerate() {
            for (&k, &rho) in parents.iter().zip(model.inhibition(j)) {
                inhibition.insert((k, j), rho);
            }
        }
        Self {
            num_objects: graph.num_objects(),
            parents: graph.parent_sets().to_vec(),
            prior: model.prior().to_vec(),
            leak_complement: model.leak_complements().to_vec(),
            inhibition,
        }
    }
}

/// Checks a built graph and model against each other.
pub fn validate(graph: &DiagnosisGraph, model: &NoiseModel) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    for (j, parents) in graph.parent_sets().iter().enumerate() {
        let row = model.inhibition.get(j).map(Vec::len).unwrap_or(0);
        if row != parents.len() {
            for &k in parents.iter().skip(row) {
                violations.push(Violation::MissingInhibition { object: k, query: j });
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    DiagnosisSpec::from_parts(graph, model).validate()
}

/// True object states; `true` means faulty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateVector {
    bits: Vec<bool>,
}

impl StateVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    /// The state with only `object` faulty.
    pub fn single_fault(len: usize, object: usize) -> Self {
        let mut s = Self::zeros(len);
        s.bits[object] = true;
        s
    }

    /// Decodes a bitmask where bit `i` is object `i`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        Self {
            bits: (0..len).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_faulty(&self, object: usize) -> bool {
        self.bits[object]
    }

    pub fn faults(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn fault_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// One observed query response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub query: usize,
    pub response: bool,
}

/// Queries observed so far, in selection order, each at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationLog {
    num_queries: usize,
    entries: Vec<Observation>,
    observed: Vec<bool>,
}

impl ObservationLog {
    pub fn new(num_queries: usize) -> Self {
        Self {
            num_queries,
            entries: Vec::new(),
            observed: vec![false; num_queries],
        }
    }

    pub fn from_entries(
        num_queries: usize,
        entries: impl IntoIterator<Item = Observation>,
    ) -> Result<Self, ModelError> {
        let mut log = Self::new(num_queries);
        for o in entries {
            log.push(o.query, o.response)?;
        }
        Ok(log)
    }

    pub fn push(&mut self, query: usize, response: bool) -> Result<(), ModelError> {
        if query >= self.num_queries {
            return Err(ModelError::QueryOutOfRange {
                query,
                num_queries: self.num_queries,
            });
        }
        if self.observed[query] {
            return Err(ModelError::DuplicateObservation { query });
        }
        self.observed[query] = true;
        self.entries.push(Observation { query, response });
        Ok(())
    }

    pub fn entries(&self) -> &[Observation] {
        &self.entries
    }

    pub fn contains(&self, query: usize) -> bool {
        self.observed.get(query).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Queries not yet observed, in index order.
    pub fn unobserved(&self) -> Vec<usize> {
        (0..self.num_queries).filter(|&j| !self.observed[j]).collect()
    }
}
