//! Directed trust networks, seeded scenario generation and batch assessment.

use std::collections::BTreeMap;

use rand::distr::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beta_fusion::{TrustEstimate, TrustValue, DEFAULT_VARIANCE};
use crate::combiner::{BetaCombiner, TrustCombiner};
use crate::error::TrustError;
use crate::trust_table::{evaluate_request_with, self_record, DecisionOutcome, RiskAppetite, TrustRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetsimError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("node index {node} out of range for a network of {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-edge on node {0}: self trust is fixed")]
    SelfEdge(usize),
    #[error("duplicate node label {0}")]
    DuplicateLabel(u32),
    #[error(transparent)]
    Trust(#[from] TrustError),
}

/// A fusion failure on one edge of a batch assessment.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("edge {from_label} -> {to_label}: {source}")]
pub struct EdgeError {
    pub from: usize,
    pub to: usize,
    pub from_label: u32,
    pub to_label: u32,
    pub source: TrustError,
}

/// Trust inputs carried by one directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub required: TrustValue,
    pub direct: TrustEstimate,
    pub indirect: TrustEstimate,
}

/// A directed graph of nodes with per-edge trust inputs.
///
/// Nodes are addressed by index `0..node_count`; each also has a numeric
/// label used in documents and reports. Edges `(i, j)` and `(j, i)` are
/// unrelated.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    labels: Vec<u32>,
    edges: BTreeMap<(usize, usize), Edge>,
    appetites: Vec<RiskAppetite>,
}

impl Network {
    /// An edgeless network labelled `1..=node_count`.
    pub fn new(node_count: usize) -> Self {
        Network {
            labels: (1..=node_count as u32).collect(),
            edges: BTreeMap::new(),
            appetites: vec![RiskAppetite::default(); node_count],
        }
    }

    pub fn with_labels(labels: Vec<u32>) -> Result<Self, NetsimError> {
        let mut seen = std::collections::BTreeSet::new();
        for &label in &labels {
            if !seen.insert(label) {
                return Err(NetsimError::DuplicateLabel(label));
            }
        }
        let n = labels.len();
        Ok(Network { labels, edges: BTreeMap::new(), appetites: vec![RiskAppetite::default(); n] })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    fn check_node(&self, node: usize) -> Result<(), NetsimError> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(NetsimError::NodeOutOfRange { node, node_count: self.node_count() })
        }
    }

    /// Inserts or replaces the edge `from -> to`.
    pub fn set_edge(&mut self, from: usize, to: usize, edge: Edge) -> Result<(), NetsimError> {
        self.check_node(from)?;
        self.check_node(to)?;
        if from == to {
            return Err(NetsimError::SelfEdge(from));
        }
        self.edges.insert((from, to), edge);
        Ok(())
    }

    pub fn edge(&self, from: usize, to: usize) -> Option<&Edge> {
        self.edges.get(&(from, to))
    }

    /// Edges in row-major `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), &Edge)> {
        self.edges.iter().map(|(&k, v)| (k, v))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn appetite(&self, node: usize) -> RiskAppetite {
        self.appetites[node]
    }

    pub fn set_appetite(&mut self, node: usize, appetite: RiskAppetite) -> Result<(), NetsimError> {
        self.check_node(node)?;
        self.appetites[node] = appetite;
        Ok(())
    }

    pub fn set_all_appetites(&mut self, appetite: RiskAppetite) {
        self.appetites.fill(appetite);
    }
}

/// Seed used for the committed fifteen-node experiment.
pub const FIFTEEN_NODE_SEED: u64 = 42;

/// Parameters of a random scenario. Equal configs give equal networks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub node_count: usize,
    pub edge_probability: f64,
    pub variance_direct: f64,
    pub variance_indirect: f64,
    pub appetite: RiskAppetite,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: FIFTEEN_NODE_SEED,
            node_count: 15,
            edge_probability: 0.3,
            variance_direct: DEFAULT_VARIANCE,
            variance_indirect: DEFAULT_VARIANCE,
            appetite: RiskAppetite::default(),
        }
    }
}

impl ScenarioConfig {
    /// The fifteen-node experiment shipped with the repository.
    pub fn fifteen_node() -> Self {
        ScenarioConfig::default()
    }

    fn validate(&self) -> Result<(), NetsimError> {
        if self.node_count < 2 {
            return Err(NetsimError::InvalidConfig(format!("node_count must be at least 2, got {}", self.node_count)));
        }
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return Err(NetsimError::InvalidConfig(format!(
                "edge_probability must lie in [0, 1], got {}",
                self.edge_probability
            )));
        }
        for (name, v) in [("variance_direct", self.variance_direct), ("variance_indirect", self.variance_indirect)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(NetsimError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Builds a random network from `config`.
///
/// The generator is ChaCha8 seeded via `seed_from_u64(config.seed)`. Ordered
/// pairs `(i, j)`, `i != j`, are visited row-major. For each pair one
/// `[0, 1)` draw decides existence (`u < edge_probability`); if the edge
/// exists, three draws on the open interval `(0, 1)` give the required,
/// direct and indirect trust means, in that order. Absent edges consume no
/// further draws.
pub fn generate_network(config: &ScenarioConfig) -> Result<Network, NetsimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut network = Network::new(config.node_count);
    network.set_all_appetites(config.appetite);
    let n = config.node_count;
    for from in 0..n {
        for to in (0..n).filter(|&to| to != from) {
            let exists: f64 = rng.random();
            if exists >= config.edge_probability {
                continue;
            }
            let required: f64 = Open01.sample(&mut rng);
            let direct: f64 = Open01.sample(&mut rng);
            let indirect: f64 = Open01.sample(&mut rng);
            let edge = Edge {
                required: TrustValue::new(required)?,
                direct: TrustEstimate::new(direct, config.variance_direct)?,
                indirect: TrustEstimate::new(indirect, config.variance_indirect)?,
            };
            network.set_edge(from, to, edge)?;
        }
    }
    Ok(network)
}

/// Row-major square matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, values: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(SquareMatrix { n, values: rows.into_iter().flatten().collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.values[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

/// Outcome of assessing every edge of a network.
///
/// Matrices follow the tabular convention: the diagonal holds the self
/// record (`T = R = 0`, `A = B = C = 1`), absent edges are 0 everywhere, and
/// a combined value skipped by a short circuit is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessmentResult {
    pub labels: Vec<u32>,
    pub t_matrix: SquareMatrix,
    pub a_matrix: SquareMatrix,
    pub b_matrix: SquareMatrix,
    pub c_matrix: SquareMatrix,
    pub r_matrix: SquareMatrix,
    pub records: BTreeMap<(usize, usize), TrustRecord>,
    pub errors: Vec<EdgeError>,
}

/// Decision counts over the assessed edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AssessmentSummary {
    pub edges: usize,
    pub accept_direct: usize,
    pub accept_indirect: usize,
    pub accept_combined: usize,
    pub accept_with_risk: usize,
    pub declined: usize,
    pub failed: usize,
}

impl AssessmentResult {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn decision(&self, from: usize, to: usize) -> Option<DecisionOutcome> {
        self.records.get(&(from, to)).map(|r| r.decision)
    }

    pub fn summary(&self) -> AssessmentSummary {
        let mut s = AssessmentSummary {
            edges: self.records.len() + self.errors.len(),
            failed: self.errors.len(),
            ..Default::default()
        };
        for record in self.records.values() {
            match record.decision {
                DecisionOutcome::AcceptDirect => s.accept_direct += 1,
                DecisionOutcome::AcceptIndirect => s.accept_indirect += 1,
                DecisionOutcome::AcceptCombined => s.accept_combined += 1,
                DecisionOutcome::AcceptWithRisk(_) => s.accept_with_risk += 1,
                DecisionOutcome::Decline(_) => s.declined += 1,
            }
        }
        s
    }
}

pub fn run_assessment(network: &Network) -> AssessmentResult {
    run_assessment_with(network, &BetaCombiner::default())
}

/// Evaluates every edge with `combiner`, in parallel.
///
/// An edge whose fusion fails keeps its T, A and B entries, gets 0 for C and
/// R, and is reported in `errors`; the other edges are unaffected.
pub fn run_assessment_with(network: &Network, combiner: &dyn TrustCombiner) -> AssessmentResult {
    let n = network.node_count();
    let mut t = SquareMatrix::zeros(n);
    let mut a = SquareMatrix::zeros(n);
    let mut b = SquareMatrix::zeros(n);
    let mut c = SquareMatrix::zeros(n);
    let mut r = SquareMatrix::zeros(n);

    let me = self_record();
    for i in 0..n {
        t.set(i, i, me.required.get());
        a.set(i, i, me.direct.mean().get());
        b.set(i, i, me.indirect.mean().get());
        c.set(i, i, me.combined_or_zero());
        r.set(i, i, me.risk);
    }

    let edges: Vec<((usize, usize), &Edge)> = network.edges().collect();
    let outcomes: Vec<_> = edges
        .par_iter()
        .map(|&((from, _), edge)| {
            evaluate_request_with(combiner, edge.required, edge.direct, edge.indirect, network.appetite(from))
        })
        .collect();

    let mut records = BTreeMap::new();
    let mut errors = Vec::new();
    for (((from, to), edge), outcome) in edges.into_iter().zip(outcomes) {
        t.set(from, to, edge.required.get());
        a.set(from, to, edge.direct.mean().get());
        b.set(from, to, edge.indirect.mean().get());
        match outcome {
            Ok(record) => {
                c.set(from, to, record.combined_or_zero());
                r.set(from, to, record.risk);
                records.insert((from, to), record);
            }
            Err(source) => errors.push(EdgeError {
                from,
                to,
                from_label: network.labels()[from],
                to_label: network.labels()[to],
                source,
            }),
        }
    }

    AssessmentResult {
        labels: network.labels().to_vec(),
        t_matrix: t,
        a_matrix: a,
        b_matrix: b,
        c_matrix: c,
        r_matrix: r,
        records,
        errors,
    }
}

/// Risk from `node` to each other node, in index order, skipping itself.
pub fn risk_series(result: &AssessmentResult, node: usize) -> Result<Vec<(usize, f64)>, NetsimError> {
    let n = result.node_count();
    if node >= n {
        return Err(NetsimError::NodeOutOfRange { node, node_count: n });
    }
    Ok(result
        .r_matrix
        .row(node)
        .iter()
        .enumerate()
        .filter(|&(peer, _)| peer != node)
        .map(|(peer, &risk)| (peer, risk))
        .collect())
}

/// Required, direct and indirect trust of the published three-node example,
/// row-major with the diagonal included.
pub const TABLE1_REQUIRED: [[f64; 3]; 3] = [[0.0, 0.4546, 0.7148], [0.7688, 0.0, 0.5383], [0.5846, 0.2413, 0.0]];
pub const TABLE1_DIRECT: [[f64; 3]; 3] = [[1.0, 0.5133, 0.6844], [0.5141, 1.0, 0.1610], [0.4685, 0.7003, 1.0]];
pub const TABLE1_INDIRECT: [[f64; 3]; 3] = [[1.0, 0.7578, 0.0445], [0.8596, 1.0, 0.5953], [0.4558, 0.0777, 1.0]];

/// The three-node network, fully connected, labelled 1..=3, with the default
/// variance on every estimate and zero risk appetite.
pub fn fixture_three_node() -> Network {
    fixture_three_node_with_variance(DEFAULT_VARIANCE).expect("default variance is valid")
}

/// [`fixture_three_node`] with `variance` on every direct and indirect estimate.
pub fn fixture_three_node_with_variance(variance: f64) -> Result<Network, TrustError> {
    let mut network = Network::new(3);
    for from in 0..3 {
        for to in (0..3).filter(|&to| to != from) {
            let edge = Edge {
                required: TrustValue::new(TABLE1_REQUIRED[from][to])?,
                direct: TrustEstimate::new(TABLE1_DIRECT[from][to], variance)?,
                indirect: TrustEstimate::new(TABLE1_INDIRECT[from][to], variance)?,
            };
            network.set_edge(from, to, edge).expect("fixture edge");
        }
    }
    Ok(network)
}
