//! Python bindings for `betarisk-core`.
//!
//! Trust values cross the boundary as plain floats; estimates, Beta shapes,
//! records, networks and assessment results are wrapped in classes.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;

use betarisk_core::io::{self as core_io, DocumentError};
use betarisk_core::{self as core, CombineMethod, NetsimError, PriorSource, RiskAppetite, TrustError, TrustValue};

create_exception!(betarisk, BetaRiskError, PyValueError, "Base class for betarisk errors.");
create_exception!(betarisk, OutOfRangeError, BetaRiskError);
create_exception!(betarisk, InvalidVarianceError, BetaRiskError);
create_exception!(betarisk, DegeneratePosteriorError, BetaRiskError);
create_exception!(betarisk, EmptyUpdateError, BetaRiskError);
create_exception!(betarisk, NetworkError, BetaRiskError);
create_exception!(betarisk, DocumentFormatError, BetaRiskError);

fn trust_err(e: TrustError) -> PyErr {
    let msg = e.to_string();
    match e {
        TrustError::OutOfRange { .. } => OutOfRangeError::new_err(msg),
        TrustError::InvalidVariance { .. } => InvalidVarianceError::new_err(msg),
        TrustError::DegeneratePosterior { .. } => DegeneratePosteriorError::new_err(msg),
        TrustError::EmptyUpdate => EmptyUpdateError::new_err(msg),
    }
}

fn netsim_err(e: NetsimError) -> PyErr {
    match e {
        NetsimError::Trust(t) => trust_err(t),
        NetsimError::NodeOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        other => NetworkError::new_err(other.to_string()),
    }
}

fn document_err(e: DocumentError) -> PyErr {
    match e {
        DocumentError::Io { source, path } => pyo3::exceptions::PyOSError::new_err(format!("{path}: {source}")),
        other => DocumentFormatError::new_err(other.to_string()),
    }
}

fn trust_value(what: &str, v: f64) -> PyResult<TrustValue> {
    TrustValue::new(v).map_err(|e| OutOfRangeError::new_err(format!("{what}: {e}")))
}

fn appetite(v: f64) -> PyResult<RiskAppetite> {
    RiskAppetite::new(v).map_err(trust_err)
}

fn method(name: &str) -> PyResult<CombineMethod> {
    name.parse().map_err(|e: String| PyValueError::new_err(e))
}

fn prior(name: &str) -> PyResult<PriorSource> {
    match name {
        "direct" => Ok(PriorSource::Direct),
        "indirect" => Ok(PriorSource::Indirect),
        other => Err(PyValueError::new_err(format!("unknown prior `{other}` (expected direct or indirect)"))),
    }
}

/// A trust level with the variance expressing its uncertainty.
#[pyclass(name = "TrustEstimate", module = "betarisk", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyTrustEstimate(core::TrustEstimate);

#[pymethods]
impl PyTrustEstimate {
    #[new]
    #[pyo3(signature = (mean, variance = core::DEFAULT_VARIANCE))]
    fn new(mean: f64, variance: f64) -> PyResult<Self> {
        core::TrustEstimate::new(mean, variance).map(Self).map_err(trust_err)
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.0.mean().get()
    }

    #[getter]
    fn variance(&self) -> f64 {
        self.0.variance()
    }

    fn __repr__(&self) -> String {
        format!("TrustEstimate(mean={}, variance={})", self.mean(), self.variance())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// Shape parameters of a Beta distribution.
#[pyclass(name = "BetaParams", module = "betarisk", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyBetaParams(core::BetaParams);

#[pymethods]
impl PyBetaParams {
    #[new]
    fn new(alpha: f64, beta: f64) -> PyResult<Self> {
        core::BetaParams::new(alpha, beta).map(Self).map_err(trust_err)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    fn mean(&self) -> f64 {
        core::beta_mean(&self.0).get()
    }

    fn variance(&self) -> f64 {
        core::beta_variance(&self.0)
    }

    fn pdf(&self, x: f64) -> PyResult<f64> {
        core::beta_pdf(&self.0, x).map_err(trust_err)
    }

    fn __repr__(&self) -> String {
        format!("BetaParams(alpha={}, beta={})", self.alpha(), self.beta())
    }
}

#[pyclass(name = "FusionWeights", module = "betarisk", frozen, get_all, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyFusionWeights {
    w_a: f64,
    w_b: f64,
    k: f64,
}

#[pymethods]
impl PyFusionWeights {
    fn __repr__(&self) -> String {
        format!("FusionWeights(w_a={}, w_b={}, k={})", self.w_a, self.w_b, self.k)
    }
}

impl From<core::FusionWeights> for PyFusionWeights {
    fn from(w: core::FusionWeights) -> Self {
        PyFusionWeights { w_a: w.w_a, w_b: w.w_b, k: w.k }
    }
}

/// Every intermediate of one fusion.
#[pyclass(name = "FusionReport", module = "betarisk", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyFusionReport(core::FusionReport);

#[pymethods]
impl PyFusionReport {
    #[getter]
    fn prior(&self) -> &'static str {
        match self.0.prior {
            PriorSource::Direct => "direct",
            PriorSource::Indirect => "indirect",
        }
    }

    #[getter]
    fn direct(&self) -> PyBetaParams {
        PyBetaParams(self.0.direct)
    }

    #[getter]
    fn indirect(&self) -> PyBetaParams {
        PyBetaParams(self.0.indirect)
    }

    #[getter]
    fn weights(&self) -> PyFusionWeights {
        self.0.weights.into()
    }

    /// Weight on the direct mean, whichever side is the prior.
    #[getter]
    fn w_a(&self) -> f64 {
        self.0.weight_direct()
    }

    #[getter]
    fn w_b(&self) -> f64 {
        self.0.weight_indirect()
    }

    #[getter]
    fn combined(&self) -> f64 {
        self.0.combined.get()
    }

    fn __repr__(&self) -> String {
        format!("FusionReport(prior={:?}, combined={})", self.prior(), self.combined())
    }
}

/// Outcome of one job request: inputs, combined trust, risk and decision.
#[pyclass(name = "TrustRecord", module = "betarisk", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyTrustRecord(core::TrustRecord);

#[pymethods]
impl PyTrustRecord {
    #[getter]
    fn required(&self) -> f64 {
        self.0.required.get()
    }

    #[getter]
    fn direct(&self) -> PyTrustEstimate {
        PyTrustEstimate(self.0.direct)
    }

    #[getter]
    fn indirect(&self) -> PyTrustEstimate {
        PyTrustEstimate(self.0.indirect)
    }

    /// `None` when the decision was reached before the combined step.
    #[getter]
    fn combined(&self) -> Option<f64> {
        self.0.combined.map(TrustValue::get)
    }

    #[getter]
    fn risk(&self) -> f64 {
        self.0.risk
    }

    /// One of AcceptDirect, AcceptIndirect, AcceptCombined, AcceptWithRisk, Decline.
    #[getter]
    fn decision(&self) -> &'static str {
        self.0.decision.name()
    }

    #[getter]
    fn accepted(&self) -> bool {
        self.0.decision.is_accept()
    }

    fn __repr__(&self) -> String {
        let combined = self.combined().map_or("None".to_string(), |c| c.to_string());
        format!(
            "TrustRecord(required={}, combined={combined}, risk={}, decision={:?})",
            self.required(),
            self.risk(),
            self.decision()
        )
    }
}

/// Parameters of a seeded random network.
#[pyclass(name = "ScenarioConfig", module = "betarisk", get_all, set_all, from_py_object)]
#[derive(Clone, Copy)]
struct PyScenarioConfig {
    seed: u64,
    node_count: usize,
    edge_probability: f64,
    variance_direct: f64,
    variance_indirect: f64,
    appetite: f64,
}

#[pymethods]
impl PyScenarioConfig {
    #[new]
    #[pyo3(signature = (
        seed = core::netsim::FIFTEEN_NODE_SEED,
        node_count = 15,
        edge_probability = 0.3,
        variance_direct = core::DEFAULT_VARIANCE,
        variance_indirect = core::DEFAULT_VARIANCE,
        appetite = 0.0,
    ))]
    fn new(
        seed: u64,
        node_count: usize,
        edge_probability: f64,
        variance_direct: f64,
        variance_indirect: f64,
        appetite: f64,
    ) -> Self {
        PyScenarioConfig { seed, node_count, edge_probability, variance_direct, variance_indirect, appetite }
    }

    /// The committed fifteen-node experiment.
    #[staticmethod]
    fn fifteen_node() -> Self {
        let c = core::ScenarioConfig::fifteen_node();
        PyScenarioConfig {
            seed: c.seed,
            node_count: c.node_count,
            edge_probability: c.edge_probability,
            variance_direct: c.variance_direct,
            variance_indirect: c.variance_indirect,
            appetite: c.appetite.max_acceptable_risk(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "ScenarioConfig(seed={}, node_count={}, edge_probability={}, variance_direct={}, variance_indirect={}, appetite={})",
            self.seed, self.node_count, self.edge_probability, self.variance_direct, self.variance_indirect, self.appetite
        )
    }
}

impl PyScenarioConfig {
    fn to_core(self) -> PyResult<core::ScenarioConfig> {
        Ok(core::ScenarioConfig {
            seed: self.seed,
            node_count: self.node_count,
            edge_probability: self.edge_probability,
            variance_direct: self.variance_direct,
            variance_indirect: self.variance_indirect,
            appetite: appetite(self.appetite)?,
        })
    }
}

/// Directed network of nodes with per-edge trust inputs. Nodes are addressed
/// by index; labels are used in documents and reports.
#[pyclass(name = "Network", module = "betarisk", from_py_object)]
#[derive(Clone)]
struct PyNetwork(core::Network);

#[pymethods]
impl PyNetwork {
    #[new]
    #[pyo3(signature = (node_count, labels = None))]
    fn new(node_count: usize, labels: Option<Vec<u32>>) -> PyResult<Self> {
        match labels {
            None => Ok(PyNetwork(core::Network::new(node_count))),
            Some(labels) if labels.len() == node_count => {
                core::Network::with_labels(labels).map(PyNetwork).map_err(netsim_err)
            }
            Some(labels) => Err(PyValueError::new_err(format!("{} labels for {node_count} nodes", labels.len()))),
        }
    }

    #[staticmethod]
    fn generate(config: PyScenarioConfig) -> PyResult<Self> {
        core::generate_network(&config.to_core()?).map(PyNetwork).map_err(netsim_err)
    }

    /// The published three-node network with `variance` on every estimate.
    #[staticmethod]
    #[pyo3(signature = (variance = core::DEFAULT_VARIANCE))]
    fn fixture_three_node(variance: f64) -> PyResult<Self> {
        core::fixture_three_node_with_variance(variance).map(PyNetwork).map_err(trust_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        core_io::parse_network(text).map(PyNetwork).map_err(document_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        core_io::load_network(path).map(PyNetwork).map_err(document_err)
    }

    fn to_json(&self) -> String {
        core_io::network_to_string(&self.0)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        core_io::save_network(&self.0, path).map_err(document_err)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[getter]
    fn labels(&self) -> Vec<u32> {
        self.0.labels().to_vec()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn set_edge(
        &mut self,
        source: usize,
        target: usize,
        required: f64,
        direct: PyTrustEstimate,
        indirect: PyTrustEstimate,
    ) -> PyResult<()> {
        let edge = core::Edge { required: trust_value("required", required)?, direct: direct.0, indirect: indirect.0 };
        self.0.set_edge(source, target, edge).map_err(netsim_err)
    }

    /// `(required, direct, indirect)` or `None` when there is no edge.
    fn edge(&self, source: usize, target: usize) -> Option<(f64, PyTrustEstimate, PyTrustEstimate)> {
        self.0.edge(source, target).map(|e| (e.required.get(), PyTrustEstimate(e.direct), PyTrustEstimate(e.indirect)))
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().map(|(k, _)| k).collect()
    }

    fn appetite(&self, node: usize) -> PyResult<f64> {
        if node >= self.0.node_count() {
            return Err(netsim_err(NetsimError::NodeOutOfRange { node, node_count: self.0.node_count() }));
        }
        Ok(self.0.appetite(node).max_acceptable_risk())
    }

    fn set_appetite(&mut self, node: usize, value: f64) -> PyResult<()> {
        self.0.set_appetite(node, appetite(value)?).map_err(netsim_err)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Network(nodes={}, edges={})", self.0.node_count(), self.0.edge_count())
    }
}

/// T, A, B, C and R matrices plus per-edge records of a batch assessment.
#[pyclass(name = "AssessmentResult", module = "betarisk", frozen, skip_from_py_object)]
struct PyAssessmentResult(core::AssessmentResult);

#[pymethods]
impl PyAssessmentResult {
    #[getter]
    fn labels(&self) -> Vec<u32> {
        self.0.labels.clone()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[getter]
    fn t(&self) -> Vec<Vec<f64>> {
        self.0.t_matrix.to_rows()
    }

    #[getter]
    fn a(&self) -> Vec<Vec<f64>> {
        self.0.a_matrix.to_rows()
    }

    #[getter]
    fn b(&self) -> Vec<Vec<f64>> {
        self.0.b_matrix.to_rows()
    }

    #[getter]
    fn c(&self) -> Vec<Vec<f64>> {
        self.0.c_matrix.to_rows()
    }

    #[getter]
    fn r(&self) -> Vec<Vec<f64>> {
        self.0.r_matrix.to_rows()
    }

    /// Edges whose fusion failed, as messages naming the edge.
    #[getter]
    fn errors(&self) -> Vec<String> {
        self.0.errors.iter().map(ToString::to_string).collect()
    }

    fn record(&self, source: usize, target: usize) -> Option<PyTrustRecord> {
        self.0.records.get(&(source, target)).copied().map(PyTrustRecord)
    }

    fn decision(&self, source: usize, target: usize) -> Option<&'static str> {
        self.0.decision(source, target).map(|d| d.name())
    }

    /// `[(peer, risk), ...]` for every other node, in index order.
    fn risk_series(&self, node: usize) -> PyResult<Vec<(usize, f64)>> {
        core::risk_series(&self.0, node).map_err(netsim_err)
    }

    fn summary(&self) -> BTreeMap<&'static str, usize> {
        let s = self.0.summary();
        BTreeMap::from([
            ("edges", s.edges),
            ("accept_direct", s.accept_direct),
            ("accept_indirect", s.accept_indirect),
            ("accept_combined", s.accept_combined),
            ("accept_with_risk", s.accept_with_risk),
            ("declined", s.declined),
            ("failed", s.failed),
        ])
    }

    #[pyo3(signature = (comments = Vec::new()))]
    fn render_matrices(&self, comments: Vec<String>) -> String {
        core_io::render_matrices(&self.0, &comments)
    }

    fn render_risk_series(&self) -> String {
        core_io::render_risk_series(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("AssessmentResult(nodes={}, errors={})", self.0.node_count(), self.0.errors.len())
    }
}

#[pyfunction]
fn moments_to_beta(estimate: PyTrustEstimate) -> PyResult<PyBetaParams> {
    core::moments_to_beta(&estimate.0).map(PyBetaParams).map_err(trust_err)
}

#[pyfunction]
fn posterior_params(prior: PyBetaParams, likelihood: PyBetaParams) -> PyResult<PyBetaParams> {
    core::posterior_params(&prior.0, &likelihood.0).map(PyBetaParams).map_err(trust_err)
}

#[pyfunction]
fn fusion_weights(prior: PyBetaParams, likelihood: PyBetaParams) -> PyResult<PyFusionWeights> {
    core::fusion_weights(&prior.0, &likelihood.0).map(Into::into).map_err(trust_err)
}

#[pyfunction]
fn beta_pdf(alpha: f64, beta: f64, x: f64) -> PyResult<f64> {
    let params = core::BetaParams::new(alpha, beta).map_err(trust_err)?;
    core::beta_pdf(&params, x).map_err(trust_err)
}

#[pyfunction]
#[pyo3(signature = (direct, indirect, prior = "direct"))]
fn fuse(direct: PyTrustEstimate, indirect: PyTrustEstimate, prior: &str) -> PyResult<PyFusionReport> {
    core::fuse(&direct.0, &indirect.0, self::prior(prior)?).map(PyFusionReport).map_err(trust_err)
}

#[pyfunction]
#[pyo3(signature = (direct, indirect, method = "beta"))]
fn combined_trust(direct: PyTrustEstimate, indirect: PyTrustEstimate, method: &str) -> PyResult<f64> {
    self::method(method)?.combiner().combine(&direct.0, &indirect.0).map(TrustValue::get).map_err(trust_err)
}

#[pyfunction]
fn risk_value(required: f64, achieved: f64) -> PyResult<f64> {
    Ok(core::risk_value(trust_value("required", required)?, trust_value("achieved", achieved)?))
}

#[pyfunction]
#[pyo3(signature = (required, direct, indirect, appetite = 0.0, method = "beta"))]
fn evaluate_request(
    required: f64,
    direct: PyTrustEstimate,
    indirect: PyTrustEstimate,
    appetite: f64,
    method: &str,
) -> PyResult<PyTrustRecord> {
    core::evaluate_request_with(
        self::method(method)?.combiner(),
        trust_value("required", required)?,
        direct.0,
        indirect.0,
        self::appetite(appetite)?,
    )
    .map(PyTrustRecord)
    .map_err(trust_err)
}

#[pyfunction]
#[pyo3(signature = (record, direct = None, indirect = None, appetite = 0.0, method = "beta"))]
fn update_record(
    record: PyTrustRecord,
    direct: Option<PyTrustEstimate>,
    indirect: Option<PyTrustEstimate>,
    appetite: f64,
    method: &str,
) -> PyResult<PyTrustRecord> {
    core::update_record_with(
        self::method(method)?.combiner(),
        &record.0,
        direct.map(|d| d.0),
        indirect.map(|i| i.0),
        self::appetite(appetite)?,
    )
    .map(PyTrustRecord)
    .map_err(trust_err)
}

#[pyfunction]
fn self_record() -> PyTrustRecord {
    PyTrustRecord(core::self_record())
}

#[pyfunction]
fn generate_network(config: PyScenarioConfig) -> PyResult<PyNetwork> {
    PyNetwork::generate(config)
}

#[pyfunction]
#[pyo3(signature = (network, method = "beta"))]
fn run_assessment(py: Python<'_>, network: &PyNetwork, method: &str) -> PyResult<PyAssessmentResult> {
    let combiner = self::method(method)?.combiner();
    let net = network.0.clone();
    Ok(PyAssessmentResult(py.detach(move || core::run_assessment_with(&net, combiner))))
}

#[pymodule]
fn betarisk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DEFAULT_VARIANCE", core::DEFAULT_VARIANCE)?;
    m.add("FIFTEEN_NODE_SEED", core::netsim::FIFTEEN_NODE_SEED)?;
    m.add("BetaRiskError", py.get_type::<BetaRiskError>())?;
    m.add("OutOfRangeError", py.get_type::<OutOfRangeError>())?;
    m.add("InvalidVarianceError", py.get_type::<InvalidVarianceError>())?;
    m.add("DegeneratePosteriorError", py.get_type::<DegeneratePosteriorError>())?;
    m.add("EmptyUpdateError", py.get_type::<EmptyUpdateError>())?;
    m.add("NetworkError", py.get_type::<NetworkError>())?;
    m.add("DocumentFormatError", py.get_type::<DocumentFormatError>())?;

    m.add_class::<PyTrustEstimate>()?;
    m.add_class::<PyBetaParams>()?;
    m.add_class::<PyFusionWeights>()?;
    m.add_class::<PyFusionReport>()?;
    m.add_class::<PyTrustRecord>()?;
    m.add_class::<PyScenarioConfig>()?;
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyAssessmentResult>()?;

    m.add_function(wrap_pyfunction!(moments_to_beta, m)?)?;
    m.add_function(wrap_pyfunction!(posterior_params, m)?)?;
    m.add_function(wrap_pyfunction!(fusion_weights, m)?)?;
    m.add_function(wrap_pyfunction!(beta_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(fuse, m)?)?;
    m.add_function(wrap_pyfunction!(combined_trust, m)?)?;
    m.add_function(wrap_pyfunction!(risk_value, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_request, m)?)?;
    m.add_function(wrap_pyfunction!(update_record, m)?)?;
    m.add_function(wrap_pyfunction!(self_record, m)?)?;
    m.add_function(wrap_pyfunction!(generate_network, m)?)?;
    m.add_function(wrap_pyfunction!(run_assessment, m)?)?;
    Ok(())
}
