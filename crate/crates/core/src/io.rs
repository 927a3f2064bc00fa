//! Network documents (JSON) and matrix reports (sectioned CSV).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beta_fusion::{TrustEstimate, TrustValue, DEFAULT_VARIANCE};
use crate::netsim::{AssessmentResult, Edge, Network, SquareMatrix};
use crate::trust_table::RiskAppetite;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema violation at {field}: {message}")]
    Schema { field: String, message: String },
    #[error("range violation at {field}{}: {value} is outside {range}", edge.as_ref().map(|e| format!(" (edge {e})")).unwrap_or_default())]
    Range { field: String, edge: Option<String>, value: f64, range: &'static str },
    #[error("matrix document line {line}: {message}")]
    Matrix { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentDefaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_acceptable_risk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub from: u32,
    pub to: u32,
    pub required: f64,
    pub direct_mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_variance: Option<f64>,
    pub indirect_mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indirect_variance: Option<f64>,
}

/// On-disk form of a [`Network`].
///
/// Omitted variances fall back to `defaults.variance`, then to
/// [`DEFAULT_VARIANCE`]. `appetites` overrides the default risk appetite for
/// individual nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub schema_version: u32,
    pub nodes: Vec<u32>,
    #[serde(default)]
    pub edges: Vec<EdgeDocument>,
    #[serde(default)]
    pub defaults: DocumentDefaults,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub appetites: BTreeMap<u32, f64>,
}

fn check_unit(field: String, edge: Option<String>, value: f64) -> Result<f64, DocumentError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(DocumentError::Range { field, edge, value, range: "[0, 1]" })
    }
}

fn check_variance(field: String, edge: Option<String>, value: f64) -> Result<f64, DocumentError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(DocumentError::Range { field, edge, value, range: "(0, inf)" })
    }
}

impl NetworkDocument {
    pub fn from_network(network: &Network) -> Self {
        let default_appetite = if network.node_count() > 0 { network.appetite(0) } else { RiskAppetite::default() };
        let labels = network.labels();
        let edges = network
            .edges()
            .map(|((from, to), edge)| EdgeDocument {
                from: labels[from],
                to: labels[to],
                required: edge.required.get(),
                direct_mean: edge.direct.mean().get(),
                direct_variance: Some(edge.direct.variance()),
                indirect_mean: edge.indirect.mean().get(),
                indirect_variance: Some(edge.indirect.variance()),
            })
            .collect();
        let appetites = (0..network.node_count())
            .filter(|&i| network.appetite(i) != default_appetite)
            .map(|i| (labels[i], network.appetite(i).max_acceptable_risk()))
            .collect();
        NetworkDocument {
            schema_version: SCHEMA_VERSION,
            nodes: labels.to_vec(),
            edges,
            defaults: DocumentDefaults {
                variance: Some(DEFAULT_VARIANCE),
                max_acceptable_risk: Some(default_appetite.max_acceptable_risk()),
            },
            appetites,
        }
    }

    /// Validates the document and builds the network it describes.
    pub fn to_network(&self) -> Result<Network, DocumentError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::Schema {
                field: "schema_version".into(),
                message: format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            });
        }
        let mut network = Network::with_labels(self.nodes.clone())
            .map_err(|e| DocumentError::Schema { field: "nodes".into(), message: e.to_string() })?;

        let variance = match self.defaults.variance {
            Some(v) => check_variance("defaults.variance".into(), None, v)?,
            None => DEFAULT_VARIANCE,
        };
        let appetite = match self.defaults.max_acceptable_risk {
            Some(r) => check_unit("defaults.max_acceptable_risk".into(), None, r)?,
            None => 0.0,
        };
        network.set_all_appetites(RiskAppetite::new(appetite).expect("checked"));
        for (&label, &r) in &self.appetites {
            let field = format!("appetites.{label}");
            let node = network.index_of(label).ok_or_else(|| DocumentError::Schema {
                field: field.clone(),
                message: format!("unknown node {label}"),
            })?;
            let r = check_unit(field, None, r)?;
            network.set_appetite(node, RiskAppetite::new(r).expect("checked")).expect("index from lookup");
        }

        for (k, e) in self.edges.iter().enumerate() {
            let name = format!("{} -> {}", e.from, e.to);
            let field = |f: &str| format!("edges[{k}].{f}");
            let endpoint = |label: u32, f: &str| {
                network.index_of(label).ok_or_else(|| DocumentError::Schema {
                    field: field(f),
                    message: format!("edge {name} references unknown node {label}"),
                })
            };
            let from = endpoint(e.from, "from")?;
            let to = endpoint(e.to, "to")?;
            if from == to {
                return Err(DocumentError::Schema { field: field("to"), message: format!("self-edge {name}") });
            }
            if network.edge(from, to).is_some() {
                return Err(DocumentError::Schema { field: field("from"), message: format!("duplicate edge {name}") });
            }
            let edge_id = Some(name.clone());
            let required = check_unit(field("required"), edge_id.clone(), e.required)?;
            let direct_mean = check_unit(field("direct_mean"), edge_id.clone(), e.direct_mean)?;
            let indirect_mean = check_unit(field("indirect_mean"), edge_id.clone(), e.indirect_mean)?;
            let direct_var = match e.direct_variance {
                Some(v) => check_variance(field("direct_variance"), edge_id.clone(), v)?,
                None => variance,
            };
            let indirect_var = match e.indirect_variance {
                Some(v) => check_variance(field("indirect_variance"), edge_id.clone(), v)?,
                None => variance,
            };
            let edge = Edge {
                required: TrustValue::new(required).expect("checked"),
                direct: TrustEstimate::new(direct_mean, direct_var).expect("checked"),
                indirect: TrustEstimate::new(indirect_mean, indirect_var).expect("checked"),
            };
            network.set_edge(from, to, edge).expect("endpoints checked");
        }
        Ok(network)
    }
}

pub fn parse_network(text: &str) -> Result<Network, DocumentError> {
    let doc: NetworkDocument = serde_json::from_str(text).map_err(|e| DocumentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.to_network()
}

pub fn network_to_string(network: &Network) -> String {
    let mut s = serde_json::to_string_pretty(&NetworkDocument::from_network(network)).expect("document serializes");
    s.push('\n');
    s
}

pub fn load_network(path: impl AsRef<Path>) -> Result<Network, DocumentError> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|source| DocumentError::Io { path: path.display().to_string(), source })?;
    parse_network(&text)
}

pub fn save_network(network: &Network, path: impl AsRef<Path>) -> Result<(), DocumentError> {
    let path = path.as_ref();
    fs::write(path, network_to_string(network))
        .map_err(|source| DocumentError::Io { path: path.display().to_string(), source })
}

/// The five matrices of an assessment, as read back from text.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDocument {
    pub labels: Vec<u32>,
    pub t: SquareMatrix,
    pub a: SquareMatrix,
    pub b: SquareMatrix,
    pub c: SquareMatrix,
    pub r: SquareMatrix,
}

const SECTIONS: [&str; 5] = ["T", "A", "B", "C", "R"];

fn render_matrix(out: &mut String, name: &str, labels: &[u32], m: &SquareMatrix) {
    let _ = writeln!(out, "[{name}]");
    out.push_str("node");
    for l in labels {
        let _ = write!(out, ",{l}");
    }
    out.push('\n');
    for (label, row) in labels.iter().zip(m.rows()) {
        let _ = write!(out, "{label}");
        for v in row {
            let _ = write!(out, ",{v:.4}");
        }
        out.push('\n');
    }
}

/// Renders T, A, B, C and R as comma-separated tables with four decimals.
///
/// Each matrix starts with a `[NAME]` header line followed by a `node,...`
/// label row; sections are separated by a blank line. `comments` are written
/// first as `# ` lines.
pub fn render_matrices(result: &AssessmentResult, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let mats = [&result.t_matrix, &result.a_matrix, &result.b_matrix, &result.c_matrix, &result.r_matrix];
    for (k, (name, m)) in SECTIONS.iter().zip(mats).enumerate() {
        if k > 0 {
            out.push('\n');
        }
        render_matrix(&mut out, name, &result.labels, m);
    }
    out
}

pub fn parse_matrices(text: &str) -> Result<MatrixDocument, DocumentError> {
    let err = |line: usize, message: String| DocumentError::Matrix { line, message };
    let mut labels: Option<Vec<u32>> = None;
    let mut sections: BTreeMap<String, (usize, Vec<Vec<f64>>)> = BTreeMap::new();
    let mut current: Option<String> = None;
    let mut expect_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            if !SECTIONS.contains(&name) {
                return Err(err(line_no, format!("unknown section [{name}]")));
            }
            if sections.contains_key(name) {
                return Err(err(line_no, format!("repeated section [{name}]")));
            }
            sections.insert(name.to_string(), (line_no, Vec::new()));
            current = Some(name.to_string());
            expect_header = true;
            continue;
        }
        let Some(name) = current.as_ref() else {
            return Err(err(line_no, "content before the first section header".into()));
        };
        let mut cells = line.split(',');
        let first = cells.next().unwrap_or_default();
        if expect_header {
            if first != "node" {
                return Err(err(line_no, "expected a `node,...` label row".into()));
            }
            let row_labels = cells
                .map(|c| c.trim().parse::<u32>().map_err(|e| err(line_no, format!("bad label `{c}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            match &labels {
                Some(l) if *l != row_labels => {
                    return Err(err(line_no, format!("labels of [{name}] differ from earlier sections")))
                }
                Some(_) => {}
                None => labels = Some(row_labels),
            }
            expect_header = false;
            continue;
        }
        let values = cells
            .map(|c| c.trim().parse::<f64>().map_err(|e| err(line_no, format!("bad value `{c}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        sections.get_mut(name).expect("section registered").1.push(values);
    }

    let labels = labels.ok_or_else(|| err(0, "no sections found".into()))?;
    let mut take = |name: &str| {
        let (line, rows) = sections.remove(name).ok_or_else(|| err(0, format!("missing section [{name}]")))?;
        if rows.len() != labels.len() {
            return Err(err(line, format!("[{name}] has {} rows, expected {}", rows.len(), labels.len())));
        }
        SquareMatrix::from_rows(rows).ok_or_else(|| err(line, format!("[{name}] is not square")))
    };
    Ok(MatrixDocument { t: take("T")?, a: take("A")?, b: take("B")?, c: take("C")?, r: take("R")?, labels })
}

/// Per-node risk towards every peer, one row per node with the node's own
/// cell left empty. This is the data behind a risk-between-nodes plot.
pub fn render_risk_series(result: &AssessmentResult) -> String {
    let mut out = String::from("node");
    for l in &result.labels {
        let _ = write!(out, ",{l}");
    }
    out.push('\n');
    for (i, label) in result.labels.iter().enumerate() {
        let _ = write!(out, "{label}");
        for (j, v) in result.r_matrix.row(i).iter().enumerate() {
            if i == j {
                out.push(',');
            } else {
                let _ = write!(out, ",{v:.4}");
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::{fixture_three_node, run_assessment};

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "nodes": [1, 2],
        "edges": [{"from": 1, "to": 2, "required": 0.5, "direct_mean": 0.4, "indirect_mean": 0.3}]
    }"#;

    #[test]
    fn omitted_variances_default() {
        let net = parse_network(MINIMAL).unwrap();
        let e = net.edge(0, 1).unwrap();
        assert_eq!(e.direct.variance(), 0.01);
        assert_eq!(e.indirect.variance(), 0.01);
        assert_eq!(net.appetite(0).max_acceptable_risk(), 0.0);
    }

    #[test]
    fn document_default_variance_applies() {
        let text = MINIMAL.replace("\"nodes\"", "\"defaults\": {\"variance\": 0.02}, \"nodes\"");
        let net = parse_network(&text).unwrap();
        assert_eq!(net.edge(0, 1).unwrap().direct.variance(), 0.02);
    }

    #[test]
    fn range_violation_names_edge() {
        let text = MINIMAL.replace("\"direct_mean\": 0.4", "\"direct_mean\": 1.2");
        let err = parse_network(&text).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, DocumentError::Range { .. }));
        assert!(msg.contains("1 -> 2") && msg.contains("direct_mean"), "{msg}");
    }

    #[test]
    fn parse_error_has_line() {
        let err = parse_network("{\n  \"schema_version\": 1,\n  \"nodes\": [1, 2,\n}").unwrap_err();
        assert!(matches!(err, DocumentError::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn schema_violations() {
        let unknown = MINIMAL.replace("\"to\": 2", "\"to\": 9");
        assert!(matches!(parse_network(&unknown), Err(DocumentError::Schema { .. })));
        let dup = MINIMAL.replace("[1, 2]", "[1, 2, 2]");
        assert!(matches!(parse_network(&dup), Err(DocumentError::Schema { .. })));
        let version = MINIMAL.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(parse_network(&version), Err(DocumentError::Schema { .. })));
        let selfedge = MINIMAL.replace("\"to\": 2", "\"to\": 1");
        assert!(matches!(parse_network(&selfedge), Err(DocumentError::Schema { .. })));
        let extra = MINIMAL.replace("\"nodes\"", "\"colour\": 1, \"nodes\"");
        assert!(matches!(parse_network(&extra), Err(DocumentError::Parse { .. })));
    }

    #[test]
    fn per_node_appetite_round_trips() {
        let mut net = fixture_three_node();
        net.set_appetite(1, RiskAppetite::new(0.25).unwrap()).unwrap();
        let text = network_to_string(&net);
        assert!(text.contains("\"appetites\""));
        assert_eq!(parse_network(&text).unwrap(), net);
    }

    #[test]
    fn matrices_parse_back() {
        let result = run_assessment(&fixture_three_node());
        let text = render_matrices(&result, &["note".into()]);
        let doc = parse_matrices(&text).unwrap();
        assert_eq!(doc.labels, vec![1, 2, 3]);
        assert_eq!(doc.t.get(0, 1), 0.4546);
        assert!((doc.c.get(0, 2) - result.c_matrix.get(0, 2)).abs() <= 5e-5);
    }

    #[test]
    fn malformed_matrices() {
        assert!(parse_matrices("").is_err());
        assert!(parse_matrices("1,2\n").is_err());
        assert!(parse_matrices("[Q]\n").is_err());
        let result = run_assessment(&fixture_three_node());
        let text = render_matrices(&result, &[]);
        let truncated: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(parse_matrices(&truncated).is_err());
    }

    #[test]
    fn risk_series_table_shape() {
        let result = run_assessment(&fixture_three_node());
        let text = render_risk_series(&result);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "node,1,2,3");
        assert_eq!(lines[1], "1,,0.0000,0.1088");
        assert_eq!(lines.len(), 4);
    }
}
