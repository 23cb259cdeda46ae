//! Network file format, trace files, result bundles and CSV export.
//!
//! Networks are described by a JSON document with an explicit
//! `format_version`:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "vertices": [ { "id": 0, "label": "x1", "coords": [0.0, 0.0] } ],
//!   "arcs": [
//!     { "id": 0, "tail": 0, "head": 1,
//!       "hamiltonian": { "family": "tilted_eikonal",
//!                        "b": { "kind": "constant", "value": 0.0 },
//!                        "f": { "kind": "constant", "value": 1.0 },
//!                        "q": 1.0 } }
//!   ],
//!   "tolerances": { "tol_a": 1e-9 }
//! }
//! ```
//!
//! Vertex and arc ids must be dense `0..n-1`; closed arcs have
//! `tail == head`. Black-box Hamiltonians are a library-level feature
//! and have no file representation.
//!
//! Trace files assign values at vertices or interior points:
//!
//! ```json
//! { "level": "critical",
//!   "entries": [ { "vertex": 0, "value": 0.0 },
//!                { "point": { "arc": 1, "s": 0.5 }, "value": 0.25 } ] }
//! ```
//!
//! Serialization uses shortest round-trip float formatting, so
//! parse → serialize → parse is the identity and reports are
//! byte-reproducible.

use serde::{Deserialize, Serialize};

use crate::aubry::AubryData;
use crate::error::{Error, Result};
use crate::extension::{ArcProfile, NetworkPoint};
use crate::graph::{ArcId, Graph, VertexId, VertexInfo};
use crate::hamiltonian::HamiltonianFamily;
use crate::network::Network;
use crate::scalar::ScalarFunction;
use crate::tol::Tolerances;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HamiltonianSpec {
    /// `H(s,p) = |p - b(s)|^q - f(s)`.
    TiltedEikonal {
        b: ScalarFunction,
        f: ScalarFunction,
        q: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub hamiltonian: HamiltonianSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_zero: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut tol: Tolerances) -> Tolerances {
        if let Some(v) = self.tol_a {
            tol.tol_a = v;
        }
        if let Some(v) = self.tol_h {
            tol.tol_h = v;
        }
        if let Some(v) = self.tol_q {
            tol.tol_q = v;
        }
        if let Some(v) = self.tol_p {
            tol.tol_p = v;
        }
        if let Some(v) = self.tol_zero {
            tol.tol_zero = v;
        }
        if let Some(v) = self.grid {
            tol.grid = v;
        }
        tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub format_version: u32,
    pub vertices: Vec<VertexSpec>,
    pub arcs: Vec<ArcSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        for (k, v) in self.vertices.iter().enumerate() {
            if v.id != k {
                return Err(Error::Parse(format!(
                    "vertex ids must be dense 0..{}: found id {} at position {k}",
                    self.vertices.len() - 1,
                    v.id
                )));
            }
        }
        for (k, a) in self.arcs.iter().enumerate() {
            if a.id != k {
                return Err(Error::Parse(format!(
                    "arc ids must be dense 0..{}: found id {} at position {k}",
                    self.arcs.len() - 1,
                    a.id
                )));
            }
            for endpoint in [a.tail, a.head] {
                if endpoint >= self.vertices.len() {
                    return Err(Error::Parse(format!(
                        "arc {} references undeclared vertex {endpoint}",
                        a.id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Parses a network document.
pub fn parse_network(text: &str) -> Result<NetworkSpec> {
    let spec: NetworkSpec =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("network file: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

pub fn serialize_network(spec: &NetworkSpec) -> String {
    serde_json::to_string_pretty(spec).expect("network spec serializes")
}

/// Tolerances after applying the file's `tolerances` section on `base`.
pub fn effective_tolerances(spec: &NetworkSpec, base: Tolerances) -> Tolerances {
    match &spec.tolerances {
        Some(over) => over.apply(base),
        None => base,
    }
}

/// Builds the validated [`Network`] from a parsed spec: file tolerance
/// overrides are applied on top of `base`.
pub fn build_network(spec: &NetworkSpec, base: Tolerances) -> Result<Network> {
    build_network_with_tolerances(spec, effective_tolerances(spec, base))
}

/// Like [`build_network`] but with the tolerances pinned by the caller
/// (the CLI resolves defaults, file and environment precedence itself).
pub fn build_network_with_tolerances(spec: &NetworkSpec, tol: Tolerances) -> Result<Network> {
    spec.validate()?;
    tol.validate()?;
    let vertices: Vec<VertexInfo> = spec
        .vertices
        .iter()
        .map(|v| VertexInfo {
            label: v.label.clone(),
            coords: v.coords.clone(),
        })
        .collect();
    let arcs: Vec<(VertexId, VertexId)> = spec
        .arcs
        .iter()
        .map(|a| (VertexId(a.tail), VertexId(a.head)))
        .collect();
    let graph = Graph::build(vertices, &arcs)?;
    let families = spec
        .arcs
        .iter()
        .map(|a| match &a.hamiltonian {
            HamiltonianSpec::TiltedEikonal { b, f, q } => HamiltonianFamily::TiltedEikonal {
                b: b.clone(),
                f: f.clone(),
                q: *q,
            },
        })
        .collect();
    Network::new(graph, families, tol)
}

/// Resolves a vertex reference: numeric index or label.
pub fn resolve_vertex(net: &Network, text: &str) -> Result<VertexId> {
    if let Ok(idx) = text.parse::<usize>() {
        if idx < net.graph().vertex_count() {
            return Ok(VertexId(idx));
        }
        return Err(Error::Parse(format!("vertex index {idx} out of range")));
    }
    for x in net.graph().vertex_ids() {
        if net.graph().vertex_info(x).label.as_deref() == Some(text) {
            return Ok(x);
        }
    }
    Err(Error::Parse(format!("unknown vertex {text:?}")))
}

/// Resolves a point reference: a vertex (`3` or a label) or `ARC@S`
/// (e.g. `2@0.35`).
pub fn resolve_point(net: &Network, text: &str) -> Result<NetworkPoint> {
    if let Some((arc, s)) = text.split_once('@') {
        let arc: usize = arc
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad arc index in point {text:?}")))?;
        let s: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad parameter in point {text:?}")))?;
        return NetworkPoint::new(net, ArcId(arc), s);
    }
    resolve_vertex(net, text).map(NetworkPoint::Vertex)
}

// ---------------------------------------------------------------------
// trace files
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LevelSpec {
    /// The literal string `"critical"`.
    Named(String),
    Value(f64),
}

impl LevelSpec {
    pub fn is_critical(&self) -> Result<bool> {
        match self {
            LevelSpec::Named(s) if s == "critical" => Ok(true),
            LevelSpec::Named(s) => Err(Error::Parse(format!(
                "unknown level {s:?} (expected \"critical\" or a number)"
            ))),
            LevelSpec::Value(_) => Ok(false),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LevelSpec::Value(v) => Some(*v),
            LevelSpec::Named(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSpec {
    pub arc: usize,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<PointSpec>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub level: LevelSpec,
    pub entries: Vec<TraceEntry>,
}

pub fn parse_trace(text: &str) -> Result<TraceFile> {
    let trace: TraceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("trace file: {e}")))?;
    if trace.entries.is_empty() {
        return Err(Error::Parse("trace file has no entries".into()));
    }
    for (k, entry) in trace.entries.iter().enumerate() {
        match (&entry.vertex, &entry.point) {
            (Some(_), Some(_)) => {
                return Err(Error::Parse(format!(
                    "trace entry {k} sets both vertex and point"
                )))
            }
            (None, None) => {
                return Err(Error::Parse(format!(
                    "trace entry {k} sets neither vertex nor point"
                )))
            }
            _ => {}
        }
        if !entry.value.is_finite() {
            return Err(Error::Parse(format!(
                "trace entry {k} has a non-finite value"
            )));
        }
    }
    Ok(trace)
}

/// Trace entries as canonical network points.
pub fn trace_points(net: &Network, trace: &TraceFile) -> Result<Vec<(NetworkPoint, f64)>> {
    trace
        .entries
        .iter()
        .map(|entry| {
            let point = match (&entry.vertex, &entry.point) {
                (Some(v), None) => {
                    if *v >= net.graph().vertex_count() {
                        return Err(Error::Parse(format!("trace vertex {v} out of range")));
                    }
                    NetworkPoint::Vertex(VertexId(*v))
                }
                (None, Some(p)) => NetworkPoint::new(net, ArcId(p.arc), p.s)?,
                _ => unreachable!("validated by parse_trace"),
            };
            Ok((point, entry.value))
        })
        .collect()
}

// ---------------------------------------------------------------------
// result bundles
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcReport {
    pub id: usize,
    pub a_gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AubrySummary {
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    pub static_classes: Vec<Vec<usize>>,
    pub arcs_in_aubry: Vec<usize>,
    pub edge_margins: Vec<f64>,
}

impl AubrySummary {
    pub fn from_data(data: &AubryData) -> AubrySummary {
        AubrySummary {
            edges: data.edge_set.iter().map(|e| e.0).collect(),
            vertices: data.vertex_set.iter().map(|v| v.0).collect(),
            static_classes: data
                .static_classes
                .iter()
                .map(|class| class.iter().map(|v| v.0).collect())
                .collect(),
            arcs_in_aubry: data
                .arc_classification
                .iter()
                .filter(|a| a.in_aubry)
                .map(|a| a.arc.0)
                .collect(),
            edge_margins: data.edge_margins.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReportDoc {
    pub level: f64,
    pub vertex_values: Vec<f64>,
    /// Echo of the trace that produced the solution, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceFile>,
}

/// Structured profile samples, mirroring the CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub arc: usize,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub branches: Vec<String>,
}

impl ProfileDoc {
    pub fn from_profile(profile: &ArcProfile) -> ProfileDoc {
        ProfileDoc {
            arc: profile.arc.0,
            nodes: profile.nodes.clone(),
            values: profile.values.clone(),
            branches: profile
                .branches
                .iter()
                .map(|b| b.as_str().to_string())
                .collect(),
        }
    }
}

/// Self-describing result document: levels and tolerances embedded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub format_version: u32,
    pub tolerances: Tolerances,
    pub a0: f64,
    pub critical_value: f64,
    pub arcs: Vec<ArcReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aubry: Option<AubrySummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionReportDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<Vec<ProfileDoc>>,
}

impl ResultBundle {
    pub fn new(net: &Network, critical: f64) -> ResultBundle {
        let arcs = net
            .graph()
            .arc_ids()
            .map(|arc| {
                let diag = net.arc_diagnostics(arc);
                ArcReport {
                    id: arc.0,
                    a_gamma: diag.a_gamma,
                    c_gamma: diag.c_gamma,
                }
            })
            .collect();
        ResultBundle {
            format_version: FORMAT_VERSION,
            tolerances: *net.tolerances(),
            a0: net.a0(),
            critical_value: critical,
            arcs,
            aubry: None,
            solution: None,
            profiles: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result bundle serializes")
    }

    pub fn from_json(text: &str) -> Result<ResultBundle> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("result bundle: {e}")))
    }
}

/// CSV export of profiles: `arc_id,s,value,branch`, one row per stored
/// node, arcs in id order.
pub fn profiles_to_csv(profiles: &[ArcProfile]) -> String {
    let mut out = String::from("arc_id,s,value,branch\n");
    for profile in profiles {
        for (j, &s) in profile.nodes.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                profile.arc.0,
                s,
                profile.values[j],
                profile.branches[j].as_str()
            ));
        }
    }
    out
}
