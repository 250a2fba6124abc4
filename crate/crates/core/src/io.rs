//! JSON file formats.
//!
//! Rationals are written as strings (`"3"`, `"5/2"`); bare JSON integers are
//! accepted on input. Edges are written as `[u, v]` with `u < v`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::instance::{DemandSet, Instance, RoutingSolution};
use crate::laminar::{DualVariable, LaminarCertificate};
use crate::rational::{self, Rational};
use crate::report::Check;
use crate::spanner::{self, ArcState, SpannerResult};

pub type EdgePair = (VertexId, VertexId);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exact(#[serde(with = "rational::as_string")] pub Rational);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry(pub VertexId, pub VertexId, #[serde(with = "rational::as_string")] pub Rational);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub terminals: Vec<VertexId>,
    pub demand: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub graph: GraphFile,
    #[serde(default)]
    pub packets: BTreeMap<String, Exact>,
    pub groups: Vec<GroupFile>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        let graph = instance.graph();
        InstanceFile {
            graph: GraphFile {
                n: graph.vertex_count(),
                edges: graph
                    .edges()
                    .iter()
                    .map(|e| EdgeEntry(e.u, e.v, e.cost.clone()))
                    .collect(),
            },
            packets: instance
                .packet_names()
                .iter()
                .cloned()
                .zip(instance.packet_weights().iter().cloned().map(Exact))
                .collect(),
            groups: instance
                .groups()
                .iter()
                .map(|g| GroupFile {
                    terminals: g.terminals.clone(),
                    demand: packet_names(instance, &g.demand),
                })
                .collect(),
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        let edges = self.graph.edges.into_iter().map(|EdgeEntry(u, v, c)| (u, v, c)).collect();
        let graph = Graph::new(self.graph.n, edges)?;
        let packets = self.packets.into_iter().map(|(k, Exact(w))| (k, w)).collect();
        let groups = self.groups.into_iter().map(|g| (g.terminals, g.demand)).collect();
        Instance::new(graph, packets, groups)
    }
}

fn packet_names(instance: &Instance, packets: &DemandSet) -> Vec<String> {
    packets.iter().map(|&p| instance.packet_name(p).to_string()).collect()
}

/// Pretty JSON with short arrays of scalars or pairs kept on one line.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serializable");
    let mut text = String::new();
    write_value(&value, 0, &mut text);
    text.push('\n');
    text
}

const INLINE_WIDTH: usize = 100;

fn write_value(value: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |level: usize| "  ".repeat(level);
    match value {
        Value::Array(items) if !items.is_empty() => {
            let compact = serde_json::to_string(value).expect("serializable");
            let flat = items.iter().all(|v| match v {
                Value::Array(inner) => inner.iter().all(|x| !x.is_array() && !x.is_object()),
                Value::Object(_) => false,
                _ => true,
            });
            if flat && compact.len() <= INLINE_WIDTH {
                out.push_str(&compact);
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("serializable"));
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&serde_json::to_string(other).expect("serializable")),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    serde_json::from_str::<InstanceFile>(text)?.into_instance()
}

pub fn instance_to_json(instance: &Instance) -> String {
    to_json(&InstanceFile::from_instance(instance))
}

pub fn edge_pairs(graph: &Graph, edges: &[EdgeId]) -> Vec<EdgePair> {
    edges.iter().map(|&e| graph.edge(e).endpoints()).collect()
}

pub fn edge_ids(graph: &Graph, pairs: &[EdgePair], context: &str) -> Result<Vec<EdgeId>> {
    pairs
        .iter()
        .map(|&(u, v)| {
            graph.edge_between(u, v).ok_or_else(|| {
                Error::InvalidSolution(format!("{context}: ({u},{v}) is not an edge"))
            })
        })
        .collect()
}

fn optional(value: &Option<String>, field: &str) -> Result<Option<Rational>> {
    value
        .as_deref()
        .map(|t| rational::parse(t).map_err(|e| Error::Parse(format!("{field}: {e}"))))
        .transpose()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    pub trees: Vec<Vec<EdgePair>>,
    #[serde(with = "rational::as_string")]
    pub cost: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_bound: Option<String>,
}

impl SolutionFile {
    pub fn new(instance: &Instance, solution: &RoutingSolution, cost: &Rational) -> Self {
        SolutionFile {
            algorithm: None,
            trees: solution
                .trees
                .iter()
                .map(|t| edge_pairs(instance.graph(), t))
                .collect(),
            cost: cost.clone(),
            lower_bound: None,
            bound_mode: None,
            ratio: None,
            ratio_bound: None,
        }
    }

    /// Records a lower bound, the resulting ratio (omitted when the bound is zero), and its limit.
    pub fn with_bound(mut self, lower: &Rational, ratio_bound: &Rational) -> Self {
        self.lower_bound = Some(rational::format(lower));
        self.ratio = (!num_traits::Zero::is_zero(lower))
            .then(|| rational::format(&(&self.cost / lower)));
        self.ratio_bound = Some(rational::format(ratio_bound));
        self
    }

    pub fn routing(&self, instance: &Instance) -> Result<RoutingSolution> {
        let trees = self
            .trees
            .iter()
            .enumerate()
            .map(|(j, t)| edge_ids(instance.graph(), t, &format!("tree {j}")))
            .collect::<Result<Vec<_>>>()?;
        Ok(RoutingSolution::new(trees))
    }

    pub fn lower_bound(&self) -> Result<Option<Rational>> {
        optional(&self.lower_bound, "lower_bound")
    }

    pub fn ratio(&self) -> Result<Option<Rational>> {
        optional(&self.ratio, "ratio")
    }

    pub fn ratio_bound(&self) -> Result<Option<Rational>> {
        optional(&self.ratio_bound, "ratio_bound")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestEntry {
    pub demand: Vec<String>,
    pub edges: Vec<EdgePair>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualEntry {
    pub demand: Vec<String>,
    pub cut: Vec<VertexId>,
    #[serde(with = "rational::as_string")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub forests: Vec<ForestEntry>,
    pub duals: Vec<DualEntry>,
    #[serde(with = "rational::as_string")]
    pub primal: Rational,
    #[serde(with = "rational::as_string")]
    pub dual: Rational,
    #[serde(with = "rational::as_string")]
    pub ratio_bound: Rational,
}

fn demand_id(instance: &Instance, names: &[String], context: &str) -> Result<usize> {
    let mut set = DemandSet::new();
    for name in names {
        let p = instance
            .packet_names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidSolution(format!("{context}: unknown packet `{name}`")))?;
        set.insert(p);
    }
    instance
        .demands()
        .iter()
        .position(|d| *d == set)
        .ok_or_else(|| Error::InvalidSolution(format!("{context}: {names:?} is no group's demand")))
}

impl CertificateFile {
    pub fn from_certificate(instance: &Instance, cert: &LaminarCertificate) -> Self {
        let graph = instance.graph();
        CertificateFile {
            forests: cert
                .forests
                .iter()
                .enumerate()
                .map(|(d, f)| ForestEntry {
                    demand: packet_names(instance, &instance.demands()[d]),
                    edges: edge_pairs(graph, f),
                })
                .collect(),
            duals: cert
                .duals
                .iter()
                .map(|y| DualEntry {
                    demand: packet_names(instance, &instance.demands()[y.demand]),
                    cut: y.cut.clone(),
                    value: y.value.clone(),
                })
                .collect(),
            primal: cert.primal.clone(),
            dual: cert.dual.clone(),
            ratio_bound: LaminarCertificate::ratio_bound(),
        }
    }

    /// Resolves packet names and edges against `instance`; demand sets with
    /// no listed forest get an empty one.
    pub fn to_certificate(&self, instance: &Instance) -> Result<LaminarCertificate> {
        let graph = instance.graph();
        let mut forests = vec![Vec::new(); instance.demands().len()];
        for (i, entry) in self.forests.iter().enumerate() {
            let context = format!("forest {i}");
            let d = demand_id(instance, &entry.demand, &context)?;
            let mut edges = edge_ids(graph, &entry.edges, &context)?;
            edges.sort_unstable();
            forests[d] = edges;
        }
        let duals = self
            .duals
            .iter()
            .enumerate()
            .map(|(i, y)| {
                let mut cut = y.cut.clone();
                cut.sort_unstable();
                cut.dedup();
                if let Some(&bad) = cut.iter().find(|&&v| v >= graph.vertex_count()) {
                    return Err(Error::InvalidSolution(format!("dual {i}: vertex {bad} out of range")));
                }
                Ok(DualVariable {
                    demand: demand_id(instance, &y.demand, &format!("dual {i}"))?,
                    cut,
                    value: y.value.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LaminarCertificate {
            forests,
            duals,
            primal: self.primal.clone(),
            dual: self.dual.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpannerCertificates {
    pub stretch_bound: usize,
    /// `14` when the groups cover every vertex, else absent.
    pub size_factor: Option<usize>,
    pub max_out_degree: usize,
    pub arc_girth: Option<usize>,
    pub phase1_steps: usize,
    pub flips: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpannerFile {
    #[serde(rename = "H")]
    pub h: Vec<EdgePair>,
    #[serde(rename = "T")]
    pub t: Vec<EdgePair>,
    #[serde(rename = "A1")]
    pub a1: Vec<EdgePair>,
    #[serde(rename = "A2")]
    pub a2: Vec<EdgePair>,
    /// Final orientation of `A1`, as `[tail, head]`.
    pub arcs: Vec<EdgePair>,
    #[serde(rename = "L")]
    pub levels: usize,
    pub certificates: SpannerCertificates,
}

impl SpannerFile {
    pub fn new(graph: &Graph, result: &SpannerResult, checks: Vec<Check>) -> Self {
        SpannerFile {
            h: edge_pairs(graph, &result.h),
            t: edge_pairs(graph, &result.t),
            a1: edge_pairs(graph, &result.a1),
            a2: edge_pairs(graph, &result.a2),
            arcs: result.arcs.clone(),
            levels: result.levels,
            certificates: SpannerCertificates {
                stretch_bound: result.stretch_bound(),
                size_factor: result.size_factor(),
                max_out_degree: result.max_out_degree,
                arc_girth: result.arc_girth,
                phase1_steps: result.phase1_steps,
                flips: result.flips,
                checks,
            },
        }
    }

    /// Rebuilds a result from the file, recomputing the uniform instance and
    /// the orientation summaries from the listed arcs.
    pub fn to_result(&self, graph: &Graph, groups: &[Vec<VertexId>]) -> Result<SpannerResult> {
        let uniform = spanner::make_uniform(graph, groups)?;
        let mut h = edge_ids(graph, &self.h, "H")?;
        h.sort_unstable();
        let mut arcs = ArcState::new(graph.vertex_count());
        for &(u, v) in &self.arcs {
            if u >= graph.vertex_count() || v >= graph.vertex_count() {
                return Err(Error::InvalidSolution(format!("arc ({u},{v}) out of range")));
            }
            arcs.add_arc(u, v);
        }
        Ok(SpannerResult {
            h,
            t: edge_ids(graph, &self.t, "T")?,
            a1: edge_ids(graph, &self.a1, "A1")?,
            a2: edge_ids(graph, &self.a2, "A2")?,
            arcs: self.arcs.clone(),
            groups: groups.len(),
            levels: self.levels,
            vertex_count: graph.vertex_count(),
            max_out_degree: arcs.max_out_degree(),
            arc_girth: arcs.girth(),
            phase1_steps: self.certificates.phase1_steps,
            flips: self.certificates.flips,
            uniform,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleFile {
    #[serde(with = "rational::as_string")]
    pub optimum: Rational,
    pub solution: SolutionFile,
}

/// Parses any artifact the tools write, by shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Artifact {
    Solution(SolutionFile),
    Certificate(CertificateFile),
    Spanner(SpannerFile),
    Oracle(OracleFile),
}

pub fn parse_artifact(text: &str) -> Result<Artifact> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let has = |key: &str| value.get(key).is_some();
    let artifact = if has("duals") {
        Artifact::Certificate(serde_json::from_value(value)?)
    } else if has("H") {
        Artifact::Spanner(serde_json::from_value(value)?)
    } else if has("optimum") {
        Artifact::Oracle(serde_json::from_value(value)?)
    } else if has("trees") {
        Artifact::Solution(serde_json::from_value(value)?)
    } else {
        return Err(Error::Parse(
            "expected a solution, certificate, spanner, or oracle document".into(),
        ));
    };
    Ok(artifact)
}
