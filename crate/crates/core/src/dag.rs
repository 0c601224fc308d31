//! Directed acyclic graphs of circuits and the legality conditions on them.
//!
//! A [`DagGraph`] is a plain directed multigraph with typed vertices. A
//! [`LegalDag`] is a graph that has passed [`validate_legal`]: inputs have a
//! single outgoing edge, outputs a single incoming edge, and every gate has as
//! many incoming as outgoing edges. Vertex and edge ids are dense and equal to
//! their position, and every iteration in this crate runs in ascending id
//! order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Condition, DagError, Violation};
use crate::unionfind::UnionFind;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Input,
    Output,
    Gate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub kind: VertexKind,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: VertexId,
    pub dst: VertexId,
}

#[derive(Serialize, Deserialize)]
struct RawDag {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Immutable directed multigraph with input, output and gate vertices.
///
/// Parallel edges are allowed (two consecutive two-qubit gates on the same
/// pair of qubits produce them); self-loops are not. Acyclicity is checked by
/// [`validate_legal`], not on construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDag", into = "RawDag")]
pub struct DagGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl TryFrom<RawDag> for DagGraph {
    type Error = DagError;

    fn try_from(raw: RawDag) -> Result<Self, Self::Error> {
        DagGraph::new(raw.vertices, raw.edges)
    }
}

impl From<DagGraph> for RawDag {
    fn from(g: DagGraph) -> Self {
        RawDag {
            vertices: g.vertices,
            edges: g.edges,
        }
    }
}

impl DagGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, DagError> {
        for (position, v) in vertices.iter().enumerate() {
            if v.id != position {
                return Err(DagError::NonDenseVertexIds { position, id: v.id });
            }
        }
        let n = vertices.len();
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (position, e) in edges.iter().enumerate() {
            if e.id != position {
                return Err(DagError::NonDenseEdgeIds { position, id: e.id });
            }
            for vertex in [e.src, e.dst] {
                if vertex >= n {
                    return Err(DagError::UnknownVertex { edge: e.id, vertex });
                }
            }
            if e.src == e.dst {
                return Err(DagError::SelfLoop {
                    edge: e.id,
                    vertex: e.src,
                });
            }
            out_edges[e.src].push(e.id);
            in_edges[e.dst].push(e.id);
        }
        Ok(Self {
            vertices,
            edges,
            out_edges,
            in_edges,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn kind(&self, v: VertexId) -> VertexKind {
        self.vertices[v].kind
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn d_in(&self, v: VertexId) -> usize {
        self.in_edges[v].len()
    }

    pub fn d_out(&self, v: VertexId) -> usize {
        self.out_edges[v].len()
    }

    pub fn vertices_of_kind(&self, kind: VertexKind) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .filter(move |v| v.kind == kind)
            .map(|v| v.id)
    }

    /// Kahn's algorithm with smallest-id-first tie breaking; `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<VertexId>> {
        let n = self.vertex_count();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.d_in(v)).collect();
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<VertexId>> = (0..n)
            .filter(|&v| indeg[v] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(v)) = ready.pop() {
            order.push(v);
            for &e in &self.out_edges[v] {
                let w = self.edges[e].dst;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(std::cmp::Reverse(w));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Graphviz rendering; vertex shape encodes the kind.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", escape_dot(name));
        let _ = writeln!(s, "  rankdir=LR;");
        for v in &self.vertices {
            let shape = match v.kind {
                VertexKind::Input => "triangle",
                VertexKind::Output => "invtriangle",
                VertexKind::Gate => "box",
            };
            let _ = writeln!(
                s,
                "  v{} [label=\"{}\", shape={}];",
                v.id,
                escape_dot(&v.label),
                shape
            );
        }
        for e in &self.edges {
            let _ = writeln!(s, "  v{} -> v{} [label=\"e{}\"];", e.src, e.dst, e.id);
        }
        s.push_str("}\n");
        s
    }
}

pub(crate) fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Incremental construction of a [`DagGraph`] with dense ids.
#[derive(Debug, Default, Clone)]
pub struct DagBuilder {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, kind: VertexKind, label: impl Into<String>) -> VertexId {
        let id = self.vertices.len();
        self.vertices.push(Vertex {
            id,
            kind,
            label: label.into(),
        });
        id
    }

    pub fn input(&mut self, label: impl Into<String>) -> VertexId {
        self.add_vertex(VertexKind::Input, label)
    }

    pub fn output(&mut self, label: impl Into<String>) -> VertexId {
        self.add_vertex(VertexKind::Output, label)
    }

    pub fn gate(&mut self, label: impl Into<String>) -> VertexId {
        self.add_vertex(VertexKind::Gate, label)
    }

    pub fn add_edge(&mut self, src: VertexId, dst: VertexId) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(Edge { id, src, dst });
        id
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn build(self) -> Result<DagGraph, DagError> {
        DagGraph::new(self.vertices, self.edges)
    }
}

/// A graph satisfying the legality conditions, with its input/output sets
/// and a topological order cached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLegal")]
pub struct LegalDag {
    graph: DagGraph,
    t: usize,
    two_legal: bool,
    #[serde(skip)]
    inputs: Vec<VertexId>,
    #[serde(skip)]
    outputs: Vec<VertexId>,
    #[serde(skip)]
    topo: Vec<VertexId>,
}

#[derive(Deserialize)]
struct RawLegal {
    graph: DagGraph,
    #[serde(default)]
    t: Option<usize>,
    #[serde(default)]
    two_legal: bool,
}

impl TryFrom<RawLegal> for LegalDag {
    type Error = DagError;

    fn try_from(raw: RawLegal) -> Result<Self, Self::Error> {
        let g = validate_legal(&raw.graph, raw.two_legal)?;
        match raw.t {
            Some(stated) if stated != g.t => Err(DagError::WrongT {
                stated,
                actual: g.t,
            }),
            _ => Ok(g),
        }
    }
}

impl LegalDag {
    pub fn graph(&self) -> &DagGraph {
        &self.graph
    }

    /// Number of inputs, which equals the number of outputs.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Whether every gate vertex has in- and out-degree exactly 2.
    pub fn is_two_legal(&self) -> bool {
        self.two_legal
    }

    pub fn inputs(&self) -> &[VertexId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[VertexId] {
        &self.outputs
    }

    pub fn topological_order(&self) -> &[VertexId] {
        &self.topo
    }

    /// True for edges leaving an input or entering an output.
    pub fn is_io_edge(&self, e: EdgeId) -> bool {
        let edge = self.graph.edge(e);
        self.graph.kind(edge.src) == VertexKind::Input
            || self.graph.kind(edge.dst) == VertexKind::Output
    }

    pub fn into_graph(self) -> DagGraph {
        self.graph
    }
}

/// Checks the legality conditions and reports every violation found.
pub fn validate_legal(g: &DagGraph, require_two_legal: bool) -> Result<LegalDag, DagError> {
    let mut violations = Vec::new();
    if g.edge_count() == 0 {
        violations.push(Violation::EmptyEdgeSet);
    }
    let topo = g.topological_order();
    if topo.is_none() {
        violations.push(Violation::CycleDetected);
    }
    let mut two_legal = true;
    for v in g.vertices() {
        let (d_in, d_out) = (g.d_in(v.id), g.d_out(v.id));
        let mut fail = |condition| {
            violations.push(Violation::Condition {
                vertex: v.id,
                condition,
                d_in,
                d_out,
            })
        };
        match v.kind {
            VertexKind::Input if d_in != 0 || d_out != 1 => fail(Condition::InputDegree),
            VertexKind::Output if d_in != 1 || d_out != 0 => fail(Condition::OutputDegree),
            VertexKind::Gate if d_in != d_out => {
                two_legal = false;
                fail(Condition::Balanced);
            }
            VertexKind::Gate if d_in != 2 => {
                two_legal = false;
                if require_two_legal {
                    fail(Condition::TwoLegal);
                }
            }
            _ => {}
        }
    }
    if !violations.is_empty() {
        return Err(DagError::Illegal(violations));
    }
    let inputs: Vec<_> = g.vertices_of_kind(VertexKind::Input).collect();
    let outputs: Vec<_> = g.vertices_of_kind(VertexKind::Output).collect();
    if inputs.len() != outputs.len() {
        // Unreachable for graphs that pass the degree conditions.
        return Err(DagError::InternalInvariantBroken(format!(
            "{} inputs but {} outputs",
            inputs.len(),
            outputs.len()
        )));
    }
    Ok(LegalDag {
        graph: g.clone(),
        t: inputs.len(),
        two_legal,
        inputs,
        outputs,
        topo: topo.unwrap_or_default(),
    })
}

/// Weakly connected components, each sorted, ordered by smallest vertex id.
pub fn components(g: &DagGraph) -> Vec<Vec<VertexId>> {
    let mut uf = UnionFind::new(g.vertex_count());
    for e in g.edges() {
        uf.union(e.src, e.dst);
    }
    uf.groups()
}

/// Component index of every vertex, consistent with [`components`].
pub fn component_index(g: &DagGraph) -> (Vec<usize>, usize) {
    let comps = components(g);
    let mut idx = vec![0; g.vertex_count()];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            idx[v] = c;
        }
    }
    (idx, comps.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagPath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathDecomposition {
    pub paths: Vec<DagPath>,
}

/// Extracts `t` pairwise edge-disjoint input-to-output paths by repeatedly
/// walking forward from an unused input along unconsumed edges.
pub fn edge_disjoint_paths(g: &LegalDag) -> Result<PathDecomposition, DagError> {
    let graph = g.graph();
    let mut used = vec![false; graph.edge_count()];
    let mut paths = Vec::with_capacity(g.t());
    for &start in g.inputs() {
        let mut vertices = vec![start];
        let mut edges = Vec::new();
        let mut v = start;
        while graph.kind(v) != VertexKind::Output {
            let next = graph.out_edges(v).iter().copied().find(|&e| !used[e]);
            let Some(e) = next else {
                return Err(DagError::InternalInvariantBroken(format!(
                    "walk from input {start} dead-ends at vertex {v}"
                )));
            };
            used[e] = true;
            edges.push(e);
            v = graph.edge(e).dst;
            vertices.push(v);
        }
        paths.push(DagPath { vertices, edges });
    }
    Ok(PathDecomposition { paths })
}

/// Merges gate pairs `(u, v)` where every outgoing edge of `u` enters `v` and
/// `v` has no other incoming edges, until no such pair remains.
pub fn consolidate_chains(g: &LegalDag) -> Result<LegalDag, DagError> {
    let mut graph = g.graph().clone();
    while let Some((u, v)) = find_mergeable(&graph) {
        graph = merge_pair(&graph, u, v)?;
    }
    validate_legal(&graph, false)
}

fn find_mergeable(g: &DagGraph) -> Option<(VertexId, VertexId)> {
    for u in g.vertices_of_kind(VertexKind::Gate) {
        let outs = g.out_edges(u);
        let Some(&first) = outs.first() else {
            continue;
        };
        let v = g.edge(first).dst;
        if g.kind(v) != VertexKind::Gate {
            continue;
        }
        if outs.iter().all(|&e| g.edge(e).dst == v) && g.d_in(v) == outs.len() {
            return Some((u, v));
        }
    }
    None
}

fn merge_pair(g: &DagGraph, u: VertexId, v: VertexId) -> Result<DagGraph, DagError> {
    let mut b = DagBuilder::new();
    let mut remap = vec![usize::MAX; g.vertex_count()];
    for vert in g.vertices() {
        if vert.id == v {
            continue;
        }
        let label = if vert.id == u {
            format!("{}+{}", vert.label, g.vertex(v).label)
        } else {
            vert.label.clone()
        };
        remap[vert.id] = b.add_vertex(vert.kind, label);
    }
    remap[v] = remap[u];
    for e in g.edges() {
        if e.src == u && e.dst == v {
            continue;
        }
        b.add_edge(remap[e.src], remap[e.dst]);
    }
    b.build()
}
