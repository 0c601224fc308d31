//! Edge duplication (the graph form of a wire cut), component bookkeeping and
//! acceptability.
//!
//! Duplicating `e = (a, b)` removes `e` and adds a fresh output `x_e` with
//! edge `(a, x_e)` and a fresh input `y_e` with edge `(y_e, b)`. A duplicated
//! graph is acceptable when each of its components contains a directed path
//! from an input of the *original* graph to an output of the original graph;
//! the synthetic `x_e`/`y_e` never count as path endpoints.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dag::{component_index, DagBuilder, DagGraph, EdgeId, LegalDag, VertexId, VertexKind};
use crate::error::DagError;

/// Set of original edge ids to duplicate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CutSet(BTreeSet<EdgeId>);

impl CutSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.contains(&e)
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        self.0.insert(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<EdgeId> {
        self.iter().collect()
    }
}

impl FromIterator<EdgeId> for CutSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Vertex identity that survives renumbering: original vertices keep their
/// id, synthetic ones are named after the edge they came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VertexKey {
    Original(VertexId),
    X(EdgeId),
    Y(EdgeId),
}

/// Result of duplicating a set of edges of a legal dag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicatedDag {
    graph: DagGraph,
    cuts: CutSet,
    synthetic_outputs: BTreeMap<EdgeId, VertexId>,
    synthetic_inputs: BTreeMap<EdgeId, VertexId>,
    original_vertex_count: usize,
    original_inputs: Vec<VertexId>,
    original_outputs: Vec<VertexId>,
    /// Original edge each current edge descends from.
    edge_origin: Vec<EdgeId>,
    #[serde(skip)]
    original_edge_count: usize,
}

impl DuplicatedDag {
    /// `G_∅`: the original graph with no duplications.
    pub fn identity(g: &LegalDag) -> Self {
        let graph = g.graph().clone();
        Self {
            edge_origin: (0..graph.edge_count()).collect(),
            original_edge_count: graph.edge_count(),
            original_vertex_count: graph.vertex_count(),
            original_inputs: g.inputs().to_vec(),
            original_outputs: g.outputs().to_vec(),
            graph,
            cuts: CutSet::new(),
            synthetic_outputs: BTreeMap::new(),
            synthetic_inputs: BTreeMap::new(),
        }
    }

    /// Duplicates one more original edge. The edge keeps its id as `(a, x_e)`
    /// and `(y_e, b)` is appended; `x_e` and `y_e` are appended as vertices.
    pub fn duplicate_one(&self, e: EdgeId) -> Result<Self, DagError> {
        if e >= self.original_edge_count || self.cuts.contains(e) {
            return Err(DagError::UnknownEdge(e));
        }
        let pos = self
            .edge_origin
            .iter()
            .position(|&o| o == e)
            .ok_or(DagError::UnknownEdge(e))?;
        let old = *self.graph.edge(pos);
        let mut b = DagBuilder::new();
        for v in self.graph.vertices() {
            b.add_vertex(v.kind, v.label.clone());
        }
        let x = b.output(format!("x:{e}"));
        let y = b.input(format!("y:{e}"));
        for edge in self.graph.edges() {
            if edge.id == pos {
                b.add_edge(old.src, x);
            } else {
                b.add_edge(edge.src, edge.dst);
            }
        }
        b.add_edge(y, old.dst);
        let mut next = self.clone();
        next.graph = b.build()?;
        next.cuts.insert(e);
        next.synthetic_outputs.insert(e, x);
        next.synthetic_inputs.insert(e, y);
        next.edge_origin.push(e);
        Ok(next)
    }

    pub fn graph(&self) -> &DagGraph {
        &self.graph
    }

    pub fn cuts(&self) -> &CutSet {
        &self.cuts
    }

    pub fn synthetic_outputs(&self) -> &BTreeMap<EdgeId, VertexId> {
        &self.synthetic_outputs
    }

    pub fn synthetic_inputs(&self) -> &BTreeMap<EdgeId, VertexId> {
        &self.synthetic_inputs
    }

    pub fn original_inputs(&self) -> &[VertexId] {
        &self.original_inputs
    }

    pub fn original_outputs(&self) -> &[VertexId] {
        &self.original_outputs
    }

    pub fn edge_origin(&self) -> &[EdgeId] {
        &self.edge_origin
    }

    pub fn is_synthetic(&self, v: VertexId) -> bool {
        v >= self.original_vertex_count
    }

    pub fn key(&self, v: VertexId) -> VertexKey {
        if !self.is_synthetic(v) {
            return VertexKey::Original(v);
        }
        if let Some((&e, _)) = self.synthetic_outputs.iter().find(|(_, &x)| x == v) {
            return VertexKey::X(e);
        }
        let (&e, _) = self
            .synthetic_inputs
            .iter()
            .find(|(_, &y)| y == v)
            .expect("synthetic vertex is registered");
        VertexKey::Y(e)
    }

    /// Edge list in renumbering-independent form, for isomorphism checks
    /// between different duplication orders.
    pub fn canonical_edges(&self) -> BTreeSet<(VertexKey, VertexKey, EdgeId)> {
        self.graph
            .edges()
            .iter()
            .map(|e| (self.key(e.src), self.key(e.dst), self.edge_origin[e.id]))
            .collect()
    }

    /// Graphviz rendering with cut provenance; synthetic vertices are dashed.
    pub fn to_dot(&self, name: &str) -> String {
        let mut dot = self.graph.to_dot(name);
        dot.truncate(dot.len() - 2);
        for (&e, &x) in &self.synthetic_outputs {
            let y = self.synthetic_inputs[&e];
            dot.push_str(&format!(
                "  v{x} [style=dashed];\n  v{y} [style=dashed];\n  v{x} -> v{y} [style=dotted, color=gold, constraint=false, label=\"cut e{e}\"];\n"
            ));
        }
        dot.push_str("}\n");
        dot
    }
}

/// Duplicates every edge of `cuts`, in ascending id order.
pub fn duplicate(g: &LegalDag, cuts: &CutSet) -> Result<DuplicatedDag, DagError> {
    duplicate_in_order(g, &cuts.to_vec())
}

/// Duplicates edges one at a time in the given order.
pub fn duplicate_in_order(g: &LegalDag, order: &[EdgeId]) -> Result<DuplicatedDag, DagError> {
    let mut d = DuplicatedDag::identity(g);
    for &e in order {
        d = d.duplicate_one(e)?;
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub vertices: Vec<VertexId>,
    /// All inputs, synthetic ones included.
    pub inputs: usize,
    /// All outputs, synthetic ones included.
    pub outputs: usize,
    pub has_path: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptabilityReport {
    pub acceptable: bool,
    pub components: Vec<ComponentReport>,
}

/// Per-component path check, by intersecting forward reachability from the
/// original inputs with backward reachability from the original outputs.
pub fn is_acceptable(d: &DuplicatedDag) -> AcceptabilityReport {
    let g = d.graph();
    let n = g.vertex_count();
    let fwd = reach(g, d.original_inputs(), true);
    let bwd = reach(g, d.original_outputs(), false);
    let (comp_of, count) = component_index(g);
    let mut components: Vec<ComponentReport> = (0..count)
        .map(|_| ComponentReport {
            vertices: Vec::new(),
            inputs: 0,
            outputs: 0,
            has_path: false,
        })
        .collect();
    for v in 0..n {
        let c = &mut components[comp_of[v]];
        c.vertices.push(v);
        match g.kind(v) {
            VertexKind::Input => c.inputs += 1,
            VertexKind::Output => c.outputs += 1,
            VertexKind::Gate => {}
        }
        if fwd[v] && bwd[v] {
            c.has_path = true;
        }
    }
    AcceptabilityReport {
        acceptable: components.iter().all(|c| c.has_path),
        components,
    }
}

fn reach(g: &DagGraph, sources: &[VertexId], forward: bool) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack: Vec<VertexId> = sources.to_vec();
    for &s in sources {
        seen[s] = true;
    }
    while let Some(v) = stack.pop() {
        let edges = if forward {
            g.out_edges(v)
        } else {
            g.in_edges(v)
        };
        for &e in edges {
            let edge = g.edge(e);
            let w = if forward { edge.dst } else { edge.src };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// True iff `e` leaves an input or enters an output; duplicating such an
/// edge always leaves a component without an original input or output.
pub fn duplicated_input_edge_check(g: &LegalDag, e: EdgeId) -> bool {
    g.is_io_edge(e)
}

/// Grouping of the components of a duplicated graph into clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// Cluster index of each component (components in [`crate::dag::components`] order).
    pub cluster_of: Vec<usize>,
    /// Number of clusters.
    pub clusters: usize,
}

impl ClusterAssignment {
    pub fn new(cluster_of: Vec<usize>) -> Self {
        let clusters = cluster_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        Self {
            cluster_of,
            clusters,
        }
    }

    pub fn single(components: usize) -> Self {
        Self::new(vec![0; components])
    }

    /// Every cluster index below `clusters` is used.
    pub fn has_no_empty_cluster(&self) -> bool {
        let mut used = vec![false; self.clusters];
        for &c in &self.cluster_of {
            if c < self.clusters {
                used[c] = true;
            }
        }
        used.into_iter().all(|u| u)
    }

    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.cluster_of
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == cluster)
            .map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub input_count: usize,
    pub output_count: usize,
    pub acceptable: bool,
}

/// Input/output counts (synthetic vertices included) and acceptability of
/// each cluster.
pub fn cluster_stats(d: &DuplicatedDag, a: &ClusterAssignment) -> Vec<ClusterStats> {
    let report = is_acceptable(d);
    assert_eq!(
        report.components.len(),
        a.cluster_of.len(),
        "assignment must cover every component"
    );
    let mut stats = vec![
        ClusterStats {
            input_count: 0,
            output_count: 0,
            acceptable: true,
        };
        a.clusters
    ];
    for (comp, &cl) in report.components.iter().zip(&a.cluster_of) {
        debug_assert_eq!(comp.inputs, comp.outputs, "component In/Out balance");
        let s = &mut stats[cl];
        s.input_count += comp.inputs;
        s.output_count += comp.outputs;
        s.acceptable &= comp.has_path;
    }
    stats
}
