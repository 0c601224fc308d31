//! 3-partition instances, a brute-force oracle for them, and the dag families
//! that encode 3-partition as graph duplication.
//!
//! Each family's GD answer is supposed to coincide with the 3-partition
//! answer of its source instance, which turns the hardness reductions into
//! executable checks of the solver.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::{validate_legal, DagBuilder, EdgeId, LegalDag, VertexId, VertexKind};
use crate::error::DagError;
use crate::gd::GdInstance;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("invalid 3-partition instance: {0}")]
    InvariantViolation(String),
    #[error("beta must be at least 1")]
    ZeroBeta,
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// `3m` integers strictly between `B/4` and `B/2` that sum to `mB`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreePartitionInstance {
    m: usize,
    b: usize,
    a: Vec<usize>,
}

impl ThreePartitionInstance {
    pub fn new(m: usize, b: usize, a: Vec<usize>) -> Result<Self, ReductionError> {
        let bad = |msg: String| Err(ReductionError::InvariantViolation(msg));
        if m == 0 || b == 0 {
            return bad("m and B must be positive".into());
        }
        if a.len() != 3 * m {
            return bad(format!("expected {} elements, got {}", 3 * m, a.len()));
        }
        if let Some(&x) = a.iter().find(|&&x| 4 * x <= b || 2 * x >= b) {
            return bad(format!(
                "element {x} is not strictly between B/4 and B/2 (B={b})"
            ));
        }
        let sum: usize = a.iter().sum();
        if sum != m * b {
            return bad(format!("elements sum to {sum}, expected mB = {}", m * b));
        }
        Ok(Self { m, b, a })
    }

    /// Infers `m` from the element count and `B` from the sum.
    pub fn from_elements(a: Vec<usize>) -> Result<Self, ReductionError> {
        if a.is_empty() || !a.len().is_multiple_of(3) {
            return Err(ReductionError::InvariantViolation(
                "element count must be a positive multiple of 3".into(),
            ));
        }
        let m = a.len() / 3;
        let sum: usize = a.iter().sum();
        if !sum.is_multiple_of(m) {
            return Err(ReductionError::InvariantViolation(format!(
                "sum {sum} is not divisible by m={m}"
            )));
        }
        Self::new(m, sum / m, a)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn elements(&self) -> &[usize] {
        &self.a
    }

    pub fn total(&self) -> usize {
        self.a.iter().sum()
    }
}

/// Every valid instance (as a sorted multiset) with `m ≤ m_max`, `B ≤ b_max`.
pub fn enumerate_instances(m_max: usize, b_max: usize) -> Vec<ThreePartitionInstance> {
    let mut out = Vec::new();
    for m in 1..=m_max {
        for b in 1..=b_max {
            let lo = b / 4 + 1;
            let hi = (b - 1) / 2;
            if lo > hi {
                continue;
            }
            let mut cur = Vec::with_capacity(3 * m);
            multisets(3 * m, lo, hi, m * b, &mut cur, &mut |a| {
                out.push(ThreePartitionInstance::new(m, b, a.to_vec()).expect("in range"));
            });
        }
    }
    out
}

fn multisets(
    len: usize,
    lo: usize,
    hi: usize,
    target: usize,
    cur: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    let left = len - cur.len();
    let sum: usize = cur.iter().sum();
    if left == 0 {
        if sum == target {
            emit(cur);
        }
        return;
    }
    let start = cur.last().copied().unwrap_or(lo).max(lo);
    for x in start..=hi {
        if sum + x * left > target {
            break;
        }
        if sum + x + hi * (left - 1) < target {
            continue;
        }
        cur.push(x);
        multisets(len, lo, hi, target, cur, emit);
        cur.pop();
    }
}

/// Exhaustive search for a split into `m` triples that each sum to `B`.
/// Returns the triples as element values.
pub fn oracle_3partition(inst: &ThreePartitionInstance) -> Option<Vec<[usize; 3]>> {
    let mut a = inst.a.clone();
    a.sort_unstable();
    let mut used = vec![false; a.len()];
    let mut triples = Vec::with_capacity(inst.m);
    triple_search(&a, inst.b, &mut used, &mut triples).then_some(triples)
}

fn triple_search(a: &[usize], b: usize, used: &mut [bool], triples: &mut Vec<[usize; 3]>) -> bool {
    let Some(i) = used.iter().position(|u| !u) else {
        return true;
    };
    used[i] = true;
    for j in i + 1..a.len() {
        if used[j] || (j > i + 1 && a[j] == a[j - 1] && !used[j - 1]) {
            continue;
        }
        used[j] = true;
        for l in j + 1..a.len() {
            if used[l] || a[i] + a[j] + a[l] != b {
                continue;
            }
            used[l] = true;
            triples.push([a[i], a[j], a[l]]);
            if triple_search(a, b, used, triples) {
                return true;
            }
            triples.pop();
            used[l] = false;
        }
        used[j] = false;
    }
    used[i] = false;
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    G0,
    Gbeta,
    Connected,
    TwoLegalized,
}

/// Construction hints for tests; no solver reads them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedCertificate {
    /// Edges a YES certificate duplicates.
    pub designated_cuts: Vec<EdgeId>,
    /// Input counts of the components left after duplicating exactly the
    /// designated edges, in component order.
    pub component_inputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub family: Family,
    pub source: ThreePartitionInstance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
    /// Family the graph was expanded from, for `TwoLegalized` artifacts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expanded_from: Option<Family>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionArtifact {
    pub instance: GdInstance,
    pub provenance: Provenance,
    pub expected: ExpectedCertificate,
}

impl ReductionArtifact {
    pub fn family(&self) -> Family {
        self.provenance.family
    }
}

/// One star per element: `a_i` inputs into hub `i`, hub into `a_i` outputs.
/// Returns the hubs.
fn add_stars(b: &mut DagBuilder, elems: &[usize]) -> Vec<VertexId> {
    let mut hubs = Vec::with_capacity(elems.len());
    for (i, &ai) in elems.iter().enumerate() {
        let hub = b.gate(format!("v{}", i + 1));
        for j in 0..ai {
            let x = b.input(format!("a{}_{}", i + 1, j + 1));
            b.add_edge(x, hub);
        }
        for j in 0..ai {
            let y = b.output(format!("b{}_{}", i + 1, j + 1));
            b.add_edge(hub, y);
        }
        hubs.push(hub);
    }
    hubs
}

fn legal(b: DagBuilder) -> Result<LegalDag, ReductionError> {
    Ok(validate_legal(&b.build()?, false)?)
}

/// Forest of `3m` stars; instance `(k = B, α = m, β = 0)`.
pub fn gen_g0(inst: &ThreePartitionInstance) -> Result<ReductionArtifact, ReductionError> {
    let mut b = DagBuilder::new();
    add_stars(&mut b, &inst.a);
    let graph = legal(b)?;
    Ok(ReductionArtifact {
        instance: GdInstance::new(graph, inst.b, inst.m, 0).expect("k, alpha >= 1"),
        provenance: Provenance {
            family: Family::G0,
            source: inst.clone(),
            beta: None,
            expanded_from: None,
        },
        expected: ExpectedCertificate {
            designated_cuts: Vec::new(),
            component_inputs: inst.a.clone(),
        },
    })
}

/// The stars plus `beta` copies of a two-hub gadget with `2B - 1` inputs
/// whose only cuttable edge is the hub-to-hub edge `(t1, t2)`; instance
/// `(k = B, α = m + 2β, β)`.
pub fn gen_gbeta(
    inst: &ThreePartitionInstance,
    beta: usize,
) -> Result<ReductionArtifact, ReductionError> {
    if beta == 0 {
        return Err(ReductionError::ZeroBeta);
    }
    let bb = inst.b;
    let mut b = DagBuilder::new();
    add_stars(&mut b, &inst.a);
    let mut cuts = Vec::with_capacity(beta);
    for c in 1..=beta {
        let t1 = b.gate(format!("t1#{c}"));
        let t2 = b.gate(format!("t2#{c}"));
        for i in 1..=bb {
            let x = b.input(format!("a1_{i}#{c}"));
            b.add_edge(x, t1);
        }
        for i in 1..bb {
            let x = b.input(format!("a2_{i}#{c}"));
            b.add_edge(x, t2);
        }
        cuts.push(b.add_edge(t1, t2));
        for i in 1..bb {
            let y = b.output(format!("b1_{i}#{c}"));
            b.add_edge(t1, y);
        }
        for i in 1..=bb {
            let y = b.output(format!("b2_{i}#{c}"));
            b.add_edge(t2, y);
        }
    }
    let graph = legal(b)?;
    let mut component_inputs = inst.a.clone();
    for _ in 0..beta {
        component_inputs.extend([bb, bb]);
    }
    Ok(ReductionArtifact {
        instance: GdInstance::new(graph, bb, inst.m + 2 * beta, beta).expect("k, alpha >= 1"),
        provenance: Provenance {
            family: Family::Gbeta,
            source: inst.clone(),
            beta: Some(beta),
            expanded_from: None,
        },
        expected: ExpectedCertificate {
            designated_cuts: cuts,
            component_inputs,
        },
    })
}

/// Connected instance: leaf stars `L_1..L_3m` alternate with connector hubs
/// `C_1..C_{3m-1}` on a backbone.
///
/// Leaf `i` has `a_i` inputs and `a_i` outputs of its own, and is joined to
/// its neighbours by `e_i = (c_{i-1}, h_i)` and `e'_i = (h_i, c_i)`; the first
/// leaf gets an extra input instead of `e_1`, the last an extra output
/// instead of `e'_3m`. Each connector has `B + 2` inputs and outputs of its
/// own. Duplicating all `6m - 2` backbone edges leaves connector components
/// with exactly `B + 3` inputs and leaf components with `a_i + 1`. Instance
/// `(k = B + 3, α = 4m - 1, β = 6m - 2)`.
pub fn gen_connected(inst: &ThreePartitionInstance) -> Result<ReductionArtifact, ReductionError> {
    let n = 3 * inst.m;
    let bb = inst.b;
    let mut b = DagBuilder::new();
    let hubs: Vec<_> = (1..=n).map(|i| b.gate(format!("h{i}"))).collect();
    let conns: Vec<_> = (1..n).map(|j| b.gate(format!("c{j}"))).collect();
    let mut cuts = Vec::with_capacity(2 * n - 2);
    let mut component_inputs = Vec::new();
    for (i, &h) in hubs.iter().enumerate() {
        let own_in = inst.a[i] + usize::from(i == 0);
        let own_out = inst.a[i] + usize::from(i == n - 1);
        for j in 1..=own_in {
            let x = b.input(format!("a{}_{j}", i + 1));
            b.add_edge(x, h);
        }
        if i > 0 {
            // e_i
            cuts.push(b.add_edge(conns[i - 1], h));
        }
        for j in 1..=own_out {
            let y = b.output(format!("b{}_{j}", i + 1));
            b.add_edge(h, y);
        }
        if i < n - 1 {
            // e'_i
            cuts.push(b.add_edge(h, conns[i]));
        }
        component_inputs.push(inst.a[i] + 1);
    }
    for (j, &c) in conns.iter().enumerate() {
        for l in 1..=bb + 2 {
            let x = b.input(format!("A{}_{l}", j + 1));
            b.add_edge(x, c);
            let y = b.output(format!("B{}_{l}", j + 1));
            b.add_edge(c, y);
        }
        component_inputs.push(bb + 3);
    }
    cuts.sort_unstable();
    let graph = legal(b)?;
    let inst_gd =
        GdInstance::new(graph, bb + 3, 4 * inst.m - 1, 6 * inst.m - 2).expect("k, alpha >= 1");
    Ok(ReductionArtifact {
        instance: inst_gd,
        provenance: Provenance {
            family: Family::Connected,
            source: inst.clone(),
            beta: None,
            expanded_from: None,
        },
        expected: ExpectedCertificate {
            designated_cuts: cuts,
            component_inputs,
        },
    })
}

/// Replaces every gate of degree `d = d_in = d_out > 2` by a chain of `d - 1`
/// two-in/two-out vertices linked by carry edges: the first consumes
/// in-edges 1 and 2 and emits out-edge 1; vertex `j` consumes the previous
/// carry and in-edge `j + 1` and emits out-edge `j`; the last emits
/// out-edges `d - 1` and `d`. Gates of degree 1 are spliced out, their two
/// edges becoming one. Degree-2 gates are kept.
pub fn two_legal_expand(g: &LegalDag) -> Result<LegalDag, DagError> {
    two_legal_expand_mapped(g).map(|(d, _)| d)
}

/// Like [`two_legal_expand`], also returning for every original edge the id
/// of the edge that carries it in the result. Surviving edges keep their
/// relative order and come first; carry edges are appended.
pub fn two_legal_expand_mapped(g: &LegalDag) -> Result<(LegalDag, Vec<EdgeId>), DagError> {
    let graph = g.graph();
    let spliced = |v: VertexId| graph.kind(v) == VertexKind::Gate && graph.d_in(v) == 1;
    let mut b = DagBuilder::new();
    // first new vertex and chain length for each old vertex
    let mut first = vec![usize::MAX; graph.vertex_count()];
    let mut chain = vec![1; graph.vertex_count()];
    for v in graph.vertices() {
        let d = graph.d_in(v.id);
        if spliced(v.id) {
            continue;
        }
        if v.kind == VertexKind::Gate && d > 2 {
            chain[v.id] = d - 1;
            first[v.id] = b.gate(format!("{}#1", v.label));
            for j in 2..d {
                b.gate(format!("{}#{j}", v.label));
            }
        } else {
            first[v.id] = b.add_vertex(v.kind, v.label.clone());
        }
    }
    let tail = |v: VertexId, e: EdgeId| -> VertexId {
        if chain[v] == 1 {
            return first[v];
        }
        let r = graph.out_edges(v).iter().position(|&x| x == e).unwrap() + 1;
        first[v] + r.min(chain[v]) - 1
    };
    let head = |v: VertexId, e: EdgeId| -> VertexId {
        if chain[v] == 1 {
            return first[v];
        }
        let r = graph.in_edges(v).iter().position(|&x| x == e).unwrap() + 1;
        first[v] + r.saturating_sub(1).max(1) - 1
    };
    let mut map = vec![usize::MAX; graph.edge_count()];
    for e in graph.edges() {
        if spliced(e.src) {
            continue;
        }
        // follow a run of spliced gates to its end
        let mut last = e.id;
        let mut run = vec![e.id];
        while spliced(graph.edge(last).dst) {
            last = graph.out_edges(graph.edge(last).dst)[0];
            run.push(last);
        }
        let id = b.add_edge(tail(e.src, e.id), head(graph.edge(last).dst, last));
        for x in run {
            map[x] = id;
        }
    }
    for v in graph.vertices() {
        for j in 1..chain[v.id] {
            b.add_edge(first[v.id] + j - 1, first[v.id] + j);
        }
    }
    Ok((validate_legal(&b.build()?, true)?, map))
}

/// Applies [`two_legal_expand`] to an artifact's graph, keeping its
/// parameters and translating its hints.
pub fn two_legalize(art: &ReductionArtifact) -> Result<ReductionArtifact, ReductionError> {
    let (graph, map) = two_legal_expand_mapped(&art.instance.graph)?;
    let mut out = art.clone();
    out.instance = GdInstance::new(graph, art.instance.k, art.instance.alpha, art.instance.beta)
        .expect("k, alpha >= 1");
    out.provenance.expanded_from = Some(art.provenance.family);
    out.provenance.family = Family::TwoLegalized;
    let mut cuts: Vec<_> = art
        .expected
        .designated_cuts
        .iter()
        .map(|&e| map[e])
        .collect();
    cuts.sort_unstable();
    cuts.dedup();
    out.expected.designated_cuts = cuts;
    Ok(out)
}

/// Dispatches on the family name used by the CLI. `TwoLegalized` is not a
/// base family; pass `two_legal` instead.
pub fn generate(
    family: Family,
    inst: &ThreePartitionInstance,
    beta: Option<usize>,
    two_legal: bool,
) -> Result<ReductionArtifact, ReductionError> {
    let art = match family {
        Family::G0 => gen_g0(inst)?,
        Family::Gbeta => gen_gbeta(inst, beta.unwrap_or(1))?,
        Family::Connected | Family::TwoLegalized => gen_connected(inst)?,
    };
    if two_legal {
        two_legalize(&art)
    } else {
        Ok(art)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::components;
    use crate::duplication::{duplicate, is_acceptable};

    fn inst(a: &[usize]) -> ThreePartitionInstance {
        ThreePartitionInstance::from_elements(a.to_vec()).unwrap()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_3partition(&inst(&[3, 3, 4])), Some(vec![[3, 3, 4]]));
        assert!(oracle_3partition(&inst(&[4, 4, 4, 4, 4, 4])).is_some());
        assert!(oracle_3partition(&inst(&[5, 5, 5, 5, 5, 7])).is_none());
    }

    #[test]
    fn malformed_instances() {
        // 2 is not > 10/4
        assert!(ThreePartitionInstance::new(1, 10, vec![2, 4, 4]).is_err());
        assert!(ThreePartitionInstance::new(1, 10, vec![3, 3, 3]).is_err());
        assert!(ThreePartitionInstance::new(2, 10, vec![3, 3, 4]).is_err());
        // 5 is not < 10/2
        assert!(ThreePartitionInstance::new(1, 10, vec![5, 2, 3]).is_err());
    }

    #[test]
    fn enumerated_instances_are_valid_and_distinct() {
        let all = enumerate_instances(2, 16);
        assert!(all.iter().any(|i| i.elements() == [3, 3, 4]));
        assert!(all.iter().any(|i| i.elements() == [5, 5, 5, 5, 5, 7]));
        for (x, i) in all.iter().enumerate() {
            assert!(all[..x].iter().all(|j| j != i));
            assert!(i.elements().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn g0_counts() {
        let art = gen_g0(&inst(&[3, 3, 4])).unwrap();
        let g = art.instance.graph.graph();
        assert_eq!(g.vertex_count(), 23);
        assert_eq!(g.edge_count(), 20);
        assert_eq!(art.instance.graph.t(), 10);
        assert_eq!(
            (art.instance.k, art.instance.alpha, art.instance.beta),
            (10, 1, 0)
        );
    }

    #[test]
    fn gbeta_gadget_counts() {
        let base = gen_g0(&inst(&[3, 3, 4])).unwrap();
        let art = gen_gbeta(&inst(&[3, 3, 4]), 1).unwrap();
        let (g0, g) = (base.instance.graph.graph(), art.instance.graph.graph());
        assert_eq!(g.vertex_count() - g0.vertex_count(), 40);
        // B + (B-1) + 1 + (B-1) + B
        assert_eq!(g.edge_count() - g0.edge_count(), 39);
        let t1 = g.vertices().iter().find(|v| v.label == "t1#1").unwrap().id;
        assert_eq!((g.d_in(t1), g.d_out(t1)), (10, 10));
        assert_eq!(
            (art.instance.k, art.instance.alpha, art.instance.beta),
            (10, 3, 1)
        );
        assert!(matches!(
            gen_gbeta(&inst(&[3, 3, 4]), 0),
            Err(ReductionError::ZeroBeta)
        ));
    }

    #[test]
    fn connected_structure() {
        for a in [&[3usize, 3, 4][..], &[4, 4, 4, 4, 4, 4]] {
            let src = inst(a);
            let art = gen_connected(&src).unwrap();
            let g = &art.instance.graph;
            assert_eq!(components(g.graph()).len(), 1);
            assert_eq!(art.expected.designated_cuts.len(), 6 * src.m() - 2);
            let dup =
                duplicate(g, &art.expected.designated_cuts.iter().copied().collect()).unwrap();
            let report = is_acceptable(&dup);
            assert!(report.acceptable);
            let mut got: Vec<_> = report.components.iter().map(|c| c.inputs).collect();
            let mut want = art.expected.component_inputs.clone();
            got.sort_unstable();
            want.sort_unstable();
            assert_eq!(got, want);
            let connectors = got.iter().filter(|&&s| s == src.b() + 3).count();
            assert!(connectors >= 3 * src.m() - 1);
        }
    }

    #[test]
    fn expansion_of_degree_five_vertex() {
        let mut b = DagBuilder::new();
        let hub = b.gate("v");
        for i in 0..5 {
            let x = b.input(format!("i{i}"));
            b.add_edge(x, hub);
        }
        for i in 0..5 {
            let y = b.output(format!("o{i}"));
            b.add_edge(hub, y);
        }
        let g = validate_legal(&b.build().unwrap(), false).unwrap();
        let e = two_legal_expand(&g).unwrap();
        assert!(e.is_two_legal());
        assert_eq!(e.graph().vertices_of_kind(VertexKind::Gate).count(), 4);
        assert_eq!(e.t(), 5);
        assert_eq!(components(e.graph()).len(), 1);
        assert!(
            crate::duplication::is_acceptable(&crate::duplication::DuplicatedDag::identity(&e))
                .acceptable
        );
    }

    #[test]
    fn expansion_keeps_edge_ids_and_small_gates() {
        let art = gen_connected(&inst(&[3, 3, 4])).unwrap();
        let g = &art.instance.graph;
        let (e, map) = two_legal_expand_mapped(g).unwrap();
        assert!(map.iter().enumerate().all(|(i, &x)| x == i));
        for edge in g.graph().edges() {
            let (s, d) = (e.graph().edge(edge.id).src, e.graph().edge(edge.id).dst);
            let base = |l: &str| l.split('#').next().unwrap().to_string();
            assert_eq!(
                base(&e.graph().vertex(s).label),
                g.graph().vertex(edge.src).label
            );
            assert_eq!(
                base(&e.graph().vertex(d).label),
                g.graph().vertex(edge.dst).label
            );
        }
        // a 2-in/2-out gate is already fine
        let mut b = DagBuilder::new();
        let i0 = b.input("i0");
        let i1 = b.input("i1");
        let g1 = b.gate("g");
        let o0 = b.output("o0");
        let o1 = b.output("o1");
        b.add_edge(i0, g1);
        b.add_edge(i1, g1);
        b.add_edge(g1, o0);
        b.add_edge(g1, o1);
        let g = validate_legal(&b.build().unwrap(), false).unwrap();
        assert_eq!(two_legal_expand(&g).unwrap().graph(), g.graph());
    }

    #[test]
    fn degree_one_gates_are_spliced() {
        let mut b = DagBuilder::new();
        let i = b.input("i");
        let g1 = b.gate("g1");
        let g2 = b.gate("g2");
        let o = b.output("o");
        b.add_edge(i, g1);
        b.add_edge(g1, g2);
        b.add_edge(g2, o);
        let g = validate_legal(&b.build().unwrap(), false).unwrap();
        let (e, map) = two_legal_expand_mapped(&g).unwrap();
        assert_eq!(e.graph().vertex_count(), 2);
        assert_eq!(map, vec![0, 0, 0]);
        // B = 3 forces all elements to 1
        let art = two_legalize(&gen_connected(&inst(&[1, 1, 1])).unwrap()).unwrap();
        assert!(art.instance.graph.is_two_legal());
        assert_eq!(art.expected.designated_cuts.len(), 4);
    }

    #[test]
    fn expanded_g0_is_two_legal() {
        let art = two_legalize(&gen_g0(&inst(&[3, 3, 4])).unwrap()).unwrap();
        assert!(art.instance.graph.is_two_legal());
        assert_eq!(art.instance.graph.t(), 10);
        assert_eq!(components(art.instance.graph.graph()).len(), 3);
    }
}
