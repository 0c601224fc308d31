//! Vertex-partition formulation of wire-cut placement.
//!
//! Every vertex is assigned to one of `P` partitions; an edge is cut exactly
//! when its endpoints disagree. Each partition pays one qubit per primary
//! input it holds and one per cut edge entering it, and that total must stay
//! within `Q`. After duplicating the cut edges every component must still
//! contain a path from an original input to an original output. The number
//! of cuts is minimized.
//!
//! Two fragments of the same original component may land in the same
//! partition; a partition is then a multi-component cluster. Requiring each
//! partition to be weakly connected is optional.

mod search;
mod smtlib;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::{EdgeId, LegalDag, VertexId, VertexKind};
use crate::duplication::CutSet;
use crate::unionfind::UnionFind;

pub use search::{iterate_partitions, min_cuts_over_partitions, solve_model};
pub use smtlib::{emit_smtlib, parse_smt_model};

#[derive(Debug, Error)]
pub enum ConstraintError {
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("no feasible partition")]
    Infeasible,
    #[error("cannot parse solver output: {0}")]
    Parse(String),
    #[error("assignment violates the model: {0}")]
    InvalidAssignment(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Builtin,
    Smtlib,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub connectivity_required: bool,
    /// Each partition must hold the input and the output of one qubit; the
    /// i-th input vertex (by id) is paired with the i-th output vertex.
    pub pair_in_out_same_qubit: bool,
    pub p_max: usize,
    /// Reject solutions with more cuts than this.
    pub beta_cap: Option<usize>,
    pub backend: Backend,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            connectivity_required: false,
            pair_in_out_same_qubit: false,
            p_max: 1,
            beta_cap: None,
            backend: Backend::Builtin,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), ConstraintError> {
        if self.p_max == 0 {
            return Err(ConstraintError::InvalidOptions(
                "p_max must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintModel {
    pub graph: LegalDag,
    pub q: usize,
    pub p: usize,
    pub opts: SolverOptions,
    /// Partition a vertex is fixed to before search, if any.
    pub fixed: Vec<Option<usize>>,
    /// Cut variables fixed to 0 before search (input/output edges, or
    /// everything when `P = 1`).
    pub forced_uncut: Vec<bool>,
}

impl ConstraintModel {
    pub fn assignment_var_count(&self) -> usize {
        self.graph.graph().vertex_count() * self.p
    }

    pub fn cut_var_count(&self) -> usize {
        self.graph.graph().edge_count()
    }

    /// Input/output vertex pairs used by `pair_in_out_same_qubit`.
    pub fn qubit_pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.graph
            .inputs()
            .iter()
            .copied()
            .zip(self.graph.outputs().iter().copied())
            .collect()
    }
}

pub fn build_model(
    g: &LegalDag,
    q: usize,
    p: usize,
    opts: &SolverOptions,
) -> Result<ConstraintModel, ConstraintError> {
    opts.validate()?;
    if q == 0 || p == 0 {
        return Err(ConstraintError::InvalidOptions(
            "Q and P must be at least 1".into(),
        ));
    }
    let graph = g.graph();
    let mut fixed = vec![None; graph.vertex_count()];
    if p == 1 {
        fixed.iter_mut().for_each(|f| *f = Some(0));
    } else if !fixed.is_empty() {
        // partitions are interchangeable
        fixed[0] = Some(0);
    }
    let forced_uncut = (0..graph.edge_count())
        .map(|e| p == 1 || g.is_io_edge(e))
        .collect();
    Ok(ConstraintModel {
        graph: g.clone(),
        q,
        p,
        opts: opts.clone(),
        fixed,
        forced_uncut,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSolution {
    pub partitions: usize,
    pub partition_of: Vec<usize>,
    pub cuts: CutSet,
    /// Primary inputs plus entering cut edges, per partition.
    pub budget: Vec<usize>,
}

impl ModelSolution {
    pub fn total_cuts(&self) -> usize {
        self.cuts.len()
    }
}

/// Checks an assignment against every constraint of the model and returns
/// the induced solution.
pub fn check_assignment(
    m: &ConstraintModel,
    partition_of: &[usize],
) -> Result<ModelSolution, ConstraintError> {
    let bad = |s: String| Err(ConstraintError::InvalidAssignment(s));
    let graph = m.graph.graph();
    let n = graph.vertex_count();
    if partition_of.len() != n {
        return bad(format!("{} entries for {n} vertices", partition_of.len()));
    }
    if let Some(v) = partition_of.iter().position(|&p| p >= m.p) {
        return bad(format!("vertex {v} has partition {} >= P", partition_of[v]));
    }
    let mut used = vec![false; m.p];
    partition_of.iter().for_each(|&p| used[p] = true);
    if let Some(p) = used.iter().position(|u| !u) {
        return bad(format!("partition {p} is empty"));
    }
    let cuts: CutSet = graph
        .edges()
        .iter()
        .filter(|e| partition_of[e.src] != partition_of[e.dst])
        .map(|e| e.id)
        .collect();
    let budget = partition_budgets(m, partition_of, &cuts);
    if let Some(p) = budget.iter().position(|&b| b > m.q) {
        return bad(format!(
            "partition {p} needs {} qubits > Q={}",
            budget[p], m.q
        ));
    }
    if let Some(cap) = m.opts.beta_cap {
        if cuts.len() > cap {
            return bad(format!("{} cuts exceed the cap {cap}", cuts.len()));
        }
    }
    let (comps, ok) = component_acceptance(&m.graph, |e| cuts.contains(e));
    if !ok {
        return bad("a component has no original input-to-output path".into());
    }
    if m.opts.connectivity_required && comps != m.p {
        return bad("a partition is not connected".into());
    }
    if m.opts.pair_in_out_same_qubit && !pairs_ok(m, partition_of) {
        return bad("a partition holds no input/output pair of one qubit".into());
    }
    Ok(ModelSolution {
        partitions: m.p,
        partition_of: partition_of.to_vec(),
        cuts,
        budget,
    })
}

fn partition_budgets(m: &ConstraintModel, partition_of: &[usize], cuts: &CutSet) -> Vec<usize> {
    let graph = m.graph.graph();
    let mut budget = vec![0; m.p];
    for &v in m.graph.inputs() {
        budget[partition_of[v]] += 1;
    }
    for e in cuts.iter() {
        budget[partition_of[graph.edge(e).dst]] += 1;
    }
    budget
}

pub(crate) fn pairs_ok(m: &ConstraintModel, partition_of: &[usize]) -> bool {
    let mut has = vec![false; m.p];
    for (i, o) in m.qubit_pairs() {
        if partition_of[i] == partition_of[o] {
            has[partition_of[i]] = true;
        }
    }
    has.iter().all(|&h| h)
}

/// Components left after removing the cut edges, and whether each has a
/// path from an original input to an original output along uncut edges.
pub(crate) fn component_acceptance(g: &LegalDag, is_cut: impl Fn(EdgeId) -> bool) -> (usize, bool) {
    let graph = g.graph();
    let n = graph.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut fwd = vec![false; n];
    for &v in g.topological_order() {
        if graph.kind(v) == VertexKind::Input {
            fwd[v] = true;
        }
        for &e in graph.out_edges(v) {
            if !is_cut(e) {
                let w = graph.edge(e).dst;
                fwd[w] |= fwd[v];
                uf.union(v, w);
            }
        }
    }
    let mut bwd = vec![false; n];
    for &v in g.topological_order().iter().rev() {
        if graph.kind(v) == VertexKind::Output {
            bwd[v] = true;
        }
        for &e in graph.out_edges(v) {
            if !is_cut(e) {
                bwd[v] |= bwd[graph.edge(e).dst];
            }
        }
    }
    let mut has_path = vec![false; n];
    let mut roots = vec![false; n];
    for v in 0..n {
        let r = uf.find(v);
        roots[r] = true;
        has_path[r] |= fwd[v] && bwd[v];
    }
    let count = roots.iter().filter(|&&r| r).count();
    let ok = (0..n).all(|r| !roots[r] || has_path[r]);
    (count, ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{validate_legal, DagBuilder};

    fn single_edge() -> LegalDag {
        let mut b = DagBuilder::new();
        let a = b.input("a");
        let o = b.output("b");
        b.add_edge(a, o);
        validate_legal(&b.build().unwrap(), false).unwrap()
    }

    #[test]
    fn single_edge_model_shape() {
        let m = build_model(&single_edge(), 1, 1, &SolverOptions::default()).unwrap();
        assert_eq!(m.assignment_var_count(), 2);
        assert_eq!(m.cut_var_count(), 1);
        assert_eq!(m.fixed, vec![Some(0), Some(0)]);
        assert_eq!(m.forced_uncut, vec![true]);
    }

    #[test]
    fn check_rejects_bad_assignments() {
        let m = build_model(&single_edge(), 1, 2, &SolverOptions::default()).unwrap();
        assert!(check_assignment(&m, &[0, 0]).is_err());
        assert!(check_assignment(&m, &[0, 1]).is_err());
        assert!(check_assignment(&m, &[0]).is_err());
        let m1 = build_model(&single_edge(), 1, 1, &SolverOptions::default()).unwrap();
        let s = check_assignment(&m1, &[0, 0]).unwrap();
        assert_eq!(s.total_cuts(), 0);
        assert_eq!(s.budget, vec![1]);
    }

    #[test]
    fn zero_p_max_is_rejected() {
        let opts = SolverOptions {
            p_max: 0,
            ..SolverOptions::default()
        };
        assert!(build_model(&single_edge(), 1, 1, &opts).is_err());
    }
}
