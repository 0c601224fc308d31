//! Enumeration of cut subsets.
//!
//! Subsets are enumerated depth-first by deciding keep/cut for one edge at a
//! time. The decision search runs once with the whole budget; minimization
//! deepens the budget one cut at a time so the first subset found has
//! minimum size. Edges are visited in topological order of their
//! head vertex, which makes the "reachable from an original input" flag of a
//! vertex final before any of its out-edges is decided. Components are
//! tracked with an undoable union-find; a component is closed once all of its
//! edges are decided, at which point it must be acceptable, hold at most `k`
//! inputs, and the multiset of closed components must still pack into `α`
//! clusters. Unacceptability and non-packability are preserved by further
//! cuts, so both prune whole subtrees.
//!
//! Failed search states are memoized. A state is the set of open (partially
//! decided) components with their input counts, acceptance flags and the
//! reachability flags of their frontier vertices, plus the multiset of closed
//! component sizes; a state that failed with `r` cuts left also fails with
//! fewer, so the memo survives deepening.

use std::collections::HashMap;

use crate::dag::{EdgeId, LegalDag, VertexKind};
use crate::duplication::CutSet;

use super::packing::pack_components;
use super::{certificate, GdError, GdInstance, GdSolution, WitnessKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Never cut edges leaving an input or entering an output.
    pub prune_io_edges: bool,
    /// Among parallel edges, only cut a prefix in id order.
    pub prune_parallel: bool,
    /// Remember failed states.
    pub memoize: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            prune_io_edges: true,
            prune_parallel: true,
            memoize: true,
        }
    }
}

pub fn solve_decision(inst: &GdInstance) -> Option<GdSolution> {
    solve_decision_with(inst, SearchOptions::default())
}

pub fn solve_decision_with(inst: &GdInstance, opts: SearchOptions) -> Option<GdSolution> {
    let cuts = any_cut_subset(inst, opts)?;
    let sol = certificate(inst, cuts, WitnessKind::Decision);
    assert!(
        sol.is_some(),
        "search accepted a cut set the verifier rejects"
    );
    sol
}

/// Smallest `β ≤ beta_max` with a YES answer, and its certificate.
pub fn optimize_min_beta(
    graph: &LegalDag,
    k: usize,
    alpha: usize,
    beta_max: usize,
) -> Result<Option<(usize, GdSolution)>, GdError> {
    let inst = GdInstance::new(graph.clone(), k, alpha, beta_max)?;
    let Some(cuts) = min_cut_subset(&inst, beta_max, SearchOptions::default()) else {
        return Ok(None);
    };
    let beta = cuts.len();
    let sol = certificate(&inst, cuts, WitnessKind::Optimal)
        .expect("search accepted a cut set the verifier rejects");
    Ok(Some((beta, sol)))
}

/// Cut budget worth searching: each cut adds one input, and all inputs
/// must fit into `α` clusters of `k`.
fn usable_budget(inst: &GdInstance, beta: usize) -> Option<usize> {
    let g = inst.graph.graph();
    if (0..g.vertex_count()).any(|v| g.d_in(v) + g.d_out(v) == 0) {
        // an isolated vertex is a component without any path
        return None;
    }
    let capacity = inst.alpha.saturating_mul(inst.k);
    let slack = capacity.checked_sub(inst.graph.t())?;
    Some(beta.min(slack))
}

fn min_cut_subset(inst: &GdInstance, beta: usize, opts: SearchOptions) -> Option<CutSet> {
    let budget = usable_budget(inst, beta)?;
    let mut s = Search::new(inst, opts);
    for b in 0..=budget {
        s.budget = b;
        if s.step(0) {
            return Some(s.found());
        }
    }
    None
}

/// Any feasible subset within the budget, searched in one pass.
fn any_cut_subset(inst: &GdInstance, opts: SearchOptions) -> Option<CutSet> {
    let mut s = Search::new(inst, opts);
    s.budget = usable_budget(inst, inst.beta)?;
    s.step(0).then(|| s.found())
}

enum Undo {
    Union {
        child: usize,
        root: usize,
        size: usize,
        open: usize,
        acc: bool,
        weight: u32,
    },
    Size(usize, usize),
    Acc(usize),
    Fwd(usize),
    Remaining(usize, bool),
    Closed(usize),
}

struct Search {
    k: usize,
    alpha: usize,
    opts: SearchOptions,
    /// Edge ids in processing order.
    edges: Vec<EdgeId>,
    src: Vec<usize>,
    dst: Vec<usize>,
    forbid_cut: Vec<bool>,
    /// Edge at this position is parallel to the one before it.
    sibling_prev: Vec<bool>,
    is_output: Vec<bool>,
    degree: Vec<usize>,

    parent: Vec<usize>,
    weight: Vec<u32>,
    size: Vec<usize>,
    open: Vec<usize>,
    acc: Vec<bool>,
    fwd: Vec<bool>,
    remaining: Vec<usize>,
    closed: Vec<usize>,
    decided_cut: Vec<bool>,
    cut_stack: Vec<usize>,
    budget: usize,
    log: Vec<Undo>,

    /// Failed states, with the largest remaining budget they failed under.
    memo: HashMap<Vec<u32>, usize>,
    pack_memo: HashMap<Vec<usize>, bool>,
}

impl Search {
    fn new(inst: &GdInstance, opts: SearchOptions) -> Self {
        let legal = &inst.graph;
        let g = legal.graph();
        let n = g.vertex_count();
        let mut topo_pos = vec![0; n];
        for (i, &v) in legal.topological_order().iter().enumerate() {
            topo_pos[v] = i;
        }
        let mut edges: Vec<EdgeId> = (0..g.edge_count()).collect();
        edges.sort_by_key(|&e| {
            let edge = g.edge(e);
            (topo_pos[edge.dst], edge.src, e)
        });
        let src: Vec<_> = edges.iter().map(|&e| g.edge(e).src).collect();
        let dst: Vec<_> = edges.iter().map(|&e| g.edge(e).dst).collect();
        let forbid_cut = edges
            .iter()
            .map(|&e| opts.prune_io_edges && legal.is_io_edge(e))
            .collect();
        let sibling_prev = (0..edges.len())
            .map(|i| i > 0 && src[i] == src[i - 1] && dst[i] == dst[i - 1])
            .collect();
        let is_output = (0..n).map(|v| g.kind(v) == VertexKind::Output).collect();
        let degree: Vec<usize> = (0..n).map(|v| g.d_in(v) + g.d_out(v)).collect();
        let size = (0..n)
            .map(|v| usize::from(g.kind(v) == VertexKind::Input))
            .collect();
        let fwd = (0..n).map(|v| g.kind(v) == VertexKind::Input).collect();
        Self {
            k: inst.k,
            alpha: inst.alpha,
            opts,
            forbid_cut,
            sibling_prev,
            is_output,
            parent: (0..n).collect(),
            weight: vec![1; n],
            size,
            open: vec![1; n],
            acc: vec![false; n],
            fwd,
            remaining: degree.clone(),
            degree,
            closed: Vec::new(),
            decided_cut: vec![false; edges.len()],
            cut_stack: Vec::new(),
            budget: 0,
            log: Vec::new(),
            memo: HashMap::new(),
            pack_memo: HashMap::new(),
            edges,
            src,
            dst,
        }
    }

    fn found(&self) -> CutSet {
        self.cut_stack.iter().map(|&p| self.edges[p]).collect()
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn step(&mut self, i: usize) -> bool {
        if i == self.edges.len() {
            return true;
        }
        let left = self.budget - self.cut_stack.len();
        let key = self.opts.memoize.then(|| self.state_key(i));
        if let Some(key) = &key {
            if self.memo.get(key).is_some_and(|&r| r >= left) {
                return false;
            }
        }
        if !self.open_packable() {
            if let Some(key) = key {
                self.memo.insert(key, left);
            }
            return false;
        }
        for cut in [false, true] {
            let mark = self.log.len();
            let cuts = self.cut_stack.len();
            let ok = if cut {
                self.apply_cut(i)
            } else {
                self.apply_keep(i)
            };
            if ok && self.step(i + 1) {
                return true;
            }
            self.undo_to(mark);
            self.cut_stack.truncate(cuts);
        }
        if let Some(key) = key {
            self.memo.insert(key, left);
        }
        false
    }

    fn apply_keep(&mut self, i: usize) -> bool {
        self.decided_cut[i] = false;
        let (u, v) = (self.src[i], self.dst[i]);
        if self.fwd[u] && !self.fwd[v] {
            self.fwd[v] = true;
            self.log.push(Undo::Fwd(v));
        }
        let (ru, rv) = (self.find(u), self.find(v));
        if ru != rv {
            let (root, child) = if self.weight[ru] >= self.weight[rv] {
                (ru, rv)
            } else {
                (rv, ru)
            };
            self.log.push(Undo::Union {
                child,
                root,
                size: self.size[root],
                open: self.open[root],
                acc: self.acc[root],
                weight: self.weight[root],
            });
            self.parent[child] = root;
            self.weight[root] += self.weight[child];
            self.size[root] += self.size[child];
            self.open[root] += self.open[child];
            self.acc[root] |= self.acc[child];
        }
        let root = self.find(v);
        if self.is_output[v] && self.fwd[v] && !self.acc[root] {
            self.acc[root] = true;
            self.log.push(Undo::Acc(root));
        }
        self.consume(u);
        self.consume(v);
        self.check_closed(root)
    }

    fn apply_cut(&mut self, i: usize) -> bool {
        if self.cut_stack.len() >= self.budget || self.forbid_cut[i] {
            return false;
        }
        if self.opts.prune_parallel && self.sibling_prev[i] && !self.decided_cut[i - 1] {
            return false;
        }
        self.decided_cut[i] = true;
        self.cut_stack.push(i);
        let (u, v) = (self.src[i], self.dst[i]);
        let rv = self.find(v);
        self.log.push(Undo::Size(rv, self.size[rv]));
        self.size[rv] += 1;
        self.consume(u);
        self.consume(v);
        let ru = self.find(u);
        self.check_closed(ru) && self.check_closed(rv)
    }

    fn consume(&mut self, v: usize) {
        self.remaining[v] -= 1;
        let done = self.remaining[v] == 0;
        if done {
            let r = self.find(v);
            self.open[r] -= 1;
        }
        self.log.push(Undo::Remaining(v, done));
    }

    fn check_closed(&mut self, root: usize) -> bool {
        if self.size[root] > self.k {
            // components only grow
            return false;
        }
        if self.open[root] > 0 {
            return true;
        }
        if !self.acc[root] || self.size[root] > self.k {
            return false;
        }
        let s = self.size[root];
        let pos = self.closed.partition_point(|&x| x > s);
        self.closed.insert(pos, s);
        self.log.push(Undo::Closed(s));
        self.packable()
    }

    fn packable(&mut self) -> bool {
        let items = std::mem::take(&mut self.closed);
        let ok = self.packable_items(&items);
        self.closed = items;
        ok
    }

    fn packable_items(&mut self, items: &[usize]) -> bool {
        if let Some(&ok) = self.pack_memo.get(items) {
            return ok;
        }
        let ok = pack_components(items, self.k, self.alpha).is_some();
        self.pack_memo.insert(items.to_vec(), ok);
        ok
    }

    /// Open components only grow or merge, and merging two items never makes
    /// a packing easier, so the closed sizes together with the current open
    /// sizes must already pack.
    fn open_packable(&mut self) -> bool {
        let mut items = self.closed.clone();
        let mut seen: Vec<usize> = Vec::new();
        for v in 0..self.parent.len() {
            let r = self.remaining[v];
            if r == 0 || r == self.degree[v] {
                continue;
            }
            let root = self.find(v);
            if !seen.contains(&root) {
                seen.push(root);
                items.push(self.size[root]);
            }
        }
        if seen.is_empty() {
            return true;
        }
        items.sort_unstable_by(|a, b| b.cmp(a));
        self.packable_items(&items)
    }

    fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            match self.log.pop().unwrap() {
                Undo::Union {
                    child,
                    root,
                    size,
                    open,
                    acc,
                    weight,
                } => {
                    self.parent[child] = child;
                    self.size[root] = size;
                    self.open[root] = open;
                    self.acc[root] = acc;
                    self.weight[root] = weight;
                }
                Undo::Size(r, s) => self.size[r] = s,
                Undo::Acc(r) => self.acc[r] = false,
                Undo::Fwd(v) => self.fwd[v] = false,
                Undo::Remaining(v, done) => {
                    if done {
                        let r = self.find(v);
                        self.open[r] += 1;
                    }
                    self.remaining[v] += 1;
                }
                Undo::Closed(s) => {
                    let pos = self.closed.iter().position(|&x| x == s).unwrap();
                    self.closed.remove(pos);
                }
            }
        }
    }

    fn state_key(&self, i: usize) -> Vec<u32> {
        let mut key = Vec::with_capacity(32);
        key.push(i as u32);
        key.push(u32::from(
            i > 0 && self.sibling_prev[i] && self.decided_cut[i - 1],
        ));
        key.push(self.closed.len() as u32);
        key.extend(self.closed.iter().map(|&s| s as u32));
        // open vertices that have been touched, with their component relabelled
        // by first appearance
        let mut roots: Vec<usize> = Vec::new();
        for v in 0..self.parent.len() {
            let r = self.remaining[v];
            if r == 0 || r == self.degree[v] {
                continue;
            }
            let root = self.find(v);
            let label = match roots.iter().position(|&x| x == root) {
                Some(p) => p,
                None => {
                    roots.push(root);
                    roots.len() - 1
                }
            };
            key.push(v as u32);
            key.push(((label as u32) << 1) | u32::from(self.fwd[v]));
        }
        key.push(u32::MAX);
        for &r in &roots {
            key.push(((self.size[r] as u32) << 1) | u32::from(self.acc[r]));
        }
        key
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{validate_legal, DagBuilder};
    use crate::gd::verify_solution;

    fn legal(b: DagBuilder) -> LegalDag {
        validate_legal(&b.build().unwrap(), false).unwrap()
    }

    fn single_edge() -> LegalDag {
        let mut b = DagBuilder::new();
        let a = b.input("a");
        let o = b.output("b");
        b.add_edge(a, o);
        legal(b)
    }

    fn two_wires() -> LegalDag {
        let mut b = DagBuilder::new();
        for q in 0..2 {
            let i = b.input(format!("i{q}"));
            let g = b.gate(format!("g{q}"));
            let o = b.output(format!("o{q}"));
            b.add_edge(i, g);
            b.add_edge(g, o);
        }
        legal(b)
    }

    #[test]
    fn single_edge_yes() {
        let inst = GdInstance::new(single_edge(), 1, 1, 0).unwrap();
        let sol = solve_decision(&inst).unwrap();
        assert_eq!(sol.assignment.clusters, 1);
        verify_solution(&inst, &sol).unwrap();
    }

    #[test]
    fn min_beta_examples() {
        let (beta, sol) = optimize_min_beta(&two_wires(), 1, 2, 3).unwrap().unwrap();
        assert_eq!(beta, 0);
        assert_eq!(sol.assignment.clusters, 2);
        assert_eq!(sol.witness, WitnessKind::Optimal);

        let (beta, sol) = optimize_min_beta(&single_edge(), 1, 2, 5).unwrap().unwrap();
        assert_eq!(beta, 0);
        assert_eq!(sol.assignment.clusters, 1);
    }

    #[test]
    fn invalid_parameters() {
        assert!(GdInstance::new(single_edge(), 0, 1, 0).is_err());
        assert!(GdInstance::new(single_edge(), 1, 0, 0).is_err());
    }

    #[test]
    fn too_small_budget_is_no() {
        let inst = GdInstance::new(two_wires(), 1, 1, 5).unwrap();
        assert!(solve_decision(&inst).is_none());
    }
}
