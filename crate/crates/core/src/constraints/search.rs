use crate::dag::{EdgeId, LegalDag, VertexId};

use super::{
    build_model, check_assignment, component_acceptance, pairs_ok, Backend, ConstraintError,
    ConstraintModel, ModelSolution, SolverOptions,
};

/// Minimum-cut assignment for the model's `P`, by branch and bound.
///
/// Vertices are assigned in id order and partitions tried in ascending
/// order; a vertex may open only the next unused partition. Input and output
/// edges are never cut. Partial budgets and the incumbent's cut count prune;
/// acceptability, connectivity and qubit pairing are checked at the leaves.
pub fn solve_model(m: &ConstraintModel) -> Result<ModelSolution, ConstraintError> {
    if m.opts.backend == Backend::Smtlib {
        return Err(ConstraintError::InvalidOptions(
            "the smtlib backend only exports; run an external solver and parse its model".into(),
        ));
    }
    let mut b = Bnb::new(m);
    b.go(0);
    let best = b.best.ok_or(ConstraintError::Infeasible)?;
    let sol = check_assignment(m, &best)?;
    Ok(sol)
}

/// Tries `P = 1, 2, ..., p_max` and stops at the first feasible one.
pub fn iterate_partitions(
    g: &LegalDag,
    q: usize,
    opts: &SolverOptions,
) -> Result<(usize, ModelSolution), ConstraintError> {
    opts.validate()?;
    for p in 1..=opts.p_max {
        match solve_model(&build_model(g, q, p, opts)?) {
            Ok(sol) => return Ok((p, sol)),
            Err(ConstraintError::Infeasible) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(ConstraintError::Infeasible)
}

/// Fewest cuts over all `P ≤ p_max`; ties go to the smaller `P`.
pub fn min_cuts_over_partitions(
    g: &LegalDag,
    q: usize,
    opts: &SolverOptions,
) -> Result<ModelSolution, ConstraintError> {
    opts.validate()?;
    let mut best: Option<ModelSolution> = None;
    for p in 1..=opts.p_max {
        let mut o = opts.clone();
        if let Some(b) = &best {
            match b.total_cuts() {
                0 => break,
                c => o.beta_cap = Some(c - 1),
            }
        }
        match solve_model(&build_model(g, q, p, &o)?) {
            Ok(sol) => best = Some(sol),
            Err(ConstraintError::Infeasible) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or(ConstraintError::Infeasible)
}

struct Bnb<'a> {
    m: &'a ConstraintModel,
    /// (edge, neighbour, neighbour is the head)
    adj: Vec<Vec<(EdgeId, VertexId, bool)>>,
    /// Neighbours joined by an input or output edge.
    tied: Vec<Vec<VertexId>>,
    input: Vec<bool>,
    assign: Vec<usize>,
    budget: Vec<usize>,
    cuts: usize,
    used: usize,
    /// Cut count a new solution must stay below.
    bound: usize,
    best: Option<Vec<usize>>,
}

impl<'a> Bnb<'a> {
    fn new(m: &'a ConstraintModel) -> Self {
        let g = m.graph.graph();
        let n = g.vertex_count();
        let mut adj = vec![Vec::new(); n];
        let mut tied = vec![Vec::new(); n];
        for e in g.edges() {
            adj[e.src].push((e.id, e.dst, true));
            adj[e.dst].push((e.id, e.src, false));
            if m.forced_uncut[e.id] {
                tied[e.src].push(e.dst);
                tied[e.dst].push(e.src);
            }
        }
        let mut input = vec![false; n];
        m.graph.inputs().iter().for_each(|&v| input[v] = true);
        Self {
            m,
            adj,
            tied,
            input,
            assign: vec![usize::MAX; n],
            budget: vec![0; m.p],
            cuts: 0,
            used: 0,
            bound: m.opts.beta_cap.map_or(usize::MAX, |c| c + 1),
            best: None,
        }
    }

    fn go(&mut self, v: usize) {
        let n = self.assign.len();
        if v == n {
            self.leaf();
            return;
        }
        let mut forced = self.m.fixed[v];
        for &w in &self.tied[v] {
            let p = self.assign[w];
            if p == usize::MAX {
                continue;
            }
            match forced {
                Some(f) if f != p => return,
                _ => forced = Some(p),
            }
        }
        let hi = (self.used + 1).min(self.m.p);
        let choices = match forced {
            Some(p) if p < hi => p..p + 1,
            Some(_) => return,
            None => 0..hi,
        };
        for p in choices {
            if self.place(v, p) {
                self.go(v + 1);
            }
            self.unplace(v, p);
            if self.bound == 0 {
                return;
            }
        }
    }

    /// Assigns `v` to `p`; false if a bound is already violated. Always
    /// followed by `unplace`.
    fn place(&mut self, v: usize, p: usize) -> bool {
        self.assign[v] = p;
        if p == self.used {
            self.used += 1;
        }
        let mut ok = true;
        if self.input[v] {
            self.budget[p] += 1;
            ok &= self.budget[p] <= self.m.q;
        }
        for i in 0..self.adj[v].len() {
            let (_, w, head) = self.adj[v][i];
            let pw = self.assign[w];
            if w == v || pw == usize::MAX || pw == p {
                continue;
            }
            self.cuts += 1;
            let into = if head { pw } else { p };
            self.budget[into] += 1;
            ok &= self.budget[into] <= self.m.q;
        }
        let left = self.assign.len() - v - 1;
        ok && self.cuts < self.bound && left >= self.m.p - self.used
    }

    fn unplace(&mut self, v: usize, p: usize) {
        if self.input[v] {
            self.budget[p] -= 1;
        }
        for i in 0..self.adj[v].len() {
            let (_, w, head) = self.adj[v][i];
            let pw = self.assign[w];
            if w == v || pw == usize::MAX || pw == p {
                continue;
            }
            self.cuts -= 1;
            let into = if head { pw } else { p };
            self.budget[into] -= 1;
        }
        self.assign[v] = usize::MAX;
        if p + 1 == self.used && !self.assign.contains(&p) {
            self.used -= 1;
        }
    }

    fn leaf(&mut self) {
        if self.used != self.m.p {
            return;
        }
        let g = self.m.graph.graph();
        let assign = &self.assign;
        let (comps, ok) = component_acceptance(&self.m.graph, |e| {
            assign[g.edge(e).src] != assign[g.edge(e).dst]
        });
        if !ok || (self.m.opts.connectivity_required && comps != self.m.p) {
            return;
        }
        if self.m.opts.pair_in_out_same_qubit && !pairs_ok(self.m, assign) {
            return;
        }
        self.bound = self.cuts;
        self.best = Some(self.assign.clone());
    }
}
