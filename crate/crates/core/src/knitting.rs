//! Wire-cut plans: the 8-term decomposition of the identity channel, the
//! fragments a cut set induces, lazy enumeration of the `8^K` coefficient
//! tuples, and the sampling-overhead metric.
//!
//! The identity channel on one qubit is
//! `A = Σ_i c_i Tr(A O_i) ρ_i` with `c_i = ±1/2`, `O_i ∈ {I, X, Y, Z}` and
//! `ρ_i` the matching eigenprojectors: `½ Σ_P Tr(A P) P = A` over the Pauli
//! basis, and each Pauli is the difference (the identity the sum) of its two
//! eigenprojectors.

use std::fmt::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::{DagBuilder, DagGraph, EdgeId, LegalDag, VertexId, VertexKind};
use crate::duplication::{duplicate, is_acceptable, CutSet};
use crate::error::DagError;
use crate::gd::GdSolution;

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Self::I),
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }

    pub fn matrix(self) -> Matrix2 {
        let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
        match self {
            Self::I => [[l, o], [o, l]],
            Self::X => [[o, l], [l, o]],
            Self::Y => [[o, -i], [i, o]],
            Self::Z => [[l, o], [o, -l]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrepState {
    #[serde(rename = "|0>")]
    Zero,
    #[serde(rename = "|1>")]
    One,
    #[serde(rename = "|+>")]
    Plus,
    #[serde(rename = "|->")]
    Minus,
    #[serde(rename = "|i>")]
    PlusI,
    #[serde(rename = "|-i>")]
    MinusI,
}

impl PrepState {
    /// Normalized state vector `(⟨0|ψ⟩, ⟨1|ψ⟩)`.
    pub fn ket(self) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Self::Zero => [c(1.0, 0.0), c(0.0, 0.0)],
            Self::One => [c(0.0, 0.0), c(1.0, 0.0)],
            Self::Plus => [c(h, 0.0), c(h, 0.0)],
            Self::Minus => [c(h, 0.0), c(-h, 0.0)],
            Self::PlusI => [c(h, 0.0), c(0.0, h)],
            Self::MinusI => [c(h, 0.0), c(0.0, -h)],
        }
    }

    /// The projector `|ψ⟩⟨ψ|`.
    pub fn density(self) -> Matrix2 {
        let k = self.ket();
        let mut m = [[c(0.0, 0.0); 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (s, x) in row.iter_mut().enumerate() {
                *x = k[r] * k[s].conj();
            }
        }
        m
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Zero => "|0>",
            Self::One => "|1>",
            Self::Plus => "|+>",
            Self::Minus => "|->",
            Self::PlusI => "|i>",
            Self::MinusI => "|-i>",
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutTerm {
    pub coefficient: f64,
    pub observable: Pauli,
    pub prep: PrepState,
}

impl CutTerm {
    pub fn prep_density(&self) -> Matrix2 {
        self.prep.density()
    }
}

const fn term(coefficient: f64, observable: Pauli, prep: PrepState) -> CutTerm {
    CutTerm {
        coefficient,
        observable,
        prep,
    }
}

/// Canonical table, ordered I+, I-, X+, X-, Y+, Y-, Z+, Z-.
pub const WIRE_CUT_TERMS: [CutTerm; 8] = [
    term(0.5, Pauli::I, PrepState::Zero),
    term(0.5, Pauli::I, PrepState::One),
    term(0.5, Pauli::X, PrepState::Plus),
    term(-0.5, Pauli::X, PrepState::Minus),
    term(0.5, Pauli::Y, PrepState::PlusI),
    term(-0.5, Pauli::Y, PrepState::MinusI),
    term(0.5, Pauli::Z, PrepState::Zero),
    term(-0.5, Pauli::Z, PrepState::One),
];

pub fn wire_cut_terms() -> &'static [CutTerm; 8] {
    &WIRE_CUT_TERMS
}

/// `Σ_i c_i Tr(A O_i) ρ_i` over the canonical table.
pub fn apply_decomposition(a: &Matrix2) -> Matrix2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for t in &WIRE_CUT_TERMS {
        let o = t.observable.matrix();
        let mut tr = c(0.0, 0.0);
        for (r, row) in a.iter().enumerate() {
            for (s, x) in row.iter().enumerate() {
                tr += x * o[s][r];
            }
        }
        let rho = t.prep_density();
        for r in 0..2 {
            for s in 0..2 {
                out[r][s] += t.coefficient * tr * rho[r][s];
            }
        }
    }
    out
}

#[derive(Debug, Error)]
pub enum KnitError {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("cut set leaves a component without an original input-to-output path")]
    Unacceptable,
    #[error("fragment assignment has {got} entries for {expected} vertices")]
    AssignmentLength { expected: usize, got: usize },
    #[error(transparent)]
    Dag(#[from] DagError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedCut {
    pub edge: EdgeId,
    pub src_frag: usize,
    pub dst_frag: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub index: usize,
    /// Original vertices, ascending.
    pub vertices: Vec<VertexId>,
    /// Original inputs held by the fragment.
    pub primary_inputs: usize,
    /// Cut edges whose source side is here; each ends in an observable.
    pub observables: Vec<EdgeId>,
    /// Cut edges whose sink side is here; each starts from a preparation.
    pub preparations: Vec<EdgeId>,
}

impl Fragment {
    /// Qubits needed to run the fragment on its own.
    pub fn qubits(&self) -> usize {
        self.primary_inputs + self.preparations.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutPlan {
    /// In ascending edge order; cut `i` is digit `i` of a tuple index.
    pub cuts: Vec<PlannedCut>,
    pub fragments: Vec<Fragment>,
    /// Fragment of every original vertex.
    pub fragment_of: Vec<usize>,
    pub epsilon: f64,
}

impl CutPlan {
    pub fn k(&self) -> usize {
        self.cuts.len()
    }

    /// `8^K`, or `None` if it overflows.
    pub fn tuple_count(&self) -> Option<u64> {
        8u64.checked_pow(self.k() as u32)
    }

    /// Term index of every cut in tuple `j`: base-8 digits, least
    /// significant first.
    pub fn tuple(&self, mut j: u64) -> Vec<usize> {
        let mut digits = Vec::with_capacity(self.k());
        for _ in 0..self.k() {
            digits.push((j % 8) as usize);
            j /= 8;
        }
        digits
    }

    pub fn coefficient(&self, digits: &[usize]) -> f64 {
        digits
            .iter()
            .map(|&d| WIRE_CUT_TERMS[d].coefficient)
            .product()
    }

    pub fn overhead_metric(&self) -> f64 {
        overhead_metric(self.k(), self.epsilon)
    }

    pub fn total_qubits(&self) -> usize {
        self.fragments.iter().map(Fragment::qubits).sum()
    }
}

/// `2^(4K) / ε²`.
pub fn overhead_metric(k: usize, epsilon: f64) -> f64 {
    16f64.powi(k as i32) / epsilon / epsilon
}

fn check_epsilon(epsilon: f64) -> Result<(), KnitError> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(KnitError::InvalidEpsilon(epsilon))
    }
}

/// Plan with one fragment per cluster of a GD certificate.
pub fn make_plan(g: &LegalDag, sol: &GdSolution, epsilon: f64) -> Result<CutPlan, KnitError> {
    check_epsilon(epsilon)?;
    let dup = duplicate(g, &sol.cuts)?;
    let report = is_acceptable(&dup);
    if !report.acceptable {
        return Err(KnitError::Unacceptable);
    }
    let n = g.graph().vertex_count();
    let mut fragment_of = vec![0; n];
    for (ci, comp) in report.components.iter().enumerate() {
        for &v in comp.vertices.iter().filter(|&&v| v < n) {
            fragment_of[v] = sol.assignment.cluster_of[ci];
        }
    }
    plan_from_partition(g, &sol.cuts, &fragment_of, epsilon)
}

/// Plan with one fragment per component left by the cut set. The cut set
/// need not be acceptable: the decomposition is exact for any wire.
pub fn plan_from_cuts(g: &LegalDag, cuts: &CutSet, epsilon: f64) -> Result<CutPlan, KnitError> {
    check_epsilon(epsilon)?;
    let dup = duplicate(g, cuts)?;
    let report = is_acceptable(&dup);
    let n = g.graph().vertex_count();
    let mut fragment_of = vec![0; n];
    for (ci, comp) in report.components.iter().enumerate() {
        for &v in comp.vertices.iter().filter(|&&v| v < n) {
            fragment_of[v] = ci;
        }
    }
    plan_from_partition(g, cuts, &fragment_of, epsilon)
}

/// Plan for an explicit vertex-to-fragment map. Every edge whose endpoints
/// lie in different fragments must be in `cuts`; cut edges inside one
/// fragment are allowed.
pub fn plan_from_partition(
    g: &LegalDag,
    cuts: &CutSet,
    fragment_of: &[usize],
    epsilon: f64,
) -> Result<CutPlan, KnitError> {
    check_epsilon(epsilon)?;
    let graph = g.graph();
    let n = graph.vertex_count();
    if fragment_of.len() != n {
        return Err(KnitError::AssignmentLength {
            expected: n,
            got: fragment_of.len(),
        });
    }
    for e in cuts.iter() {
        if e >= graph.edge_count() {
            return Err(DagError::UnknownEdge(e).into());
        }
    }
    if let Some(e) = graph
        .edges()
        .iter()
        .find(|e| fragment_of[e.src] != fragment_of[e.dst] && !cuts.contains(e.id))
    {
        return Err(DagError::InvalidCircuit(format!(
            "edge {} crosses fragments but is not cut",
            e.id
        ))
        .into());
    }
    let count = fragment_of.iter().max().map_or(0, |&m| m + 1);
    let mut fragments: Vec<Fragment> = (0..count)
        .map(|index| Fragment {
            index,
            vertices: Vec::new(),
            primary_inputs: 0,
            observables: Vec::new(),
            preparations: Vec::new(),
        })
        .collect();
    for v in 0..n {
        let f = &mut fragments[fragment_of[v]];
        f.vertices.push(v);
        if graph.kind(v) == VertexKind::Input {
            f.primary_inputs += 1;
        }
    }
    let mut planned = Vec::with_capacity(cuts.len());
    for e in cuts.iter() {
        let edge = graph.edge(e);
        let (s, d) = (fragment_of[edge.src], fragment_of[edge.dst]);
        fragments[s].observables.push(e);
        fragments[d].preparations.push(e);
        planned.push(PlannedCut {
            edge: e,
            src_frag: s,
            dst_frag: d,
        });
    }
    Ok(CutPlan {
        cuts: planned,
        fragments,
        fragment_of: fragment_of.to_vec(),
        epsilon,
    })
}

/// A fragment as a standalone dag: its vertices, an `O:<e>` output
/// placeholder for each observable and a `rho:<e>` input placeholder for
/// each preparation.
pub fn fragment_graph(g: &LegalDag, plan: &CutPlan, f: usize) -> DagGraph {
    let graph = g.graph();
    let frag = &plan.fragments[f];
    let mut b = DagBuilder::new();
    let mut local = vec![usize::MAX; graph.vertex_count()];
    for &v in &frag.vertices {
        let vx = graph.vertex(v);
        local[v] = b.add_vertex(vx.kind, vx.label.clone());
    }
    let cut: CutSet = plan.cuts.iter().map(|c| c.edge).collect();
    for e in graph.edges() {
        let (s, d) = (local[e.src], local[e.dst]);
        if cut.contains(e.id) {
            if s != usize::MAX {
                let o = b.output(format!("O:{}", e.id));
                b.add_edge(s, o);
            }
            if d != usize::MAX {
                let r = b.input(format!("rho:{}", e.id));
                b.add_edge(r, d);
            }
        } else if s != usize::MAX {
            b.add_edge(s, d);
        }
    }
    b.build().expect("fragment of a valid dag")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub epsilon: f64,
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentSummary {
    pub index: usize,
    pub qubits: usize,
    pub primary_inputs: usize,
    pub vertices: usize,
    pub observables: Vec<EdgeId>,
    pub preparations: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub cuts: Vec<PlannedCut>,
    #[serde(rename = "K")]
    pub k: usize,
    pub tuple_count: Option<u64>,
    pub terms: Vec<CutTerm>,
    pub overhead: OverheadReport,
    pub fragments: Vec<FragmentSummary>,
}

pub fn plan_report(plan: &CutPlan) -> PlanReport {
    PlanReport {
        cuts: plan.cuts.clone(),
        k: plan.k(),
        tuple_count: plan.tuple_count(),
        terms: WIRE_CUT_TERMS.to_vec(),
        overhead: OverheadReport {
            epsilon: plan.epsilon,
            metric: plan.overhead_metric(),
        },
        fragments: plan
            .fragments
            .iter()
            .map(|f| FragmentSummary {
                index: f.index,
                qubits: f.qubits(),
                primary_inputs: f.primary_inputs,
                vertices: f.vertices.len(),
                observables: f.observables.clone(),
                preparations: f.preparations.clone(),
            })
            .collect(),
    }
}

impl PlanReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let tuples = self
            .tuple_count
            .map_or_else(|| "overflow".to_string(), |t| t.to_string());
        writeln!(s, "cuts K = {}, tuples = {tuples}", self.k).unwrap();
        writeln!(
            s,
            "overhead 2^(4K)/eps^2 = {} (eps = {})",
            self.overhead.metric, self.overhead.epsilon
        )
        .unwrap();
        writeln!(
            s,
            "{:>8} {:>7} {:>9} {:>12} {:>13}",
            "fragment", "qubits", "vertices", "observables", "preparations"
        )
        .unwrap();
        for f in &self.fragments {
            writeln!(
                s,
                "{:>8} {:>7} {:>9} {:>12} {:>13}",
                f.index,
                f.qubits,
                f.vertices,
                f.observables.len(),
                f.preparations.len()
            )
            .unwrap();
        }
        for c in &self.cuts {
            writeln!(
                s,
                "edge {}: fragment {} -> {}",
                c.edge, c.src_frag, c.dst_frag
            )
            .unwrap();
        }
        s
    }
}
