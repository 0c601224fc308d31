//! Dense statevector simulation and exact reconstruction of cut circuits.
//!
//! Qubit `i` is bit `i` of a basis-state index. A gate matrix is indexed with
//! its first listed qubit as the most significant bit. Character `j` of a
//! Pauli string acts on qubit `j`.
//!
//! Reconstruction evaluates every fragment as its own circuit: a cut wire
//! entering the fragment starts in the term's preparation state, a cut wire
//! leaving it stays live until the end and is measured jointly with the
//! fragment's share of the observable. The fragment products are weighted
//! by the term coefficients and summed over all `8^K` tuples.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitDag, Gate};
use crate::dag::{validate_legal, EdgeId, LegalDag, VertexKind};
use crate::duplication::CutSet;
use crate::error::DagError;
use crate::knitting::{plan_from_cuts, CutPlan, KnitError, Pauli, WIRE_CUT_TERMS};

pub const MAX_QUBITS: usize = 12;
/// Tuples are summed explicitly, so `8^K` must stay small.
pub const MAX_CUTS: usize = 7;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{qubits} qubits exceed the simulator limit of {max}")]
    TooManyQubits { qubits: usize, max: usize },
    #[error("{0} cuts exceed the reconstruction limit of {MAX_CUTS}")]
    TooManyCuts(usize),
    #[error("unknown gate {0:?} and no matrix given")]
    UnknownGate(String),
    #[error("gate {name:?} expects {expected} qubits, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("matrix of gate {0:?} is not unitary")]
    NonUnitary(String),
    #[error("invalid observable: {0}")]
    Observable(String),
    #[error("cut edge {0} has no bound wire in its fragment")]
    UnboundPlaceholder(EdgeId),
    #[error("plan does not match the circuit: {0}")]
    PlanMismatch(String),
    #[error(transparent)]
    Knit(#[from] KnitError),
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// A Pauli string, one character per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliObservable(Vec<Pauli>);

impl PauliObservable {
    pub fn parse(s: &str) -> Result<Self, SimError> {
        s.chars()
            .map(|c| {
                Pauli::from_char(c.to_ascii_uppercase())
                    .ok_or_else(|| SimError::Observable(format!("bad character {c:?}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, q: usize) -> Pauli {
        self.0[q]
    }

    fn check_len(&self, n: usize) -> Result<(), SimError> {
        if self.0.len() != n {
            return Err(SimError::Observable(format!(
                "length {} does not match {n} qubits",
                self.0.len()
            )));
        }
        Ok(())
    }
}

impl TryFrom<String> for PauliObservable {
    type Error = SimError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Self::parse(&s)
    }
}

impl From<PauliObservable> for String {
    fn from(p: PauliObservable) -> Self {
        p.0.iter()
            .map(|p| match p {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            })
            .collect()
    }
}

impl std::str::FromStr for PauliObservable {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(qubits: usize) -> Result<Self, SimError> {
        Self::product(&vec![
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
            qubits
        ])
    }

    /// Product state from one single-qubit ket per qubit.
    pub fn product(kets: &[[Complex64; 2]]) -> Result<Self, SimError> {
        let n = kets.len();
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits {
                qubits: n,
                max: MAX_QUBITS,
            });
        }
        let amps = (0..1usize << n)
            .map(|i| {
                kets.iter()
                    .enumerate()
                    .map(|(q, k)| k[(i >> q) & 1])
                    .product()
            })
            .collect();
        Ok(Self { qubits: n, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies a `2^r x 2^r` row-major matrix; `targets[0]` is the most
    /// significant bit of the matrix index.
    pub fn apply(&mut self, matrix: &[Complex64], targets: &[usize]) {
        let r = targets.len();
        let dim = 1usize << r;
        debug_assert_eq!(matrix.len(), dim * dim);
        let mask: usize = targets.iter().map(|&q| 1 << q).sum();
        let offsets: Vec<usize> = (0..dim)
            .map(|m| {
                (0..r)
                    .filter(|&j| (m >> (r - 1 - j)) & 1 == 1)
                    .map(|j| 1 << targets[j])
                    .sum()
            })
            .collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (m, &off) in offsets.iter().enumerate() {
                buf[m] = self.amps[base | off];
            }
            for (row, &off) in offsets.iter().enumerate() {
                self.amps[base | off] =
                    (0..dim).map(|col| matrix[row * dim + col] * buf[col]).sum();
            }
        }
    }

    /// `⟨ψ| P |ψ⟩` for a product of single-qubit Paulis.
    pub fn expectation(&self, paulis: &[(usize, Pauli)]) -> Complex64 {
        let mut phi = self.clone();
        for &(q, p) in paulis {
            if p != Pauli::I {
                let m = p.matrix();
                phi.apply(&[m[0][0], m[0][1], m[1][0], m[1][1]], &[q]);
            }
        }
        self.amps
            .iter()
            .zip(&phi.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn builtin(name: &str) -> Option<(usize, Vec<Complex64>)> {
    let (o, l, i) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let m = match name.to_ascii_uppercase().as_str() {
        "I" | "ID" => (1, vec![l, o, o, l]),
        "H" => (1, vec![h, h, h, -h]),
        "X" => (1, vec![o, l, l, o]),
        "Y" => (1, vec![o, -i, i, o]),
        "Z" => (1, vec![l, o, o, -l]),
        "S" => (1, vec![l, o, o, i]),
        "T" => (1, vec![l, o, o, t]),
        "CX" | "CNOT" => (2, vec![l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o]),
        "CZ" => (2, vec![l, o, o, o, o, l, o, o, o, o, l, o, o, o, o, -l]),
        "SWAP" => (2, vec![l, o, o, o, o, o, l, o, o, l, o, o, o, o, o, l]),
        _ => return None,
    };
    Some(m)
}

/// The matrix a gate applies: its explicit matrix if present (checked for
/// unitarity), else a built-in by name.
pub fn gate_matrix(gate: &Gate) -> Result<Vec<Complex64>, SimError> {
    if let Some(m) = &gate.matrix {
        let dim = 1usize << gate.arity();
        if m.len() != dim * dim {
            return Err(SimError::Arity {
                name: gate.name.clone(),
                expected: dim * dim,
                got: m.len(),
            });
        }
        for r in 0..dim {
            for s in 0..dim {
                let dot: Complex64 = (0..dim)
                    .map(|k| m[k * dim + r].conj() * m[k * dim + s])
                    .sum();
                let want = if r == s { 1.0 } else { 0.0 };
                if (dot - want).norm() > UNITARY_TOL {
                    return Err(SimError::NonUnitary(gate.name.clone()));
                }
            }
        }
        return Ok(m.clone());
    }
    let (arity, m) = builtin(&gate.name).ok_or_else(|| SimError::UnknownGate(gate.name.clone()))?;
    if arity != gate.arity() {
        return Err(SimError::Arity {
            name: gate.name.clone(),
            expected: arity,
            got: gate.arity(),
        });
    }
    Ok(m)
}

fn real(z: Complex64) -> f64 {
    debug_assert!(z.im.abs() < 1e-9, "expectation has imaginary part {}", z.im);
    z.re
}

/// Exact `⟨0…0| U† P U |0…0⟩` for a Pauli string `P`.
pub fn simulate_expectation(circuit: &Circuit, obs: &PauliObservable) -> Result<f64, SimError> {
    let n = circuit.qubit_count();
    obs.check_len(n)?;
    let mut psi = StateVector::zero(n)?;
    for g in circuit.gates() {
        psi.apply(&gate_matrix(g)?, &g.qubits);
    }
    let paulis: Vec<_> = (0..n).map(|q| (q, obs.get(q))).collect();
    Ok(real(psi.expectation(&paulis)))
}

#[derive(Debug, Clone, Copy)]
enum Init {
    Zero,
    Prep(usize),
}

#[derive(Debug, Clone, Copy)]
enum Meas {
    Obs(usize),
    Cut(usize),
}

/// A fragment compiled to local qubits.
#[derive(Debug, Clone)]
struct Program {
    init: Vec<Init>,
    ops: Vec<(usize, Vec<usize>)>,
    meas: Vec<(usize, Meas)>,
    /// Cut positions this fragment depends on.
    cuts: Vec<usize>,
}

fn compile(cd: &CircuitDag, plan: &CutPlan, f: usize) -> Result<Program, SimError> {
    let g = &cd.graph;
    let cut_pos: HashMap<EdgeId, usize> = plan
        .cuts
        .iter()
        .enumerate()
        .map(|(i, c)| (c.edge, i))
        .collect();
    let frag = &plan.fragments[f];
    let mut init = Vec::new();
    let mut meas = Vec::new();
    let mut wire_in: HashMap<EdgeId, usize> = HashMap::new();
    let emit = |e: EdgeId, q: usize, wire_in: &mut HashMap<EdgeId, usize>, meas: &mut Vec<_>| {
        match cut_pos.get(&e) {
            Some(&i) => meas.push((q, Meas::Cut(i))),
            None => {
                wire_in.insert(e, q);
            }
        }
    };
    for &v in frag
        .vertices
        .iter()
        .filter(|&&v| g.kind(v) == VertexKind::Input)
    {
        let q = init.len();
        init.push(Init::Zero);
        emit(g.out_edges(v)[0], q, &mut wire_in, &mut meas);
    }
    for &e in &frag.preparations {
        let q = init.len();
        init.push(Init::Prep(cut_pos[&e]));
        wire_in.insert(e, q);
    }
    let mut ops = Vec::new();
    for (gi, &gv) in cd.gate_vertex.iter().enumerate() {
        if plan.fragment_of[gv] != f {
            continue;
        }
        let qs = cd.leg_in[gi]
            .iter()
            .map(|e| {
                wire_in
                    .get(e)
                    .copied()
                    .ok_or(SimError::UnboundPlaceholder(*e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (j, &e) in cd.leg_out[gi].iter().enumerate() {
            emit(e, qs[j], &mut wire_in, &mut meas);
        }
        ops.push((gi, qs));
    }
    for (qubit, &v) in cd.output_of.iter().enumerate() {
        if plan.fragment_of[v] != f {
            continue;
        }
        let e = g.in_edges(v)[0];
        if cut_pos.contains_key(&e) {
            // the output starts from a preparation and is measured directly
            let q = wire_in[&e];
            meas.push((q, Meas::Obs(qubit)));
            continue;
        }
        let q = *wire_in.get(&e).ok_or(SimError::UnboundPlaceholder(e))?;
        meas.push((q, Meas::Obs(qubit)));
    }
    let mut cuts: Vec<usize> = frag
        .observables
        .iter()
        .chain(&frag.preparations)
        .map(|e| cut_pos[e])
        .collect();
    cuts.sort_unstable();
    cuts.dedup();
    Ok(Program {
        init,
        ops,
        meas,
        cuts,
    })
}

fn run(
    p: &Program,
    matrices: &[Vec<Complex64>],
    circuit: &Circuit,
    obs: &PauliObservable,
    digits: &[usize],
) -> Result<f64, SimError> {
    let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let kets: Vec<_> = p
        .init
        .iter()
        .map(|i| match i {
            Init::Zero => zero,
            Init::Prep(c) => WIRE_CUT_TERMS[digits[*c]].prep.ket(),
        })
        .collect();
    let mut psi = StateVector::product(&kets)?;
    for (gi, qs) in &p.ops {
        debug_assert_eq!(circuit.gates()[*gi].arity(), qs.len());
        psi.apply(&matrices[*gi], qs);
    }
    let paulis: Vec<_> = p
        .meas
        .iter()
        .map(|&(q, m)| match m {
            Meas::Obs(j) => (q, obs.get(j)),
            Meas::Cut(c) => (q, WIRE_CUT_TERMS[digits[c]].observable),
        })
        .collect();
    Ok(real(psi.expectation(&paulis)))
}

/// Sum in index order by recursive halving, for reproducible rounding.
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// `Σ_tuples (Π c) Π_fragments ⟨fragment⟩` for a plan over `circuit`'s dag.
pub fn reconstruct_expectation(
    circuit: &Circuit,
    plan: &CutPlan,
    obs: &PauliObservable,
) -> Result<f64, SimError> {
    obs.check_len(circuit.qubit_count())?;
    let cd = CircuitDag::build(circuit);
    if plan.fragment_of.len() != cd.graph.vertex_count() {
        return Err(SimError::PlanMismatch(format!(
            "plan covers {} vertices, circuit dag has {}",
            plan.fragment_of.len(),
            cd.graph.vertex_count()
        )));
    }
    if plan.k() > MAX_CUTS {
        return Err(SimError::TooManyCuts(plan.k()));
    }
    for f in &plan.fragments {
        if f.qubits() > MAX_QUBITS {
            return Err(SimError::TooManyQubits {
                qubits: f.qubits(),
                max: MAX_QUBITS,
            });
        }
    }
    let matrices = circuit
        .gates()
        .iter()
        .map(gate_matrix)
        .collect::<Result<Vec<_>, _>>()?;
    let programs = (0..plan.fragments.len())
        .map(|f| compile(&cd, plan, f))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cache: HashMap<(usize, Vec<usize>), f64> = HashMap::new();
    let count = plan.tuple_count().expect("K is capped");
    let mut terms = Vec::with_capacity(count as usize);
    for j in 0..count {
        let digits = plan.tuple(j);
        let mut value = plan.coefficient(&digits);
        for (f, p) in programs.iter().enumerate() {
            let key = (f, p.cuts.iter().map(|&c| digits[c]).collect::<Vec<_>>());
            let e = match cache.get(&key) {
                Some(&e) => e,
                None => {
                    let e = run(p, &matrices, circuit, obs, &digits)?;
                    cache.insert(key, e);
                    e
                }
            };
            value *= e;
            if value == 0.0 {
                break;
            }
        }
        terms.push(value);
    }
    Ok(pairwise_sum(&terms))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub direct: f64,
    pub reconstructed: f64,
    pub abs_diff: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub tuples: u64,
    /// Whether the cut set would be accepted by the duplication solvers.
    pub acceptable: bool,
    pub fragment_qubits: Vec<usize>,
}

/// Direct simulation against reconstruction from the components the cut set
/// leaves.
pub fn crosscheck(
    circuit: &Circuit,
    cuts: &CutSet,
    obs: &PauliObservable,
) -> Result<CrosscheckReport, SimError> {
    let cd = CircuitDag::build(circuit);
    let legal: LegalDag = validate_legal(&cd.graph, false)?;
    let dup = crate::duplication::duplicate(&legal, cuts)?;
    let acceptable = crate::duplication::is_acceptable(&dup).acceptable;
    let plan = plan_from_cuts(&legal, cuts, 1.0)?;
    let direct = simulate_expectation(circuit, obs)?;
    let reconstructed = reconstruct_expectation(circuit, &plan, obs)?;
    Ok(CrosscheckReport {
        direct,
        reconstructed,
        abs_diff: (direct - reconstructed).abs(),
        k: plan.k(),
        tuples: plan.tuple_count().expect("K is capped"),
        acceptable,
        fragment_qubits: plan.fragments.iter().map(|f| f.qubits()).collect(),
    })
}
