//! Gate-list circuits and their translation into dags.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dag::{DagBuilder, DagGraph, EdgeId, VertexId};
use crate::error::DagError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub qubits: Vec<usize>,
    /// Row-major `2^arity x 2^arity` matrix; the first listed qubit is the
    /// most significant bit of the row/column index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Complex64>>,
}

impl Gate {
    pub fn new(name: impl Into<String>, qubits: &[usize]) -> Self {
        Self {
            name: name.into(),
            qubits: qubits.to_vec(),
            matrix: None,
        }
    }

    pub fn with_matrix(name: impl Into<String>, qubits: &[usize], matrix: Vec<Complex64>) -> Self {
        Self {
            name: name.into(),
            qubits: qubits.to_vec(),
            matrix: Some(matrix),
        }
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }
}

#[derive(Serialize, Deserialize)]
struct RawCircuit {
    qubits: usize,
    gates: Vec<Gate>,
}

/// Quantum circuit as an ordered gate list on `qubit_count` wires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit", into = "RawCircuit")]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = DagError;

    fn try_from(raw: RawCircuit) -> Result<Self, Self::Error> {
        Circuit::new(raw.qubits, raw.gates)
    }
}

impl From<Circuit> for RawCircuit {
    fn from(c: Circuit) -> Self {
        RawCircuit {
            qubits: c.qubit_count,
            gates: c.gates,
        }
    }
}

impl Circuit {
    /// Checks qubit ranges, distinctness within a gate and matrix dimensions.
    /// Unitarity is checked by the simulator, which is the only consumer of
    /// matrix values.
    pub fn new(qubit_count: usize, gates: Vec<Gate>) -> Result<Self, DagError> {
        if qubit_count == 0 {
            return Err(DagError::InvalidCircuit(
                "qubit count must be positive".into(),
            ));
        }
        for (i, g) in gates.iter().enumerate() {
            if g.qubits.is_empty() {
                return Err(DagError::InvalidCircuit(format!(
                    "gate {i} acts on no qubits"
                )));
            }
            for (j, &q) in g.qubits.iter().enumerate() {
                if q >= qubit_count {
                    return Err(DagError::InvalidCircuit(format!(
                        "gate {i} ({}) uses qubit {q} outside [0, {qubit_count})",
                        g.name
                    )));
                }
                if g.qubits[..j].contains(&q) {
                    return Err(DagError::InvalidCircuit(format!(
                        "gate {i} ({}) repeats qubit {q}",
                        g.name
                    )));
                }
            }
            if let Some(m) = &g.matrix {
                let dim = 1usize << g.arity();
                if m.len() != dim * dim {
                    return Err(DagError::InvalidCircuit(format!(
                        "gate {i} ({}) matrix has {} entries, expected {}",
                        g.name,
                        m.len(),
                        dim * dim
                    )));
                }
            }
        }
        Ok(Self { qubit_count, gates })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
}

/// A circuit's dag together with the wiring needed to map edges back to
/// qubits and gate legs.
#[derive(Debug, Clone)]
pub struct CircuitDag {
    pub graph: DagGraph,
    pub input_of: Vec<VertexId>,
    pub output_of: Vec<VertexId>,
    pub gate_vertex: Vec<VertexId>,
    /// `leg_in[g][j]` is the edge entering gate `g` on its `j`-th qubit.
    pub leg_in: Vec<Vec<EdgeId>>,
    /// `leg_out[g][j]` is the edge leaving gate `g` on its `j`-th qubit.
    pub leg_out: Vec<Vec<EdgeId>>,
    /// Qubit carried by each edge.
    pub edge_qubit: Vec<usize>,
}

impl CircuitDag {
    /// Vertices are numbered inputs first, then gates in program order, then
    /// outputs. Every gate leg is wired straight through: input leg `j`
    /// continues as output leg `j`.
    pub fn build(circuit: &Circuit) -> Self {
        let n = circuit.qubit_count();
        let mut b = DagBuilder::new();
        let input_of: Vec<_> = (0..n).map(|q| b.input(format!("q{q}"))).collect();
        let gate_vertex: Vec<_> = circuit
            .gates()
            .iter()
            .map(|g| b.gate(g.name.clone()))
            .collect();
        let output_of: Vec<_> = (0..n).map(|q| b.output(format!("q{q}"))).collect();

        let mut edge_qubit = Vec::new();
        let mut leg_in = Vec::with_capacity(gate_vertex.len());
        let mut leg_out: Vec<Vec<EdgeId>> = Vec::with_capacity(gate_vertex.len());
        // (vertex, gate index and leg if the vertex is a gate)
        let mut frontier: Vec<(VertexId, Option<(usize, usize)>)> =
            input_of.iter().map(|&v| (v, None)).collect();
        for (gi, gate) in circuit.gates().iter().enumerate() {
            let gv = gate_vertex[gi];
            let mut legs = Vec::with_capacity(gate.arity());
            for (j, &q) in gate.qubits.iter().enumerate() {
                let (src, src_leg) = frontier[q];
                let e = b.add_edge(src, gv);
                edge_qubit.push(q);
                if let Some((pg, pj)) = src_leg {
                    leg_out[pg][pj] = e;
                }
                legs.push(e);
                frontier[q] = (gv, Some((gi, j)));
            }
            leg_in.push(legs);
            leg_out.push(vec![usize::MAX; gate.arity()]);
        }
        for q in 0..n {
            let (src, src_leg) = frontier[q];
            let e = b.add_edge(src, output_of[q]);
            edge_qubit.push(q);
            if let Some((pg, pj)) = src_leg {
                leg_out[pg][pj] = e;
            }
        }
        let graph = b.build().expect("circuit wiring yields valid ids");
        Self {
            graph,
            input_of,
            output_of,
            gate_vertex,
            leg_in,
            leg_out,
            edge_qubit,
        }
    }

    /// Gate index for a gate vertex.
    pub fn gate_of_vertex(&self, v: VertexId) -> Option<usize> {
        let first = *self.gate_vertex.first()?;
        (v >= first && v < first + self.gate_vertex.len()).then(|| v - first)
    }
}

pub fn build_dag(circuit: &Circuit) -> DagGraph {
    CircuitDag::build(circuit).graph
}
