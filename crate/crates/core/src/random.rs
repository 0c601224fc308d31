//! Seeded generators for legal dags and circuits.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::dag::{validate_legal, DagBuilder, LegalDag};

/// Random legal dag with at most `max_vertices` vertices (at least 2).
///
/// Picks `t` wires, then places gates that each consume the current ends of
/// 1 to `max_arity` distinct wires and continue them; repeated pairs give
/// parallel edges. Wires no gate touches become single input-output edges,
/// so forests are common.
pub fn random_legal_dag<R: Rng + ?Sized>(
    rng: &mut R,
    max_vertices: usize,
    max_arity: usize,
) -> LegalDag {
    assert!(max_vertices >= 2 && max_arity >= 1);
    let t = rng.gen_range(1..=(max_vertices / 2).min(8));
    let gates = rng.gen_range(0..=max_vertices - 2 * t);
    let mut b = DagBuilder::new();
    let mut ends: Vec<_> = (0..t).map(|q| b.input(format!("in{q}"))).collect();
    for i in 0..gates {
        let d = rng.gen_range(1..=max_arity.min(t));
        let g = b.gate(format!("g{i}"));
        for w in sample(rng, t, d) {
            b.add_edge(ends[w], g);
            ends[w] = g;
        }
    }
    for (q, &e) in ends.iter().enumerate() {
        let o = b.output(format!("out{q}"));
        b.add_edge(e, o);
    }
    validate_legal(&b.build().expect("generator builds a dag"), false)
        .expect("generator builds a legal dag")
}

/// `count` dags from one seed; the same seed gives the same corpus.
pub fn legal_dag_corpus(
    seed: u64,
    count: usize,
    max_vertices: usize,
    max_arity: usize,
) -> Vec<LegalDag> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_legal_dag(&mut rng, max_vertices, max_arity))
        .collect()
}

const ONE_QUBIT: [&str; 6] = ["H", "X", "Y", "S", "T", "Z"];
const TWO_QUBIT: [&str; 3] = ["CX", "CZ", "SWAP"];

/// Random circuit over the built-in gate set; about half the gates act on
/// two qubits when `qubits > 1`.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, qubits: usize, gates: usize) -> Circuit {
    let list = (0..gates)
        .map(|_| {
            if qubits > 1 && rng.gen_bool(0.5) {
                let q = sample(rng, qubits, 2).into_vec();
                Gate::new(TWO_QUBIT[rng.gen_range(0..TWO_QUBIT.len())], &q)
            } else {
                Gate::new(
                    ONE_QUBIT[rng.gen_range(0..ONE_QUBIT.len())],
                    &[rng.gen_range(0..qubits)],
                )
            }
        })
        .collect();
    Circuit::new(qubits, list).expect("generated gates are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible_and_bounded() {
        let a = legal_dag_corpus(7, 50, 12, 3);
        let b = legal_dag_corpus(7, 50, 12, 3);
        assert_eq!(a, b);
        assert!(a.iter().all(|g| g.graph().vertex_count() <= 12));
        assert_ne!(a, legal_dag_corpus(8, 50, 12, 3));
    }

    #[test]
    fn arity_two_gives_two_legal_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = random_legal_dag(&mut rng, 20, 2);
            let gr = g.graph();
            assert!((0..gr.vertex_count()).all(|v| gr.d_in(v) <= 2 && gr.d_out(v) <= 2));
        }
    }

    #[test]
    fn circuits_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_circuit(&mut rng, 4, 30);
        assert_eq!(c.gates().len(), 30);
        assert!(c.gates().iter().all(|g| g.qubits.iter().all(|&q| q < 4)));
    }
}
