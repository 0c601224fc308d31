//! Inputs shared by the benchmarks.

use dagcut_core::random::legal_dag_corpus;
use dagcut_core::reductions::{enumerate_instances, two_legalize};
use dagcut_core::{gen_connected, gen_g0, Circuit, Gate, GdInstance, LegalDag};

/// Every `m <= 2, B <= 16` instance through the forest and connected
/// reductions.
pub fn reduction_instances() -> Vec<GdInstance> {
    enumerate_instances(2, 16)
        .iter()
        .flat_map(|i| {
            let g0 = gen_g0(i).expect("valid instance");
            let conn = gen_connected(i).expect("valid instance");
            let two = two_legalize(&g0).expect("expandable");
            [g0.instance, conn.instance, two.instance]
        })
        .collect()
}

pub fn small_dags() -> Vec<LegalDag> {
    legal_dag_corpus(3, 50, 14, 3)
}

/// `n`-qubit GHZ preparation.
pub fn ghz(n: usize) -> Circuit {
    let mut gates = vec![Gate::new("H", &[0])];
    gates.extend((1..n).map(|q| Gate::new("CX", &[q - 1, q])));
    Circuit::new(n, gates).expect("qubits in range")
}
