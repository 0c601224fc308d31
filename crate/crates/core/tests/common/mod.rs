#![allow(dead_code)]

use dagcut_core::dag::{DagBuilder, LegalDag, VertexKind};
use dagcut_core::{validate_legal, Circuit, Gate};

/// Components after removing `cut` edges: (component of each vertex, count).
fn split(g: &LegalDag, cut: &[bool]) -> (Vec<usize>, usize) {
    let gr = g.graph();
    let n = gr.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(v) = stack.pop() {
            for &e in gr.out_edges(v).iter().chain(gr.in_edges(v)) {
                if cut[e] {
                    continue;
                }
                let ed = gr.edge(e);
                let w = if ed.src == v { ed.dst } else { ed.src };
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    (comp, c)
}

/// Per component after duplicating `cut`: (inputs, outputs, has an original
/// input-to-output path). Computed directly on the original graph.
pub fn naive_components(g: &LegalDag, cut: &[bool]) -> Vec<(usize, usize, bool)> {
    let gr = g.graph();
    let (comp, c) = split(g, cut);
    let mut out = vec![(0, 0, false); c];
    for v in 0..gr.vertex_count() {
        match gr.kind(v) {
            VertexKind::Input => out[comp[v]].0 += 1,
            VertexKind::Output => out[comp[v]].1 += 1,
            VertexKind::Gate => {}
        }
    }
    for e in gr.edges() {
        if cut[e.id] {
            out[comp[e.dst]].0 += 1;
            out[comp[e.src]].1 += 1;
        }
    }
    for &s in g.inputs() {
        let mut seen = vec![false; gr.vertex_count()];
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            if gr.kind(v) == VertexKind::Output {
                out[comp[s]].2 = true;
            }
            for &e in gr.out_edges(v) {
                let w = gr.edge(e).dst;
                if !cut[e] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    out
}

/// Every function from components to `alpha` labels.
fn assignments_fit(comps: &[(usize, usize, bool)], k: usize, alpha: usize) -> bool {
    let c = comps.len();
    let mut label = vec![0usize; c];
    loop {
        let mut ins = vec![0; alpha];
        let mut outs = vec![0; alpha];
        for (i, &(a, b, _)) in comps.iter().enumerate() {
            ins[label[i]] += a;
            outs[label[i]] += b;
        }
        if ins.iter().chain(&outs).all(|&x| x <= k) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == c {
                return false;
            }
            label[i] += 1;
            if label[i] < alpha {
                break;
            }
            label[i] = 0;
            i += 1;
        }
    }
}

/// Smallest cut count in `0..=beta` giving a YES, over all edge subsets and
/// all component-to-cluster maps, with no pruning at all.
pub fn naive_min_beta(g: &LegalDag, k: usize, alpha: usize, beta: usize) -> Option<usize> {
    let m = g.graph().edge_count();
    assert!(m <= 16);
    let mut best: Option<usize> = None;
    for mask in 0u32..1 << m {
        let size = mask.count_ones() as usize;
        if size > beta || best.is_some_and(|b| b <= size) {
            continue;
        }
        let cut: Vec<bool> = (0..m).map(|e| mask >> e & 1 == 1).collect();
        let comps = naive_components(g, &cut);
        if comps.len() > alpha * k {
            continue;
        }
        if comps.iter().all(|c| c.2) && assignments_fit(&comps, k, alpha) {
            best = Some(size);
        }
    }
    best
}

/// Fewest cuts over all vertex-to-partition maps using exactly `p` labels,
/// under the partition budget `q` and per-component acceptability.
pub fn exhaustive_partition_min(g: &LegalDag, q: usize, p: usize) -> Option<usize> {
    let gr = g.graph();
    let n = gr.vertex_count();
    assert!(n <= 14);
    let mut label = vec![0usize; n];
    let mut best: Option<usize> = None;
    loop {
        let mut used = vec![false; p];
        label.iter().for_each(|&l| used[l] = true);
        if used.iter().all(|&u| u) {
            let cut: Vec<bool> = gr
                .edges()
                .iter()
                .map(|e| label[e.src] != label[e.dst])
                .collect();
            let cuts = cut.iter().filter(|&&c| c).count();
            if best.is_none_or(|b| cuts < b) {
                let mut budget = vec![0; p];
                g.inputs().iter().for_each(|&v| budget[label[v]] += 1);
                gr.edges()
                    .iter()
                    .filter(|e| cut[e.id])
                    .for_each(|e| budget[label[e.dst]] += 1);
                if budget.iter().all(|&b| b <= q) && naive_components(g, &cut).iter().all(|c| c.2) {
                    best = Some(cuts);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            label[i] += 1;
            if label[i] < p {
                break;
            }
            label[i] = 0;
            i += 1;
        }
    }
}

pub fn legal(b: DagBuilder) -> LegalDag {
    validate_legal(&b.build().unwrap(), false).unwrap()
}

pub fn circuit(n: usize, gates: &[(&str, &[usize])]) -> Circuit {
    Circuit::new(n, gates.iter().map(|(g, q)| Gate::new(*g, q)).collect()).unwrap()
}

pub fn bell() -> Circuit {
    circuit(2, &[("H", &[0]), ("CX", &[0, 1])])
}

pub fn ghz3() -> Circuit {
    circuit(3, &[("H", &[0]), ("CX", &[0, 1]), ("CX", &[1, 2])])
}

fn gates(list: &[(&str, Vec<usize>)]) -> Vec<Gate> {
    list.iter().map(|(n, q)| Gate::new(*n, q)).collect()
}

/// Two independent 4-qubit blocks on qubits 0-3 and 4-7.
pub fn separable_blocks() -> Circuit {
    let mut g: Vec<(&str, Vec<usize>)> = Vec::new();
    for base in [0, 4] {
        g.push(("H", vec![base]));
        for q in base..base + 3 {
            g.push(("CX", vec![q, q + 1]));
        }
        g.push(("T", vec![base + 1]));
        g.push(("CZ", vec![base, base + 2]));
        g.push(("CX", vec![base + 3, base + 1]));
    }
    Circuit::new(8, gates(&g)).unwrap()
}

/// Blocks on qubits 0-3 and 3-6: qubit 3 finishes its work in the first
/// block and then joins the second, so one wire links them.
pub fn handoff_blocks() -> Circuit {
    let g = vec![
        ("H", vec![0]),
        ("CX", vec![0, 1]),
        ("CX", vec![1, 2]),
        ("CX", vec![2, 3]),
        ("T", vec![1]),
        ("CZ", vec![0, 2]),
        ("H", vec![4]),
        ("CX", vec![4, 5]),
        ("CX", vec![5, 6]),
        ("CX", vec![3, 4]),
        ("S", vec![6]),
        ("CZ", vec![3, 6]),
    ];
    Circuit::new(7, gates(&g)).unwrap()
}
