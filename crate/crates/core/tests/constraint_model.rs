mod common;

use std::io::Write;
use std::process::{Command, Stdio};

use dagcut_core::constraints::{parse_smt_model, Backend};
use dagcut_core::random::legal_dag_corpus;
use dagcut_core::{
    build_model, cluster_stats, components, duplicate, emit_smtlib, iterate_partitions,
    min_cuts_over_partitions, optimize_min_beta, solve_decision, solve_model, ClusterAssignment,
    DagBuilder, GdInstance, LegalDag, ModelSolution, SolverOptions,
};

fn opts(p_max: usize) -> SolverOptions {
    SolverOptions {
        p_max,
        ..SolverOptions::default()
    }
}

/// Per-partition inputs from duplication, grouping components by the
/// partition their vertices sit in.
fn budget_by_duplication(g: &LegalDag, sol: &ModelSolution) -> Vec<usize> {
    let d = duplicate(g, &sol.cuts).unwrap();
    let comps = components(d.graph());
    let n = g.graph().vertex_count();
    let cluster_of = comps
        .iter()
        .map(|c| {
            let v = *c
                .iter()
                .find(|&&v| v < n)
                .expect("component holds an original vertex");
            sol.partition_of[v]
        })
        .collect();
    let a = ClusterAssignment {
        cluster_of,
        clusters: sol.partitions,
    };
    cluster_stats(&d, &a)
        .iter()
        .map(|s| s.input_count)
        .collect()
}

#[test]
fn agrees_with_the_enumerator() {
    for g in legal_dag_corpus(21, 60, 12, 3) {
        for k in 2..=4 {
            for alpha in 1..=3 {
                for beta in 0..=2 {
                    let inst = GdInstance::new(g.clone(), k, alpha, beta).unwrap();
                    let gd = solve_decision(&inst).is_some();
                    let o = SolverOptions {
                        beta_cap: Some(beta),
                        ..opts(alpha)
                    };
                    let cm = iterate_partitions(&g, k, &o);
                    assert_eq!(gd, cm.is_ok(), "{inst:?}");
                }
                let min = optimize_min_beta(&g, k, alpha, 4).unwrap().map(|(b, _)| b);
                let o = SolverOptions {
                    beta_cap: Some(4),
                    ..opts(alpha)
                };
                let cm = min_cuts_over_partitions(&g, k, &o)
                    .ok()
                    .map(|s| s.total_cuts());
                assert_eq!(min, cm);
            }
        }
    }
}

#[test]
fn minimal_against_exhaustive_assignment() {
    for g in legal_dag_corpus(31, 80, 9, 3) {
        for q in 1..=3 {
            for p in 1..=3 {
                let got = build_model(&g, q, p, &opts(p))
                    .and_then(|m| solve_model(&m))
                    .ok()
                    .map(|s| s.total_cuts());
                assert_eq!(
                    got,
                    common::exhaustive_partition_min(&g, q, p),
                    "q={q} p={p}"
                );
            }
        }
    }
}

#[test]
fn budgets_match_duplication() {
    for g in legal_dag_corpus(41, 80, 14, 3) {
        for q in 2..=4 {
            if let Ok(s) = min_cuts_over_partitions(&g, q, &opts(3)) {
                assert_eq!(s.budget, budget_by_duplication(&g, &s));
                assert!(s.budget.iter().all(|&b| b <= q));
            }
        }
    }
}

fn connected(g: &LegalDag, sol: &ModelSolution, p: usize) -> bool {
    let gr = g.graph();
    let vs: Vec<_> = (0..gr.vertex_count())
        .filter(|&v| sol.partition_of[v] == p)
        .collect();
    let mut seen = vec![false; gr.vertex_count()];
    let mut stack = vec![vs[0]];
    seen[vs[0]] = true;
    while let Some(v) = stack.pop() {
        for &e in gr.out_edges(v).iter().chain(gr.in_edges(v)) {
            let ed = gr.edge(e);
            let w = if ed.src == v { ed.dst } else { ed.src };
            if sol.partition_of[w] == p && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    vs.iter().all(|&v| seen[v])
}

#[test]
fn connectivity_option_gives_connected_partitions() {
    let mut hits = 0;
    for g in legal_dag_corpus(51, 80, 14, 3) {
        let o = SolverOptions {
            connectivity_required: true,
            ..opts(3)
        };
        for q in 2..=4 {
            if let Ok((p, s)) = iterate_partitions(&g, q, &o) {
                hits += 1;
                assert!((0..p).all(|i| connected(&g, &s, i)));
            }
        }
    }
    assert!(hits > 0);
}

#[test]
fn pairing_keeps_a_qubit_in_each_partition() {
    let o = SolverOptions {
        pair_in_out_same_qubit: true,
        ..opts(3)
    };
    for g in legal_dag_corpus(61, 40, 12, 2) {
        if let Ok((p, s)) = iterate_partitions(&g, 2, &o) {
            for part in 0..p {
                assert!(g
                    .inputs()
                    .iter()
                    .zip(g.outputs())
                    .any(|(&i, &o)| s.partition_of[i] == part && s.partition_of[o] == part));
            }
        }
    }
}

fn z3(text: &str) -> Option<String> {
    let mut c = Command::new("z3")
        .args(["-in", "-smt2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .ok()?;
    c.stdin.take()?.write_all(text.as_bytes()).ok()?;
    String::from_utf8(c.wait_with_output().ok()?.stdout).ok()
}

fn ladder() -> LegalDag {
    let mut b = DagBuilder::new();
    let mut last: Vec<_> = (0..4).map(|q| b.input(format!("q{q}"))).collect();
    for (i, (x, y)) in [(0, 1), (2, 3), (1, 2), (0, 1), (2, 3)]
        .into_iter()
        .enumerate()
    {
        let g = b.gate(format!("g{i}"));
        b.add_edge(last[x], g);
        b.add_edge(last[y], g);
        last[x] = g;
        last[y] = g;
    }
    for (q, &l) in last.iter().enumerate() {
        let o = b.output(format!("o{q}"));
        b.add_edge(l, o);
    }
    common::legal(b)
}

#[test]
fn external_solver_agrees_when_installed() {
    if z3("(check-sat)").is_none() {
        eprintln!("z3 not found, skipping");
        return;
    }
    let mut graphs = vec![ladder()];
    graphs.extend(legal_dag_corpus(71, 6, 10, 2));
    for g in graphs {
        for p in 1..=2 {
            for conn in [false, true] {
                let o = SolverOptions {
                    connectivity_required: conn,
                    p_max: p,
                    ..SolverOptions::default()
                };
                let m = build_model(&g, 3, p, &o).unwrap();
                let out = z3(&emit_smtlib(&m)).unwrap();
                let ext = parse_smt_model(&m, &out).map(|s| s.total_cuts()).ok();
                let own = solve_model(&m).map(|s| s.total_cuts()).ok();
                assert_eq!(ext, own, "p={p} conn={conn}");
            }
        }
    }
}

#[test]
fn smtlib_backend_only_exports() {
    let o = SolverOptions {
        backend: Backend::Smtlib,
        ..SolverOptions::default()
    };
    let m = build_model(&ladder(), 4, 1, &o).unwrap();
    assert!(solve_model(&m).is_err());
    assert!(emit_smtlib(&m).contains("(minimize"));
}
