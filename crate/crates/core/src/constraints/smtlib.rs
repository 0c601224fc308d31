//! SMT-LIB2 export of a [`ConstraintModel`] and parsing of solver models.
//!
//! Variables: `o_<v>_<p>` (vertex `v` in partition `p`) and `c_<e>` (edge `e`
//! cut), both 0/1 integers. Acceptability uses Boolean forward/backward
//! reachability `f_<v>`/`b_<v>` along uncut edges and an integer anchor
//! distance `a_<v>`: every vertex either lies on an input-to-output path or
//! has an uncut neighbour with a smaller anchor distance, so every component
//! reaches a vertex on such a path. The optional connectivity scaffold uses
//! one root `r_<v>` per partition and BFS depths `d_<v>`.
//!
//! The document ends with `(minimize total_cuts)`. Solvers without
//! optimization support can drop that line, add
//! `(assert (<= total_cuts N))` and bisect on `N`.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::dag::VertexKind;

use super::{check_assignment, ConstraintError, ConstraintModel, ModelSolution};

pub fn emit_smtlib(m: &ConstraintModel) -> String {
    let g = m.graph.graph();
    let n = g.vertex_count();
    let mut s = String::new();
    let o = |v: usize, p: usize| format!("o_{v}_{p}");
    let sum = |terms: Vec<String>| match terms.len() {
        0 => "0".to_string(),
        1 => terms.into_iter().next().unwrap(),
        _ => format!("(+ {})", terms.join(" ")),
    };
    let conj = |op: &str, terms: Vec<String>, empty: &str| match terms.len() {
        0 => empty.to_string(),
        1 => terms.into_iter().next().unwrap(),
        _ => format!("({op} {})", terms.join(" ")),
    };

    writeln!(
        s,
        "; vertices={n} edges={} P={} Q={}",
        g.edge_count(),
        m.p,
        m.q
    )
    .unwrap();
    s.push_str("(set-option :produce-models true)\n(set-logic QF_LIA)\n");

    for v in 0..n {
        for p in 0..m.p {
            writeln!(s, "(declare-fun {} () Int)", o(v, p)).unwrap();
        }
    }
    for e in 0..g.edge_count() {
        writeln!(s, "(declare-fun c_{e} () Int)").unwrap();
    }
    for v in 0..n {
        writeln!(s, "(declare-fun f_{v} () Bool)").unwrap();
        writeln!(s, "(declare-fun b_{v} () Bool)").unwrap();
        writeln!(s, "(declare-fun a_{v} () Int)").unwrap();
    }
    s.push_str("(declare-fun total_cuts () Int)\n");

    // domains, totality, fixings
    for v in 0..n {
        for p in 0..m.p {
            writeln!(s, "(assert (and (>= {0} 0) (<= {0} 1)))", o(v, p)).unwrap();
        }
        let all = (0..m.p).map(|p| o(v, p)).collect();
        writeln!(s, "(assert (= {} 1))", sum(all)).unwrap();
        if let Some(p) = m.fixed[v] {
            writeln!(s, "(assert (= {} 1))", o(v, p)).unwrap();
        }
    }
    for p in 0..m.p {
        let all = (0..n).map(|v| o(v, p)).collect();
        writeln!(s, "(assert (>= {} 1))", sum(all)).unwrap();
    }

    // cut iff the endpoints disagree
    for e in g.edges() {
        let same = (0..m.p)
            .map(|p| format!("(= {} {})", o(e.src, p), o(e.dst, p)))
            .collect();
        writeln!(
            s,
            "(assert (= c_{} (ite {} 0 1)))",
            e.id,
            conj("and", same, "true")
        )
        .unwrap();
        if m.forced_uncut[e.id] {
            writeln!(s, "(assert (= c_{} 0))", e.id).unwrap();
        }
    }
    let all = (0..g.edge_count()).map(|e| format!("c_{e}")).collect();
    writeln!(s, "(assert (= total_cuts {}))", sum(all)).unwrap();

    // budget
    for p in 0..m.p {
        let mut terms: Vec<String> = m.graph.inputs().iter().map(|&v| o(v, p)).collect();
        for e in g.edges() {
            terms.push(format!(
                "(ite (and (= c_{} 1) (= {} 1)) 1 0)",
                e.id,
                o(e.dst, p)
            ));
        }
        writeln!(s, "(assert (<= {} {}))", sum(terms), m.q).unwrap();
    }

    // acceptability
    for v in 0..n {
        let f = match g.kind(v) {
            VertexKind::Input => "true".to_string(),
            _ => conj(
                "or",
                g.in_edges(v)
                    .iter()
                    .map(|&e| format!("(and (= c_{e} 0) f_{})", g.edge(e).src))
                    .collect(),
                "false",
            ),
        };
        writeln!(s, "(assert (= f_{v} {f}))").unwrap();
        let b = match g.kind(v) {
            VertexKind::Output => "true".to_string(),
            _ => conj(
                "or",
                g.out_edges(v)
                    .iter()
                    .map(|&e| format!("(and (= c_{e} 0) b_{})", g.edge(e).dst))
                    .collect(),
                "false",
            ),
        };
        writeln!(s, "(assert (= b_{v} {b}))").unwrap();
        let mut anchor = vec![format!("(and f_{v} b_{v})")];
        for &e in g.in_edges(v).iter().chain(g.out_edges(v)) {
            let w = if g.edge(e).src == v {
                g.edge(e).dst
            } else {
                g.edge(e).src
            };
            anchor.push(format!("(and (= c_{e} 0) (< a_{w} a_{v}))"));
        }
        writeln!(s, "(assert (>= a_{v} 0))").unwrap();
        writeln!(s, "(assert {})", conj("or", anchor, "false")).unwrap();
    }

    if m.opts.connectivity_required {
        for v in 0..n {
            writeln!(s, "(declare-fun r_{v} () Int)").unwrap();
            writeln!(s, "(declare-fun d_{v} () Int)").unwrap();
        }
        for p in 0..m.p {
            let roots = (0..n)
                .map(|v| format!("(ite (and (= r_{v} 1) (= {} 1)) 1 0)", o(v, p)))
                .collect();
            writeln!(s, "(assert (= {} 1))", sum(roots)).unwrap();
        }
        for v in 0..n {
            writeln!(s, "(assert (and (>= r_{v} 0) (<= r_{v} 1) (>= d_{v} 0)))").unwrap();
            writeln!(s, "(assert (= (= r_{v} 1) (= d_{v} 0)))").unwrap();
            let mut near = Vec::new();
            for &e in g.in_edges(v).iter().chain(g.out_edges(v)) {
                let w = if g.edge(e).src == v {
                    g.edge(e).dst
                } else {
                    g.edge(e).src
                };
                near.push(format!("(and (= c_{e} 0) (<= d_{w} (- d_{v} 1)))"));
            }
            writeln!(s, "(assert (or (= r_{v} 1) {}))", conj("or", near, "false")).unwrap();
        }
        for e in g.edges() {
            writeln!(
                s,
                "(assert (=> (= c_{0} 0) (and (<= (- d_{1} d_{2}) 1) (<= (- d_{2} d_{1}) 1))))",
                e.id, e.src, e.dst
            )
            .unwrap();
        }
    }

    if m.opts.pair_in_out_same_qubit {
        for p in 0..m.p {
            let pairs = m
                .qubit_pairs()
                .into_iter()
                .map(|(i, u)| format!("(and (= {} 1) (= {} 1))", o(i, p), o(u, p)))
                .collect();
            writeln!(s, "(assert {})", conj("or", pairs, "false")).unwrap();
        }
    }

    if let Some(cap) = m.opts.beta_cap {
        writeln!(s, "(assert (<= total_cuts {cap}))").unwrap();
    }

    s.push_str("(minimize total_cuts)\n(check-sat)\n(get-model)\n");
    s
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            ';' => {
                // comment to end of line
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_all(tokens: &[String]) -> Result<Vec<Sexp>, ConstraintError> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for t in tokens {
        match t.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let list = stack.pop().unwrap();
                stack
                    .last_mut()
                    .ok_or_else(|| ConstraintError::Parse("unbalanced ')'".into()))?
                    .push(Sexp::List(list));
            }
            a => stack.last_mut().unwrap().push(Sexp::Atom(a.to_string())),
        }
    }
    if stack.len() != 1 {
        return Err(ConstraintError::Parse("unbalanced '('".into()));
    }
    Ok(stack.pop().unwrap())
}

fn int_value(e: &Sexp) -> Option<i64> {
    match e {
        Sexp::Atom(a) => a.parse().ok(),
        Sexp::List(l) => match l.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => int_value(x).map(|v| -v),
            _ => None,
        },
    }
}

fn collect_values(e: &Sexp, out: &mut BTreeMap<String, i64>) {
    let Sexp::List(l) = e else { return };
    match l.as_slice() {
        // (define-fun name () Int value)
        [Sexp::Atom(d), Sexp::Atom(name), Sexp::List(args), _, val]
            if d == "define-fun" && args.is_empty() =>
        {
            if let Some(v) = int_value(val) {
                out.insert(name.clone(), v);
            }
        }
        // (name value), as printed by get-value
        [Sexp::Atom(name), val] if int_value(val).is_some() => {
            out.insert(name.clone(), int_value(val).unwrap());
        }
        _ => l.iter().for_each(|x| collect_values(x, out)),
    }
}

/// Reads the `o_<v>_<p>` values from a solver's `(get-model)` or
/// `(get-value ...)` output and checks the resulting assignment against the
/// model.
pub fn parse_smt_model(m: &ConstraintModel, text: &str) -> Result<ModelSolution, ConstraintError> {
    let body = text.trim_start();
    if body.starts_with("unsat") {
        return Err(ConstraintError::Infeasible);
    }
    let mut values = BTreeMap::new();
    for e in parse_all(&tokenize(text))? {
        collect_values(&e, &mut values);
    }
    let n = m.graph.graph().vertex_count();
    let mut partition_of = vec![usize::MAX; n];
    for (v, slot) in partition_of.iter_mut().enumerate() {
        for p in 0..m.p {
            match values.get(&format!("o_{v}_{p}")) {
                Some(1) if *slot == usize::MAX => *slot = p,
                Some(1) => {
                    return Err(ConstraintError::InvalidAssignment(format!(
                        "vertex {v} is in more than one partition"
                    )))
                }
                Some(_) => {}
                None => return Err(ConstraintError::Parse(format!("missing o_{v}_{p}"))),
            }
        }
        if *slot == usize::MAX {
            return Err(ConstraintError::InvalidAssignment(format!(
                "vertex {v} is in no partition"
            )));
        }
    }
    check_assignment(m, &partition_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{build_model, SolverOptions};
    use crate::dag::{validate_legal, DagBuilder, LegalDag};

    fn single_edge() -> LegalDag {
        let mut b = DagBuilder::new();
        let a = b.input("a");
        let o = b.output("b");
        b.add_edge(a, o);
        validate_legal(&b.build().unwrap(), false).unwrap()
    }

    fn declarations(text: &str, prefix: &str) -> usize {
        text.lines()
            .filter(|l| l.starts_with(&format!("(declare-fun {prefix}")))
            .count()
    }

    #[test]
    fn declaration_counts() {
        for p in 1..=3 {
            let m = build_model(&single_edge(), 1, p, &SolverOptions::default()).unwrap();
            let text = emit_smtlib(&m);
            assert_eq!(declarations(&text, "o_"), 2 * p);
            assert_eq!(declarations(&text, "c_"), 1);
            assert!(text.contains("(minimize total_cuts)"));
            assert!(text.contains("(set-logic QF_LIA)"));
        }
    }

    #[test]
    fn parse_back_model_output() {
        let m = build_model(&single_edge(), 1, 1, &SolverOptions::default()).unwrap();
        let out = "sat\n(\n  (define-fun o_0_0 () Int\n    1)\n  (define-fun o_1_0 () Int 1)\n  (define-fun c_0 () Int 0)\n)\n";
        let sol = parse_smt_model(&m, out).unwrap();
        assert_eq!(sol.partition_of, vec![0, 0]);
        assert_eq!(sol.total_cuts(), 0);
    }

    #[test]
    fn parse_back_get_value_output() {
        let m = build_model(&single_edge(), 1, 1, &SolverOptions::default()).unwrap();
        let sol = parse_smt_model(&m, "sat ((o_0_0 1) (o_1_0 1))").unwrap();
        assert_eq!(sol.partition_of, vec![0, 0]);
    }

    #[test]
    fn parse_errors() {
        let m = build_model(&single_edge(), 1, 2, &SolverOptions::default()).unwrap();
        assert!(matches!(
            parse_smt_model(&m, "unsat"),
            Err(ConstraintError::Infeasible)
        ));
        assert!(matches!(
            parse_smt_model(&m, "((o_0_0 1))"),
            Err(ConstraintError::Parse(_))
        ));
        // a well-formed but invalid assignment: the only edge cut
        let text = "((o_0_0 1) (o_0_1 0) (o_1_0 0) (o_1_1 1))";
        assert!(matches!(
            parse_smt_model(&m, text),
            Err(ConstraintError::InvalidAssignment(_))
        ));
        assert!(parse_smt_model(&m, "((o_0_0 (- 1))").is_err());
    }
}
