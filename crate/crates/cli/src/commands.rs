use std::path::{Path, PathBuf};

use dagcut_core::constraints::{parse_smt_model, Backend, ConstraintError};
use dagcut_core::knitting::plan_from_partition;
use dagcut_core::random::legal_dag_corpus;
use dagcut_core::reductions::{generate, Family, ReductionArtifact};
use dagcut_core::simverify::CrosscheckReport;
use dagcut_core::{
    build_model, components, crosscheck, duplicate, edge_disjoint_paths, emit_smtlib,
    iterate_partitions, make_plan, min_cuts_over_partitions, optimize_min_beta, plan_from_cuts,
    plan_report, reductions::two_legal_expand, solve_decision, validate_legal, CutSet, GdInstance,
    GdSolution, LegalDag, ModelSolution, PathDecomposition, PauliObservable, PlanReport,
    SolverOptions, ThreePartitionInstance,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{pick, Config};
use crate::error::CliError;
use crate::io::{
    check_schema, envelope, graph_from_value, load_circuit, load_graph, parse, parse_list,
    read_json, write_json, write_text, Envelope,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub input_kind: String,
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_legal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub answer: Answer,
    pub k: usize,
    pub alpha: usize,
    pub beta: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_beta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<GdSolution>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PartitionReport {
    pub answer: Answer,
    pub q: usize,
    pub p_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_cuts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<ModelSolution>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SmtExportReport {
    pub path: PathBuf,
    pub partitions: usize,
    pub assignment_vars: usize,
    pub cut_vars: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub pass: bool,
    #[serde(flatten)]
    pub report: CrosscheckReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PathsReport {
    pub t: usize,
    #[serde(flatten)]
    pub paths: PathDecomposition,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorReport {
    pub code: u8,
    pub message: String,
}

/// What a command concluded; `No` exits with 3.
pub type Outcome = Result<Answer, CliError>;

fn graph_stats(g: &LegalDag) -> ValidationReport {
    let gr = g.graph();
    ValidationReport {
        input_kind: String::new(),
        valid: true,
        t: Some(g.t()),
        two_legal: Some(validate_legal(gr, true).is_ok()),
        vertices: Some(gr.vertex_count()),
        edges: Some(gr.edge_count()),
        components: Some(components(gr).len()),
    }
}

/// Re-parses a document into its typed form and checks that serializing it
/// again gives back the same JSON.
fn round_trip<T: Serialize + serde::de::DeserializeOwned>(v: &Value) -> Result<T, CliError> {
    let typed: Envelope<T> = parse(v.clone())?;
    let again = serde_json::to_value(&typed).map_err(|e| CliError::Internal(e.to_string()))?;
    if &again != v {
        return Err(CliError::Invalid(
            "document has fields its kind does not define".into(),
        ));
    }
    Ok(typed.body)
}

pub fn validate(file: &Path, two_legal: bool, out: Option<&Path>) -> Outcome {
    let v = read_json(file)?;
    let kind = v.get("kind").and_then(Value::as_str).map(str::to_string);
    let mut report = match kind.as_deref() {
        Some(kind) if v.get("schema").is_some() => {
            check_schema(&v)?;
            let graph = match kind {
                "instance" => Some(round_trip::<ReductionArtifact>(&v)?.instance.graph),
                "dag" => Some(round_trip::<LegalDag>(&v)?),
                "validation" => round_trip::<ValidationReport>(&v).map(|_| None)?,
                "gd-solution" => round_trip::<SolveReport>(&v).map(|_| None)?,
                "partition-solution" => round_trip::<PartitionReport>(&v).map(|_| None)?,
                "smtlib-export" => round_trip::<SmtExportReport>(&v).map(|_| None)?,
                "plan" => round_trip::<PlanReport>(&v).map(|_| None)?,
                "verification" => round_trip::<VerifyReport>(&v).map(|_| None)?,
                "paths" => round_trip::<PathsReport>(&v).map(|_| None)?,
                "error" => round_trip::<ErrorReport>(&v).map(|_| None)?,
                other => {
                    return Err(CliError::Invalid(format!(
                        "unknown document kind {other:?}"
                    )))
                }
            };
            let mut r = match &graph {
                Some(g) => graph_stats(g),
                None => ValidationReport {
                    input_kind: String::new(),
                    valid: true,
                    t: None,
                    two_legal: None,
                    vertices: None,
                    edges: None,
                    components: None,
                },
            };
            r.input_kind = kind.to_string();
            r
        }
        _ => {
            let input = graph_from_value(v)?;
            let mut r = graph_stats(&input.dag);
            r.input_kind = input.input_kind;
            r
        }
    };
    if two_legal && report.two_legal == Some(false) {
        return Err(CliError::Invalid("graph is legal but not 2-legal".into()));
    }
    if two_legal && report.two_legal.is_none() {
        return Err(CliError::Invalid("document holds no graph to check".into()));
    }
    report.valid = true;
    write_json(&envelope("validation", report)?, out)?;
    Ok(Answer::Yes)
}

pub struct SolveArgs {
    pub graph: PathBuf,
    pub k: Option<usize>,
    pub alpha: Option<usize>,
    pub beta: Option<usize>,
    pub optimize: bool,
}

fn param(
    name: &str,
    flag: Option<usize>,
    inst: Option<usize>,
    cfg: Option<usize>,
) -> Result<usize, CliError> {
    flag.or(inst)
        .or(cfg)
        .ok_or_else(|| CliError::Invalid(format!("missing --{name}")))
}

pub fn solve(a: SolveArgs, cfg: &Config, out: Option<&Path>) -> Outcome {
    let input = load_graph(&a.graph, false)?;
    let inst = input.instance.as_ref();
    let k = param("k", a.k, inst.map(|i| i.k), cfg.k)?;
    let alpha = param("alpha", a.alpha, inst.map(|i| i.alpha), cfg.alpha)?;
    let beta = param("beta", a.beta, inst.map(|i| i.beta), cfg.beta)?;
    let gd = GdInstance::new(input.dag, k, alpha, beta)?;
    let (min_beta, solution) = if a.optimize {
        match optimize_min_beta(&gd.graph, k, alpha, beta)? {
            Some((b, s)) => (Some(b), Some(s)),
            None => (None, None),
        }
    } else {
        (None, solve_decision(&gd))
    };
    let answer = if solution.is_some() {
        Answer::Yes
    } else {
        Answer::No
    };
    let report = SolveReport {
        answer,
        k,
        alpha,
        beta,
        min_beta,
        solution,
    };
    write_json(&envelope("gd-solution", report)?, out)?;
    Ok(answer)
}

pub struct KnitArgs {
    pub graph: PathBuf,
    pub q: Option<usize>,
    pub pmax: Option<usize>,
    pub connected: bool,
    pub pair_io: bool,
    pub beta_cap: Option<usize>,
    pub backend: Option<Backend>,
    pub emit: Option<PathBuf>,
    pub smt_model: Option<PathBuf>,
    pub min_over_p: bool,
}

fn backend_from(s: &str) -> Result<Backend, CliError> {
    match s {
        "builtin" => Ok(Backend::Builtin),
        "smtlib" => Ok(Backend::Smtlib),
        _ => Err(CliError::Invalid(format!("unknown backend {s:?}"))),
    }
}

fn constraint_err(e: ConstraintError) -> CliError {
    CliError::Invalid(e.to_string())
}

pub fn knit_opt(a: KnitArgs, cfg: &Config, out: Option<&Path>) -> Outcome {
    let input = load_graph(&a.graph, false)?;
    let q = param("q", a.q, None, cfg.q)?;
    let p_max = pick(a.pmax, cfg.pmax, 1);
    let backend = match (a.backend, &cfg.backend) {
        (Some(b), _) => b,
        (None, Some(s)) => backend_from(s)?,
        (None, None) => Backend::Builtin,
    };
    let opts = SolverOptions {
        connectivity_required: a.connected || cfg.connected.unwrap_or(false),
        pair_in_out_same_qubit: a.pair_io || cfg.pair_io.unwrap_or(false),
        p_max,
        beta_cap: a.beta_cap,
        backend,
    };
    opts.validate().map_err(constraint_err)?;
    let g = &input.dag;
    if let Some(path) = &a.emit {
        let m = build_model(g, q, p_max, &opts).map_err(constraint_err)?;
        std::fs::write(path, emit_smtlib(&m))
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        if backend == Backend::Smtlib && a.smt_model.is_none() {
            let report = SmtExportReport {
                path: path.clone(),
                partitions: p_max,
                assignment_vars: m.assignment_var_count(),
                cut_vars: m.cut_var_count(),
            };
            write_json(&envelope("smtlib-export", report)?, out)?;
            return Ok(Answer::Yes);
        }
    }
    let result = match (&a.smt_model, backend) {
        (Some(path), _) => {
            let m = build_model(g, q, p_max, &opts).map_err(constraint_err)?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            parse_smt_model(&m, &text)
        }
        (None, Backend::Smtlib) => {
            return Err(CliError::Invalid(
                "the smtlib backend needs --emit, or --smt-model to read a solver's answer".into(),
            ))
        }
        (None, Backend::Builtin) if a.min_over_p => min_cuts_over_partitions(g, q, &opts),
        (None, Backend::Builtin) => iterate_partitions(g, q, &opts).map(|(_, s)| s),
    };
    let solution = match result {
        Ok(s) => Some(s),
        Err(ConstraintError::Infeasible) => None,
        Err(e) => return Err(constraint_err(e)),
    };
    let answer = if solution.is_some() {
        Answer::Yes
    } else {
        Answer::No
    };
    let report = PartitionReport {
        answer,
        q,
        p_max,
        total_cuts: solution.as_ref().map(ModelSolution::total_cuts),
        solution,
    };
    write_json(&envelope("partition-solution", report)?, out)?;
    Ok(answer)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GenFamily {
    G0,
    Gbeta,
    Connected,
    Random,
}

pub struct GenArgs {
    pub family: GenFamily,
    pub a: Option<String>,
    pub b: Option<usize>,
    pub beta: Option<usize>,
    pub two_legal: bool,
    pub seed: Option<u64>,
    pub max_vertices: usize,
    pub max_arity: usize,
}

pub fn gen(a: GenArgs, cfg: &Config, out: Option<&Path>) -> Outcome {
    let two_legal = a.two_legal || cfg.two_legal.unwrap_or(false);
    if a.family == GenFamily::Random {
        let seed = a
            .seed
            .ok_or_else(|| CliError::Invalid("--family random needs --seed".into()))?;
        if a.max_vertices < 2 || a.max_arity == 0 {
            return Err(CliError::Invalid(
                "need --max-vertices >= 2 and --max-arity >= 1".into(),
            ));
        }
        let mut g = legal_dag_corpus(seed, 1, a.max_vertices, a.max_arity).remove(0);
        if two_legal {
            g = two_legal_expand(&g)?;
        }
        write_json(&envelope("dag", g)?, out)?;
        return Ok(Answer::Yes);
    }
    let elems = parse_list(
        a.a.as_deref()
            .ok_or_else(|| CliError::Invalid("missing --a".into()))?,
    )?;
    let inst = match a.b {
        Some(b) => ThreePartitionInstance::new(elems.len() / 3, b, elems)?,
        None => ThreePartitionInstance::from_elements(elems)?,
    };
    let family = match a.family {
        GenFamily::G0 => Family::G0,
        GenFamily::Gbeta => Family::Gbeta,
        _ => Family::Connected,
    };
    let beta = a.beta.or(cfg.beta);
    if family == Family::Gbeta && beta == Some(0) {
        return Err(CliError::Invalid("gbeta needs beta >= 1".into()));
    }
    let art = generate(family, &inst, beta, two_legal)?;
    write_json(&envelope("instance", art)?, out)?;
    Ok(Answer::Yes)
}

pub struct PlanArgs {
    pub graph: PathBuf,
    pub cuts: Option<String>,
    pub solution: Option<PathBuf>,
    pub epsilon: Option<f64>,
    pub text: bool,
}

pub fn plan(a: PlanArgs, cfg: &Config, out: Option<&Path>) -> Outcome {
    let input = load_graph(&a.graph, false)?;
    let g = &input.dag;
    let eps = pick(a.epsilon, cfg.epsilon, 0.1);
    let plan =
        match (&a.cuts, &a.solution) {
            (Some(_), Some(_)) => {
                return Err(CliError::Invalid("give either --cuts or --solution".into()))
            }
            (Some(list), None) => {
                let cuts: CutSet = parse_list(list)?.into_iter().collect();
                plan_from_cuts(g, &cuts, eps)?
            }
            (None, Some(path)) => {
                let v = read_json(path)?;
                check_schema(&v)?;
                match v.get("kind").and_then(Value::as_str) {
                    Some("gd-solution") => {
                        let r: Envelope<SolveReport> = parse(v)?;
                        let sol = r.body.solution.ok_or_else(|| {
                            CliError::Invalid("solution document answers no".into())
                        })?;
                        make_plan(g, &sol, eps)?
                    }
                    Some("partition-solution") => {
                        let r: Envelope<PartitionReport> = parse(v)?;
                        let sol = r.body.solution.ok_or_else(|| {
                            CliError::Invalid("solution document answers no".into())
                        })?;
                        plan_from_partition(g, &sol.cuts, &sol.partition_of, eps)?
                    }
                    other => {
                        return Err(CliError::Invalid(format!(
                            "expected a gd-solution or partition-solution, got {other:?}"
                        )))
                    }
                }
            }
            (None, None) => plan_from_cuts(g, &CutSet::new(), eps)?,
        };
    let report = plan_report(&plan);
    if a.text {
        write_text(&report.to_text(), out)?;
    } else {
        write_json(&envelope("plan", report)?, out)?;
    }
    Ok(Answer::Yes)
}

pub fn verify(
    circuit: &Path,
    cuts: Option<&str>,
    obs: &str,
    tolerance: Option<f64>,
    cfg: &Config,
    out: Option<&Path>,
) -> Outcome {
    let c = load_circuit(circuit)?;
    let cuts: CutSet = parse_list(cuts.unwrap_or(""))?.into_iter().collect();
    let obs: PauliObservable = obs.parse()?;
    let tolerance = pick(tolerance, cfg.tolerance, 1e-9);
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(CliError::Invalid("tolerance must be non-negative".into()));
    }
    let report = crosscheck(&c, &cuts, &obs)?;
    let pass = report.abs_diff <= tolerance;
    write_json(
        &envelope(
            "verification",
            VerifyReport {
                tolerance,
                pass,
                report,
            },
        )?,
        out,
    )?;
    Ok(if pass { Answer::Yes } else { Answer::No })
}

pub fn paths(graph: &Path, out: Option<&Path>) -> Outcome {
    let g = load_graph(graph, false)?.dag;
    let paths = edge_disjoint_paths(&g)?;
    write_json(&envelope("paths", PathsReport { t: g.t(), paths })?, out)?;
    Ok(Answer::Yes)
}

pub fn export_dot(graph: &Path, cuts: Option<&str>, out: Option<&Path>) -> Outcome {
    let g = load_graph(graph, false)?.dag;
    let name = graph
        .file_stem()
        .map_or_else(|| "dag".to_string(), |s| s.to_string_lossy().into_owned());
    let text = match cuts {
        Some(list) => {
            let cuts: CutSet = parse_list(list)?.into_iter().collect();
            duplicate(&g, &cuts)?.to_dot(&name)
        }
        None => g.graph().to_dot(&name),
    };
    write_text(&text, out)?;
    Ok(Answer::Yes)
}
