//! Reading inputs in any of the accepted shapes and writing enveloped JSON.

use std::path::Path;

use dagcut_core::reductions::ReductionArtifact;
use dagcut_core::{build_dag, validate_legal, Circuit, DagGraph, GdInstance, LegalDag};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA: &str = "dagcut/1";

/// Every emitted document: a schema tag, a kind, and the body's fields.
#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    pub kind: String,
    #[serde(flatten)]
    pub body: T,
}

pub fn envelope<T: Serialize>(kind: &str, body: T) -> Result<Value, CliError> {
    serde_json::to_value(Envelope {
        schema: SCHEMA.to_string(),
        kind: kind.to_string(),
        body,
    })
    .map_err(|e| CliError::Internal(e.to_string()))
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

pub fn parse<T: DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Invalid(e.to_string()))
}

/// Pretty JSON with a trailing newline, to a file or stdout.
pub fn write_json(v: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    write_text(&text, out)
}

pub fn write_text(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A graph from any accepted input, with the instance parameters when the
/// input carried them.
pub struct GraphInput {
    pub dag: LegalDag,
    pub instance: Option<GdInstance>,
    pub input_kind: String,
}

fn has(v: &Value, key: &str) -> bool {
    v.get(key).is_some()
}

/// Accepts a raw graph (`vertices`, `edges`), a circuit (`qubits`, `gates`),
/// a raw instance (`graph`, `k`, `alpha`, `beta`), a legal dag (`graph`) or a
/// `dag` / `instance` document.
pub fn load_graph(path: &Path, two_legal: bool) -> Result<GraphInput, CliError> {
    let v = read_json(path)?;
    let mut input = graph_from_value(v)?;
    if two_legal && !input.dag.is_two_legal() {
        input.dag = validate_legal(input.dag.graph(), true)?;
    }
    Ok(input)
}

pub fn graph_from_value(v: Value) -> Result<GraphInput, CliError> {
    let kind = v.get("kind").and_then(Value::as_str).map(str::to_string);
    if has(&v, "schema") {
        check_schema(&v)?;
    }
    let from_dag = |dag: LegalDag, kind: &str| GraphInput {
        dag,
        instance: None,
        input_kind: kind.to_string(),
    };
    match kind.as_deref() {
        Some("instance") => {
            let art: Envelope<ReductionArtifact> = parse(v)?;
            let inst = art.body.instance;
            return Ok(GraphInput {
                dag: inst.graph.clone(),
                instance: Some(inst),
                input_kind: "instance".into(),
            });
        }
        Some("dag") => {
            let d: Envelope<LegalDag> = parse(v)?;
            return Ok(from_dag(d.body, "dag"));
        }
        Some(other) => {
            return Err(CliError::Invalid(format!(
                "a {other:?} document holds no graph"
            )));
        }
        None => {}
    }
    if has(&v, "gates") {
        let c: Circuit = parse(v)?;
        let dag = validate_legal(&build_dag(&c), false)?;
        return Ok(GraphInput {
            dag,
            instance: None,
            input_kind: "circuit".into(),
        });
    }
    if has(&v, "vertices") {
        let g: DagGraph = parse(v)?;
        return Ok(from_dag(validate_legal(&g, false)?, "graph"));
    }
    if has(&v, "graph") && has(&v, "k") {
        let inst: GdInstance = parse(v)?;
        return Ok(GraphInput {
            dag: inst.graph.clone(),
            instance: Some(inst),
            input_kind: "instance".into(),
        });
    }
    if has(&v, "graph") {
        let d: LegalDag = parse(v)?;
        return Ok(from_dag(d, "dag"));
    }
    Err(CliError::Invalid(
        "expected a graph, circuit, instance or dag document".into(),
    ))
}

pub fn check_schema(v: &Value) -> Result<(), CliError> {
    match v.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) => Ok(()),
        Some(s) => Err(CliError::Invalid(format!("unsupported schema {s:?}"))),
        None => Err(CliError::Invalid("missing schema field".into())),
    }
}

pub fn load_circuit(path: &Path) -> Result<Circuit, CliError> {
    parse(read_json(path)?)
}

/// `3,7` or `3 7`; empty means no cuts.
pub fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Invalid(format!("not a non-negative integer: {t:?}")))
        })
        .collect()
}
