use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::{EdgeId, VertexId};

/// Degree condition of a legal dag that a vertex failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// Input vertices have in-degree 0 and out-degree 1.
    InputDegree,
    /// Output vertices have in-degree 1 and out-degree 0.
    OutputDegree,
    /// Gate vertices have equal in- and out-degree.
    Balanced,
    /// Gate vertices have in- and out-degree exactly 2.
    TwoLegal,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::InputDegree => "1",
            Condition::OutputDegree => "2",
            Condition::Balanced => "3",
            Condition::TwoLegal => "3'",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    EmptyEdgeSet,
    CycleDetected,
    Condition {
        vertex: VertexId,
        condition: Condition,
        d_in: usize,
        d_out: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyEdgeSet => f.write_str("edge set is empty"),
            Violation::CycleDetected => f.write_str("graph contains a directed cycle"),
            Violation::Condition {
                vertex,
                condition,
                d_in,
                d_out,
            } => write!(
                f,
                "vertex {vertex} violates condition {condition} (d_in={d_in}, d_out={d_out})"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum DagError {
    #[error("vertex ids must be dense and ascending: position {position} holds id {id}")]
    NonDenseVertexIds { position: usize, id: VertexId },
    #[error("edge ids must be dense and ascending: position {position} holds id {id}")]
    NonDenseEdgeIds { position: usize, id: EdgeId },
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownVertex { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: VertexId },
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("graph is not legal: {}", join_violations(.0))]
    Illegal(Vec<Violation>),
    #[error("stated t = {stated} but the graph has {actual} inputs")]
    WrongT { stated: usize, actual: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("internal invariant broken: {0}")]
    InternalInvariantBroken(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl DagError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            DagError::Illegal(v) => v,
            _ => &[],
        }
    }
}
