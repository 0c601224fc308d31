//! Exact solver for the graph duplication problem `GD(G, k, α, β)`: can at
//! most `β` edges be duplicated so that every component is acceptable and the
//! components fit into at most `α` clusters with at most `k` inputs (and
//! outputs) each?

mod packing;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::LegalDag;
use crate::duplication::{
    cluster_stats, duplicate, is_acceptable, ClusterAssignment, ClusterStats, CutSet,
};
use crate::error::DagError;

pub use packing::pack_components;
pub use search::{optimize_min_beta, solve_decision, solve_decision_with, SearchOptions};

#[derive(Debug, Error)]
pub enum GdError {
    #[error("k and alpha must be at least 1 (got k={k}, alpha={alpha})")]
    InvalidParameters { k: usize, alpha: usize },
    #[error(transparent)]
    Dag(#[from] DagError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct GdInstance {
    pub graph: LegalDag,
    pub k: usize,
    pub alpha: usize,
    pub beta: usize,
}

#[derive(Deserialize)]
struct RawInstance {
    graph: LegalDag,
    k: usize,
    alpha: usize,
    beta: usize,
}

impl TryFrom<RawInstance> for GdInstance {
    type Error = GdError;

    fn try_from(raw: RawInstance) -> Result<Self, Self::Error> {
        Self::new(raw.graph, raw.k, raw.alpha, raw.beta)
    }
}

impl GdInstance {
    pub fn new(graph: LegalDag, k: usize, alpha: usize, beta: usize) -> Result<Self, GdError> {
        if k == 0 || alpha == 0 {
            return Err(GdError::InvalidParameters { k, alpha });
        }
        Ok(Self {
            graph,
            k,
            alpha,
            beta,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Decision,
    Optimal,
}

/// Certificate for a YES answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GdSolution {
    pub cuts: CutSet,
    pub assignment: ClusterAssignment,
    pub stats: Vec<ClusterStats>,
    pub witness: WitnessKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("{used} duplications exceed the budget {beta}")]
    OverBudget { used: usize, beta: usize },
    #[error("cut set references an unknown edge")]
    UnknownEdge,
    #[error("assignment covers {assigned} components, graph has {actual}")]
    ComponentMismatch { assigned: usize, actual: usize },
    #[error("component {0} has no original input-to-output path")]
    Unacceptable(usize),
    #[error("{clusters} clusters exceed alpha={alpha}")]
    TooManyClusters { clusters: usize, alpha: usize },
    #[error("cluster indices are not contiguous")]
    EmptyCluster,
    #[error("cluster {cluster} has {inputs} inputs and {outputs} outputs (k={k})")]
    ClusterTooLarge {
        cluster: usize,
        inputs: usize,
        outputs: usize,
        k: usize,
    },
    #[error("cluster {cluster} has unbalanced inputs {inputs} and outputs {outputs}")]
    Unbalanced {
        cluster: usize,
        inputs: usize,
        outputs: usize,
    },
    #[error("reported cluster statistics do not match the recomputed ones")]
    StatsMismatch,
}

/// Re-checks a certificate from scratch: duplicate, check acceptability,
/// recount every cluster. Shares no code with the search.
pub fn verify_solution(inst: &GdInstance, sol: &GdSolution) -> Result<(), CertificateError> {
    if sol.cuts.len() > inst.beta {
        return Err(CertificateError::OverBudget {
            used: sol.cuts.len(),
            beta: inst.beta,
        });
    }
    let dup = duplicate(&inst.graph, &sol.cuts).map_err(|_| CertificateError::UnknownEdge)?;
    let report = is_acceptable(&dup);
    if report.components.len() != sol.assignment.cluster_of.len() {
        return Err(CertificateError::ComponentMismatch {
            assigned: sol.assignment.cluster_of.len(),
            actual: report.components.len(),
        });
    }
    if let Some(i) = report.components.iter().position(|c| !c.has_path) {
        return Err(CertificateError::Unacceptable(i));
    }
    if sol.assignment.clusters > inst.alpha {
        return Err(CertificateError::TooManyClusters {
            clusters: sol.assignment.clusters,
            alpha: inst.alpha,
        });
    }
    if !sol.assignment.has_no_empty_cluster()
        || sol
            .assignment
            .cluster_of
            .iter()
            .any(|&c| c >= sol.assignment.clusters)
    {
        return Err(CertificateError::EmptyCluster);
    }
    let stats = cluster_stats(&dup, &sol.assignment);
    for (cluster, s) in stats.iter().enumerate() {
        if s.input_count != s.output_count {
            return Err(CertificateError::Unbalanced {
                cluster,
                inputs: s.input_count,
                outputs: s.output_count,
            });
        }
        if s.input_count > inst.k || s.output_count > inst.k {
            return Err(CertificateError::ClusterTooLarge {
                cluster,
                inputs: s.input_count,
                outputs: s.output_count,
                k: inst.k,
            });
        }
    }
    if stats != sol.stats {
        return Err(CertificateError::StatsMismatch);
    }
    Ok(())
}

/// Builds a certificate for a cut set whose components are known to pack.
pub(crate) fn certificate(
    inst: &GdInstance,
    cuts: CutSet,
    witness: WitnessKind,
) -> Option<GdSolution> {
    let dup = duplicate(&inst.graph, &cuts).ok()?;
    let report = is_acceptable(&dup);
    if !report.acceptable {
        return None;
    }
    let sizes: Vec<usize> = report.components.iter().map(|c| c.inputs).collect();
    let assignment = pack_components(&sizes, inst.k, inst.alpha)?;
    let stats = cluster_stats(&dup, &assignment);
    Some(GdSolution {
        cuts,
        assignment,
        stats,
        witness,
    })
}
