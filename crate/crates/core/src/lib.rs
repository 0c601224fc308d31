//! Wire-cut placement for quantum circuits modelled as legal dags.
//!
//! * [`dag`] and [`circuit`]: graph model, legality, components, paths.
//! * [`duplication`]: edge duplication and acceptability.
//! * [`gd`]: exact solver for the graph duplication problem.
//! * [`constraints`]: vertex-partition constraint model with a built-in
//!   branch-and-bound and SMT-LIB2 export.
//! * [`reductions`]: 3-partition oracle and hardness-reduction instance
//!   families.
//! * [`knitting`] and [`simverify`]: 8-term wire-cut plans and exact
//!   statevector reconstruction of expectation values.
//! * [`random`]: seeded dag and circuit generators.

pub mod circuit;
pub mod constraints;
pub mod dag;
pub mod duplication;
pub mod error;
pub mod gd;
pub mod knitting;
pub mod random;
pub mod reductions;
pub mod simverify;
mod unionfind;

pub use circuit::{build_dag, Circuit, CircuitDag, Gate};
pub use constraints::{
    build_model, emit_smtlib, iterate_partitions, min_cuts_over_partitions, solve_model,
    ConstraintModel, ModelSolution, SolverOptions,
};
pub use dag::{
    components, consolidate_chains, edge_disjoint_paths, validate_legal, DagBuilder, DagGraph,
    EdgeId, LegalDag, PathDecomposition, VertexId, VertexKind,
};
pub use duplication::{
    cluster_stats, duplicate, is_acceptable, ClusterAssignment, ClusterStats, CutSet, DuplicatedDag,
};
pub use error::{Condition, DagError, Violation};
pub use gd::{
    optimize_min_beta, pack_components, solve_decision, verify_solution, GdInstance, GdSolution,
};
pub use knitting::{
    make_plan, overhead_metric, plan_from_cuts, plan_report, wire_cut_terms, CutPlan, PlanReport,
};
pub use reductions::{
    gen_connected, gen_g0, gen_gbeta, oracle_3partition, two_legal_expand, Family,
    ReductionArtifact, ThreePartitionInstance,
};
pub use simverify::{crosscheck, reconstruct_expectation, simulate_expectation, PauliObservable};
