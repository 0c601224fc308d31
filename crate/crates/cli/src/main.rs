//! `dagcut`: wire-cut placement for quantum circuits modelled as legal dags.
//!
//! Every command writes one JSON document tagged `"schema": "dagcut/1"`
//! (DOT for `export-dot`, optionally text for `plan`). Exit codes: 0 success
//! or YES, 3 NO or infeasible, 2 invalid input, 1 internal error. Errors go
//! to stderr as a JSON document of kind `error`.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dagcut_core::constraints::Backend;

use commands::{Answer, ErrorReport, GenArgs, GenFamily, KnitArgs, PlanArgs, SolveArgs};
use config::{pick, Config};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "dagcut",
    version,
    about = "Exact wire-cut placement and verification for quantum circuits"
)]
struct Cli {
    /// TOML file with default parameters (k, alpha, beta, q, pmax, epsilon,
    /// tolerance, threads, backend, connected, pair_io, two_legal).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads. The solvers are sequential, so values above 1 are
    /// accepted and change nothing.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Builtin,
    Smtlib,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph, circuit or instance for legality, or any document
    /// this tool emits for a lossless re-parse.
    Validate {
        file: PathBuf,
        /// Also require every gate to have two inputs and two outputs.
        #[arg(long)]
        two_legal: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide GD(G, k, alpha, beta), or find the fewest duplications with
    /// --optimize.
    ///
    /// The search is exact for any graph. Grouping many components into
    /// clusters is a bin-packing search and is exponential in the worst case.
    Solve {
        /// Graph, circuit or instance file; an instance supplies k, alpha
        /// and beta unless given here.
        #[arg(long)]
        graph: PathBuf,
        #[arg(short = 'k')]
        k: Option<usize>,
        #[arg(long)]
        alpha: Option<usize>,
        #[arg(long)]
        beta: Option<usize>,
        /// Report the smallest feasible number of duplications up to beta.
        #[arg(long)]
        optimize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Partition vertices into at most pmax parts of at most Q qubits with
    /// the fewest cut edges.
    KnitOpt {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short = 'Q', long = "q")]
        q: Option<usize>,
        #[arg(long)]
        pmax: Option<usize>,
        /// Require each partition to be weakly connected.
        #[arg(long)]
        connected: bool,
        /// Require each partition to hold the input and output of one qubit.
        #[arg(long)]
        pair_io: bool,
        #[arg(long)]
        beta_cap: Option<usize>,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Write the SMT-LIB2 model for P = pmax here.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Read an external solver's model for P = pmax instead of solving.
        #[arg(long)]
        smt_model: Option<PathBuf>,
        /// Minimize over every P <= pmax instead of stopping at the first
        /// feasible one.
        #[arg(long)]
        min_over_p: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a reduction instance from a 3-partition instance, or a
    /// seeded random legal dag.
    Gen {
        #[arg(long, value_enum)]
        family: GenFamily,
        /// Elements, e.g. 3,3,4.
        #[arg(long)]
        a: Option<String>,
        /// Target sum per triple; derived from the elements when omitted.
        #[arg(long = "B")]
        b: Option<usize>,
        #[arg(long)]
        beta: Option<usize>,
        #[arg(long)]
        two_legal: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 12)]
        max_vertices: usize,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cut plan with fragments, the 8-term table and the overhead metric.
    Plan {
        #[arg(long)]
        graph: PathBuf,
        /// Edge ids to cut, e.g. 3,7.
        #[arg(long)]
        cuts: Option<String>,
        /// A gd-solution or partition-solution document.
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Human-readable summary instead of JSON.
        #[arg(long)]
        text: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare direct simulation with reconstruction from cut fragments.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        cuts: Option<String>,
        /// Pauli string, one character per qubit.
        #[arg(long)]
        obs: String,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Edge-disjoint input-to-output paths.
    Paths {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Graphviz rendering, after duplicating --cuts if given.
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        cuts: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Answer, CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    if pick(cli.threads, cfg.threads, 1) == 0 {
        return Err(CliError::Invalid("--threads must be at least 1".into()));
    }
    match cli.command {
        Command::Validate {
            file,
            two_legal,
            output,
        } => commands::validate(&file, two_legal, output.as_deref()),
        Command::Solve {
            graph,
            k,
            alpha,
            beta,
            optimize,
            output,
        } => commands::solve(
            SolveArgs {
                graph,
                k,
                alpha,
                beta,
                optimize,
            },
            &cfg,
            output.as_deref(),
        ),
        Command::KnitOpt {
            graph,
            q,
            pmax,
            connected,
            pair_io,
            beta_cap,
            backend,
            emit,
            smt_model,
            min_over_p,
            output,
        } => commands::knit_opt(
            KnitArgs {
                graph,
                q,
                pmax,
                connected,
                pair_io,
                beta_cap,
                backend: backend.map(|b| match b {
                    BackendArg::Builtin => Backend::Builtin,
                    BackendArg::Smtlib => Backend::Smtlib,
                }),
                emit,
                smt_model,
                min_over_p,
            },
            &cfg,
            output.as_deref(),
        ),
        Command::Gen {
            family,
            a,
            b,
            beta,
            two_legal,
            seed,
            max_vertices,
            max_arity,
            output,
        } => commands::gen(
            GenArgs {
                family,
                a,
                b,
                beta,
                two_legal,
                seed,
                max_vertices,
                max_arity,
            },
            &cfg,
            output.as_deref(),
        ),
        Command::Plan {
            graph,
            cuts,
            solution,
            epsilon,
            text,
            output,
        } => commands::plan(
            PlanArgs {
                graph,
                cuts,
                solution,
                epsilon,
                text,
            },
            &cfg,
            output.as_deref(),
        ),
        Command::Verify {
            circuit,
            cuts,
            obs,
            tolerance,
            output,
        } => commands::verify(
            &circuit,
            cuts.as_deref(),
            &obs,
            tolerance,
            &cfg,
            output.as_deref(),
        ),
        Command::Paths { graph, output } => commands::paths(&graph, output.as_deref()),
        Command::ExportDot {
            graph,
            cuts,
            output,
        } => commands::export_dot(&graph, cuts.as_deref(), output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Answer::Yes) => ExitCode::SUCCESS,
        Ok(Answer::No) => ExitCode::from(3),
        Err(e) => {
            let code = e.exit_code();
            let report = ErrorReport {
                code,
                message: e.to_string(),
            };
            match io::envelope("error", report).and_then(|v| {
                serde_json::to_string(&v).map_err(|e| CliError::Internal(e.to_string()))
            }) {
                Ok(text) => eprintln!("{text}"),
                Err(_) => eprintln!("{e}"),
            }
            ExitCode::from(code)
        }
    }
}
