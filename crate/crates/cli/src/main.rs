use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spisep::commands::{self, Family, MatrixOut, Tolerances, SEED_ENV};
use spisep::io;
use spisep::CliError;
use spisep_core::graphs::DEFAULT_ZERO_REL_TOL;
use spisep_core::sssp::DEFAULT_RANK_TOL;
use spisep_core::symplectic::DEFAULT_CLUSTER_TOL;
use spisep_core::{CoupledGraph, Coupling};

/// Symplectic eigenvalues of positive definite matrices described by
/// labeled graphs.
#[derive(Parser)]
#[command(name = "spisep", version)]
struct Cli {
    /// Relative gap below which symplectic eigenvalues are merged.
    #[arg(long, global = true, default_value_t = DEFAULT_CLUSTER_TOL)]
    tol_cluster: f64,
    /// Relative singular value threshold for numerical rank.
    #[arg(long, global = true, default_value_t = DEFAULT_RANK_TOL)]
    tol_rank: f64,
    /// Entries below this fraction of the largest entry count as zero.
    #[arg(long, global = true, default_value_t = DEFAULT_ZERO_REL_TOL)]
    tol_zero: f64,
    /// Seed for randomized commands; SPISEP_SEED overrides it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CouplingKind {
    /// `{(i, i+p)}`.
    Standard,
    /// `{(1,2), (3,4), …}`.
    Consecutive,
}

#[derive(Subcommand)]
enum Command {
    /// Symplectic eigenvalues with multiplicities.
    Spectrum { matrix: PathBuf },
    /// Williamson normal form `SᵀNS = D ⊕ D`.
    Williamson { matrix: PathBuf },
    /// Strong symplectic spectral property, optionally in a direction `R`.
    Sssp {
        matrix: PathBuf,
        #[arg(long)]
        direction: Option<PathBuf>,
    },
    /// Build a matrix from a family; writes JSON to stdout unless --out is given.
    Construct {
        #[arg(value_enum)]
        family: Family,
        /// Half order `p`.
        #[arg(short, long)]
        p: usize,
        /// Comma separated target symplectic eigenvalues (default all ones).
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<f64>>,
        /// Output file; `.mtx` selects Matrix Market.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coupled zero forcing number of a graph file.
    Zc {
        graph: PathBuf,
        /// Used when the graph file has no coupling.
        #[arg(long, value_enum, default_value = "standard")]
        coupling: CouplingKind,
    },
    /// Verdicts for all coupled graphs of order four.
    CatalogueOrder4,
    /// Nonzero counts of `N` and `N⁻¹` against the sparsity bounds.
    AuditSparsity { matrix: PathBuf },
}

fn emit<T: Serialize + std::fmt::Display>(json: bool, report: &T) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serialises")
        );
    } else {
        print!("{report}");
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = Tolerances {
        cluster_tol: cli.tol_cluster,
        rank_tol: cli.tol_rank,
        zero_tol: cli.tol_zero,
    };
    let env = std::env::var(SEED_ENV).ok();
    let seed = commands::resolve_seed(cli.seed, env.as_deref())?;
    match cli.command {
        Command::Spectrum { matrix } => emit(
            cli.json,
            &commands::spectrum(&io::read_matrix(&matrix)?, tol)?,
        ),
        Command::Williamson { matrix } => emit(
            cli.json,
            &commands::williamson(&io::read_matrix(&matrix)?, tol)?,
        ),
        Command::Sssp { matrix, direction } => {
            let n = io::read_matrix(&matrix)?;
            let r = direction.map(|d| io::read_matrix(&d)).transpose()?;
            emit(cli.json, &commands::sssp(&n, r.as_ref(), tol)?)
        }
        Command::Construct {
            family,
            p,
            targets,
            out,
        } => {
            let n = commands::construct(family, p, targets.as_deref(), seed)?;
            match out {
                Some(path) => io::write_matrix(&path, &n)?,
                None => println!(
                    "{}",
                    serde_json::to_string_pretty(&MatrixOut {
                        order: n.order(),
                        entries: &n
                    })
                    .expect("finite matrix serialises")
                ),
            }
        }
        Command::Zc { graph, coupling } => {
            let (g, c) = io::read_graph(&graph)?;
            let c = match c {
                Some(c) => c,
                None => {
                    if g.order() % 2 == 1 {
                        return Err(CliError::Precondition(format!(
                            "graph order {} is odd",
                            g.order()
                        )));
                    }
                    match coupling {
                        CouplingKind::Standard => Coupling::standard(g.order() / 2),
                        CouplingKind::Consecutive => Coupling::consecutive(g.order() / 2),
                    }
                }
            };
            emit(cli.json, &commands::zc(&CoupledGraph::new(g, c)?)?)
        }
        Command::CatalogueOrder4 => emit(cli.json, &commands::catalogue(seed)?),
        Command::AuditSparsity { matrix } => emit(
            cli.json,
            &commands::audit_sparsity(&io::read_matrix(&matrix)?, tol)?,
        ),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spisep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
