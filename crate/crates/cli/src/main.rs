//! `krsupport`: compute special-cycle supports in a Bruhat-Tits vertex complex, cross-check
//! them against brute-force filtering, and take subvertex censuses.

mod commands;
mod export;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("ingest error: {0}")]
    Ingest(String),
    #[error("discrepancy: {0}")]
    Discrepancy(String),
    #[error("limit exceeded: {0}")]
    Limits(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Ingest(_) => 2,
            CliError::Discrepancy(_) => 3,
            CliError::Limits(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<krsupport_core::Error> for CliError {
    fn from(e: krsupport_core::Error) -> Self {
        use krsupport_core::Error as E;
        match e {
            E::CapExceeded { .. } | E::TooLarge(_) | E::PrecisionExceeded { .. } => CliError::Limits(e.to_string()),
            E::Inconsistent(m) => CliError::Discrepancy(m),
            e => CliError::Other(anyhow::anyhow!(e)),
        }
    }
}

#[derive(Parser)]
#[command(name = "krsupport", version, about = "Supports of special cycles on unitary Rapoport-Zink spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the support complex inside the window and export it.
    Compute(RunArgs),
    /// Compare the staged computation with brute-force filtering on the window.
    OracleCheck(RunArgs),
    /// Classify the subvertices of each max-type support vertex.
    Census(RunArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Emit {
    Json,
    Dot,
}

#[derive(Args, Clone, Debug)]
pub struct RunArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Window radius, overriding the problem file.
    #[arg(long)]
    pub radius: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Export formats.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Emit::Json, Emit::Dot])]
    pub emit: Vec<Emit>,
    /// oracle-check only: filter the window by the predicate and skip the staged algorithm.
    #[arg(long)]
    pub predicate_only: bool,
    /// Perturb the exponents of the embedding at this stage (test hook).
    #[arg(long, hide = true)]
    pub fault_phi_stage: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.cmd {
        Cmd::Compute(a) | Cmd::OracleCheck(a) | Cmd::Census(a) => a.clone(),
    };
    if let Some(t) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let res = match cli.cmd {
        Cmd::Compute(a) => commands::compute(&a),
        Cmd::OracleCheck(a) => commands::oracle_check(&a),
        Cmd::Census(a) => commands::census(&a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
