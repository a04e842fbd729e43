//! Batch experiment driver for the verification pipeline.
//!
//! Subcommands cover the whole flow: compile a circuit (or flattened proof)
//! into its clock Hamiltonian, brute-force a witness, build history states,
//! run measurement-verdict Monte Carlo, exercise the commitment binding
//! experiments, drive full argument sessions against registered prover
//! strategies, and aggregate the resulting summaries.
//!
//! Exit codes: 0 success, 1 rejected protocol verdict, 2 usage error,
//! 3 internal error.

mod commands;
mod instance;
mod summary;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

#[derive(Parser)]
#[command(
    name = "xzlab",
    about = "Clock-Hamiltonian compilation and classical-argument experiments",
    version
)]
struct Cli {
    /// Global seed; the XZLAB_SEED environment variable overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for per-trial parallelism (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Directory for outputs and summaries.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an instance into its clock-Hamiltonian components.
    CompileHamiltonian {
        /// Instance directory (manifest.txt plus circuit or proof bundle).
        #[arg(long)]
        instance: PathBuf,
    },
    /// Brute-force the best witness of an instance (<= 4 witness qubits).
    Witness {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Build the history state of an instance on a witness.
    HistoryState {
        #[arg(long)]
        instance: PathBuf,
        /// Witness state dump; defaults to the manifest's witness source.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Monte Carlo of the measurement verdict against its analytic law.
    MfRun {
        /// Hamiltonian file.
        #[arg(long)]
        hamiltonian: PathBuf,
        /// State dump to measure.
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Padded locality of the sampler.
        #[arg(long, default_value_t = 6)]
        locality: usize,
    },
    /// Fold a proof-bundle instance into a single verifier circuit.
    Flatten {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Commitment binding experiments for a registered strategy.
    BindingExp {
        /// Strategy name: honest, wrong-state, refuse-open, partial-refuse,
        /// flip-x.
        #[arg(long, default_value = "honest")]
        strategy: String,
        /// Committed state size when drawing a random state.
        #[arg(long, default_value_t = 3)]
        qubits: usize,
        /// Optional state dump to commit instead of a random state.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Basis string like "101" (0 = Z, 1 = X); random when omitted.
        #[arg(long)]
        bases: Option<String>,
        /// Sessions per probed basis for the delta estimate.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Paired sessions for the Real-vs-Ideal distance.
        #[arg(long, default_value_t = 100_000)]
        pairs: u64,
    },
    /// Run argument sessions against a registered prover strategy.
    ProtocolRun {
        #[arg(long)]
        instance: PathBuf,
        /// Prover name: honest, wrong-state, refuse-open, flip-x.
        #[arg(long, default_value = "honest")]
        prover: String,
        #[arg(long, default_value_t = 8)]
        lambda: usize,
        /// Sequential repetitions (conjunction verdict, transcripts logged).
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Extra independent sessions for acceptance statistics.
        #[arg(long, default_value_t = 0)]
        sessions: u64,
        /// Also run the good-set experiment over first-seed grids.
        #[arg(long, default_value_t = false)]
        good_set: bool,
        /// Cap on the number of committed witness copies.
        #[arg(long, default_value_t = 64)]
        copy_cap: usize,
    },
    /// Aggregate all *.summary files in the output directory.
    Report {},
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::CompileHamiltonian { instance } => commands::cmd_compile(instance, &cli.out_dir),
        Command::Witness { instance } => commands::cmd_witness(instance, &cli.out_dir),
        Command::HistoryState { instance, witness } => {
            commands::cmd_history_state(instance, witness.as_deref(), &cli.out_dir)
        }
        Command::MfRun {
            hamiltonian,
            state,
            trials,
            locality,
        } => commands::cmd_mf_run(
            hamiltonian,
            state,
            *trials,
            *locality,
            cli.seed,
            &cli.out_dir,
        ),
        Command::Flatten { instance } => commands::cmd_flatten(instance, &cli.out_dir),
        Command::BindingExp {
            strategy,
            qubits,
            state,
            bases,
            samples,
            pairs,
        } => commands::cmd_binding_exp(
            strategy,
            *qubits,
            state.as_deref(),
            bases.as_deref(),
            *samples,
            *pairs,
            cli.seed,
            &cli.out_dir,
        ),
        Command::ProtocolRun {
            instance,
            prover,
            lambda,
            reps,
            sessions,
            good_set,
            copy_cap,
        } => commands::cmd_protocol_run(
            instance,
            prover,
            *lambda,
            *reps,
            *sessions,
            *good_set,
            *copy_cap,
            cli.seed,
            &cli.out_dir,
        ),
        Command::Report {} => summary::cmd_report(&cli.out_dir).map(|()| 0),
    }
}

fn main() {
    let mut cli = Cli::parse();
    if let Ok(value) = std::env::var("XZLAB_SEED") {
        match value.parse() {
            Ok(seed) => cli.seed = seed,
            Err(_) => {
                eprintln!("usage error: XZLAB_SEED must be an integer, got '{value}'");
                std::process::exit(2);
            }
        }
    }
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: building thread pool: {e}");
            std::process::exit(3);
        }
    }
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}
