//! Command-line front end: build or load an instance, run one experiment,
//! write CSV/JSON, print a one-line summary.

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::{InstanceArgs, OutputArgs};
use commands::{Initial, ModeArg, OrderArg, Outcome, ScalingArgs};
use error::CliResult;

#[derive(Parser)]
#[command(
    name = "gengrover",
    version,
    about = "Generalized Grover search simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pair overlaps c_n and eigenvalues 1 ± c_n; with --stats, their
    /// distribution over random Hadamard instances.
    Spectrum {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        stats: bool,
        #[arg(long, default_value_t = 100, requires = "stats")]
        trials: usize,
    },
    /// Target probability under continuous evolution e^{-iHt}.
    Evolve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, value_enum, default_value = "source")]
        initial: Initial,
        /// End of the time grid; defaults to 1.5 periods of the slowest mode.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Target probability after k oracle/Grover iterations.
    Iterate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, value_enum, default_value = "source")]
        initial: Initial,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, value_enum, default_value = "oracle-first")]
        order: OrderArg,
    },
    /// Phase-estimation outcome distribution for one source state.
    Qpe {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Zero-based source index.
        #[arg(long, default_value_t = 0)]
        source_index: usize,
        /// Register qubits; derived from --delta-e and --p when omitted.
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.75)]
        p: f64,
        /// Energy resolution; defaults to 2·c_av.
        #[arg(long)]
        delta_e: Option<f64>,
    },
    /// Sampled phase-estimation search, one JSON line per shot.
    Search {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = 1000)]
        shots: usize,
        #[arg(long, value_enum, default_value = "qpp")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0.75)]
        p: f64,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        delta_e: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
    /// c_av over random Hadamard instances with N = M, plus a power-law fit.
    /// With --d-list, a runtime table over dimensions at fixed --m.
    Scaling {
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, conflicts_with = "d_list")]
        d: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        m_list: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        d_list: Option<Vec<usize>>,
        /// N = M for the --d-list table.
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Per-readout success probability for runtime estimates.
        #[arg(long, default_value_t = 0.75)]
        p: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Checks the block identities and the structured spectrum against a
    /// dense eigensolver; exits 1 if any residual exceeds 1e-10.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Spectrum {
            instance,
            out,
            stats,
            trials,
        } => commands::spectrum(&instance, &out, stats, trials),
        Command::Evolve {
            instance,
            out,
            initial,
            t_max,
            samples,
        } => commands::evolve(&instance, &out, initial, t_max, samples),
        Command::Iterate {
            instance,
            out,
            initial,
            k_max,
            order,
        } => commands::iterate(&instance, &out, initial, k_max, order),
        Command::Qpe {
            instance,
            out,
            source_index,
            r,
            tau,
            p,
            delta_e,
        } => commands::qpe(&instance, &out, source_index, r, tau, p, delta_e),
        Command::Search {
            instance,
            out,
            shots,
            mode,
            p,
            r,
            delta_e,
            tau,
        } => commands::search_cmd(&instance, &out, shots, mode, p, r, delta_e, tau),
        Command::Scaling {
            out,
            d,
            m_list,
            d_list,
            m,
            p,
            trials,
            seed,
        } => {
            let args = ScalingArgs {
                d,
                m_list: &m_list,
                d_list: d_list.as_deref(),
                m,
                p,
                trials,
                seed,
            };
            commands::scaling(&args, &out)
        }
        Command::Verify { instance, out } => commands::verify(&instance, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code())
        }
    }
}
