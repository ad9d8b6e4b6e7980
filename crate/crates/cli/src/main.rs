//! kdcalc: complex joint probabilities, weak values, and pointer
//! simulations for finite-dimensional quantum states.
//!
//! Exit codes: 0 success, 2 input/usage error, 3 dimension or basis
//! mismatch, 4 domain error. Results go to stdout as a JSON envelope (or
//! CSV for tabular payloads); failures print one JSON diagnostic line on
//! stderr.

mod commands;
mod envelope;
mod fail;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Ctx, Outcome, SimulateOpts};
use fail::CliError;

#[derive(Parser)]
#[command(
    name = "kdcalc",
    version,
    about = "Kirkwood-Dirac distributions, weak values, and weak-measurement simulation",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    /// Planck constant used when converting phases to actions.
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    hbar: f64,

    /// Base seed for every randomized operation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Smallest basis overlap |<b|a>| treated as invertible.
    #[arg(long = "tolerance-overlap", global = true, default_value_t = 1e-8, allow_negative_numbers = true)]
    tolerance_overlap: f64,

    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    out: OutFormat,

    /// Run the command's internal consistency check on seeded random
    /// inputs instead of reading files (predict only).
    #[arg(long, global = true)]
    selftest: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimMode {
    Exact,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the complex joint distribution of a state over two bases.
    Kd {
        /// State file (pure or mixed).
        #[arg(long)]
        state: PathBuf,
        /// First basis file.
        #[arg(long = "basis-a")]
        basis_a: PathBuf,
        /// Second basis file.
        #[arg(long = "basis-b")]
        basis_b: PathBuf,
    },
    /// Invert a joint distribution back into its density matrix.
    Reconstruct {
        /// Distribution file, or a `kd` result envelope.
        #[arg(long)]
        kd: PathBuf,
        #[arg(long = "basis-a")]
        basis_a: PathBuf,
        #[arg(long = "basis-b")]
        basis_b: PathBuf,
    },
    /// Predict outcome probabilities in a third basis from the joint
    /// distribution and compare with direct Born probabilities.
    Predict {
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long = "basis-a")]
        basis_a: Option<PathBuf>,
        #[arg(long = "basis-b")]
        basis_b: Option<PathBuf>,
        /// Outcome basis.
        #[arg(long = "basis-m")]
        basis_m: Option<PathBuf>,
    },
    /// Re-express a joint distribution with the second basis replaced by
    /// a third.
    Transform {
        /// Distribution file, or a `kd` result envelope.
        #[arg(long)]
        kd: PathBuf,
        #[arg(long = "basis-a")]
        basis_a: PathBuf,
        #[arg(long = "basis-b")]
        basis_b: PathBuf,
        /// Replacement basis.
        #[arg(long = "basis-m")]
        basis_m: PathBuf,
    },
    /// Conditional probability of one projector between a pure
    /// preselection and postselection, with its action phase.
    Weakvalue {
        /// Preselected state file (pure).
        #[arg(long)]
        pre: PathBuf,
        /// Postselected state file (pure).
        #[arg(long)]
        post: PathBuf,
        /// Projector direction file (pure).
        #[arg(long)]
        projector: PathBuf,
    },
    /// Estimate every cell of the joint distribution with a weakly
    /// coupled pointer.
    Simulate {
        #[arg(long)]
        state: PathBuf,
        #[arg(long = "basis-a")]
        basis_a: PathBuf,
        #[arg(long = "basis-b")]
        basis_b: PathBuf,
        /// Interaction strength g, in (0, pi/2).
        #[arg(long, allow_negative_numbers = true)]
        coupling: f64,
        /// Pointer readout: exact expectation values or finite-shot
        /// sampling.
        #[arg(long, value_enum, default_value_t = SimMode::Exact)]
        mode: SimMode,
        /// Shot budget (sampled mode only).
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Check a named paradox scenario against its stored conditional
    /// probabilities.
    Scenario {
        /// One of: three-box, hardy, mub-qubit.
        name: String,
        /// Also run the pointer simulator at this coupling and report the
        /// estimates.
        #[arg(long, allow_negative_numbers = true)]
        coupling: Option<f64>,
        /// Comparison tolerance for the stored values.
        #[arg(long, default_value_t = 1e-12, allow_negative_numbers = true)]
        tolerance: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let ctx = Ctx::new(cli.seed, cli.hbar, cli.tolerance_overlap)?;

    if cli.selftest && !matches!(cli.command, Command::Predict { .. }) {
        return Err(CliError::Usage {
            message: "--selftest is only available for `predict`".to_string(),
        });
    }

    let outcome = dispatch(cli, &ctx)?;

    let rendered = match cli.out {
        OutFormat::Json => outcome.envelope.to_json(),
        OutFormat::Csv => outcome.envelope.to_csv()?,
    };
    print!("{rendered}");

    match outcome.failure {
        None => Ok(ExitCode::SUCCESS),
        Some(e) => {
            eprintln!("{}", e.diagnostic());
            Ok(ExitCode::from(e.exit_code() as u8))
        }
    }
}

fn dispatch(cli: &Cli, ctx: &Ctx) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Kd {
            state,
            basis_a,
            basis_b,
        } => commands::cmd_kd(ctx, state, basis_a, basis_b),
        Command::Reconstruct {
            kd,
            basis_a,
            basis_b,
        } => commands::cmd_reconstruct(ctx, kd, basis_a, basis_b),
        Command::Predict {
            state,
            basis_a,
            basis_b,
            basis_m,
        } => {
            if cli.selftest {
                if state.is_some() || basis_a.is_some() || basis_b.is_some() || basis_m.is_some() {
                    return Err(CliError::Usage {
                        message: "--selftest generates its own inputs; file flags are not allowed"
                            .to_string(),
                    });
                }
                return commands::cmd_predict_selftest(ctx);
            }
            match (state, basis_a, basis_b, basis_m) {
                (Some(state), Some(a), Some(b), Some(m)) => {
                    commands::cmd_predict(ctx, state, a, b, m)
                }
                _ => Err(CliError::Usage {
                    message: "predict requires --state, --basis-a, --basis-b, and --basis-m \
                              (or --selftest)"
                        .to_string(),
                }),
            }
        }
        Command::Transform {
            kd,
            basis_a,
            basis_b,
            basis_m,
        } => commands::cmd_transform(ctx, kd, basis_a, basis_b, basis_m),
        Command::Weakvalue {
            pre,
            post,
            projector,
        } => commands::cmd_weakvalue(ctx, pre, post, projector),
        Command::Simulate {
            state,
            basis_a,
            basis_b,
            coupling,
            mode,
            shots,
        } => commands::cmd_simulate(
            ctx,
            state,
            basis_a,
            basis_b,
            &SimulateOpts {
                coupling: *coupling,
                sampled: *mode == SimMode::Sampled,
                shots: *shots,
            },
        ),
        Command::Scenario {
            name,
            coupling,
            tolerance,
        } => commands::cmd_scenario(ctx, name, *coupling, *tolerance),
    }
}
