use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tildelab::commands::{self, CommandError, EvolveArgs, Method, SearchArgs};
use tildelab::selftest::{self, SelfTestOptions};
use tildelab::Format;
use tildelab_core::search::Target;

#[derive(Parser)]
#[command(
    name = "tildelab",
    version,
    about = "Universal state inversion and distributed concurrence toolkit"
)]
struct Cli {
    /// Override the numerical tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in identity suite.
    SelfTest {
        #[arg(long, env = "TILDELAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        perturb: bool,
    },
    /// Invert a state and write the result as an operator file.
    Invert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "product")]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Linear entropies of every marginal.
    Entropies {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Distributed concurrence of a pure state.
    Cd {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check the mixed-state equality and, for pure input, the monogamy relation.
    VerifyMonogamy {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Evolve under a Hamiltonian on a subset of parties.
    Evolve {
        #[arg(long = "in")]
        input: PathBuf,
        /// 1-based party labels, e.g. `1,3`.
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<usize>,
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
        #[arg(long)]
        track_conservation: bool,
    },
    /// Randomized search for violations of the monotone conditions.
    SearchViolation {
        #[arg(long)]
        d1: usize,
        #[arg(long, value_enum)]
        target: TargetArg,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, env = "TILDELAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write the best state here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The explicit four-party counterexample and its verdicts.
    Counterexample {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum TargetArg {
    Cd,
    Cd2,
}

fn run(cli: Cli) -> Result<tildelab::RunReport, CommandError> {
    let tol = cli.tol;
    match cli.command {
        Command::SelfTest { seed, perturb } => {
            let mut opts = SelfTestOptions {
                seed,
                perturb,
                ..Default::default()
            };
            if let Some(t) = tol {
                opts.tolerance = t;
            }
            Ok(selftest::run(opts)?)
        }
        Command::Invert { input, method, out } => {
            commands::invert(&input, method, out.as_deref(), tol)
        }
        Command::Entropies { input, workers } => commands::entropies(&input, workers, tol),
        Command::Cd { input } => commands::cd(&input, tol),
        Command::VerifyMonogamy { input, workers } => {
            commands::verify_monogamy(&input, workers, tol)
        }
        Command::Evolve {
            input,
            subset,
            hamiltonian,
            steps,
            dt,
            track_conservation,
        } => commands::evolve(EvolveArgs {
            input: &input,
            subset: &subset,
            hamiltonian: &hamiltonian,
            steps,
            dt,
            track_conservation,
            tol,
        }),
        Command::SearchViolation {
            d1,
            target,
            trials,
            seed,
            workers,
            out,
        } => commands::search_violation(SearchArgs {
            d1,
            target: match target {
                TargetArg::Cd => Target::Cd,
                TargetArg::Cd2 => Target::Cd2,
            },
            trials,
            seed,
            workers,
            out: out.as_deref(),
            tol,
        }),
        Command::Counterexample { out } => commands::counterexample(out.as_deref(), tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(report) => {
            print!("{}", report.render(format));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
