mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "dyadic-sharp", version, about = "Dyadic operators, weight audits and sharpness experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator to a step function.
    Transform(Common),
    /// Report A_p, bump and B_p constants for weights and Young functions.
    Audit(Common),
    /// Fit operator-norm growth against the A_p constant over a weight family.
    Sweep(Common),
    /// Square-function growth on the lacunary extremal example.
    Extremal(Common),
    /// Build the median decomposition of a function and check its pointwise bound.
    LernerVerify(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config for the subcommand.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when omitted (required by `sweep`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "DYADIC_SHARP_THREADS")]
    threads: Option<usize>,
}

pub enum Failure {
    /// Unreadable or invalid config or input file.
    Config(String),
    /// A computation refused its inputs.
    Domain(dyadic_sharp::Error),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Domain(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Domain(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

type Runner = fn(&Common) -> Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, common): (Runner, &Common) = match &cli.command {
        Command::Transform(c) => (commands::transform, c),
        Command::Audit(c) => (commands::audit, c),
        Command::Sweep(c) => (commands::sweep, c),
        Command::Extremal(c) => (commands::extremal, c),
        Command::LernerVerify(c) => (commands::lerner_verify, c),
    };
    let result = set_threads(common.threads).and_then(|()| run(common));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dyadic-sharp: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn set_threads(threads: Option<usize>) -> Result<(), Failure> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(Failure::Config("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Io(e.to_string()))
}
