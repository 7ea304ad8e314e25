//! `gptb`: command-line access to square-bit and evengon computations.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

mod commands;
mod input;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use squarebit::geometry::{Float, Mode, Rational};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "gptb", version, about = "Channels, Birkhoff violation, RACs and convertibility for polygon theories")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Arithmetic mode.
    #[arg(long, global = true, value_enum, env = "GPTB_MODE", default_value = "exact")]
    pub mode: ModeArg,
    /// Comparison tolerance in float mode; ignored in exact mode.
    #[arg(long, global = true, env = "GPTB_TOLERANCE", default_value_t = squarebit::geometry::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "GPTB_THREADS")]
    pub threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, env = "GPTB_SEED", default_value_t = 7)]
    pub seed: u64,
    /// Output format (json unless the command says otherwise).
    #[arg(long, global = true, value_enum, env = "GPTB_FORMAT")]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Model geometry: vertices, facets, effects, measurements.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Extreme channels and channel classification.
    #[command(subcommand)]
    Channels(ChannelsCmd),
    /// Bistochastic channels outside the random-reversible hull.
    #[command(subcommand)]
    Birkhoff(BirkhoffCmd),
    /// 2↦1 random access codes with restricted encodings.
    #[command(subcommand)]
    Rac(RacCmd),
    /// State convertibility.
    #[command(subcommand)]
    Convert(ConvertCmd),
    /// Extreme points of the states reachable from a state.
    Reachable {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long, default_value = "rare")]
        set: String,
    },
    /// The two entropic monotones of a state.
    Entropy {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Local channels on composite square-bit states.
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Runs the reproduction suite and prints a pass/fail table.
    VerifyPaper {
        /// Comma-separated check ids (1-8); all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Random pairs for the convertibility check.
        #[arg(long, default_value_t = 10_000)]
        random_pairs: usize,
        /// Random draws per channel family for the monotone check.
        #[arg(long, default_value_t = 1_000)]
        monotone_cases: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ModelCmd {
    Info {
        /// `square`, `evengon:K`, or a JSON descriptor.
        #[arg(long, default_value = "square")]
        model: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ChannelsCmd {
    Enumerate {
        #[arg(long, default_value = "square")]
        model: String,
        /// Lift the default cap on polygon size.
        #[arg(long)]
        force: bool,
    },
    Check {
        /// Table name such as `[g1+,g2-]`, or channel JSON.
        #[arg(long)]
        channel: String,
        #[arg(long, default_value = "square")]
        model: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum BirkhoffCmd {
    Gap {
        #[arg(long, default_value = "square")]
        model: String,
    },
    Certificate {
        #[arg(long, conflicts_with = "collapse", required_unless_present = "collapse")]
        channel: Option<String>,
        /// Use the collapse map of the 2K-gon instead of `--channel`.
        #[arg(long)]
        collapse: Option<usize>,
        #[arg(long, default_value = "square")]
        model: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum RacCmd {
    Eval {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// rare, bisto, full or identity.
        #[arg(long, default_value = "rare")]
        set: String,
        #[arg(long, value_enum, default_value = "optimal")]
        strategy: Strategy,
    },
    Sweep {
        /// Grid p, q ∈ {½, ½ + 1/(2n), …, 1}.
        #[arg(long, default_value_t = 10)]
        n: i64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Optimal,
    Canonical,
}

#[derive(Subcommand, Debug)]
pub enum ConvertCmd {
    Check {
        /// Source state as `p,q`.
        #[arg(long)]
        from: String,
        /// Target state as `p,q`.
        #[arg(long)]
        to: String,
        #[arg(long, default_value = "rare")]
        set: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum TensorCmd {
    Act {
        /// One channel per factor (or one channel on the whole composite).
        #[arg(long, required = true)]
        channel: Vec<String>,
        /// `ent`, vertex labels such as `w2,w2`, or a JSON coordinate array.
        #[arg(long)]
        state: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, commands::CliError> {
    let cfg = &cli.config;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| commands::CliError::usage(format!("cannot configure {n} threads: {e}")))?;
    }
    match Mode::from(cfg.mode) {
        Mode::Exact => commands::dispatch::<Rational>(&cli.command, cfg),
        Mode::Float => {
            if !(cfg.tolerance > 0.0 && cfg.tolerance.is_finite()) {
                return Err(commands::CliError::usage(format!("tolerance must be positive, got {}", cfg.tolerance)));
            }
            Float::set_tolerance(cfg.tolerance).map_err(commands::CliError::from)?;
            commands::dispatch::<Float>(&cli.command, cfg)
        }
    }
}
