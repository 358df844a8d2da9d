use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gammabound::bernoulli::{self, parse_rational};
use gammabound::{Error, Rational};

mod commands;
mod decimal;

#[derive(Parser)]
#[command(name = "gammabound", version, about = "Certified enclosures of digamma, polygamma, log-gamma and gamma")]
struct Cli {
    /// Directory holding a Bernoulli number cache, loaded at start and
    /// written back on exit.
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enclose a function value to a requested tolerance.
    Eval(EvalArgs),
    /// Print the evaluation plan as JSON without evaluating.
    Plan(EvalArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Reproduce the worked digamma example at x = 1.
    Table(TableArgs),
    /// Exact Bernoulli numbers, polynomial values and root brackets.
    Bernoulli(BernoulliArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Function {
    Psi,
    Loggamma,
    Gamma,
    Polygamma,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub function: Function,
    /// Derivative order m for polygamma (ψ^(m)).
    #[arg(long)]
    pub order: Option<u32>,
    /// Argument, as a decimal or p/q.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub x: Rational,
    /// Absolute tolerance on the enclosure width.
    #[arg(long, value_parser = rational_arg, conflicts_with = "digits", required_unless_present = "digits")]
    pub eps: Option<Rational>,
    /// Decimal digits; same as --eps 1e-DIGITS.
    #[arg(long)]
    pub digits: Option<u32>,
    #[arg(long, value_parser = rational_arg)]
    pub lambda: Option<Rational>,
    #[arg(long = "N")]
    pub n: Option<u32>,
    #[arg(long = "K")]
    pub k: Option<u64>,
    /// Working precision in bits.
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Bernoulli,
    Signs,
    Monotone,
    Sandwich,
    Oracle,
    All,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    #[arg(long)]
    pub json: bool,
    /// Count inconclusive checks as passing.
    #[arg(long)]
    pub allow_inconclusive: bool,
}

#[derive(Args)]
pub struct TableArgs {
    /// Also run the optimally truncated high-precision evaluation.
    #[arg(long)]
    pub deep: bool,
}

#[derive(Args)]
pub struct BernoulliArgs {
    #[arg(long)]
    pub n: u32,
    /// Evaluate the polynomial B_n at this rational.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub at: Option<Rational>,
    /// Print the certified bracket of the root of B_n in [0, 1/2].
    #[arg(long)]
    pub lambda0: bool,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Process exit status.
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_TOLERANCE: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::InvalidTruncation { .. } | Error::Parse(_) => EXIT_DOMAIN,
        Error::UnreachableTolerance { .. } => EXIT_TOLERANCE,
        Error::Inconsistent(_) | Error::Io(_) => EXIT_VERIFY,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = cli.cache_dir.as_ref().map(|d| d.join("bernoulli.txt"));
    if let Some(path) = &cache {
        if path.exists() {
            if let Err(e) = bernoulli::load_cache(path) {
                eprintln!("warning: ignoring Bernoulli cache {}: {e}", path.display());
            }
        }
    }
    let result = match cli.command {
        Command::Eval(a) => commands::eval(&a),
        Command::Plan(a) => commands::plan(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Table(a) => commands::table(&a),
        Command::Bernoulli(a) => commands::bernoulli(&a),
    };
    if let (Some(path), Some(dir)) = (&cache, &cli.cache_dir) {
        let saved = std::fs::create_dir_all(dir).map_err(Error::from).and_then(|_| bernoulli::save_cache(path));
        if let Err(e) = saved {
            eprintln!("warning: could not write Bernoulli cache {}: {e}", path.display());
        }
    }
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
