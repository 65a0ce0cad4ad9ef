//! `choquet`: price contingent claims under non-additive pricing rules,
//! check option parities and search for arbitrage.

mod commands;
mod error;
mod io;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Context;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "choquet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tolerance for parity residuals and spread signs.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = parse_tol)]
    tol: f64,

    /// Seed for sampled payoffs and the portfolio probe.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Choquet,
    Sipos,
    Linear,
}

impl From<Rule> for choquet_pricing::RuleKind {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Choquet => choquet_pricing::RuleKind::Choquet,
            Rule::Sipos => choquet_pricing::RuleKind::Sipos,
            Rule::Linear => choquet_pricing::RuleKind::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Pcp,
    Cpp,
    Dcp,
    Dcpstar,
}

impl From<Kind> for choquet_pricing::Parity {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Pcp => choquet_pricing::Parity::Pcp,
            Kind::Cpp => choquet_pricing::Parity::Cpp,
            Kind::Dcp => choquet_pricing::Parity::Dcp,
            Kind::Dcpstar => choquet_pricing::Parity::DcpStar,
        }
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err("tolerance must be a positive number".into())
    }
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Capacity file (full table or generator spec).
    #[arg(long)]
    pub capacity: PathBuf,

    #[arg(long, value_enum, default_value_t = Rule::Choquet)]
    pub rule: Rule,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ask, bid, spread and Šipoš value of each payoff.
    Price {
        #[command(flatten)]
        cap: CapacityArgs,
        #[arg(long, required = true)]
        payoff: Vec<PathBuf>,
    },
    /// Bid / Šipoš / ask sandwich and the sign of bid-ask spreads.
    Spread {
        #[command(flatten)]
        cap: CapacityArgs,
        #[arg(long)]
        payoff: Vec<PathBuf>,
    },
    /// Sweep one parity over payoffs and strikes.
    Parity {
        #[command(flatten)]
        cap: CapacityArgs,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Payoffs to check; a standard seeded set is used when omitted.
        #[arg(long)]
        payoff: Vec<PathBuf>,
        /// Failures listed in full; the rest are counted.
        #[arg(long, default_value_t = 20)]
        max_failures: usize,
    },
    /// Decide absence of arbitrage and print a witness or certificate.
    Arbitrage {
        #[command(flatten)]
        cap: CapacityArgs,
        /// Solve the LP in exact rational arithmetic.
        #[arg(long)]
        exact: bool,
        /// Random portfolios replayed as a cross-check (0 to skip).
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Expand a generator spec into a full capacity file.
    Generate {
        /// Generator spec, bare or wrapped in {"generate": ...}.
        #[arg(long)]
        spec: PathBuf,
    },
    /// Run every analysis and emit one combined document.
    Report {
        #[command(flatten)]
        cap: CapacityArgs,
        #[arg(long)]
        payoff: Vec<PathBuf>,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        max_failures: usize,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut ctx = Context::new(cli.tol, cli.seed, cli.format);
    let outcome = match cli.command {
        Command::Price { cap, payoff } => commands::price(&mut ctx, &cap, &payoff)?,
        Command::Spread { cap, payoff } => commands::spread(&mut ctx, &cap, &payoff)?,
        Command::Parity {
            cap,
            kind,
            payoff,
            max_failures,
        } => commands::parity(&mut ctx, &cap, kind.into(), &payoff, max_failures)?,
        Command::Arbitrage { cap, exact, trials } => commands::arbitrage(&mut ctx, &cap, exact, trials)?,
        Command::Generate { spec } => commands::generate(&mut ctx, &spec)?,
        Command::Report {
            cap,
            payoff,
            exact,
            trials,
            max_failures,
        } => commands::report(&mut ctx, &cap, &payoff, exact, trials, max_failures)?,
    };
    let rendered = ctx.render(outcome.json, outcome.text.as_deref());
    match &cli.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    Ok(outcome.finding)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("choquet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
