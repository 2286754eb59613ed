//! `brl`: generators, checkers, witness extraction, family listings and
//! lower-bound hunts over colorings of complete graphs.
//!
//! Exit codes: 0 property holds / found, 1 does not hold / not found,
//! 2 usage or input error, 3 search budget exhausted.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use brl_core::Rational;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

pub const EXIT_HOLDS: u8 = 0;
pub const EXIT_NOT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "brl", version, about = "Balanced Ramsey lab")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Search budget in backtracking extensions.
    #[arg(long, global = true, default_value_t = brl_core::search::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Balance threshold as `p/q`, strictly between 0 and 1.
    #[arg(long, global = true, value_parser = parse_eps)]
    pub eps: Option<Rational>,
    /// File format for graphs written by `gen`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Cgr)]
    pub format: Format,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, global = true, env = "BRL_JOBS", default_value_t = 0)]
    pub jobs: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Cgr,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Cgr => "cgr",
            Format::Json => "json",
        }
    }
}

fn parse_eps(s: &str) -> Result<Rational, String> {
    let q: Rational = s.parse().map_err(|e| format!("{e}"))?;
    if !q.in_open_unit() {
        return Err(format!("eps must lie strictly between 0 and 1, got {q}"));
    }
    Ok(q)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a host coloring and print its balance report.
    #[command(subcommand)]
    Gen(GenKind),
    /// Check a property of a host and print a JSON verdict.
    #[command(subcommand)]
    Check(CheckKind),
    /// Extract an all-colors multipartite witness and its family member.
    Extract(ExtractArgs),
    /// List the family of minimal unavoidable fully-colored graphs.
    Family {
        #[arg(long)]
        r: usize,
    },
    /// Search for balanced colorings that avoid a pattern.
    Hunt(HuntArgs),
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Paley coloring on `q` vertices (prime `q ≡ 1 mod 4`).
    Paley {
        #[arg(long)]
        q: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Two red cliques of size `n`, joined blue except for a red staircase.
    TwoBlock {
        #[arg(long)]
        n: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Each pair colored independently with the given weights.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Comma-separated `p/q` weights; uniform when omitted.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<String>>,
        /// Shuffle a fixed, as-equal-as-possible split instead of sampling.
        #[arg(long, conflicts_with = "weights")]
        balanced: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CheckKind {
    /// Is every color class at least `eps·C(n,2)`?
    Balance {
        #[arg(long)]
        host: PathBuf,
    },
    /// Does the host contain a color-consistent copy of the pattern?
    Pattern {
        #[arg(long)]
        host: PathBuf,
        /// `M:l,k` or a pattern JSON file.
        #[arg(long)]
        pattern: String,
        /// Search color maps concurrently; the embedding reported may vary.
        #[arg(long)]
        parallel: bool,
    },
    /// Does the host contain the `t`-blow-up of some family member?
    FamilyBlowup {
        #[arg(long)]
        host: PathBuf,
        #[arg(long, default_value_t = 1)]
        t: usize,
    },
    /// Is the witness file a valid fully-complete multipartite witness?
    Witness {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[arg(long)]
    pub host: PathBuf,
    /// Colors to extract; defaults to the host palette.
    #[arg(long)]
    pub r: Option<usize>,
    /// Witness output path.
    #[arg(long, short, default_value = "witness.json")]
    pub out: PathBuf,
    /// Family member and embedding output path; defaults next to `--out`.
    #[arg(long)]
    pub family_out: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub w_scale: usize,
    #[arg(long, default_value_t = 1)]
    pub beta_scale: usize,
    #[arg(long, default_value_t = 2)]
    pub k0_min: usize,
    #[arg(long, default_value_t = 10)]
    pub max_retries: u32,
    #[arg(long, default_value_t = brl_core::drc::pipeline::DEFAULT_PIPELINE_GRID_BUDGET)]
    pub grid_budget: u64,
}

#[derive(Args, Debug)]
pub struct HuntArgs {
    /// `M:l,k` or a pattern JSON file.
    #[arg(long)]
    pub pattern: String,
    /// A size `n` or an inclusive range `a..b`.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 200_000)]
    pub moves: u64,
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    /// Directory for certificates.
    #[arg(long, default_value = "certificates")]
    pub out: PathBuf,
    /// Table of finished sizes; an existing checkpoint is resumed.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

/// A finished command: its exit code and the JSON report for stdout.
pub struct Outcome {
    pub code: u8,
    pub report: Value,
}

/// Anything that ends a command before it reaches a verdict.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_HOLDS });
        }
    };
    if cli.run.jobs > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.run.jobs).build_global();
    }
    let result = match &cli.command {
        Command::Gen(kind) => commands::gen(&cli.run, kind),
        Command::Check(kind) => commands::check(&cli.run, kind),
        Command::Extract(args) => commands::extract(&cli.run, args),
        Command::Family { r } => commands::family(&cli.run, *r),
        Command::Hunt(args) => commands::hunt(&cli.run, args),
    };
    match result {
        Ok(out) => {
            io::print_report(&out.report);
            ExitCode::from(out.code)
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
