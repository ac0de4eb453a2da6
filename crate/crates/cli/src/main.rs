//! `leafspace`: exact leaf-space dynamics from the command line.
//!
//! Exact values are printed in the qfield grammar (`p/q` or
//! `a+b*sqrt(d)`); floats appear only in numeric evidence fields, with 17
//! significant digits. Output is deterministic for a given input and seed.

mod commands;
mod error;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "leafspace", version, about = "Exact leaf-space dynamics for slithered foliations")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// Action config: {"d": 2, "t": qnum, "s": qnum, "beta_l"?: map, "beta_r"?: map}.
    #[arg(long, short)]
    config: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Adversarial,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AccountingArg {
    /// `t` per level.
    PerLevel,
    /// `t` for the first level, `2t` for each later one.
    DoubleAfterFirst,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Translation number of a periodic PL map, exact or as a rigorous bracket.
    Rotnum {
        /// Map file: {"period": qnum, "breakpoints": [{"x": qnum, "y": qnum}, ...]}.
        #[arg(long, short)]
        map: PathBuf,
        /// Largest bracket width.
        #[arg(long, default_value = "1/1000000")]
        eps: String,
        /// Largest orbit period tried for an exact answer.
        #[arg(long, default_value_t = 16)]
        max_denom: u32,
    },
    /// Translations commuting with a PL map, and its fixed points.
    Periods {
        #[arg(long, short)]
        map: PathBuf,
    },
    /// Builds the normalized glued action from a config.
    BuildAction(ConfigArg),
    /// Evaluates a group word, e.g. "beta_l^2 beta_r^-1 alpha_l".
    EvalWord {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, short)]
        word: String,
        /// Points at which to evaluate the word (repeatable).
        #[arg(long = "at")]
        at: Vec<String>,
        /// Compare against this word as well.
        #[arg(long)]
        compare: Option<String>,
    },
    /// Decides whether a translation commutes with both betas. Exit 0 when
    /// none does, 10 when one does.
    Certify {
        #[command(flatten)]
        config: ConfigArg,
        /// Word length bound for the bundled orbit-density evidence.
        #[arg(long, default_value_t = 6)]
        max_word_len: usize,
    },
    /// Largest gap of an orbit inside a window (numeric evidence).
    OrbitGap {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 6)]
        max_word_len: usize,
        #[arg(long, default_value = "0")]
        x0: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        window_lo: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        window_hi: String,
        /// Restrict to these generators (comma separated).
        #[arg(long, value_delimiter = ',')]
        generators: Vec<String>,
    },
    /// Bounded search for a word nesting an interval inside or around itself.
    Incompressible {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, allow_hyphen_values = true)]
        lo: String,
        #[arg(long, allow_hyphen_values = true)]
        hi: String,
        #[arg(long, default_value_t = 4)]
        max_word_len: usize,
    },
    /// Checks |d_i - d_j| <= (n+1) r on random leaf pairs of a random chain.
    MetricLemma {
        #[command(flatten)]
        config: ConfigArg,
        /// Piece pattern over L and R.
        #[arg(long, default_value = "LRLR")]
        pattern: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        i: usize,
        /// Defaults to the last cylinder.
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Progress ledger for a curve crossing n pieces.
    ConeProgress {
        #[arg(long = "T")]
        t: String,
        #[arg(long)]
        r: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = PolicyArg::Adversarial)]
        policy: PolicyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Searches distortion signs for a trace whose progress stays bounded.
    StallSearch {
        #[arg(long = "T")]
        t: String,
        #[arg(long)]
        r: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Shadow length sum t / lambda^i against curve length.
    ShearShadow {
        #[arg(long, default_value = "1")]
        t: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = AccountingArg::PerLevel)]
        accounting: AccountingArg,
    },
    /// Exploratory trace of a transverse interval through repeated shears.
    ShearHolonomy {
        #[arg(long)]
        lambda: String,
        /// Midpoint displacement of the shear; 0 gives the identity.
        #[arg(long, default_value = "1/10")]
        delta: String,
        #[arg(long, default_value = "1/10")]
        eps: String,
        #[arg(long, default_value = "1")]
        t: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "1/1000000")]
        threshold: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lo: String,
        #[arg(long, default_value = "1")]
        hi: String,
        #[arg(long, value_enum, default_value_t = AccountingArg::PerLevel)]
        accounting: AccountingArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Runs the seeded invariant suite; exits 1 on any violation.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Multiplier on the number of randomized cases.
        #[arg(long, default_value_t = 1)]
        size: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, cli.output.as_deref()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("leafspace: {e}");
            e.exit_code()
        }
    }
}
