//! `oalg`: command-line front end for ordered algebras, closures, quotients, amalgams and schemes.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "oalg", version, about = "Ordered algebras, pushouts of special amalgams and zigzag normalization")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SearchFlags {
    /// Maximal number of relation steps in a scheme.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_scheme_len: u64,
    /// Maximal number of operation symbols in any term of a scheme.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_term_ops: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a `.sig`, `.oalg`, `.amalgam` or `.hom` file, or a `.scheme` against `--amalgam`.
    Validate {
        file: PathBuf,
        /// Amalgam a scheme file refers to.
        #[arg(long)]
        amalgam: Option<PathBuf>,
    },
    /// The compatible quasiorder generated by pairs, with witnesses.
    Closure {
        algebra: PathBuf,
        /// Generating pairs `a:b`, added to the file's `pair` lines.
        pairs: Vec<String>,
        /// Generate the order-congruence instead.
        #[arg(long)]
        congruence: bool,
    },
    /// Quotient by the order-congruence (or, with `--nonregular`, the quasiorder) generated by pairs.
    Quotient {
        algebra: PathBuf,
        /// Generating pairs `a:b`, added to the file's `pair` lines.
        pairs: Vec<String>,
        #[arg(long)]
        nonregular: bool,
    },
    /// Search for schemes proving `s = t` in the pushout.
    PushoutEq {
        amalgam: PathBuf,
        s: String,
        t: String,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Dominion of the subalgebra generated by `--seed-elems` in a special amalgam.
    Dominion {
        /// The base algebra.
        #[arg(long)]
        special: PathBuf,
        #[arg(long, num_args = 0.., value_name = "ELEM")]
        seed_elems: Vec<String>,
        #[command(flatten)]
        search: SearchFlags,
        /// Largest separating codomain tried for elements outside the subalgebra (default: carrier size).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_codomain: Option<u64>,
    },
    /// Decide whether a homomorphism is an epimorphism by searching for a separating pair.
    Epi {
        #[arg(long)]
        hom: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_codomain: Option<u64>,
    },
    /// Rewrite a scheme into Case 1 form; with `--reverse`, extract the centre.
    Normalize {
        amalgam: PathBuf,
        scheme: PathBuf,
        #[arg(long)]
        reverse: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_iters: Option<u64>,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = oalg::selftest::DEFAULT_SEED)]
        seed: u64,
        /// Criteria to run (default: all).
        #[arg(long, num_args = 1.., value_parser = clap::value_parser!(u64).range(1..=9))]
        criteria: Vec<u64>,
        /// Disable data parallelism.
        #[arg(long)]
        sequential: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, out) = commands::run(&cli);
    print!("{out}");
    ExitCode::from(code)
}
