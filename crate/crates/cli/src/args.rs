use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "boxmagic", version, about = "Eigenvalue tables, box diagrams and quadrature checks for conformal box integrals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Normalization,
    Poisson,
    LemmaZp,
    Collapse,
    Orthogonality,
    Conformal,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Phi1ConstantArg {
    /// pi^3/3
    PiCubed,
    /// pi^2/3
    PiSquared,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues mu^(n)_k of the n-loop ladder operator.
    Mu {
        #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..=16))]
        loops: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
        k_max: u32,
    },
    /// Coefficients a^k(n, p), p = 0..=k.
    Acoeff {
        #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..=16))]
        loops: u32,
        #[arg(long, short, value_parser = clap::value_parser!(u32).range(0..=64))]
        k: u32,
    },
    /// Enumerate the n-loop box diagrams, optionally writing DOT files.
    Diagrams {
        #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..=5))]
        loops: u32,
        /// Directory for boxdiag_n{n}_{index}.dot files; created if missing.
        #[arg(long)]
        dot_dir: Option<PathBuf>,
    },
    /// Check that every n-loop diagram maps the generators like the ladder.
    Magic {
        #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..=4))]
        loops: u32,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(0..=16))]
        k_max: u32,
    },
    /// Run quadrature checks of the integral identities.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Radius R of the integration cycles.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Nodes per dimension for every check (default: per check).
        #[arg(long)]
        nodes: Option<usize>,
        /// Tolerance replacing every default tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for the sampled points.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Shorthand for --format json.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the ladder functions Phi^(1), Phi^(2).
    Phi {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        level: u32,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        /// Constant term of Phi^(1) (default: the build-time choice).
        #[arg(long, value_enum)]
        phi1_constant: Option<Phi1ConstantArg>,
    },
}
