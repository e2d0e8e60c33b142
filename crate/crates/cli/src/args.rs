use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mcompat", version, about = "Compatibility checks for classical marginals and quantum reduced states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Theorem2,
    Theorem3,
    Wigner,
    Oracle,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Criterion {
    Polygon,
    Higuchi,
    Bravyi,
    Hzg,
    Coleman,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Polygon => "polygon",
            Criterion::Higuchi => "higuchi",
            Criterion::Bravyi => "bravyi",
            Criterion::Hzg => "hzg",
            Criterion::Coleman => "coleman",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide compatibility of a classical marginal family.
    CheckClassical {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        method: Method,
    },
    /// Rebuild a joint distribution from a compatible classical family.
    Reconstruct {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the Bell-Wigner operator of three two-qubit reductions.
    CheckQuantum3 { path: PathBuf },
    /// Search numerically for a three-qubit state with the given reductions.
    Probe {
        path: PathBuf,
        #[arg(long, default_value_t = compat_core::quantum::DEFAULT_PROBE_ITERATIONS)]
        max_iter: usize,
        #[arg(long, default_value_t = compat_core::quantum::TOL_PROBE)]
        tol: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Candidate file; defaults to `<input stem>.candidate.json` next to the input.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The four-qubit state whose Δ₁ has eigenvalue -1/2.
    CounterexampleN4,
    /// Evaluate a one-party spectral criterion.
    CheckSpectra {
        path: PathBuf,
        /// Overrides the criterion named in the file.
        #[arg(long, value_enum)]
        criterion: Option<Criterion>,
        /// Number of fermions (coleman).
        #[arg(long)]
        fermions: Option<usize>,
    },
    /// Write random density matrices (and, for three qubits, their reductions).
    Sample {
        #[arg(long)]
        qubits: usize,
        /// Defaults to full rank.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Eigenvalue range of Δ_A for a family of reductions of n qubits.
    GenDelta {
        path: PathBuf,
        /// Odd subset A as comma-separated 1-based indices, e.g. `2,3,4`.
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<usize>,
    },
}
