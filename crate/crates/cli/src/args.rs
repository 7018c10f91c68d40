use clap::{Args, Parser, Subcommand, ValueEnum};

/// Canonical maximally entangled states, teleportation and LOCC
/// discrimination checks.
#[derive(Debug, Parser)]
#[command(name = "melscope", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit canonical states and their Weyl operators.
    Bell {
        #[arg(long)]
        d: usize,
        #[arg(long, requires = "m")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        m: Option<usize>,
    },
    /// Teleport a probe through a canonical channel with the standard
    /// protocol and list every measurement branch.
    Teleport {
        #[arg(long)]
        d: usize,
        /// Channel index as `N,M` or `N:M`.
        #[arg(long)]
        channel: String,
        /// `zero`, `uniform`, or comma-separated amplitudes `re+imi`.
        #[arg(long)]
        probe: String,
    },
    /// Two-copy discrimination of the full canonical basis.
    TwoCopy {
        #[arg(long)]
        d: usize,
        /// Run every hidden index.
        #[arg(long, conflicts_with = "hidden")]
        all: bool,
        /// Hidden index as `N,M` or `N:M` (default `0,0`).
        #[arg(long)]
        hidden: Option<String>,
    },
    /// Search for a probe separating a set of channels.
    CheckSet(CheckSetArgs),
    /// Search for one probe that separates the set on every outcome of the
    /// standard protocol.
    CheckSetConjugated(CheckSetArgs),
    /// Classify all k-subsets of the canonical basis.
    Census {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Relative-entropy bound for d + 1 canonical states.
    EntropyBound {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        set: String,
    },
    /// Local unitaries relating a two-qubit orthogonal pair to the canonical
    /// basis.
    Canonicalize2 {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
    },
}

#[derive(Debug, Args)]
pub struct CheckSetArgs {
    #[arg(long)]
    pub d: usize,
    /// Comma-separated indices, `NM` (d ≤ 9) or `N:M`.
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    pub set: Option<String>,
    /// Built-in non-canonical set.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iterations: usize,
    /// Overrides `MELSCOPE_SEED`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// `{I, cyclic shift, Fourier}` in dimension 3.
    Dissociation,
}
