use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "scenery",
    version,
    about = "Scenery statistics, walk distinguishability, and the reconstructivity rank test on small finite groups",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// Write the output to a file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; csv only for tabular reports (condition, theorem2, explore)
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Cap on tensor/table cells (default 2^24; SCENERY_MAX_CELLS overrides
    /// the default, this flag overrides both)
    #[arg(long, global = true)]
    pub max_cells: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// How to find the group: a built-in descriptor (Z4, D3, Q8, Z2xZ2, ...) or
/// a path to a group-table JSON file. Custom groups need `--reps` for any
/// command that touches representations.
#[derive(Debug, Args)]
pub struct GroupArgs {
    /// Group descriptor or path to a group JSON file
    #[arg(long)]
    pub group: String,

    /// Representation file for custom groups (JSON list of {degree, matrices})
    #[arg(long)]
    pub reps: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in groups or verify a group table
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },

    /// Emit the verified irreducible representations as a representation file
    Irreps {
        #[command(flatten)]
        group: GroupArgs,
    },

    /// Fourier transform of a function at every irreducible
    Ft {
        #[command(flatten)]
        group: GroupArgs,
        /// Bitstring ("1100"), inline JSON array, or path to a JSON array
        #[arg(long)]
        values: String,
    },

    /// Spatial autocorrelation of a scenery
    Autocorr {
        #[command(flatten)]
        group: GroupArgs,
        /// Scenery bitstring in element-index order
        #[arg(long)]
        scenery: String,
    },

    /// Multispectrum tensor of a scenery (bare tensor-file JSON)
    Multispectrum {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        scenery: String,
        /// Tensor order
        #[arg(long, default_value_t = 2)]
        n: usize,
    },

    /// Temporal autocorrelation / multispectrum along both routes
    Bstats {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        scenery: String,
        /// uniform | point:<idx> | random:<seed> | inline JSON | file
        #[arg(long)]
        gamma: String,
        /// Comma-separated lags; one lag means plain autocorrelation
        #[arg(long, value_delimiter = ',', required = true)]
        lags: Vec<u32>,
    },

    /// Rank verdict for the reconstructivity condition at (gamma, n)
    Condition {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        gamma: String,
        /// Tensor order of the system
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Lag bound (default |G|)
        #[arg(long)]
        lmax: Option<usize>,
        /// Relative pivot threshold for the rank decision
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// Null witness of the condition system, if any
    Witness {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// Rank-deficiency survey over sampled step laws (non-abelian groups)
    Theorem2 {
        #[command(flatten)]
        group: GroupArgs,
        /// Number of random step laws on top of uniform and the point masses
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// Compare the observation processes of two sceneries
    Distinguish {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 8)]
        horizon: u32,
        #[arg(long, default_value_t = 3)]
        order_bound: usize,
        /// Largest lag in the moment comparison (default |G|)
        #[arg(long)]
        lag_bound: Option<usize>,
    },

    /// Rebuild a scenery from an order-|G| multispectrum
    Reconstruct {
        #[command(flatten)]
        group: GroupArgs,
        /// Compute the tensor from this scenery first (round-trip mode)
        #[arg(long, conflicts_with = "from_tensor")]
        from_scenery: Option<String>,
        /// Load the tensor from a tensor-file JSON
        #[arg(long)]
        from_tensor: Option<PathBuf>,
    },

    /// Scan every pair of scenery shift-classes on a small group
    Explore {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 3)]
        order_bound: usize,
        #[arg(long, default_value_t = 8)]
        horizon: u32,
        /// Include wall-clock timing in the report (breaks byte-for-byte
        /// reproducibility of the output, so it is opt-in)
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum GroupAction {
    /// List the built-in roster
    List,
    /// Run the full axiom check on a group
    Verify {
        #[command(flatten)]
        group: GroupArgs,
    },
}
