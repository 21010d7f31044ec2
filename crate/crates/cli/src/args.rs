use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qcx", version, about = "Real q-convexity and q-plurisubharmonicity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Grid q-index of a field (real Hessian, or Levi matrix with --complex).
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 21)]
        resolution: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Search for a violation of the local maximum property at level q.
    Witness {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Grid resolution for --csv export.
        #[arg(long, default_value_t = 21)]
        resolution: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Witness search on -ln d(x, boundary) of an open set.
    SetCheck {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 21)]
        resolution: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Levi criterion for -ln d(z, boundary) on the cylinder over a set.
    Tube {
        #[command(flatten)]
        set: SetArgs,
        /// Half-width of the imaginary window; "inf" for the full tube.
        #[arg(long, default_value = "inf")]
        a: String,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Nodes per axis of the grid in R^{2n}.
        #[arg(long, default_value_t = 7)]
        resolution: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Compares u on a log-domain with its pullback z -> u(ln|z1|, ..).
    Reinhardt {
        /// u in x1..xn.
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Domain of u as [[lo,hi],...]; defaults to (-1,1)^n.
        #[arg(long)]
        domain: Option<String>,
        /// Grid box in R^{2n}; defaults to [-2,2]^{2n}.
        #[arg(long = "box")]
        bounds: Option<String>,
        #[arg(long, default_value_t = 21)]
        resolution: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sweeps planar sets onto the graph of f and tests the continuity principle.
    GraphDemo {
        /// Component of f in x1..xn; repeat for each output.
        #[arg(long = "f", required = true, allow_hyphen_values = true)]
        f: Vec<String>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Number of outputs; must match the count of --f.
        #[arg(long)]
        k: Option<usize>,
        /// Chord start as comma-separated coordinates; defaults to -1.
        #[arg(long, allow_hyphen_values = true)]
        x1: Option<String>,
        /// Chord end; defaults to +1.
        #[arg(long, allow_hyphen_values = true)]
        x2: Option<String>,
        /// Chord parameter of the touching point; scanned when omitted.
        #[arg(long, allow_hyphen_values = true)]
        t0: Option<f64>,
        #[arg(long, default_value_t = 32)]
        t_steps: usize,
        #[arg(long, default_value_t = 41)]
        s_steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sup-convolution smoothing and approximation from above.
    Regularize {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0.2)]
        radius: f64,
        #[arg(long, value_enum, default_value_t = Profile::Polynomial)]
        profile: Profile,
        /// Approximation level k >= 1.
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 41)]
        resolution: usize,
        /// Finite-difference stride (in nodes) on the output grid.
        #[arg(long, default_value_t = 2)]
        stride: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Profile {
    Polynomial,
    Bump,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Expression in x1..xn (or x1..xn, y1..yn with --complex).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "field")]
    pub expr: Option<String>,
    /// Real dimension, or complex dimension with --complex.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Field spec as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub field: Option<String>,
    /// Treat the field as a function on C^n and use Levi matrices.
    #[arg(long)]
    pub complex: bool,
    /// Grid box as [[lo,hi],...]; defaults to [-1,1]^n.
    #[arg(long = "box")]
    pub bounds: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SetArgs {
    /// Open set as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub set: String,
    /// Search box as [[lo,hi],...]; defaults to the set's bounding box
    /// clipped to [-1,1]^n.
    #[arg(long = "box")]
    pub bounds: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 64)]
    pub slices: usize,
    #[arg(long, default_value_t = 128)]
    pub boundary_samples: usize,
    #[arg(long, default_value_t = 256)]
    pub interior_samples: usize,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative zero band for eigenvalue signs.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "QCX_THREADS")]
    pub threads: Option<usize>,
    /// Include per-point records in the report.
    #[arg(long)]
    pub records: bool,
    /// Export the sampled field as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
