use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "szlab",
    version,
    about = "Progression counts, Gowers norms and friends over Z/NZ"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Prime modulus.
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    /// First polynomial, e.g. `y` or `3*y^2-2*y`.
    #[arg(long = "P", global = true, default_value = "y")]
    #[serde(rename = "P")]
    pub p_poly: String,
    /// Second polynomial.
    #[arg(long = "Q", global = true, default_value = "y^2")]
    #[serde(rename = "Q")]
    pub q_poly: String,
    #[arg(long, global = true, default_value = "random:unit")]
    pub f: String,
    #[arg(long, global = true, default_value = "random:unit")]
    pub g: String,
    #[arg(long, global = true, default_value = "random:unit")]
    pub k: String,
    #[arg(long, global = true, default_value = "random:unit")]
    pub p: String,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for the compute kernels; results do not depend on it.
    #[arg(long, global = true, env = "SZLAB_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Inequalities,
    Identities,
    Oracles,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualKind {
    Fgk,
    Gkp,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecomposeKind {
    FourierLinf,
    GowersUs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Greedy,
    Both,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// U^s norm of --f.
    Norm {
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Use the direct 2^s-fold sum instead of the recursive path.
        #[arg(long)]
        direct: bool,
    },
    /// Best quadratic-phase correlation of --f.
    U3,
    /// Lambda and its linear counterpart for (--f, --g, --k, --p).
    Count,
    /// Level-t count for a family of polynomials.
    CountSt {
        /// Comma-separated polynomials; defaults to --P,--Q.
        #[arg(long, value_delimiter = ',')]
        polys: Vec<String>,
        #[arg(long)]
        t: Option<usize>,
        /// `omega=spec`, repeatable; other corners use --f with the seed shifted by omega.
        #[arg(long = "corner")]
        corners: Vec<String>,
    },
    /// Gap between the two counts, optionally along a ladder of moduli.
    Gap {
        #[arg(long, value_delimiter = ',')]
        ladder: Vec<u64>,
    },
    /// Three-point count against the product of means.
    ThreeTerm,
    /// Dual function of a triple.
    Dual {
        #[arg(long, value_enum, default_value_t = DualKind::Fgk)]
        which: DualKind,
        /// Shift vector for `--which h`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        h: Vec<i64>,
    },
    /// Certified three-piece decomposition of --f.
    Decompose {
        #[arg(long, value_enum, default_value_t = DecomposeKind::FourierLinf)]
        kind: DecomposeKind,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// eps1,eps2,eps3,eps4.
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.05, 0.01, 0.2])]
        eps: Vec<f64>,
        /// Weight slack of the dual greedy (gowers-us only).
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        /// Rescale --f to unit L2 norm first.
        #[arg(long)]
        normalize: bool,
    },
    /// Fejer approximation of a Lipschitz function on the torus.
    Fejer {
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// `mode:k=K` or `cones:count=C`.
        #[arg(long, default_value = "cones:count=3")]
        shape: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Samples per axis; chosen from the Lipschitz constant when absent.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Rank quadratic phases (alpha, beta) by correlation with --k over y.
    ScanPhase {
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// PET induction trace.
    Pet {
        /// Comma-separated polynomials; defaults to --P,--Q.
        #[arg(long, value_delimiter = ',')]
        polys: Vec<String>,
    },
    /// Largest progression-free sets.
    Extremal {
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[arg(long, value_delimiter = ',')]
        ladder: Vec<u64>,
        /// Greedy runs per modulus, seeds --seed, --seed+1, ...
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
    /// Randomized verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm { .. } => "norm",
            Command::U3 => "u3",
            Command::Count => "count",
            Command::CountSt { .. } => "count-st",
            Command::Gap { .. } => "gap",
            Command::ThreeTerm => "three-term",
            Command::Dual { .. } => "dual",
            Command::Decompose { .. } => "decompose",
            Command::Fejer { .. } => "fejer",
            Command::ScanPhase { .. } => "scan-phase",
            Command::Pet { .. } => "pet",
            Command::Extremal { .. } => "extremal",
            Command::Verify { .. } => "verify",
        }
    }

    pub fn supports_csv(&self) -> bool {
        matches!(self, Command::Gap { .. } | Command::Extremal { .. })
    }
}
