use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "couplex", version, about = "Optimal couplings, guessing and resolvability calculators")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Logarithm base: e (default), 2, or any positive number other than 1.
    #[arg(long, global = true, default_value = "e")]
    pub base: String,
    /// Rescale input distributions that do not sum to one.
    #[arg(long, global = true)]
    pub normalize: bool,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Group {
    /// Distances, entropies and product laws.
    #[command(subcommand)]
    Dist(DistCmd),
    /// Transportation-polytope couplings.
    #[command(subcommand)]
    Couple(CoupleCmd),
    /// Maximal guessing couplings.
    #[command(subcommand)]
    Guess(GuessCmd),
    /// Exponents and product-space constructions.
    #[command(subcommand)]
    Asym(AsymCmd),
    /// Resolvability: feasible inputs, exact and one-shot bounds.
    #[command(subcommand)]
    Resolve(ResolveCmd),
    /// Redundancy, stealth bounds, common information, capacity.
    #[command(subcommand)]
    Stealth(StealthCmd),
    /// Second-order rates, μ(ε) and maximal correlation.
    #[command(subcommand)]
    Calc(CalcCmd),
}

#[derive(Args, Debug)]
pub struct Pair {
    #[arg(long)]
    pub p: PathBuf,
    #[arg(long)]
    pub q: PathBuf,
}

#[derive(Args, Debug)]
pub struct GuessPair {
    #[arg(long)]
    pub px: PathBuf,
    #[arg(long)]
    pub py: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum DistCmd {
    Tv(Pair),
    Kl(Pair),
    Entropy {
        #[arg(long)]
        p: PathBuf,
    },
    /// Rényi entropy of --p, or Arimoto conditional entropy H_α(Y|X) of --joint.
    Renyi {
        #[arg(long, conflicts_with = "joint", required_unless_present = "joint")]
        p: Option<PathBuf>,
        #[arg(long)]
        joint: Option<PathBuf>,
        #[arg(long)]
        alpha: f64,
    },
    Chernoff(Pair),
    /// n-fold product law.
    Power {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// With --p/--q: exact |P^n − Q^n| and overlap over an n range.
    /// Otherwise: the n-types over an alphabet of size --k.
    Types {
        #[arg(long, requires = "q")]
        p: Option<PathBuf>,
        #[arg(long, requires = "p")]
        q: Option<PathBuf>,
        #[arg(long, required_unless_present = "p")]
        k: Option<usize>,
        /// Block length, or a range such as 1..20 or 20..200:20.
        #[arg(long)]
        n: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CoupleCmd {
    Transport {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        cost: PathBuf,
    },
    Maximal(Pair),
    /// Coupling minimising ℙ{d(X, Y) > threshold}.
    Excess {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        threshold: f64,
    },
    Minent {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value_t = MinentMode::Exact)]
        mode: MinentMode,
    },
    Vertices(Pair),
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum MinentMode {
    Exact,
    Greedy,
}

#[derive(Subcommand, Debug)]
pub enum GuessCmd {
    Exact {
        #[command(flatten)]
        pair: GuessPair,
        /// Cap on the search size.
        #[arg(long)]
        cap: Option<usize>,
    },
    Greedy(GuessPair),
    Check(GuessPair),
    /// Product-blocklength scan; CSV columns n,G_lower,G_exact,H_inf_c,fano_Hc_upper.
    Scan {
        #[command(flatten)]
        pair: GuessPair,
        #[arg(long)]
        n: String,
        /// Also run the exhaustive search where it fits.
        #[arg(long)]
        exact: bool,
    },
    Cascade {
        #[command(flatten)]
        pair: GuessPair,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
    },
    Exponents(GuessPair),
}

#[derive(Subcommand, Debug)]
pub enum AsymCmd {
    Minmaxkl(Pair),
    ExcessExponent {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        threshold: f64,
    },
    /// Cramér exponent of the per-letter cost under a joint law.
    Cramer {
        #[arg(long)]
        joint: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        level: f64,
        #[arg(long, value_enum, default_value_t = Side::Upper)]
        side: Side,
    },
    Typecouple {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        threshold: f64,
        #[arg(long)]
        n: usize,
    },
    /// Least-squares exponent of a CSV series with columns n,value.
    Fit {
        #[arg(long)]
        series: PathBuf,
        #[arg(long, value_enum, default_value_t = Transform::Value)]
        transform: Transform,
        /// Reference exponent to compare the slope against.
        #[arg(long)]
        reference: Option<f64>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Side {
    Upper,
    Lower,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Transform {
    Value,
    Complement,
}

#[derive(Subcommand, Debug)]
pub enum ResolveCmd {
    Feasible {
        #[arg(long)]
        w: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    Exact {
        #[arg(long)]
        w: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    /// One-shot bounds for a setup {source, channel, target, tau}.
    Oneshot {
        #[arg(long)]
        setup: PathBuf,
        /// Comma-separated τ values overriding the setup's own.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
    },
    Montecarlo {
        #[arg(long)]
        setup: PathBuf,
        /// Channel from the source alphabet to the encoder inputs.
        #[arg(long)]
        conditional: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Args, Debug)]
pub struct StealthInputs {
    #[arg(long)]
    pub wy: PathBuf,
    #[arg(long)]
    pub wz: PathBuf,
    #[arg(long)]
    pub pz: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum StealthCmd {
    Check(StealthInputs),
    Bounds(StealthInputs),
    Gk {
        #[arg(long)]
        joint: PathBuf,
    },
    /// I(X;Y) at a fixed input law, or the sufficient-statistic grouping of --w alone.
    Capacity {
        #[arg(long)]
        px: Option<PathBuf>,
        #[arg(long)]
        w: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum CalcCmd {
    SecondOrder {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Direction::Source)]
        direction: Direction,
    },
    Mu {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Maximal correlation of --joint, or the conditional version of --conditional
    /// ({"x","y","w","slices"}).
    Maxcorr {
        #[arg(long, required_unless_present = "conditional", conflicts_with = "conditional")]
        joint: Option<PathBuf>,
        #[arg(long)]
        conditional: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Direction {
    Source,
    Resolvability,
}
