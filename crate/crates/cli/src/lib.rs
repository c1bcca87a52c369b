//! Command-line front end for `ekrlab`. The binary is a thin wrapper around
//! [`Cli`] and [`run`], which tests drive directly.

pub mod cache;
pub mod commands;
pub mod report;
pub mod spec;

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ekrlab::character::CharName;
use ekrlab::Exec;
use serde::Serialize;
use serde_json::json;

pub use report::{Format, Report, Status, Verdict};
pub use spec::{parse_group_spec, GroupSpec, SpecError};

pub const DEFAULT_MAX_GROUP_SIZE: usize = 400_000;

#[derive(Parser, Debug)]
#[command(
    name = "ekrlab",
    version,
    about = "Derangement graphs, derangement matrices and intersecting sets of small permutation groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// sym(n), alt(n), agl(n,2) or gens:[images;images;...]
    #[arg(long, global = true, default_value = "agl(3,2)")]
    pub group: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Defaults to $EKRLAB_CACHE, then the user cache directory.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Number of random primes for modular rank.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u16).range(1..=64))]
    pub primes: u16,
    /// Relative tolerance for floating-point comparisons.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Refuse to enumerate groups with more elements than this.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_GROUP_SIZE)]
    pub max_group_size: usize,
    /// Run every kernel on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Order, conjugacy classes, derangements and transitivity.
    Group,
    /// Spectrum of the derangement graph, exactly and (when small) densely.
    Spectrum {
        /// Skip the dense eigensolver.
        #[arg(long)]
        no_dense: bool,
    },
    /// Certified rank of the derangement matrix over the rationals.
    Rank {
        /// Use only the rows of the conjugacy class of the Jordan element.
        #[arg(long)]
        class_only: bool,
    },
    /// Sum of an irreducible character over a subset of AGL(n,2).
    Charsum {
        /// one, psi, theta, alpha or beta
        #[arg(long = "char", value_parser = parse_char)]
        character: CharName,
        /// S, H, K, G0, C, G or coset(a,b)
        #[arg(long, default_value = "S", value_parser = parse_coset)]
        coset: CosetArg,
    },
    /// A maximum intersecting set, or all of them.
    Mis {
        #[arg(long)]
        all: bool,
        /// Largest group order searched exhaustively (defaults: 2000 for one
        /// set, 200 for all of them).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// The strict EKR pipeline: ratio bound, spectrum, rank and character sums.
    Ekr,
    /// Stability inequality on random maximal intersecting sets.
    Stability {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
        sets: u32,
    },
    /// Every acceptance criterion on its fixed groups.
    ReportAll,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetArg {
    S,
    H,
    K,
    G0,
    C,
    G,
    Coset(usize, usize),
}

impl fmt::Display for CosetArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosetArg::S => write!(f, "S"),
            CosetArg::H => write!(f, "H"),
            CosetArg::K => write!(f, "K"),
            CosetArg::G0 => write!(f, "G0"),
            CosetArg::C => write!(f, "C"),
            CosetArg::G => write!(f, "G"),
            CosetArg::Coset(a, b) => write!(f, "coset({a},{b})"),
        }
    }
}

impl Serialize for CosetArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_char(s: &str) -> Result<CharName, String> {
    CharName::parse(s).ok_or_else(|| format!("unknown character `{s}` (one, psi, theta, alpha, beta)"))
}

fn parse_coset(s: &str) -> Result<CosetArg, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    Ok(match t.as_str() {
        "S" => CosetArg::S,
        "H" => CosetArg::H,
        "K" => CosetArg::K,
        "G0" => CosetArg::G0,
        "C" => CosetArg::C,
        "G" => CosetArg::G,
        _ => {
            let inner = t
                .strip_prefix("coset(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| format!("unknown subset `{s}` (S, H, K, G0, C, G or coset(a,b))"))?;
            let (a, b) = inner.split_once(',').ok_or("coset needs two points: coset(a,b)")?;
            let pt = |x: &str| x.parse::<usize>().map_err(|_| format!("`{x}` is not a point"));
            CosetArg::Coset(pt(a)?, pt(b)?)
        }
    })
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
    #[error(transparent)]
    Internal(#[from] anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 1,
            Failure::Infeasible(_) => 3,
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ekrlab::Error> for Failure {
    fn from(e: ekrlab::Error) -> Self {
        use ekrlab::Error as E;
        match e {
            E::GroupTooLarge { .. } | E::OverCap { .. } => Failure::Infeasible(e.to_string()),
            E::Dimension { n, max, .. } if n > max => Failure::Infeasible(e.to_string()),
            E::Dimension { .. } | E::Degenerate(_) | E::NoGenerators | E::PointOutOfRange { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Internal(other.into()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub group: GroupSpec,
    pub command: Command,
    pub format: Format,
    /// `None` disables caching.
    pub cache_dir: Option<PathBuf>,
    pub primes: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_group_size: usize,
    pub exec: Exec,
}

impl RunConfig {
    pub fn new(group: GroupSpec, command: Command) -> Self {
        Self {
            group,
            command,
            format: Format::Json,
            cache_dir: None,
            primes: 3,
            tol: 1e-6,
            seed: 0x5eed,
            max_group_size: DEFAULT_MAX_GROUP_SIZE,
            exec: Exec::default(),
        }
    }

    fn inputs(&self) -> serde_json::Value {
        json!({
            "group": self.group.to_string(),
            "command": self.command,
            "primes": self.primes,
            "tol": self.tol,
            "seed": self.seed,
            "max_group_size": self.max_group_size,
            "exec": if self.exec.is_parallel() { "parallel" } else { "sequential" },
        })
    }
}

impl Cli {
    pub fn config(&self) -> Result<RunConfig, Failure> {
        let g = &self.global;
        if !(g.tol.is_finite() && g.tol > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {}", g.tol)));
        }
        Ok(RunConfig {
            group: parse_group_spec(&g.group)?,
            command: self.command.clone(),
            format: g.format,
            cache_dir: (!g.no_cache).then(|| cache::resolve_dir(g.cache_dir.as_deref())),
            primes: g.primes as usize,
            tol: g.tol,
            seed: g.seed,
            max_group_size: g.max_group_size,
            exec: if g.sequential { Exec::Sequential } else { Exec::Parallel },
        })
    }
}

pub fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Group => "group",
        Command::Spectrum { .. } => "spectrum",
        Command::Rank { .. } => "rank",
        Command::Charsum { .. } => "charsum",
        Command::Mis { .. } => "mis",
        Command::Ekr => "ekr",
        Command::Stability { .. } => "stability",
        Command::ReportAll => "report-all",
    }
}

/// Runs one subcommand. Usage and internal errors come back as `Err`;
/// infeasible inputs become a report with status `infeasible`.
pub fn run(cfg: &RunConfig) -> Result<Report, Failure> {
    let start = Instant::now();
    let name = subcommand_name(&cfg.command);
    let mut report = match commands::dispatch(cfg) {
        Ok((results, verdicts)) => Report::new(name, cfg.inputs(), results, verdicts),
        Err(Failure::Infeasible(reason)) => Report::infeasible(name, cfg.inputs(), reason),
        Err(e) => return Err(e),
    };
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}
