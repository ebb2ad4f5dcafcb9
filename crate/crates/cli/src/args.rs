use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qsep",
    version,
    about = "Entanglement detection scans for noisy multiqubit families via conditional sandwiched Tsallis relative entropy"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one criterion over an x grid and a list of orders; writes CSV.
    Scan(ScanArgs),
    /// Bisect the detection boundary in x for one criterion.
    Threshold(ThresholdArgs),
    /// Finite-q thresholds over a q grid, one column per criterion; writes CSV.
    Trace(TraceArgs),
    /// Closed-form eigenvalue tables with dense residuals and the threshold table.
    Tables,
    /// Named special cases plus the acceptance suite; exit 1 on any failure.
    Check(CheckArgs),
    /// Load or generate a state and write it as a state file.
    Convert(ConvertArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "lower")]
pub enum FamilyName {
    W,
    Ghz,
    Wwbar,
    /// Noisy custom symmetric state, needs --pure.
    Symmetric,
    /// White noise plus a qubit pure state (W by default, or --pure).
    Nonsymmetric,
    /// White noise plus a qudit pure state (generalized GHZ by default, or --pure).
    Qudit,
    Isotropic,
    Xstate,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "lower")]
pub enum CriterionName {
    Cstre,
    Ar,
    Renyi,
    Vn,
    Ppt,
    Reduction,
}

/// Where the state comes from and how it is cut.
#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub family: Option<FamilyName>,
    /// Number of parties.
    #[arg(long)]
    pub n: Option<usize>,
    /// Local dimension for the qudit family.
    #[arg(long)]
    pub d: Option<usize>,
    /// Pure-state JSON: {"dims": [...], "amplitudes": [[re, im], ...]}.
    #[arg(long, value_name = "PATH")]
    pub pure: Option<PathBuf>,
    /// Fixed density matrix instead of a family.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["family", "pure", "n", "d"])]
    pub state_file: Option<PathBuf>,
    /// "m:rest" (first m factors vs the remainder, also "m:k") or "0,2|1,3".
    /// Side A is the one left of the separator; entropies condition on B.
    #[arg(long, default_value = "1:rest")]
    pub cut: String,
    /// Evaluate symmetric families in the full 2^N space instead of the
    /// compressed symmetric-subspace representation.
    #[arg(long)]
    pub full_space: bool,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, ignore_case = true)]
    pub criterion: CriterionName,
    /// Order: a number, a comma list, or "inf".
    #[arg(long)]
    pub q: Option<String>,
    /// start:stop:step, inclusive of stop.
    #[arg(long, value_name = "START:STOP:STEP", conflicts_with = "x")]
    pub x_grid: Option<String>,
    /// Explicit parameter values, comma separated.
    #[arg(long)]
    pub x: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, ignore_case = true)]
    pub criterion: CriterionName,
    #[arg(long)]
    pub q: Option<String>,
    /// Bisection width at which to stop.
    #[arg(long, default_value_t = qsep::separability::DEFAULT_TOL)]
    pub tol: f64,
    /// Search interval lo:hi (defaults to the family domain).
    #[arg(long, value_name = "LO:HI")]
    pub bracket: Option<String>,
    /// Append the result as a CSV row.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Comma list drawn from cstre, ar, renyi.
    #[arg(long, default_value = "cstre,ar")]
    pub criteria: String,
    /// Comma list of orders in (1, 1e6]; a log-spaced default grid when absent.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long, default_value_t = qsep::separability::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Tolerance for the named special cases.
    #[arg(long, default_value_t = 5e-4)]
    pub tol: f64,
    /// Skip the acceptance suite and run only the named special cases.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Family parameter when converting a family member.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}
