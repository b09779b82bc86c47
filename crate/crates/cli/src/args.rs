use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fkg_core::engine::Backend;
use fkg_core::verify::{PropId, ScanTarget, DEFAULT_BUDGET, DEFAULT_LIST_LIMIT};

pub const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(
    name = "fkg-lab",
    version,
    about = "Exact computation and verification of higher FKG functionals"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Maximum number of instances a scan may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Maximum number of argmins, violations or failures listed per report.
    #[arg(long, global = true, default_value_t = DEFAULT_LIST_LIMIT)]
    pub list_limit: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate E_n on the functions in an input file.
    Compute(ComputeArgs),
    /// Check identities and inequalities exhaustively.
    Verify(VerifyArgs),
    /// Scan for minima and violations.
    #[command(subcommand)]
    Search(SearchCommand),
    /// Power-series reformulations.
    #[command(subcommand)]
    Series(SeriesCommand),
    /// Timing tables.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    /// JSON input file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_backend, default_value = "partition")]
    pub backend: Backend,
    /// Use only the first n functions of the input.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_prop, required_unless_present = "all", conflicts_with = "all")]
    pub prop: Option<PropId>,
    /// Run every proposition.
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
}

#[derive(Subcommand, Debug)]
pub enum SearchCommand {
    /// Every multiset of n sequences from A(m).
    Exhaustive {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_target, default_value = "en")]
        target: ScanTarget,
    },
    /// Uniformly sampled tuples from A(m).
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
    },
    /// Exhaustive third-cumulant scan over A(m).
    Kappa3 {
        #[arg(long)]
        m: usize,
    },
    /// Random families of down-rectangles in [0,1]^k.
    Rectangle {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
    },
    /// Minimizers of E_n refined by maximal total mass.
    Argmin {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum SeriesCommand {
    /// Coefficients of 1 − exp(E log(1 − Σ f_j t^j)).
    Gmean {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        degree: usize,
    },
    /// E_n read off a single series coefficient.
    Equiv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        /// Allow n = 4 (a degree-247 series).
        #[arg(long)]
        allow_large: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum BenchCommand {
    /// Time every backend over a range of n.
    Backends {
        /// Range such as 6..9 (inclusive) or a single value.
        #[arg(long, value_parser = parse_range, default_value = "2..7")]
        n: RangeInclusive<usize>,
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Restrict to these backends.
        #[arg(long, value_parser = parse_backend, value_delimiter = ',')]
        backend: Vec<Backend>,
    },
    /// Time the moment-table build.
    Oracle {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: fkg_core::Error| e.to_string())
}

fn parse_prop(s: &str) -> Result<PropId, String> {
    s.parse().map_err(|e: fkg_core::Error| e.to_string())
}

fn parse_target(s: &str) -> Result<ScanTarget, String> {
    match s {
        "en" => Ok(ScanTarget::En),
        "kappa3" => Ok(ScanTarget::Kappa3),
        _ => Err(format!("unknown target {s:?} (expected en or kappa3)")),
    }
}

pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("6..9").unwrap(), 6..=9);
        assert_eq!(parse_range("6..=9").unwrap(), 6..=9);
        assert_eq!(parse_range("7").unwrap(), 7..=7);
        assert!(parse_range("9..6").is_err());
        assert!(parse_range("a..3").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
