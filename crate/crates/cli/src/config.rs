//! Command-line arguments.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tdirac", version, about = "Transverse Dirac operators on foliated frame models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every Weitzenböck identity exactly on a model.
    Verify(VerifyArgs),
    /// Scan the spectrum of D_k² on a flat-torus model.
    Gap(GapArgs),
    /// Random fiberwise checks of the line-bundle curvature bounds.
    Fiber(FiberArgs),
    /// Compare both sides of each identity on a lattice.
    Crosscheck(CrosscheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Inclusive range written `A..B`, or a single `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KRange {
    pub min: i64,
    pub max: i64,
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("invalid k {t:?}: {e}"));
        let (min, max) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => (parse(s)?, parse(s)?),
        };
        if min > max {
            return Err(format!("empty range {min}..{max}"));
        }
        Ok(KRange { min, max })
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Tensor powers of the line bundle; defaults to 1 with a line bundle, else 0.
    #[arg(long)]
    pub k: Option<KRange>,
    /// Also fail on reported-only identities.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "1..4")]
    pub k: KRange,
    #[arg(long = "N", default_value_t = 32)]
    pub n: usize,
    /// Relative tolerance on gap ≥ 2km.
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Eigenvalues computed per grading sector.
    #[arg(long, default_value_t = 24)]
    pub count: usize,
    /// Lattice points along each leaf direction (1 keeps leafwise-constant sections only).
    #[arg(long, default_value_t = 1)]
    pub leaf_points: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Force a dense eigensolver (no Krylov iteration).
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FiberArgs {
    #[arg(long, default_value_t = 4)]
    pub q: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CrosscheckArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "1")]
    pub k: KRange,
    #[arg(long = "N", default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest accepted relative residual.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_ranges() {
        assert_eq!("1..4".parse::<KRange>().unwrap(), KRange { min: 1, max: 4 });
        assert_eq!("2".parse::<KRange>().unwrap(), KRange { min: 2, max: 2 });
        assert_eq!("0..=3".parse::<KRange>().unwrap(), KRange { min: 0, max: 3 });
        assert!("4..1".parse::<KRange>().is_err());
        assert!("a..b".parse::<KRange>().is_err());
    }
}
