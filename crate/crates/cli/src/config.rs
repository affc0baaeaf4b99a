use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmp_core::applications::HierarchySelector;

#[derive(Debug, Parser)]
#[command(name = "gmp", version, about = "Moment relaxations over the simplex and the sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a moment problem instance level by level.
    Solve(RunArgs),
    /// Lower bounds on the minimum of a form: {"domain", "p"}.
    Minimize(RunArgs),
    /// Lower bounds on inf p/q with q >= 1: {"domain", "p", "q"}.
    Rational(RunArgs),
    /// Bounds on the stability number: {"n", "edges"}.
    StableSet(RunArgs),
    /// Extremal moment among measures matching a reference:
    /// {"domain", "d", "beta", "reference_moments"?}.
    Cubature(RunArgs),
    /// Pólya exponent and the nonnegative coefficients it certifies:
    /// {"f", "eps"?}.
    PolyaCertificate(RunArgs),
    /// Compare the two LP formulations on a form over the simplex: {"p"}.
    EquivCheck(RunArgs),
}

impl Command {
    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Solve(a)
            | Command::Minimize(a)
            | Command::Rational(a)
            | Command::StableSet(a)
            | Command::Cubature(a)
            | Command::PolyaCertificate(a)
            | Command::EquivCheck(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Hierarchy {
    Lp,
    Sdp,
    Auto,
}

impl From<Hierarchy> for HierarchySelector {
    fn from(h: Hierarchy) -> Self {
        match h {
            Hierarchy::Lp => HierarchySelector::Lp,
            Hierarchy::Sdp => HierarchySelector::Sdp,
            Hierarchy::Auto => HierarchySelector::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Input JSON file, or `-` for stdin.
    #[arg(long)]
    pub input: PathBuf,

    /// A single level `r` or an inclusive range `a..b`.
    #[arg(long)]
    pub levels: Option<Levels>,

    #[arg(long, value_enum, default_value_t = Hierarchy::Auto)]
    pub hierarchy: Hierarchy,

    /// Feasibility and optimality tolerance, in (0, 1e-2].
    #[arg(long, env = "GMP_TOL", default_value_t = 1e-8)]
    pub tol: f64,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Compare against a brute-force reference where one exists.
    #[arg(long)]
    pub oracle: bool,

    /// Solve the requested levels concurrently; output order is unchanged.
    #[arg(long)]
    pub parallel_levels: bool,
}

impl RunArgs {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(format!("--tol must lie in (0, 1e-2], got {}", self.tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Levels(pub RangeInclusive<u32>);

impl Levels {
    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.0.clone()
    }

    pub fn min(&self) -> u32 {
        *self.0.start()
    }
}

impl FromStr for Levels {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("invalid level `{t}`"));
        match s.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(format!("empty level range {a}..{b}"));
                }
                Ok(Levels(a..=b))
            }
            None => {
                let r = parse(s)?;
                Ok(Levels(r..=r))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_syntax() {
        assert_eq!("3".parse::<Levels>().unwrap(), Levels(3..=3));
        assert_eq!("2..5".parse::<Levels>().unwrap(), Levels(2..=5));
        assert_eq!("2..=5".parse::<Levels>().unwrap(), Levels(2..=5));
        assert!("5..2".parse::<Levels>().is_err());
        assert!("x".parse::<Levels>().is_err());
    }
}
