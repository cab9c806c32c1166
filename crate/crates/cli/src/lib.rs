//! Command-line front end: single-case verification, grid sweeps, plain
//! evaluation and misprint forensics, with JSON/CSV reports and CI-friendly
//! exit codes.
//!
//! Exit codes: `0` all pass, `1` any fail, `2` configuration or domain
//! error, `3` inconclusive (and nothing failed).

pub mod forensics;
pub mod grid;
pub mod report;
pub mod run;

use clap::{Parser, Subcommand, ValueEnum};

/// High-precision verification of Kummer-type series identities.
#[derive(Parser, Debug)]
#[command(name = "kummer", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify one identity case: evaluate both sides and compare.
    Verify(CaseArgs),
    /// Evaluate one case and report values without a pass/fail gate.
    Eval(CaseArgs),
    /// Verify a grid of cases from a JSON grid file.
    Sweep(SweepArgs),
    /// Adjudicate the suspected misprints against a higher-precision
    /// brute-force oracle.
    Forensics(ForensicsArgs),
}

#[derive(clap::Args, Debug)]
pub struct CaseArgs {
    /// Identity family: T21, T22, T23, T24, C31, C32, B11 or B12.
    #[arg(long)]
    pub theorem: String,
    /// Parameter rho (scalar grammar, e.g. `0.5` or `1.5-2i`).
    #[arg(long, allow_hyphen_values = true)]
    pub rho: String,
    /// Contiguous shift i >= 0 (ignored by C31/C32/B11/B12).
    #[arg(long, default_value_t = 0)]
    pub i: u32,
    /// Argument x (scalar grammar).
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Delta sequence: `const:<c>`, `geom:<q>`, `harmonic` or
    /// `table:<v0,v1,...;default>`.
    #[arg(long, default_value = "const:1")]
    pub delta: String,
    /// Formula mode where misprints are suspected.
    #[arg(long, value_enum, default_value_t = ModeArg::Corrected)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(clap::Args, Debug)]
pub struct SweepArgs {
    /// Path to a JSON grid specification.
    #[arg(long)]
    pub grid: std::path::PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(clap::Args, Debug)]
pub struct ForensicsArgs {
    /// Restrict to one suspected misprint: kst2, t22, t23 or c32.
    #[arg(long)]
    pub only: Option<String>,
    /// Delta sequence used for the series-level adjudications.
    #[arg(long, default_value = "geom:0.5")]
    pub delta: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(clap::Args, Debug)]
pub struct CommonArgs {
    /// Working precision in significant decimal digits (>= 20).
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
    /// Truncation budget per series (>= 10).
    #[arg(long, default_value_t = 400)]
    pub max_terms: u32,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    #[value(name = "as-printed")]
    AsPrinted,
    Corrected,
}

impl ModeArg {
    pub fn to_mode(self) -> kummer_core::theorems::Mode {
        match self {
            ModeArg::AsPrinted => kummer_core::theorems::Mode::AsPrinted,
            ModeArg::Corrected => kummer_core::theorems::Mode::Corrected,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Json,
    Csv,
}

/// Exit codes of the report-producing commands.
pub mod exit_code {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const CONFIG_OR_DOMAIN: i32 = 2;
    pub const INCONCLUSIVE: i32 = 3;
}

/// Aggregates verdict strings into the exit-code contract: all rows
/// erroring out is a domain failure; otherwise any fail dominates, then
/// any inconclusive, else pass.
pub fn aggregate_exit(verdicts: &[&str]) -> i32 {
    if verdicts.is_empty() {
        return exit_code::CONFIG_OR_DOMAIN;
    }
    if verdicts.iter().all(|v| *v == "domain_error") {
        return exit_code::CONFIG_OR_DOMAIN;
    }
    if verdicts.contains(&"fail") {
        return exit_code::FAIL;
    }
    if verdicts.contains(&"inconclusive") {
        return exit_code::INCONCLUSIVE;
    }
    exit_code::PASS
}
