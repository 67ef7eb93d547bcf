//! `bgnf`: normal forms, restored Hamiltonian families, integrability checks
//! and a normalize/restore fuzz loop from the command line.
//!
//! Exit codes: 0 success, 1 property failure, 2 malformed input, 3 quadratic
//! part mismatch, 4 input not in normal form.

mod commands;
mod report;
mod roundtrip;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::Failure;

#[derive(Parser, Debug)]
#[command(name = "bgnf", version, about = "Exact Birkhoff-Gustavson normal forms and their inverse")]
struct Cli {
    /// Print a single JSON report on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal form of a Hamiltonian through a given degree.
    Normalize(NormalizeArgs),
    /// Hamiltonians whose normal form is the given one.
    Restore(RestoreArgs),
    /// Bertrand-Darboux integrability conditions for a two-degree-of-freedom potential.
    Bdic(BdicArgs),
    /// Seeded normalize -> restore -> normalize cycles on random Hamiltonians.
    Roundtrip(RoundtripArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    Real,
    Complex,
}

impl From<BasisArg> for bgnf::Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Real => bgnf::Basis::Real,
            BasisArg::Complex => bgnf::Basis::Complex,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarsArg {
    /// `q1..qn, eta1..etan` or `z1..zn, zb1..zbn`.
    #[default]
    Standard,
    /// Also accept `p_j` for `eta_j`.
    Qp,
}

#[derive(Args, Debug, Serialize)]
pub struct NormalizeArgs {
    /// Hamiltonian file.
    #[arg(long)]
    pub input: PathBuf,
    /// Truncation degree (at least 3).
    #[arg(long)]
    pub degree: usize,
    /// Frequencies, comma separated rationals.
    #[arg(long)]
    pub nu: String,
    /// Write the generating function to this file.
    #[arg(long)]
    pub emit_generating: Option<PathBuf>,
    /// Basis of the written files; defaults to the basis of the input.
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    #[arg(long, value_enum, default_value_t)]
    pub vars: VarsArg,
    /// Write the normal form here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RestoreArgs {
    /// Normal-form file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub degree: usize,
    #[arg(long)]
    pub nu: String,
    /// `zero`, `fresh:PREFIX[,PREFIX...]` (one prefix per degree from 3, the
    /// last one repeating), or a choices file.
    #[arg(long, default_value = "zero")]
    pub choices: String,
    /// Restore stage by stage.
    #[arg(long, conflicts_with_all = ["direct", "both"])]
    pub staged: bool,
    /// Restore in one pass (default).
    #[arg(long, conflicts_with = "both")]
    pub direct: bool,
    /// Run both and fail unless they agree.
    #[arg(long)]
    pub both: bool,
    /// Write the generating function to this file.
    #[arg(long)]
    pub emit_generating: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    #[arg(long, value_enum, default_value_t)]
    pub vars: VarsArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BdicType {
    /// Cubic perturbation `f1 q1^3 + f2 q1^2 q2 + f3 q1 q2^2 + f4 q2^3`.
    Phocp,
    /// Quartic perturbation with coefficients `g1..g5`.
    Phoqp,
    /// Any polynomial potential, by solving for the quadratic integral.
    General,
}

#[derive(Args, Debug, Serialize)]
pub struct BdicArgs {
    #[arg(long = "type", value_enum)]
    pub kind: BdicType,
    /// Cubic coefficients `f1,f2,f3,f4`.
    #[arg(long)]
    pub f: Option<String>,
    /// Quartic coefficients `g1,...,g5`.
    #[arg(long)]
    pub g: Option<String>,
    /// File holding the full potential in `q1, q2`.
    #[arg(long)]
    pub potential: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RoundtripArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub cases: usize,
    #[arg(long)]
    pub degree: usize,
    #[arg(long, default_value = "1,1")]
    pub nu: String,
    /// Corrupt every restored Hamiltonian, to check that failures are caught.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, inputs, result) = match &cli.command {
        Command::Normalize(a) => ("normalize", serde_json::to_value(a), commands::normalize(a)),
        Command::Restore(a) => ("restore", serde_json::to_value(a), commands::restore(a)),
        Command::Bdic(a) => ("bdic", serde_json::to_value(a), commands::bdic(a)),
        Command::Roundtrip(a) => ("roundtrip", serde_json::to_value(a), roundtrip::run(a)),
    };
    let inputs = inputs.unwrap_or(serde_json::Value::Null);
    let timing_ms = start.elapsed().as_secs_f64() * 1000.0;
    let outcome = result.unwrap_or_else(Failure::into_outcome);
    outcome.emit(name, inputs, timing_ms, cli.json)
}
