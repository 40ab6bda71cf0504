use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::{Exit, Report};

#[derive(Parser)]
#[command(
    name = "fundist",
    version,
    about = "Clones, commutants and distribution monads on finite carriers"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Print the JSON report instead of the human summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest arity checked or enumerated (defaults depend on the carrier).
    #[arg(long, global = true)]
    pub max_arity: Option<usize>,
    /// Largest naive candidate count searched without propagation.
    #[arg(long, global = true)]
    pub max_candidates: Option<u128>,
    /// Report `elapsed_ms` as 0 so identical runs give identical bytes.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Rig files.
    Rig {
        #[command(subcommand)]
        command: RigCommand,
    },
    /// Theory slices.
    Theory {
        #[command(subcommand)]
        command: TheoryCommand,
    },
    /// Commutant verdicts and theorem checks.
    Check(CheckArgs),
    /// The distribution object D(V) of a context.
    Dist(DistArgs),
    /// Run the full check matrix over a directory of rigs.
    ReportAll(ReportAllArgs),
}

#[derive(Subcommand)]
enum RigCommand {
    /// Check the rig axioms.
    Validate { path: PathBuf },
}

#[derive(Subcommand)]
enum TheoryCommand {
    /// Count (and optionally dump) the n-ary operations of a theory.
    Slice(SliceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryKind {
    Full,
    Initial,
    Mat,
    MatOp,
    MatAff,
    PointedMatOp,
    Closure,
}

#[derive(Args, Debug, Clone)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    pub theory: Option<TheoryKind>,
    #[arg(long)]
    pub rig: Option<PathBuf>,
    /// Carrier size for theories not given by a rig.
    #[arg(long)]
    pub carrier: Option<usize>,
    /// JSON generator list for `--theory closure`.
    #[arg(long)]
    pub generators: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SliceArgs {
    #[command(flatten)]
    pub theory: TheoryArgs,
    #[arg(long)]
    pub arity: usize,
    /// Print every table.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Balanced,
    Saturated,
    Commutative,
    Commutes,
    MutualCommutant,
    AffineCommutant,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub check: CheckKind,
    #[command(flatten)]
    pub theory: TheoryArgs,
    /// Second theory for `--check commutes`, built from the same rig or carrier.
    #[arg(long, value_enum)]
    pub other: Option<TheoryKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContextArg {
    ScalarLinear,
    ScalarAffine,
    Initial,
}

#[derive(Args, Debug)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub context: ContextArg,
    #[arg(long)]
    pub rig: Option<PathBuf>,
    /// Carrier of the initial context.
    #[arg(long)]
    pub carrier: Option<usize>,
    /// Size k of the base set V = {0, …, k-1}.
    #[arg(long)]
    pub set_size: usize,
    /// Classify elements as filters (two-point carriers only).
    #[arg(long)]
    pub classify: bool,
    /// Check the unit, naturality and associativity laws.
    #[arg(long)]
    pub monad_laws: bool,
    /// Check the restriction and double-commutant theorems at n = k.
    #[arg(long)]
    pub theorems: bool,
    /// Print every element table.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Args, Debug)]
pub struct ReportAllArgs {
    #[arg(long)]
    pub rig_dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let global = cli.global.clone();
    let (name, result) = match cli.command {
        Command::Rig {
            command: RigCommand::Validate { path },
        } => ("rig validate", commands::rig_validate(&global, &path)),
        Command::Theory {
            command: TheoryCommand::Slice(args),
        } => ("theory slice", commands::theory_slice(&global, &args)),
        Command::Check(args) => ("check", commands::check(&global, &args)),
        Command::Dist(args) => ("dist", commands::dist(&global, &args)),
        Command::ReportAll(args) => ("report-all", commands::report_all(&global, &args, start)),
    };
    let mut outcome = match result {
        Ok(o) => o,
        Err(failed) => {
            let (inputs, failure) = *failed;
            report::Outcome {
                report: Report::failed(name, inputs.unwrap_or_default(), &failure),
                exit: failure.exit,
                lines: vec![format!("error: {failure}")],
            }
        }
    };
    if !global.no_timing {
        outcome.report.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    if global.json {
        print!("{}", outcome.report.to_json());
    } else if outcome.exit == Exit::Pass {
        for line in &outcome.lines {
            println!("{line}");
        }
    } else {
        for line in &outcome.lines {
            eprintln!("{line}");
        }
    }
    ExitCode::from(outcome.exit as u8)
}
