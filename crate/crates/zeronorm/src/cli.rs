//! Argument handling and exit codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zeronorm_core::conditions::Condition;
use zeronorm_core::{Error, Limits};

use crate::format::{parse_instance, parse_point, FormatError};
use crate::pipeline::{self, Options};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_WORK_CAP: i32 = 3;
pub const EXIT_NO_SOLUTION: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "zeronorm", version, about = "Exact analysis of sparsest solutions of min ||x||_0 s.t. ||y - Ax||_2 <= eps, Bx <= b")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate, classify every sparsest witness, build families, check boundedness
    Analyze(Common),
    /// Optimal value, optimal supports and one witness per support
    Enumerate(Common),
    /// Necessary check and multiplicity conditions at a sparsest solution
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArg,
    },
    /// Solution family for one condition at a sparsest solution
    Family {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArg,
        /// Condition label such as C4, D3 or TH3.2-D5
        #[arg(long)]
        condition: String,
        /// Direction to use instead of the certifying ones, e.g. "0,0,2,1"
        #[arg(long)]
        direction: Option<String>,
    },
    /// Sufficient conditions for a bounded solution set
    Boundedness(Common),
    /// Smallest number of linearly dependent columns of A
    Spark(Common),
    /// Feasibility, support and active set of a point
    Check {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArg,
    },
}

#[derive(Args, Debug)]
struct PointArg {
    /// Comma-separated coordinates, e.g. "0,1,-1/2,0"
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// Instance file (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest support size to try (default n)
    #[arg(long)]
    kcap: Option<usize>,
    /// Family members listed per family
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_supports: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_active_subsets: u64,
    /// Accepted for compatibility; the analysis is deterministic
    #[arg(long)]
    seed: Option<u64>,
    /// Append wall-clock time to the report (makes output run-dependent)
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            kcap: self.kcap,
            samples: self.samples,
            limits: Limits { max_supports: self.max_supports, max_active_subsets: self.max_active_subsets },
        }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Dimension(_) | Error::NegativeEpsilon => EXIT_INPUT,
            Error::WorkCapExceeded { .. } => EXIT_WORK_CAP,
            Error::NoSolutionWithinCap { .. } => EXIT_NO_SOLUTION,
            Error::InfeasiblePoint | Error::NotSparsest { .. } | Error::InvalidDirection { .. } => EXIT_USAGE,
            Error::EmptyPolyhedron | Error::VerificationFailure { .. } => EXIT_INTERNAL,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn execute(command: &Command) -> Result<(Report, &Common), Failure> {
    let common = match command {
        Command::Analyze(c) | Command::Enumerate(c) | Command::Boundedness(c) | Command::Spark(c) => c,
        Command::Classify { common, .. } | Command::Family { common, .. } | Command::Check { common, .. } => common,
    };
    let text = std::fs::read_to_string(&common.input)
        .map_err(|e| Failure { code: EXIT_INPUT, message: format!("cannot read {}: {e}", common.input.display()) })?;
    let inst = parse_instance(&text)?;
    if common.kcap.is_some_and(|k| k > inst.n()) {
        return Err(usage(format!("--kcap must be at most n = {}", inst.n())));
    }
    let opts = common.options();
    let start = Instant::now();
    let mut report = match command {
        Command::Analyze(_) => pipeline::analyze(&inst, &opts)?,
        Command::Enumerate(_) => pipeline::enumerate_report(&inst, &opts)?,
        Command::Boundedness(_) => pipeline::boundedness_report(&inst, &opts)?,
        Command::Spark(_) => pipeline::spark_report(&inst),
        Command::Check { point, .. } => pipeline::check_report(&inst, &parse_point(&point.point, inst.n())?),
        Command::Classify { point, .. } => {
            pipeline::classify_report(&inst, &parse_point(&point.point, inst.n())?, &opts)?
        }
        Command::Family { point, condition, direction, .. } => {
            let label = Condition::parse(condition).ok_or_else(|| usage(format!("unknown condition {condition:?}")))?;
            let x = parse_point(&point.point, inst.n())?;
            let d = direction.as_deref().map(|d| parse_point(d, inst.n())).transpose()?;
            pipeline::family_report(&inst, &x, label, d.as_deref(), &opts)?
        }
    };
    if common.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok((report, common))
}

/// Runs the tool on `argv` (program name first), writing the report to
/// `stdout` or `--output` and diagnostics to `stderr`. Returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let (report, common) = match execute(&cli.command) {
        Ok(r) => r,
        Err(f) => {
            let _ = writeln!(stderr, "zeronorm: {}", f.message);
            return f.code;
        }
    };
    let body = match common.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    let written = match &common.output {
        Some(path) => std::fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            let _ = writeln!(stderr, "zeronorm: {msg}");
            EXIT_USAGE
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
