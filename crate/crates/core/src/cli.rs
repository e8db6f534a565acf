//! The `odelump` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ir::{OdeSystem, Partition};
use crate::lump::{self, CheckResult, LumpError, Mode};
use crate::parser::{parse_model, parse_partition, serialize_model, Form, ModelDocument};
use crate::sim::{compare_reduction, integrate, write_csv, SimError};
use crate::symbolic::{
    build_phi_bde, build_phi_fde, primed_names, smt_emit, symbolic_check, symbolic_coarsest, SolverCommand,
    SymbolicCheck, SymbolicError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Header line `reduce` writes above the reduced model, naming the
/// partition over the original variables.
pub const PARTITION_HEADER: &str = "// partition: ";

#[derive(Parser, Debug)]
#[command(name = "odelump", version, about = "Exact lumping of polynomial ODE systems and reaction networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the coarsest equivalence refining a seed and write the reduced model.
    Reduce(ReduceArgs),
    /// Check the partition given in the model file.
    Check(CheckArgs),
    /// Integrate a model with fixed-step RK4 and write a CSV trajectory.
    Simulate(SimulateArgs),
    /// Rewrite a model as ODEs, reactions, or an SMT-LIB query.
    Convert(ConvertArgs),
    /// Coarsest equivalence by exhaustive enumeration (at most 10 variables).
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Backend {
    Syntactic,
    Smt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Seed {
    File,
    Singletons,
    OneBlock,
    FromInit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Ode,
    Rn,
    Smt2,
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Defaults to syntactic for polynomial models and smt otherwise.
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Solver command line; falls back to $ODELUMP_SOLVER, then `z3 -in`.
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Per-query solver timeout in milliseconds.
    #[arg(long, default_value_t = 60_000)]
    timeout: u64,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Defaults to from-init for bde and one-block for fde.
    #[arg(long, value_enum)]
    partition: Option<Seed>,
    #[arg(long)]
    out: PathBuf,
    /// Write a JSON run report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    t_end: f64,
    #[arg(long)]
    dt: f64,
    /// Record every K-th step.
    #[arg(long, default_value_t = 1)]
    sample: usize,
    #[arg(long)]
    out: PathBuf,
    /// Reduced model to compare against the input's trajectory.
    #[arg(long)]
    compare: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Forward)]
    map_mode: Mode,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    to: Target,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    partition: Option<Seed>,
}

/// Flat, stable-keyed summary of a `reduce` run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub mode: Mode,
    pub backend: String,
    pub input: String,
    pub iterations: usize,
    pub blocks_before: usize,
    pub blocks_after: usize,
    pub variables_before: usize,
    pub variables_after: usize,
    pub monomials_before: Option<usize>,
    pub monomials_after: Option<usize>,
    pub wall_time_ms: u128,
    pub warnings: Vec<String>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure::new(EXIT_INPUT, message)
}

impl From<SymbolicError> for Failure {
    fn from(e: SymbolicError) -> Self {
        match e {
            SymbolicError::PartitionMismatch { .. } => Failure::new(EXIT_INPUT, e.to_string()),
            other => Failure::new(EXIT_SOLVER, other.to_string()),
        }
    }
}

impl From<LumpError> for Failure {
    fn from(e: LumpError) -> Self {
        let code = match e {
            LumpError::PartitionMismatch { .. } | LumpError::NotPolynomial | LumpError::TooLarge(_) => EXIT_INPUT,
            LumpError::NotAnFde(_) | LumpError::NotABde(_) | LumpError::NoUniqueCoarsest => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        Failure::new(EXIT_INPUT, e.to_string())
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Reduce(a) => reduce(a, stdout, stderr),
        Command::Check(a) => check(a, stdout, stderr),
        Command::Simulate(a) => simulate(a, stdout),
        Command::Convert(a) => convert(a),
        Command::Oracle(a) => oracle(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn read_model(path: &Path) -> Result<(String, ModelDocument), Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let doc = parse_model(&text).map_err(|e| input_error(format!("{}:{e}", path.display())))?;
    Ok((text, doc))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn solver_command(args: &SolverArgs) -> Result<SolverCommand, Failure> {
    let timeout = Duration::from_millis(args.timeout);
    match &args.solver_cmd {
        Some(cmd) => SolverCommand::parse(cmd, timeout).ok_or_else(|| input_error("empty --solver-cmd")),
        None => Ok(SolverCommand::from_env().with_timeout(timeout)),
    }
}

fn backend(args: &SolverArgs, system: &OdeSystem) -> Result<Backend, Failure> {
    match args.backend {
        Some(Backend::Syntactic) if !system.is_polynomial() => {
            Err(input_error("the model has non-polynomial drifts; use --backend smt"))
        }
        Some(b) => Ok(b),
        None if system.is_polynomial() => Ok(Backend::Syntactic),
        None => Ok(Backend::Smt),
    }
}

fn file_partition(doc: &ModelDocument) -> Result<Partition, Failure> {
    doc.partition.clone().ok_or_else(|| input_error("the model has no partition section"))
}

/// The seed for refinement, with every observable split off into a
/// singleton.
fn seed_partition(
    kind: Option<Seed>,
    mode: Mode,
    doc: &ModelDocument,
    system: &OdeSystem,
) -> Result<Partition, Failure> {
    let n = system.len();
    let kind = kind.unwrap_or(match mode {
        Mode::Backward => Seed::FromInit,
        Mode::Forward => Seed::OneBlock,
    });
    let seed = match kind {
        Seed::File => file_partition(doc)?,
        Seed::Singletons => Partition::singletons(n),
        Seed::OneBlock => Partition::one_block(n),
        Seed::FromInit => lump::prepartition_from_inits(system, &Partition::one_block(n))?,
    };
    let labels: Vec<Option<usize>> = (0..n).map(|i| system.observables().contains(&i).then_some(i)).collect();
    Ok(seed.split_by(&labels))
}

fn reduce(args: ReduceArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let start = Instant::now();
    let (_, doc) = read_model(&args.input)?;
    let system = doc.ode();
    let backend = backend(&args.solver, &system)?;
    let seed = seed_partition(args.partition, args.mode, &doc, &system)?;

    let (partition, iterations) = match backend {
        Backend::Syntactic => {
            let r = lump::refine(&system, &seed, args.mode)?;
            (r.partition, r.iterations)
        }
        Backend::Smt => {
            let solver = solver_command(&args.solver)?;
            let out = symbolic_coarsest(&system, &seed, args.mode, &solver)?;
            (out.partition, out.iterations)
        }
    };

    let verified = if system.is_polynomial() {
        lump::check(&system, &partition, args.mode)?.is_ok()
    } else {
        let solver = solver_command(&args.solver)?;
        symbolic_check(&system, &partition, args.mode, &solver)? == SymbolicCheck::Valid
    };
    if !verified {
        return Err(Failure::new(EXIT_INTERNAL, format!("computed partition fails its own {} check", args.mode)));
    }
    let reduction = if system.is_polynomial() {
        lump::reduce(&system, &partition, args.mode)?
    } else {
        lump::reduce_unchecked(&system, &partition, args.mode)?
    };

    let names = system.names();
    let body = serialize_model(&ModelDocument::from_ode(reduction.system.clone(), None), Form::Ode)
        .map_err(|e| Failure::new(EXIT_INTERNAL, e.to_string()))?;
    write_file(&args.out, &format!("{PARTITION_HEADER}{}\n{body}", partition.display(names)))?;

    let warnings: Vec<String> = reduction
        .warnings
        .iter()
        .map(|w| {
            format!(
                "block {{{}}} is not uniformly initialized; the reduced model keeps the representative's value",
                w.members.join(", ")
            )
        })
        .collect();
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let _ = writeln!(stdout, "{}", partition.display(names));

    if let Some(path) = &args.report {
        let report = RunReport {
            mode: args.mode,
            backend: match backend {
                Backend::Syntactic => "syntactic".into(),
                Backend::Smt => "smt".into(),
            },
            input: args.input.display().to_string(),
            iterations,
            blocks_before: seed.num_blocks(),
            blocks_after: partition.num_blocks(),
            variables_before: system.len(),
            variables_after: reduction.system.len(),
            monomials_before: system.monomial_count(),
            monomials_after: reduction.system.monomial_count(),
            wall_time_ms: start.elapsed().as_millis(),
            warnings,
        };
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(path, &format!("{json}\n"))?;
    }
    Ok(EXIT_OK)
}

fn check(args: CheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let (_, doc) = read_model(&args.input)?;
    let system = doc.ode();
    let partition = file_partition(&doc)?;
    let names = system.names();
    let failure = match backend(&args.solver, &system)? {
        Backend::Syntactic => match lump::check(&system, &partition, args.mode)? {
            CheckResult::Ok => None,
            CheckResult::Counterexample(c) => Some(c.describe(&system)),
        },
        Backend::Smt => {
            let solver = solver_command(&args.solver)?;
            match symbolic_check(&system, &partition, args.mode, &solver)? {
                SymbolicCheck::Valid => None,
                SymbolicCheck::Witness(point) => {
                    let vars = match args.mode {
                        Mode::Backward => names.to_vec(),
                        Mode::Forward => primed_names(names),
                    };
                    let shown: Vec<String> = vars
                        .iter()
                        .zip(&point)
                        .map(|(n, v)| format!("{n}={}", crate::ir::rational::format_rational(v)))
                        .collect();
                    Some(format!("solver witness [{}]", shown.join(", ")))
                }
            }
        }
    };
    match failure {
        None => {
            let _ = writeln!(stdout, "{} holds: {}", args.mode, partition.display(names));
            Ok(EXIT_OK)
        }
        Some(why) => {
            let _ = writeln!(stderr, "{} fails: {why}", args.mode);
            Ok(EXIT_CHECK_FAILED)
        }
    }
}

fn simulate(args: SimulateArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let (_, doc) = read_model(&args.input)?;
    let system = doc.ode();
    let traj = integrate(&system, args.t_end, args.dt, args.sample)?;
    let mut csv = Vec::new();
    write_csv(&traj, &mut csv)?;
    write_file(&args.out, &String::from_utf8(csv).expect("csv is UTF-8"))?;

    if let Some(path) = &args.compare {
        let (text, reduced) = read_model(path)?;
        let partition = match (&doc.partition, header_partition(&text)) {
            (Some(p), _) => p.clone(),
            (None, Some(line)) => parse_partition(line, system.names())
                .map_err(|e| input_error(format!("{}: partition header: {e}", path.display())))?,
            (None, None) => {
                return Err(input_error("no partition: add one to --in or compare against `reduce` output"))
            }
        };
        let red = integrate(&reduced.ode(), args.t_end, args.dt, args.sample)?;
        let err = compare_reduction(&traj, &red, &partition, args.map_mode)?;
        let _ = writeln!(stdout, "max error: {err:e}");
    }
    Ok(EXIT_OK)
}

fn header_partition(text: &str) -> Option<&str> {
    text.lines().find_map(|l| l.trim_start().strip_prefix(PARTITION_HEADER))
}

fn convert(args: ConvertArgs) -> Result<i32, Failure> {
    let (_, doc) = read_model(&args.input)?;
    let text = match args.to {
        Target::Ode => serialize_model(&doc, Form::Ode).map_err(|e| input_error(e.to_string()))?,
        Target::Rn => serialize_model(&doc, Form::Rn).map_err(|e| input_error(e.to_string()))?,
        Target::Smt2 => {
            let mode = args.mode.ok_or_else(|| input_error("--to smt2 requires --mode"))?;
            let system = doc.ode();
            let partition = file_partition(&doc)?;
            match mode {
                Mode::Backward => smt_emit(&build_phi_bde(&system, &partition), system.names()),
                Mode::Forward => smt_emit(&build_phi_fde(&system, &partition), &primed_names(system.names())),
            }
        }
    };
    write_file(&args.out, &text)?;
    Ok(EXIT_OK)
}

fn oracle(args: OracleArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let (_, doc) = read_model(&args.input)?;
    let system = doc.ode();
    let seed = seed_partition(args.partition, args.mode, &doc, &system)?;
    let partition = lump::brute_force_coarsest(&system, &seed, args.mode)?;
    let _ = writeln!(stdout, "{}", partition.display(system.names()));
    Ok(EXIT_OK)
}
