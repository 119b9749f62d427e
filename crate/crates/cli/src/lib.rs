//! `ttsat` command implementations.
//!
//! Every command writes results to `out` and diagnostics to `err` and
//! returns an [`Exit`] code, so the binary and the tests share one path.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ttsat_core::{
    brute_force_maxsat, check_hard, compute_cost, decode_timetable, encode, gen_random_instance, has_errors,
    parse_dimacs, parse_instance, parse_timetable_csv, render_timetable, solve_external, solve_maxsat,
    validate_instance, write_dimacs, CardScheme, EncodeOptions, Encoding, GenParams, Instance, MaxSatResult,
    Model, Optimizer, RenderFormat, Severity, SolverConfig, SolverError, WcnfFormula, BRUTE_FORCE_MAX_VARS,
};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Optimum = 0,
    HardUnsat = 1,
    InputError = 2,
    Indeterminate = 3,
    Internal = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A failed command: exit code plus the message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

fn input(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        exit: Exit::InputError,
        error: error.into(),
    }
}

fn internal(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        exit: Exit::Internal,
        error: error.into(),
    }
}

type CmdResult = Result<Exit, Failure>;

#[derive(Debug, Parser)]
#[command(name = "ttsat", version, about = "Course timetabling via weighted partial Max-SAT")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile an instance to DIMACS WCNF (plus a variable-map sidecar).
    Encode(EncodeArgs),
    /// Encode, solve, decode and check an instance; print cost and timetable.
    Solve(SolveArgs),
    /// Check an instance, or a timetable CSV against an instance.
    Validate(ValidateArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Solve a WCNF file with the built-in solver, printing o/s/v lines.
    Maxsat(MaxsatArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Partial,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Builtin,
    External,
}

#[derive(Debug, Args)]
pub struct EncodingFlags {
    /// Soft-clause weighting.
    #[arg(long, value_enum, default_value = "weighted")]
    pub mode: Mode,
    /// Cardinality encoding: pairwise, seqcounter or totalizer (default: chosen per constraint).
    #[arg(long)]
    pub card: Option<CardScheme>,
    /// Leave out the curriculum-timeslot variables.
    #[arg(long)]
    pub no_kt: bool,
}

impl EncodingFlags {
    pub fn options(&self) -> EncodeOptions {
        let base = match self.mode {
            Mode::Partial => EncodeOptions::partial(),
            Mode::Weighted => EncodeOptions::weighted(),
        };
        EncodeOptions {
            card_scheme: self.card,
            emit_kt: !self.no_kt,
            ..base
        }
    }
}

#[derive(Debug, Args)]
pub struct SolverFlags {
    #[arg(long, value_enum, default_value = "builtin")]
    pub solver: Backend,
    /// External solver command; `{input}` is replaced by the WCNF path.
    #[arg(long, env = "TTSAT_EXTERNAL_SOLVER")]
    pub external_cmd: Option<String>,
    /// Built-in optimizer: core-guided or bnb.
    #[arg(long, default_value = "core-guided")]
    pub optimizer: Optimizer,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
}

impl SolverFlags {
    pub fn config(&self) -> Result<SolverConfig, Failure> {
        let timeout = match self.timeout {
            Some(s) if !(s.is_finite() && s > 0.0) => return Err(input(anyhow!("--timeout must be positive"))),
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(SolverConfig {
            seed: self.seed,
            optimizer: self.optimizer,
            external_cmd: self.external_cmd.clone(),
            timeout,
            ..SolverConfig::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    pub instance: PathBuf,
    /// Output WCNF path; the variable map goes to `<output>.map`. Defaults to stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub encoding: EncodingFlags,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub encoding: EncodingFlags,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Timetable format: text or csv.
    #[arg(long, default_value = "text")]
    pub format: RenderFormat,
    /// Write the timetable here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the WCNF and its variable map here.
    #[arg(long)]
    pub wcnf: Option<PathBuf>,
    /// Cross-check the optimum by exhaustive search when the formula is small enough.
    #[arg(long)]
    pub check: bool,
    /// Run the built-in and external solvers concurrently and compare costs.
    #[arg(long)]
    pub portfolio: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    /// Timetable CSV as written by `solve --format csv`.
    pub timetable: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "weighted")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub days: usize,
    #[arg(long, default_value_t = 2)]
    pub slots_per_day: usize,
    #[arg(long, default_value_t = 3)]
    pub rooms: usize,
    #[arg(long, default_value_t = 5)]
    pub courses: usize,
    #[arg(long, default_value_t = 3)]
    pub curricula: usize,
    /// Probability that two courses share registered students.
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    /// Output path; defaults to stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MaxsatArgs {
    pub wcnf: PathBuf,
    #[arg(long, default_value = "core-guided")]
    pub optimizer: Optimizer,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub timeout: Option<f64>,
}

/// Runs one command. Never panics on bad input; the return value is the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let result = match cli.command {
        Command::Encode(a) => cmd_encode(&a, out, err),
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Validate(a) => cmd_validate(&a, out, err),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Maxsat(a) => cmd_maxsat(&a, out),
    };
    match result {
        Ok(exit) => exit,
        Err(failure) => {
            let _ = writeln!(err, "error: {failure}");
            failure.exit
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(input)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(input)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .context("cannot write output")
        .map_err(input)
}

/// Parses and validates an instance, reporting findings on `err`.
pub fn load_instance(path: &Path, err: &mut dyn Write) -> Result<Instance, Failure> {
    let text = read(path)?;
    let instance = parse_instance(&text)
        .with_context(|| format!("invalid instance {}", path.display()))
        .map_err(input)?;
    let findings = validate_instance(&instance);
    for f in &findings {
        let _ = writeln!(err, "{f}");
    }
    if has_errors(&findings) {
        let n = findings.iter().filter(|f| f.severity == Severity::Error).count();
        return Err(input(anyhow!("instance {} has {n} error(s)", path.display())));
    }
    Ok(instance)
}

fn encode_instance(instance: &Instance, flags: &EncodingFlags) -> Result<Encoding, Failure> {
    encode(instance, &flags.options()).map_err(input)
}

fn sidecar_path(wcnf: &Path) -> PathBuf {
    let mut name = wcnf.as_os_str().to_owned();
    name.push(".map");
    PathBuf::from(name)
}

fn write_artifacts(path: &Path, enc: &Encoding) -> Result<(), Failure> {
    write_file(path, &write_dimacs(&enc.formula))?;
    write_file(&sidecar_path(path), &enc.varmap.to_sidecar())
}

pub fn cmd_encode(a: &EncodeArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&a.instance, err)?;
    let enc = encode_instance(&instance, &a.encoding)?;
    match &a.output {
        Some(path) => {
            write_artifacts(path, &enc)?;
            let _ = writeln!(
                err,
                "wrote {} ({} variables, {} clauses)",
                path.display(),
                enc.formula.num_vars(),
                enc.formula.clauses().len()
            );
        }
        None => emit(out, &write_dimacs(&enc.formula))?,
    }
    Ok(Exit::Optimum)
}

fn solver_failure(e: SolverError) -> Failure {
    match e {
        SolverError::Untrusted(_) | SolverError::Internal(_) => internal(e),
        SolverError::Timeout(_) => Failure {
            exit: Exit::Indeterminate,
            error: e.into(),
        },
        _ => input(e),
    }
}

fn run_backend(f: &WcnfFormula, backend: Backend, cfg: &SolverConfig) -> Result<MaxSatResult, SolverError> {
    match backend {
        Backend::Builtin => solve_maxsat(f, cfg),
        Backend::External => solve_external(f, cfg),
    }
}

/// Solves with the selected backend, or with both when `portfolio` is set.
fn solve_formula(a: &SolveArgs, f: &WcnfFormula, cfg: &SolverConfig, err: &mut dyn Write) -> Result<MaxSatResult, Failure> {
    if !a.portfolio {
        return run_backend(f, a.solver.solver, cfg).map_err(solver_failure);
    }
    if cfg.external_cmd.is_none() {
        return Err(input(anyhow!("--portfolio needs --external-cmd or TTSAT_EXTERNAL_SOLVER")));
    }
    let (builtin, external) = thread::scope(|s| {
        let b = s.spawn(|| solve_maxsat(f, cfg));
        let e = s.spawn(|| solve_external(f, cfg));
        (
            b.join().expect("builtin solver thread"),
            e.join().expect("external solver thread"),
        )
    });
    match (builtin, external) {
        (Ok(b), Ok(e)) => {
            if let (Some(cb), Some(ce)) = (b.cost(), e.cost()) {
                if cb != ce {
                    return Err(internal(anyhow!("builtin optimum {cb} disagrees with external optimum {ce}")));
                }
            }
            if matches!(b, MaxSatResult::HardUnsat) != matches!(e, MaxSatResult::HardUnsat)
                && (b.is_optimum() || e.is_optimum())
            {
                return Err(internal(anyhow!("backends disagree on hard satisfiability")));
            }
            let _ = writeln!(err, "portfolio: backends agree");
            Ok(if b.is_optimum() || !e.is_optimum() { b } else { e })
        }
        (Ok(r), Err(e)) | (Err(e), Ok(r)) => {
            let _ = writeln!(err, "portfolio: one backend failed: {e}");
            Ok(r)
        }
        (Err(e), Err(_)) => Err(solver_failure(e)),
    }
}

fn brute_force_check(f: &WcnfFormula, result: &MaxSatResult, err: &mut dyn Write) -> Result<(), Failure> {
    if f.num_vars() > BRUTE_FORCE_MAX_VARS {
        let _ = writeln!(
            err,
            "check: skipped, {} variables exceed the exhaustive limit of {BRUTE_FORCE_MAX_VARS}",
            f.num_vars()
        );
        return Ok(());
    }
    let reference = brute_force_maxsat(f).map_err(internal)?;
    let agree = match (&reference, result) {
        (MaxSatResult::HardUnsat, MaxSatResult::HardUnsat) => true,
        (MaxSatResult::Optimum(r), MaxSatResult::Optimum(m)) => r.cost() == m.cost(),
        (_, MaxSatResult::Indeterminate { .. }) => true,
        _ => false,
    };
    if !agree {
        return Err(internal(anyhow!(
            "exhaustive search gives {:?}, solver gives {:?}",
            reference.cost(),
            result.cost()
        )));
    }
    let _ = writeln!(err, "check: exhaustive search agrees");
    Ok(())
}

/// Decodes `model`, re-scores it independently and checks hard constraints.
fn cross_check(instance: &Instance, enc: &Encoding, opts: &EncodeOptions, model: &Model) -> Result<ttsat_core::Timetable, Failure> {
    let tt = decode_timetable(instance, &enc.varmap, model.assignment()).map_err(internal)?;
    let hard = check_hard(instance, &tt);
    if !hard.is_empty() {
        let list: Vec<String> = hard.iter().map(|v| v.describe(instance)).collect();
        return Err(internal(anyhow!("decoded timetable breaks hard constraints: {}", list.join("; "))));
    }
    let report = compute_cost(instance, &tt, opts);
    if report.total != model.cost() {
        return Err(internal(anyhow!(
            "solver cost {} but the timetable scores {}",
            model.cost(),
            report.total
        )));
    }
    Ok(tt)
}

pub fn cmd_solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&a.instance, err)?;
    let opts = a.encoding.options();
    let enc = encode_instance(&instance, &a.encoding)?;
    if let Some(path) = &a.wcnf {
        write_artifacts(path, &enc)?;
    }
    let cfg = a.solver.config()?;
    if a.solver.solver == Backend::External && cfg.external_cmd.is_none() {
        return Err(input(anyhow!("--solver external needs --external-cmd or TTSAT_EXTERNAL_SOLVER")));
    }
    let result = solve_formula(a, &enc.formula, &cfg, err)?;
    if a.check {
        brute_force_check(&enc.formula, &result, err)?;
    }

    let (status, exit) = match &result {
        MaxSatResult::Optimum(_) => ("OPTIMUM FOUND", Exit::Optimum),
        MaxSatResult::HardUnsat => ("UNSATISFIABLE", Exit::HardUnsat),
        MaxSatResult::Indeterminate { .. } => ("UNKNOWN", Exit::Indeterminate),
    };
    let Some(model) = result.model() else {
        emit(out, &format!("s {status}\n"))?;
        return Ok(exit);
    };
    let tt = cross_check(&instance, &enc, &opts, model)?;
    let report = compute_cost(&instance, &tt, &opts);
    for line in report.describe(&instance) {
        let _ = writeln!(err, "{line}");
    }
    let total = enc.formula.soft_sum();
    let _ = writeln!(
        err,
        "satisfied soft weight {} of {total} (falsified {})",
        total - model.cost(),
        model.cost()
    );
    emit(out, &format!("o {}\ns {status}\n", model.cost()))?;
    let grid = render_timetable(&instance, &tt, a.format);
    match &a.output {
        Some(path) => write_file(path, &grid)?,
        None => emit(out, &grid)?,
    }
    Ok(exit)
}

pub fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&a.instance, err)?;
    let Some(path) = &a.timetable else {
        emit(out, "instance ok\n")?;
        return Ok(Exit::Optimum);
    };
    let text = read(path)?;
    let tt = parse_timetable_csv(&instance, &text)
        .with_context(|| format!("invalid timetable {}", path.display()))
        .map_err(input)?;
    let hard = check_hard(&instance, &tt);
    let opts = match a.mode {
        Mode::Partial => EncodeOptions::partial(),
        Mode::Weighted => EncodeOptions::weighted(),
    };
    let report = compute_cost(&instance, &tt, &opts);
    let mut text = String::new();
    for v in &hard {
        text.push_str(&format!("hard: {}\n", v.describe(&instance)));
    }
    for line in report.describe(&instance) {
        text.push_str(&format!("soft: {line}\n"));
    }
    text.push_str(&format!("cost {}\n", report.total));
    text.push_str(if hard.is_empty() { "feasible\n" } else { "infeasible\n" });
    emit(out, &text)?;
    Ok(if hard.is_empty() {
        Exit::Optimum
    } else {
        Exit::HardUnsat
    })
}

pub fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> CmdResult {
    let params = GenParams {
        days: a.days,
        slots_per_day: a.slots_per_day,
        rooms: a.rooms,
        courses: a.courses,
        curricula: a.curricula,
        overlap_density: a.density,
    };
    let instance = gen_random_instance(a.seed, &params).map_err(input)?;
    let json = instance.to_json();
    match &a.output {
        Some(path) => write_file(path, &json)?,
        None => emit(out, &json)?,
    }
    Ok(Exit::Optimum)
}

/// Max-SAT Evaluation style answer for `result`.
pub fn evaluation_output(result: &MaxSatResult) -> String {
    let mut s = String::new();
    let model = match result {
        MaxSatResult::Optimum(m) => {
            s.push_str(&format!("o {}\ns OPTIMUM FOUND\n", m.cost()));
            Some(m)
        }
        MaxSatResult::HardUnsat => {
            s.push_str("s UNSATISFIABLE\n");
            None
        }
        MaxSatResult::Indeterminate { best, .. } => {
            if let Some(m) = best {
                s.push_str(&format!("o {}\ns SATISFIABLE\n", m.cost()));
            } else {
                s.push_str("s UNKNOWN\n");
            }
            best.as_ref()
        }
    };
    if let Some(m) = model {
        let lits: Vec<String> = m
            .assignment()
            .iter()
            .enumerate()
            .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
            .collect();
        s.push_str(&format!("v {}\n", lits.join(" ")));
    }
    s
}

pub fn cmd_maxsat(a: &MaxsatArgs, out: &mut dyn Write) -> CmdResult {
    let text = read(&a.wcnf)?;
    let f = parse_dimacs(&text)
        .with_context(|| format!("invalid WCNF {}", a.wcnf.display()))
        .map_err(input)?;
    let flags = SolverFlags {
        solver: Backend::Builtin,
        external_cmd: None,
        optimizer: a.optimizer,
        seed: a.seed,
        timeout: a.timeout,
    };
    let result = solve_maxsat(&f, &flags.config()?).map_err(solver_failure)?;
    emit(out, &evaluation_output(&result))?;
    Ok(match result {
        MaxSatResult::Optimum(_) => Exit::Optimum,
        MaxSatResult::HardUnsat => Exit::HardUnsat,
        MaxSatResult::Indeterminate { .. } => Exit::Indeterminate,
    })
}
