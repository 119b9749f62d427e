//! Adapter for external Max-SAT solver binaries.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::cnf::{parse_solver_output, write_dimacs, Model, SolverStatus, WcnfFormula};
use crate::solver::{MaxSatResult, SolverConfig, SolverError};

/// Builds the shell command line: `{input}` is replaced by `path`, or the
/// path is appended when the template has no placeholder.
fn render_command(template: &str, path: &str) -> String {
    if template.contains("{input}") {
        template.replace("{input}", path)
    } else {
        format!("{template} {path}")
    }
}

/// Writes `f` to a temporary WCNF file, runs `cfg.external_cmd` through
/// `sh -c` and validates whatever model comes back against `f`.
pub fn solve_external(f: &WcnfFormula, cfg: &SolverConfig) -> Result<MaxSatResult, SolverError> {
    let template = cfg.external_cmd.as_deref().ok_or(SolverError::NoExternalCommand)?;
    let mut file = tempfile::Builder::new()
        .prefix("ttsat-")
        .suffix(".wcnf")
        .tempfile()?;
    file.write_all(write_dimacs(f).as_bytes())?;
    file.flush()?;
    let path = file.path().to_string_lossy().into_owned();
    let command = render_command(template, &path);

    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| SolverError::Process(format!("cannot spawn `{command}`: {e}")))?;

    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut buf = String::new();
        stdout.read_to_string(&mut buf).map(|_| buf)
    });
    let err_reader = thread::spawn(move || {
        let mut buf = String::new();
        let _ = stderr.read_to_string(&mut buf);
        buf
    });

    let deadline = cfg.timeout.map(|t| Instant::now() + t);
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            return Err(SolverError::Timeout(cfg.timeout.unwrap()));
        }
        thread::sleep(Duration::from_millis(5));
    };
    let output = out_reader
        .join()
        .map_err(|_| SolverError::Process("stdout reader panicked".into()))??;
    let errors = err_reader.join().unwrap_or_default();

    let parsed = parse_solver_output(&output, f.num_vars())
        .map_err(|e| SolverError::Untrusted(e.to_string()))?;

    match parsed.status {
        SolverStatus::Unknown => {
            if !status.success() {
                let detail = errors.lines().last().unwrap_or("").trim();
                return Err(SolverError::Process(format!(
                    "`{command}` exited with {status}{}{detail}",
                    if detail.is_empty() { "" } else { ": " }
                )));
            }
            Ok(MaxSatResult::Indeterminate {
                lower: 0,
                best: validated(f, parsed.model, None)?,
            })
        }
        SolverStatus::Unsatisfiable => Ok(MaxSatResult::HardUnsat),
        SolverStatus::Satisfiable => Ok(MaxSatResult::Indeterminate {
            lower: 0,
            best: validated(f, parsed.model, parsed.cost)?,
        }),
        SolverStatus::Optimum => match validated(f, parsed.model, parsed.cost)? {
            Some(model) => Ok(MaxSatResult::Optimum(model)),
            None => Err(SolverError::Untrusted("optimum reported without a model".into())),
        },
    }
}

fn validated(f: &WcnfFormula, model: Option<Vec<bool>>, claimed: Option<u64>) -> Result<Option<Model>, SolverError> {
    let Some(assignment) = model else {
        return Ok(None);
    };
    let model = Model::checked(f, assignment)
        .ok_or_else(|| SolverError::Untrusted("model falsifies a hard clause".into()))?;
    if let Some(claimed) = claimed {
        if claimed != model.cost() {
            return Err(SolverError::Untrusted(format!(
                "solver claims cost {claimed} but the model costs {}",
                model.cost()
            )));
        }
    }
    Ok(Some(model))
}
