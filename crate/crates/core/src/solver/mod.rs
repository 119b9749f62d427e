//! Exact SAT and weighted partial Max-SAT solving.
//!
//! [`solve_sat`] wraps the CDCL core in [`sat`]. [`solve_maxsat`] runs one of
//! two exact optimizers over it: stratified core-guided search with weight
//! splitting (the default) or branch and bound over relaxation variables.
//! [`brute_force_maxsat`] is an exhaustive reference for small formulas and
//! [`solve_external`] delegates to a solver binary speaking the Max-SAT
//! Evaluation output format.

mod brute;
mod core_guided;
mod bnb;
mod external;
pub mod sat;

use std::time::Duration;

use thiserror::Error;

use crate::cnf::{Model, WcnfFormula};
use crate::lit::Lit;

pub use brute::{brute_force_maxsat, BRUTE_FORCE_MAX_VARS};
pub use external::solve_external;
pub use sat::{SatOutcome, SatSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Optimizer {
    #[default]
    CoreGuided,
    BranchAndBound,
}

impl std::str::FromStr for Optimizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core-guided" | "coreguided" => Ok(Optimizer::CoreGuided),
            "bnb" | "branch-and-bound" => Ok(Optimizer::BranchAndBound),
            other => Err(format!("unknown optimizer `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    /// Conflicts allowed per SAT call.
    pub conflict_limit: Option<u64>,
    /// Unit of the Luby restart sequence, in conflicts.
    pub restart_base: u64,
    pub var_decay: f64,
    pub clause_decay: f64,
    pub optimizer: Optimizer,
    /// Command template for [`solve_external`]; `{input}` is replaced by the WCNF path.
    pub external_cmd: Option<String>,
    /// Wall-clock budget for a whole solve.
    pub timeout: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            conflict_limit: None,
            restart_base: 100,
            var_decay: 0.95,
            clause_decay: 0.999,
            optimizer: Optimizer::CoreGuided,
            external_cmd: None,
            timeout: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("formula has {num_vars} variables; brute force is limited to {max}")]
    TooManyVariables { num_vars: u32, max: u32 },
    #[error("no external solver command configured")]
    NoExternalCommand,
    #[error("external solver failed: {0}")]
    Process(String),
    #[error("external solver timed out after {0:?}")]
    Timeout(Duration),
    #[error("untrusted solver answer: {0}")]
    Untrusted(String),
    #[error("internal solver inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Result of a plain SAT call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat { model: Vec<bool> },
    /// `core` is a subset of the assumptions; empty if the clauses alone are unsatisfiable.
    Unsat { core: Vec<Lit> },
    Indeterminate,
}

/// Decides satisfiability of `clauses` under `assumptions`. Models are
/// re-checked clause by clause before being returned.
pub fn solve_sat(
    clauses: &[Vec<Lit>],
    assumptions: &[Lit],
    cfg: &SolverConfig,
) -> Result<SatResult, SolverError> {
    let mut solver = SatSolver::new(cfg);
    let max_var = clauses
        .iter()
        .flatten()
        .chain(assumptions)
        .map(|l| l.var())
        .max()
        .unwrap_or(0);
    solver.reserve_vars(max_var);
    for c in clauses {
        if !solver.add_clause(c) {
            break;
        }
    }
    match solver.solve(assumptions) {
        SatOutcome::Sat => {
            let model = solver.model().to_vec();
            if let Some(bad) = clauses.iter().find(|c| !c.iter().any(|l| l.eval(&model))) {
                return Err(SolverError::Internal(format!("model falsifies clause {bad:?}")));
            }
            if let Some(a) = assumptions.iter().find(|a| !a.eval(&model)) {
                return Err(SolverError::Internal(format!("model violates assumption {a}")));
            }
            Ok(SatResult::Sat { model })
        }
        SatOutcome::Unsat => Ok(SatResult::Unsat {
            core: solver.core().to_vec(),
        }),
        SatOutcome::Unknown => Ok(SatResult::Indeterminate),
    }
}

/// Outcome of an optimization run. Costs are falsified soft weight (minimized).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxSatResult {
    Optimum(Model),
    HardUnsat,
    /// Resource limit hit; `lower` is a proven bound, `best` the best model found.
    Indeterminate { lower: u64, best: Option<Model> },
}

impl MaxSatResult {
    pub fn cost(&self) -> Option<u64> {
        match self {
            MaxSatResult::Optimum(m) => Some(m.cost()),
            _ => None,
        }
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            MaxSatResult::Optimum(m) => Some(m),
            MaxSatResult::Indeterminate { best, .. } => best.as_ref(),
            MaxSatResult::HardUnsat => None,
        }
    }

    pub fn is_optimum(&self) -> bool {
        matches!(self, MaxSatResult::Optimum(_))
    }
}

/// Finds a minimum-cost model of `f` with the built-in optimizer selected in `cfg`.
pub fn solve_maxsat(f: &WcnfFormula, cfg: &SolverConfig) -> Result<MaxSatResult, SolverError> {
    match cfg.optimizer {
        Optimizer::CoreGuided => core_guided::solve(f, cfg),
        Optimizer::BranchAndBound => bnb::solve(f, cfg),
    }
}

/// Truncates a solver assignment to the formula's variables and re-checks it.
fn checked_model(f: &WcnfFormula, full: &[bool]) -> Result<Model, SolverError> {
    let assignment = full[..f.num_vars() as usize].to_vec();
    Model::checked(f, assignment)
        .ok_or_else(|| SolverError::Internal("model falsifies a hard clause".into()))
}

/// Loads the hard clauses of `f` into a fresh SAT solver.
fn hard_solver(f: &WcnfFormula, cfg: &SolverConfig) -> SatSolver {
    let mut solver = SatSolver::new(cfg);
    solver.reserve_vars(f.num_vars());
    for c in f.hard_clauses() {
        if !solver.add_clause(c.lits()) {
            break;
        }
    }
    solver
}
