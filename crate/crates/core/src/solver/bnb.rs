//! Branch and bound over soft-clause relaxation variables.
//!
//! Each soft clause `C_i` is loaded as `C_i ∨ r_i`. The search decides softs
//! in decreasing weight order: either `C_i` must hold (assume `¬r_i`) or it
//! must be falsified (assume every literal of `C_i` false, paying `w_i`). A
//! node is pruned when its committed cost reaches the incumbent or its
//! assumptions are unsatisfiable; a satisfiable node whose model costs
//! exactly the committed amount is closed without branching further.

use crate::cnf::{Model, WcnfFormula};
use crate::lit::{Lit, VarAllocator};
use crate::solver::{checked_model, hard_solver, MaxSatResult, SatOutcome, SatSolver, SolverConfig, SolverError};

struct Search<'a> {
    formula: &'a WcnfFormula,
    solver: SatSolver,
    /// (clause literals, relaxation literal, weight), heaviest first
    softs: Vec<(Vec<Lit>, Lit, u64)>,
    best: Model,
    aborted: bool,
}

impl Search<'_> {
    fn explore(&mut self, depth: usize, assumptions: &mut Vec<Lit>, committed: u64) -> Result<(), SolverError> {
        if self.aborted || committed >= self.best.cost() {
            return Ok(());
        }
        match self.solver.solve(assumptions) {
            SatOutcome::Unknown => {
                self.aborted = true;
                return Ok(());
            }
            SatOutcome::Unsat => return Ok(()),
            SatOutcome::Sat => {
                let model = checked_model(self.formula, self.solver.model())?;
                let cost = model.cost();
                if cost < self.best.cost() {
                    self.best = model;
                }
                if cost == committed {
                    return Ok(());
                }
            }
        }
        if depth == self.softs.len() {
            return Ok(());
        }

        let (lits, relax, weight) = self.softs[depth].clone();
        let mark = assumptions.len();

        assumptions.push(!relax);
        self.explore(depth + 1, assumptions, committed)?;
        assumptions.truncate(mark);

        assumptions.extend(lits.iter().map(|&l| !l));
        self.explore(depth + 1, assumptions, committed + weight)?;
        assumptions.truncate(mark);
        Ok(())
    }
}

pub(super) fn solve(f: &WcnfFormula, cfg: &SolverConfig) -> Result<MaxSatResult, SolverError> {
    let mut solver = hard_solver(f, cfg);
    let initial = match solver.solve(&[]) {
        SatOutcome::Unsat => return Ok(MaxSatResult::HardUnsat),
        SatOutcome::Unknown => return Ok(MaxSatResult::Indeterminate { lower: 0, best: None }),
        SatOutcome::Sat => checked_model(f, solver.model())?,
    };

    let mut alloc = VarAllocator::new(f.num_vars());
    let mut softs = Vec::new();
    for (c, w) in f.soft_clauses() {
        let relax = Lit::pos(alloc.fresh());
        let mut clause = c.lits().to_vec();
        clause.push(relax);
        solver.add_clause(&clause);
        softs.push((c.lits().to_vec(), relax, w));
    }
    // stable sort keeps clause order among equal weights
    softs.sort_by_key(|s| std::cmp::Reverse(s.2));

    let mut search = Search {
        formula: f,
        solver,
        softs,
        best: initial,
        aborted: false,
    };
    search.explore(0, &mut Vec::new(), 0)?;
    if search.aborted {
        return Ok(MaxSatResult::Indeterminate {
            lower: 0,
            best: Some(search.best),
        });
    }
    Ok(MaxSatResult::Optimum(search.best))
}
