//! Stratified core-guided optimization (Fu–Malik with weight splitting).
//!
//! Every soft clause `C` is loaded as `C ∨ b` and `¬b` is assumed. An
//! unsatisfiable core raises the lower bound by its minimum weight `w`; each
//! clause in the core gets a fresh relaxation variable (a clause heavier than
//! `w` is split into a residue of the remaining weight and a relaxed copy of
//! weight `w`), and exactly one of the new relaxation variables may be true.
//! Softs enter the assumption set in decreasing weight strata. The search
//! stops when all softs are assumed and the solver answers SAT, or when a
//! known model already meets the lower bound.

use crate::cardinality::{encode_exactly, CardScheme};
use crate::cnf::{Model, WcnfFormula};
use crate::lit::{Lit, Var, VarAllocator};
use crate::solver::{checked_model, hard_solver, MaxSatResult, SatOutcome, SolverConfig, SolverError};

struct Soft {
    lits: Vec<Lit>,
    weight: u64,
    blocker: Var,
}

fn keep_best(best: &mut Option<Model>, candidate: Model) {
    if best.as_ref().is_none_or(|b| candidate.cost() < b.cost()) {
        *best = Some(candidate);
    }
}

pub(super) fn solve(f: &WcnfFormula, cfg: &SolverConfig) -> Result<MaxSatResult, SolverError> {
    let mut solver = hard_solver(f, cfg);
    let mut best: Option<Model> = None;

    match solver.solve(&[]) {
        SatOutcome::Unsat => return Ok(MaxSatResult::HardUnsat),
        SatOutcome::Unknown => return Ok(MaxSatResult::Indeterminate { lower: 0, best: None }),
        SatOutcome::Sat => keep_best(&mut best, checked_model(f, solver.model())?),
    }

    let mut alloc = VarAllocator::new(f.num_vars());
    let mut softs: Vec<Soft> = Vec::new();
    for (c, w) in f.soft_clauses() {
        let blocker = alloc.fresh();
        let mut clause = c.lits().to_vec();
        clause.push(Lit::pos(blocker));
        solver.add_clause(&clause);
        softs.push(Soft {
            lits: c.lits().to_vec(),
            weight: w,
            blocker,
        });
    }

    let mut threshold = softs.iter().map(|s| s.weight).max().unwrap_or(0);
    let mut lower = 0u64;

    loop {
        if best.as_ref().is_some_and(|b| b.cost() == lower) {
            return Ok(MaxSatResult::Optimum(best.unwrap()));
        }
        let active: Vec<usize> = (0..softs.len())
            .filter(|&i| softs[i].weight >= threshold)
            .collect();
        let assumptions: Vec<Lit> = active.iter().map(|&i| Lit::neg(softs[i].blocker)).collect();

        match solver.solve(&assumptions) {
            SatOutcome::Unknown => return Ok(MaxSatResult::Indeterminate { lower, best }),
            SatOutcome::Sat => {
                let model = checked_model(f, solver.model())?;
                keep_best(&mut best, model);
                let next = softs.iter().map(|s| s.weight).filter(|&w| w < threshold).max();
                let Some(next) = next else {
                    let best = best.unwrap();
                    if best.cost() != lower {
                        return Err(SolverError::Internal(format!(
                            "final model costs {} but the core bound is {lower}",
                            best.cost()
                        )));
                    }
                    return Ok(MaxSatResult::Optimum(best));
                };
                threshold = next;
            }
            SatOutcome::Unsat => {
                let core: Vec<usize> = solver
                    .core()
                    .iter()
                    .filter_map(|l| active.iter().copied().find(|&i| softs[i].blocker == l.var()))
                    .collect();
                if core.is_empty() {
                    return Err(SolverError::Internal(
                        "empty core although the hard clauses are satisfiable".into(),
                    ));
                }
                let min_w = core.iter().map(|&i| softs[i].weight).min().unwrap();
                lower += min_w;

                let mut relax = Vec::with_capacity(core.len());
                for &i in &core {
                    let r = Lit::pos(alloc.fresh());
                    relax.push(r);
                    let mut lits = softs[i].lits.clone();
                    lits.push(r);
                    let blocker = alloc.fresh();
                    let mut clause = lits.clone();
                    clause.push(Lit::pos(blocker));
                    solver.add_clause(&clause);
                    if softs[i].weight > min_w {
                        softs[i].weight -= min_w;
                        softs.push(Soft {
                            lits,
                            weight: min_w,
                            blocker,
                        });
                    } else {
                        // retire the old copy by satisfying its blocker for good
                        solver.add_clause(&[Lit::pos(softs[i].blocker)]);
                        softs[i] = Soft {
                            lits,
                            weight: min_w,
                            blocker,
                        };
                    }
                }
                let scheme = CardScheme::auto(1, relax.len());
                let card = encode_exactly(1, &relax, scheme, &mut alloc)
                    .map_err(|e| SolverError::Internal(e.to_string()))?;
                for c in &card {
                    solver.add_clause(c);
                }
            }
        }
    }
}
