//! Exhaustive reference optimizer.

use crate::cnf::{Model, WcnfFormula};
use crate::solver::{MaxSatResult, SolverError};

pub const BRUTE_FORCE_MAX_VARS: u32 = 22;

/// Enumerates all `2^n` assignments and returns the cheapest one satisfying
/// every hard clause. Ties go to the assignment that is smallest when read
/// as a binary number with variable 1 as the least significant bit.
pub fn brute_force_maxsat(f: &WcnfFormula) -> Result<MaxSatResult, SolverError> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(SolverError::TooManyVariables {
            num_vars: n,
            max: BRUTE_FORCE_MAX_VARS,
        });
    }
    // clause as (positive mask, negative mask, weight or None for hard)
    let masks: Vec<(u32, u32, Option<u64>)> = f
        .clauses()
        .iter()
        .map(|c| {
            let mut pos = 0u32;
            let mut neg = 0u32;
            for l in c.lits() {
                let bit = 1u32 << (l.var() - 1);
                if l.is_negated() {
                    neg |= bit;
                } else {
                    pos |= bit;
                }
            }
            (pos, neg, c.weight().soft())
        })
        .collect();

    let mut best: Option<(u64, u32)> = None;
    'assignments: for a in 0u32..(1u32 << n) {
        let mut cost = 0u64;
        for &(pos, neg, w) in &masks {
            if (a & pos) | (!a & neg) == 0 {
                match w {
                    None => continue 'assignments,
                    Some(w) => cost += w,
                }
            }
        }
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, a));
        }
    }

    Ok(match best {
        None => MaxSatResult::HardUnsat,
        Some((cost, a)) => {
            let assignment: Vec<bool> = (0..n).map(|i| a >> i & 1 == 1).collect();
            let model = Model::checked(f, assignment)
                .ok_or_else(|| SolverError::Internal("brute force model rejected".into()))?;
            debug_assert_eq!(model.cost(), cost);
            MaxSatResult::Optimum(model)
        }
    })
}
