//! CNF encodings of cardinality constraints ("at most / at least / exactly
//! k of these literals are true").
//!
//! Three schemes are available:
//!
//! - [`CardScheme::Pairwise`]: the binomial encoding, one clause per
//!   `(k+1)`-subset. No auxiliary variables; only sensible for `k = 1` or
//!   very small inputs.
//! - [`CardScheme::SequentialCounter`]: Sinz's sequential counter, `O(n·k)`
//!   clauses and auxiliaries.
//! - [`CardScheme::Totalizer`]: Bailleux–Boufkhad totalizer with outputs
//!   truncated at `k + 1`. Exactly-k constraints share one tree for both
//!   directions.
//!
//! Every encoding has the projection property: an assignment of the input
//! literals extends to a model of the emitted clauses iff it satisfies the
//! bound. Degenerate bounds (`k = 0`, `k >= n`) never allocate auxiliaries.

use std::collections::HashSet;

use thiserror::Error;

use crate::lit::{Lit, VarAllocator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    AtMost,
    AtLeast,
    Exactly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CardScheme {
    Pairwise,
    SequentialCounter,
    Totalizer,
}

impl CardScheme {
    pub const ALL: [CardScheme; 3] = [
        CardScheme::Pairwise,
        CardScheme::SequentialCounter,
        CardScheme::Totalizer,
    ];

    /// Default choice: pairwise for small at-most-one style bounds, totalizer otherwise.
    pub fn auto(k: usize, n: usize) -> CardScheme {
        if k == 1 && n <= 8 {
            CardScheme::Pairwise
        } else {
            CardScheme::Totalizer
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CardScheme::Pairwise => "pairwise",
            CardScheme::SequentialCounter => "seqcounter",
            CardScheme::Totalizer => "totalizer",
        }
    }
}

impl std::str::FromStr for CardScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pairwise" => Ok(CardScheme::Pairwise),
            "seqcounter" | "sequential" => Ok(CardScheme::SequentialCounter),
            "totalizer" => Ok(CardScheme::Totalizer),
            other => Err(format!("unknown cardinality scheme `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CardError {
    #[error("cardinality constraint over an empty literal list")]
    EmptyLiterals,
    #[error("variable {0} occurs more than once in a cardinality constraint")]
    DuplicateVariable(u32),
    #[error("bound {k} exceeds the number of literals ({n})")]
    BoundExceedsLiterals { k: usize, n: usize },
}

/// A fully specified cardinality constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardRequest {
    pub bound_kind: BoundKind,
    pub k: usize,
    pub literals: Vec<Lit>,
    pub scheme: CardScheme,
}

impl CardRequest {
    pub fn encode(&self, alloc: &mut VarAllocator) -> Result<Vec<Vec<Lit>>, CardError> {
        match self.bound_kind {
            BoundKind::AtMost => encode_at_most(self.k, &self.literals, self.scheme, alloc),
            BoundKind::AtLeast => encode_at_least(self.k, &self.literals, self.scheme, alloc),
            BoundKind::Exactly => encode_exactly(self.k, &self.literals, self.scheme, alloc),
        }
    }
}

fn check_literals(lits: &[Lit]) -> Result<(), CardError> {
    if lits.is_empty() {
        return Err(CardError::EmptyLiterals);
    }
    let mut seen = HashSet::with_capacity(lits.len());
    for l in lits {
        if !seen.insert(l.var()) {
            return Err(CardError::DuplicateVariable(l.var()));
        }
    }
    Ok(())
}

fn all_units(lits: &[Lit], negate: bool) -> Vec<Vec<Lit>> {
    lits.iter()
        .map(|&l| vec![if negate { !l } else { l }])
        .collect()
}

/// At most `k` of `lits` are true. A bound `k >= n` is vacuous and emits nothing.
pub fn encode_at_most(
    k: usize,
    lits: &[Lit],
    scheme: CardScheme,
    alloc: &mut VarAllocator,
) -> Result<Vec<Vec<Lit>>, CardError> {
    check_literals(lits)?;
    let n = lits.len();
    if k >= n {
        return Ok(Vec::new());
    }
    if k == 0 {
        return Ok(all_units(lits, true));
    }
    Ok(match scheme {
        CardScheme::Pairwise => pairwise_at_most(k, lits),
        CardScheme::SequentialCounter => seqcounter_at_most(k, lits, alloc),
        CardScheme::Totalizer => {
            let mut clauses = Vec::new();
            let root = totalizer_tree(lits, k + 1, true, false, alloc, &mut clauses);
            clauses.push(vec![!root[k]]);
            clauses
        }
    })
}

/// At least `k` of `lits` are true.
pub fn encode_at_least(
    k: usize,
    lits: &[Lit],
    scheme: CardScheme,
    alloc: &mut VarAllocator,
) -> Result<Vec<Vec<Lit>>, CardError> {
    check_literals(lits)?;
    let n = lits.len();
    if k > n {
        return Err(CardError::BoundExceedsLiterals { k, n });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    if k == n {
        return Ok(all_units(lits, false));
    }
    Ok(match scheme {
        CardScheme::Totalizer => {
            let mut clauses = Vec::new();
            let root = totalizer_tree(lits, k, false, true, alloc, &mut clauses);
            clauses.push(vec![root[k - 1]]);
            clauses
        }
        // at least k of L  <=>  at most n-k of ¬L
        CardScheme::Pairwise | CardScheme::SequentialCounter => {
            let negated: Vec<Lit> = lits.iter().map(|&l| !l).collect();
            encode_at_most(n - k, &negated, scheme, alloc)?
        }
    })
}

/// Exactly `k` of `lits` are true.
pub fn encode_exactly(
    k: usize,
    lits: &[Lit],
    scheme: CardScheme,
    alloc: &mut VarAllocator,
) -> Result<Vec<Vec<Lit>>, CardError> {
    check_literals(lits)?;
    let n = lits.len();
    if k > n {
        return Err(CardError::BoundExceedsLiterals { k, n });
    }
    if k == 0 {
        return Ok(all_units(lits, true));
    }
    if k == n {
        return Ok(all_units(lits, false));
    }
    match scheme {
        CardScheme::Totalizer => {
            let mut clauses = Vec::new();
            let root = totalizer_tree(lits, k + 1, true, true, alloc, &mut clauses);
            clauses.push(vec![root[k - 1]]);
            clauses.push(vec![!root[k]]);
            Ok(clauses)
        }
        CardScheme::Pairwise | CardScheme::SequentialCounter => {
            let mut clauses = encode_at_least(k, lits, scheme, alloc)?;
            clauses.extend(encode_at_most(k, lits, scheme, alloc)?);
            Ok(clauses)
        }
    }
}

/// One clause `¬x_1 ∨ … ∨ ¬x_{k+1}` for every `(k+1)`-subset, in lexicographic order.
fn pairwise_at_most(k: usize, lits: &[Lit]) -> Vec<Vec<Lit>> {
    let n = lits.len();
    let size = k + 1;
    let mut clauses = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        clauses.push(idx.iter().map(|&i| !lits[i]).collect());
        // advance to the next combination
        let mut pos = size;
        loop {
            if pos == 0 {
                return clauses;
            }
            pos -= 1;
            if idx[pos] < n - size + pos {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Sinz's sequential counter for `1 <= k < n`. Register `s[i][j]` means
/// "at least `j+1` of the first `i+1` inputs are true".
fn seqcounter_at_most(k: usize, lits: &[Lit], alloc: &mut VarAllocator) -> Vec<Vec<Lit>> {
    let n = lits.len();
    let regs: Vec<Vec<Lit>> = (0..n - 1)
        .map(|_| (0..k).map(|_| Lit::pos(alloc.fresh())).collect())
        .collect();
    let mut clauses = Vec::new();

    clauses.push(vec![!lits[0], regs[0][0]]);
    for &r in &regs[0][1..] {
        clauses.push(vec![!r]);
    }
    for i in 1..n - 1 {
        clauses.push(vec![!lits[i], regs[i][0]]);
        clauses.push(vec![!regs[i - 1][0], regs[i][0]]);
        for j in 1..k {
            clauses.push(vec![!lits[i], !regs[i - 1][j - 1], regs[i][j]]);
            clauses.push(vec![!regs[i - 1][j], regs[i][j]]);
        }
        clauses.push(vec![!lits[i], !regs[i - 1][k - 1]]);
    }
    clauses.push(vec![!lits[n - 1], !regs[n - 2][k - 1]]);
    clauses
}

/// Builds a totalizer over `lits` whose unary outputs are truncated at
/// `limit`: output `j` (0-based) holds iff at least `j+1` inputs are true.
/// `up` emits the clauses pushing counts upward (needed for upper bounds),
/// `down` the ones pushing them downward (needed for lower bounds).
fn totalizer_tree(
    lits: &[Lit],
    limit: usize,
    up: bool,
    down: bool,
    alloc: &mut VarAllocator,
    clauses: &mut Vec<Vec<Lit>>,
) -> Vec<Lit> {
    if lits.len() == 1 {
        return vec![lits[0]];
    }
    let mid = lits.len() / 2;
    let left = totalizer_tree(&lits[..mid], limit, up, down, alloc, clauses);
    let right = totalizer_tree(&lits[mid..], limit, up, down, alloc, clauses);
    let width = (left.len() + right.len()).min(limit);
    let out: Vec<Lit> = (0..width).map(|_| Lit::pos(alloc.fresh())).collect();

    for i in 0..=left.len() {
        for j in 0..=right.len() {
            if up && i + j >= 1 {
                let mut c = Vec::with_capacity(3);
                if i > 0 {
                    c.push(!left[i - 1]);
                }
                if j > 0 {
                    c.push(!right[j - 1]);
                }
                c.push(out[(i + j).min(width) - 1]);
                clauses.push(c);
            }
            if down && i + j < width {
                let mut c = Vec::with_capacity(3);
                if i < left.len() {
                    c.push(left[i]);
                }
                if j < right.len() {
                    c.push(right[j]);
                }
                c.push(!out[i + j]);
                clauses.push(c);
            }
        }
    }
    out
}
