//! Weighted CNF formulas and the DIMACS WCNF interchange format.
//!
//! The canonical output is the classic header format
//! (`p wcnf <vars> <clauses> <top>`), with hard clauses written using the top
//! weight. The 2022 `h`-prefixed format is accepted on input only.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::lit::{Lit, Var};

/// Clause weight. Hard clauses are serialized with the formula's top weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weight {
    Hard,
    Soft(u64),
}

impl Weight {
    pub fn is_hard(self) -> bool {
        matches!(self, Weight::Hard)
    }

    pub fn soft(self) -> Option<u64> {
        match self {
            Weight::Hard => None,
            Weight::Soft(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClauseError {
    #[error("empty clause")]
    Empty,
    #[error("variable {0} appears twice in one clause")]
    DuplicateVariable(Var),
    #[error("clause contains both {0} and its negation")]
    Tautology(Var),
    #[error("soft clause with weight 0")]
    ZeroWeight,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
    weight: Weight,
}

impl Clause {
    pub fn new(lits: Vec<Lit>, weight: Weight) -> Result<Clause, ClauseError> {
        if lits.is_empty() {
            return Err(ClauseError::Empty);
        }
        if weight == Weight::Soft(0) {
            return Err(ClauseError::ZeroWeight);
        }
        let mut seen: HashSet<Lit> = HashSet::with_capacity(lits.len());
        for &l in &lits {
            if seen.contains(&!l) {
                return Err(ClauseError::Tautology(l.var()));
            }
            if !seen.insert(l) {
                return Err(ClauseError::DuplicateVariable(l.var()));
            }
        }
        Ok(Clause { lits, weight })
    }

    pub fn hard(lits: Vec<Lit>) -> Result<Clause, ClauseError> {
        Clause::new(lits, Weight::Hard)
    }

    pub fn soft(lits: Vec<Lit>, weight: u64) -> Result<Clause, ClauseError> {
        Clause::new(lits, Weight::Soft(weight))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn is_hard(&self) -> bool {
        self.weight.is_hard()
    }

    pub fn is_satisfied(&self, assignment: &[bool]) -> bool {
        self.lits.iter().any(|l| l.eval(assignment))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("literal {lit} exceeds the declared variable count {num_vars}")]
    VarOutOfRange { lit: i32, num_vars: Var },
    #[error("top weight {top} must exceed the soft weight sum {soft_sum}")]
    TopTooSmall { top: u64, soft_sum: u64 },
    #[error("soft weight sum overflows")]
    WeightOverflow,
}

/// A weighted partial Max-SAT formula.
///
/// `top` is kept strictly greater than the sum of all soft weights. Comment
/// lines in `meta` are emitted between the header block and are preserved by
/// a parse/write round trip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcnfFormula {
    num_vars: Var,
    clauses: Vec<Clause>,
    top: u64,
    soft_sum: u64,
    meta: Vec<String>,
}

impl WcnfFormula {
    pub fn new(num_vars: Var) -> WcnfFormula {
        WcnfFormula {
            num_vars,
            clauses: Vec::new(),
            top: 1,
            soft_sum: 0,
            meta: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> Var {
        self.num_vars
    }

    /// Raises the declared variable count. Never lowers it.
    pub fn ensure_vars(&mut self, n: Var) {
        self.num_vars = self.num_vars.max(n);
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn top(&self) -> u64 {
        self.top
    }

    pub fn soft_sum(&self) -> u64 {
        self.soft_sum
    }

    pub fn meta(&self) -> &[String] {
        &self.meta
    }

    pub fn push_meta(&mut self, line: impl Into<String>) {
        self.meta.push(line.into());
    }

    /// Overrides the top weight; it must still exceed the soft weight sum.
    pub fn set_top(&mut self, top: u64) -> Result<(), FormulaError> {
        if top <= self.soft_sum {
            return Err(FormulaError::TopTooSmall {
                top,
                soft_sum: self.soft_sum,
            });
        }
        self.top = top;
        Ok(())
    }

    pub fn add(&mut self, clause: Clause) -> Result<(), FormulaError> {
        for l in clause.lits() {
            if l.var() > self.num_vars {
                return Err(FormulaError::VarOutOfRange {
                    lit: l.to_dimacs(),
                    num_vars: self.num_vars,
                });
            }
        }
        if let Weight::Soft(w) = clause.weight() {
            self.soft_sum = self
                .soft_sum
                .checked_add(w)
                .ok_or(FormulaError::WeightOverflow)?;
            let needed = self.soft_sum.checked_add(1).ok_or(FormulaError::WeightOverflow)?;
            self.top = self.top.max(needed);
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn hard_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| c.is_hard())
    }

    pub fn soft_clauses(&self) -> impl Iterator<Item = (&Clause, u64)> {
        self.clauses
            .iter()
            .filter_map(|c| c.weight().soft().map(|w| (c, w)))
    }

    /// Cost of a total assignment: `None` if a hard clause is falsified,
    /// otherwise the sum of weights of falsified soft clauses.
    pub fn cost(&self, assignment: &[bool]) -> Option<u64> {
        assert!(
            assignment.len() >= self.num_vars as usize,
            "assignment covers {} of {} variables",
            assignment.len(),
            self.num_vars
        );
        let mut cost = 0u64;
        for c in &self.clauses {
            if !c.is_satisfied(assignment) {
                match c.weight() {
                    Weight::Hard => return None,
                    Weight::Soft(w) => cost += w,
                }
            }
        }
        Some(cost)
    }
}

/// A total assignment together with its checked cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    assignment: Vec<bool>,
    cost: u64,
}

impl Model {
    /// Recomputes the cost against `formula`; `None` if a hard clause is falsified.
    pub fn checked(formula: &WcnfFormula, assignment: Vec<bool>) -> Option<Model> {
        let cost = formula.cost(&assignment)?;
        Some(Model { assignment, cost })
    }

    pub fn assignment(&self) -> &[bool] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<bool> {
        self.assignment
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn value(&self, var: Var) -> bool {
        self.assignment[(var - 1) as usize]
    }
}

/// Serializes `f` in canonical classic WCNF form.
pub fn write_dimacs(f: &WcnfFormula) -> String {
    let mut out = String::with_capacity(16 * f.clauses.len() + 64);
    for line in &f.meta {
        if line.is_empty() {
            out.push_str("c\n");
        } else {
            let _ = writeln!(out, "c {line}");
        }
    }
    let _ = writeln!(out, "p wcnf {} {} {}", f.num_vars, f.clauses.len(), f.top);
    for c in &f.clauses {
        let w = match c.weight() {
            Weight::Hard => f.top,
            Weight::Soft(w) => w,
        };
        let _ = write!(out, "{w}");
        for l in c.lits() {
            let _ = write!(out, " {l}");
        }
        out.push_str(" 0\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Clause {
        line: usize,
        #[source]
        source: ClauseError,
    },
    #[error("line {line}: literal {lit} exceeds declared variable count {num_vars}")]
    VarOutOfRange { line: usize, lit: i32, num_vars: Var },
    #[error("header declares {declared} clauses but {found} were found")]
    ClauseCount { declared: usize, found: usize },
    #[error("missing `p wcnf` header")]
    MissingHeader,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

struct Header {
    num_vars: Var,
    num_clauses: usize,
    top: u64,
}

fn parse_header(line: &str, lineno: usize) -> Result<Header, DimacsError> {
    let bad = |msg: &str| DimacsError::Syntax {
        line: lineno,
        msg: msg.to_string(),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "p" || fields[1] != "wcnf" {
        return Err(bad("malformed header, expected `p wcnf <vars> <clauses> <top>`"));
    }
    Ok(Header {
        num_vars: fields[2].parse().map_err(|_| bad("invalid variable count"))?,
        num_clauses: fields[3].parse().map_err(|_| bad("invalid clause count"))?,
        top: fields[4].parse().map_err(|_| bad("invalid top weight"))?,
    })
}

/// Parses the literals of a clause body, which must end with a `0` token.
fn parse_lits<'a>(
    tokens: impl Iterator<Item = &'a str>,
    lineno: usize,
) -> Result<Vec<Lit>, DimacsError> {
    let mut lits = Vec::new();
    let mut terminated = false;
    for tok in tokens {
        if terminated {
            return Err(DimacsError::Syntax {
                line: lineno,
                msg: "tokens after terminating 0".into(),
            });
        }
        let v: i32 = tok.parse().map_err(|_| DimacsError::Syntax {
            line: lineno,
            msg: format!("invalid literal `{tok}`"),
        })?;
        match Lit::from_dimacs(v) {
            Some(l) => lits.push(l),
            None if v == 0 => terminated = true,
            None => {
                return Err(DimacsError::Syntax {
                    line: lineno,
                    msg: format!("invalid literal `{tok}`"),
                })
            }
        }
    }
    if !terminated {
        return Err(DimacsError::Syntax {
            line: lineno,
            msg: "missing terminating 0".into(),
        });
    }
    Ok(lits)
}

/// Parses classic (`p wcnf`) or 2022-style (`h`/weight-prefixed, no header) WCNF.
///
/// Comment lines before the header are kept as metadata; later comments are
/// skipped. Weights at or above `top` are read as hard.
pub fn parse_dimacs(text: &str) -> Result<WcnfFormula, DimacsError> {
    let mut meta = Vec::new();
    let mut header: Option<Header> = None;
    let mut saw_clause = false;
    // (lits, weight, line) collected first so the variable count can be inferred
    let mut pending: Vec<(Vec<Lit>, Weight, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            if header.is_none() && !saw_clause {
                meta.push(line[1..].trim_start().to_string());
            }
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() || saw_clause {
                return Err(DimacsError::Syntax {
                    line: lineno,
                    msg: "unexpected header".into(),
                });
            }
            header = Some(parse_header(line, lineno)?);
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().unwrap_or_default();
        let weight = if first == "h" {
            Weight::Hard
        } else {
            let w: u64 = first.parse().map_err(|_| DimacsError::Syntax {
                line: lineno,
                msg: format!("invalid weight `{first}`"),
            })?;
            match &header {
                Some(h) if w >= h.top => Weight::Hard,
                _ => Weight::Soft(w),
            }
        };
        saw_clause = true;
        let lits = parse_lits(tokens, lineno)?;
        pending.push((lits, weight, lineno));
    }

    let (num_vars, top) = match &header {
        Some(h) => {
            if h.num_clauses != pending.len() {
                return Err(DimacsError::ClauseCount {
                    declared: h.num_clauses,
                    found: pending.len(),
                });
            }
            (h.num_vars, Some(h.top))
        }
        None if pending.is_empty() => return Err(DimacsError::MissingHeader),
        None => {
            let max_var = pending
                .iter()
                .flat_map(|(lits, _, _)| lits.iter().map(|l| l.var()))
                .max()
                .unwrap_or(0);
            (max_var, None)
        }
    };

    let mut formula = WcnfFormula::new(num_vars);
    formula.meta = meta;
    for (lits, weight, line) in pending {
        if let Some(l) = lits.iter().find(|l| l.var() > num_vars) {
            return Err(DimacsError::VarOutOfRange {
                line,
                lit: l.to_dimacs(),
                num_vars,
            });
        }
        let clause = Clause::new(lits, weight).map_err(|source| DimacsError::Clause { line, source })?;
        formula.add(clause)?;
    }
    if let Some(top) = top {
        formula.set_top(top)?;
    }
    Ok(formula)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimum,
    Satisfiable,
    Unsatisfiable,
    Unknown,
}

/// What an external Max-SAT solver reported on stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverOutput {
    pub status: SolverStatus,
    pub cost: Option<u64>,
    pub model: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverOutputError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("model mentions variable {var} but the formula has {num_vars}")]
    ModelOutOfRange { var: u64, num_vars: Var },
    #[error("model assigns {found} variables but the formula has {num_vars}")]
    ModelLength { found: usize, num_vars: Var },
}

/// Parses Max-SAT Evaluation style output (`o`, `s`, `v` lines).
///
/// The last `o` line wins. `v` lines may carry signed literals (unmentioned
/// variables default to false) or a single 0/1 string covering every variable.
pub fn parse_solver_output(text: &str, num_vars: Var) -> Result<SolverOutput, SolverOutputError> {
    let mut status = SolverStatus::Unknown;
    let mut cost = None;
    let mut model: Option<Vec<bool>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        let syntax = |msg: String| SolverOutputError::Syntax { line: lineno, msg };
        if let Some(rest) = line.strip_prefix("s ") {
            status = match rest.trim() {
                "OPTIMUM FOUND" => SolverStatus::Optimum,
                "SATISFIABLE" => SolverStatus::Satisfiable,
                "UNSATISFIABLE" => SolverStatus::Unsatisfiable,
                "UNKNOWN" => SolverStatus::Unknown,
                other => return Err(syntax(format!("unknown status `{other}`"))),
            };
        } else if let Some(rest) = line.strip_prefix("o ") {
            let c: u64 = rest
                .trim()
                .parse()
                .map_err(|_| syntax(format!("invalid cost `{}`", rest.trim())))?;
            cost = Some(c);
        } else if let Some(rest) = line.strip_prefix("v ") {
            let rest = rest.trim();
            let assignment = model.get_or_insert_with(|| vec![false; num_vars as usize]);
            // a bit string unless it could be a single signed literal
            let bits = rest.len() > 1
                && rest.bytes().all(|b| b == b'0' || b == b'1')
                && (rest.len() == num_vars as usize || rest.starts_with('0'));
            if bits {
                if rest.len() != num_vars as usize {
                    return Err(SolverOutputError::ModelLength {
                        found: rest.len(),
                        num_vars,
                    });
                }
                for (slot, b) in assignment.iter_mut().zip(rest.bytes()) {
                    *slot = b == b'1';
                }
                continue;
            }
            for tok in rest.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| syntax(format!("invalid model literal `{tok}`")))?;
                if v == 0 {
                    continue;
                }
                let var = v.unsigned_abs();
                if var > num_vars as u64 {
                    return Err(SolverOutputError::ModelOutOfRange { var, num_vars });
                }
                assignment[(var - 1) as usize] = v > 0;
            }
        }
    }
    Ok(SolverOutput {
        status,
        cost,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(v: i32) -> Lit {
        Lit::from_dimacs(v).unwrap()
    }

    /// x,y,z -> 1,2,3: hard (x ∨ ¬y), (¬x ∨ z); soft (y ∨ z):3, (¬z):4
    fn weighted_example() -> WcnfFormula {
        let mut f = WcnfFormula::new(3);
        f.add(Clause::hard(vec![l(1), l(-2)]).unwrap()).unwrap();
        f.add(Clause::hard(vec![l(-1), l(3)]).unwrap()).unwrap();
        f.add(Clause::soft(vec![l(2), l(3)], 3).unwrap()).unwrap();
        f.add(Clause::soft(vec![l(-3)], 4).unwrap()).unwrap();
        f
    }

    #[test]
    fn writes_weighted_example() {
        assert_eq!(
            write_dimacs(&weighted_example()),
            "p wcnf 3 4 8\n8 1 -2 0\n8 -1 3 0\n3 2 3 0\n4 -3 0\n"
        );
    }

    #[test]
    fn parses_weighted_example() {
        let f = parse_dimacs("p wcnf 3 4 8\n8 1 -2 0\n8 -1 3 0\n3 2 3 0\n4 -3 0\n").unwrap();
        assert_eq!(f.hard_clauses().count(), 2);
        assert_eq!(f.soft_clauses().count(), 2);
        assert_eq!(f, weighted_example());
    }

    #[test]
    fn empty_soft_set_has_top_one() {
        let mut f = WcnfFormula::new(1);
        f.add(Clause::hard(vec![l(1)]).unwrap()).unwrap();
        assert_eq!(f.top(), 1);
        assert_eq!(write_dimacs(&f), "p wcnf 1 1 1\n1 1 0\n");
    }

    #[test]
    fn single_hard_unit() {
        let f = parse_dimacs("p wcnf 1 1 2\n2 1 0\n").unwrap();
        assert_eq!(f.clauses().len(), 1);
        assert!(f.clauses()[0].is_hard());
        assert_eq!(f.top(), 2);
    }

    #[test]
    fn clause_count_mismatch() {
        let err = parse_dimacs("p wcnf 2 3 5\n1 1 0\n1 2 0\n").unwrap_err();
        assert_eq!(err, DimacsError::ClauseCount { declared: 3, found: 2 });
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 1 0\n"), Err(DimacsError::Syntax { .. })));
        assert!(matches!(parse_dimacs("p wcnf 2 1 5\n1 1 2\n"), Err(DimacsError::Syntax { .. })));
        assert!(matches!(
            parse_dimacs("p wcnf 2 1 5\n1 3 0\n"),
            Err(DimacsError::VarOutOfRange { lit: 3, .. })
        ));
        assert!(matches!(
            parse_dimacs("p wcnf 2 1 5\n1 1 -1 0\n"),
            Err(DimacsError::Clause { .. })
        ));
        assert!(matches!(parse_dimacs("c only comments\n"), Err(DimacsError::MissingHeader)));
    }

    #[test]
    fn accepts_2022_format() {
        let f = parse_dimacs("c new style\nh 1 -2 0\nh -1 3 0\n3 2 3 0\n4 -3 0\n").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.top(), 8);
        assert_eq!(f.hard_clauses().count(), 2);
        assert_eq!(f.meta(), &["new style".to_string()]);
    }

    #[test]
    fn weights_above_top_are_hard() {
        let f = parse_dimacs("p wcnf 1 2 10\n12 1 0\n3 -1 0\n").unwrap();
        assert!(f.clauses()[0].is_hard());
        assert_eq!(write_dimacs(&f), "p wcnf 1 2 10\n10 1 0\n3 -1 0\n");
    }

    #[test]
    fn meta_comments_round_trip() {
        let mut f = weighted_example();
        f.push_meta("ttsat 0.1.0");
        f.push_meta("instance abc");
        let text = write_dimacs(&f);
        assert!(text.starts_with("c ttsat 0.1.0\nc instance abc\np wcnf"));
        assert_eq!(write_dimacs(&parse_dimacs(&text).unwrap()), text);
    }

    #[test]
    fn clause_invariants() {
        assert_eq!(Clause::hard(vec![]), Err(ClauseError::Empty));
        assert_eq!(Clause::hard(vec![l(1), l(1)]), Err(ClauseError::DuplicateVariable(1)));
        assert_eq!(Clause::hard(vec![l(1), l(-1)]), Err(ClauseError::Tautology(1)));
        assert_eq!(Clause::soft(vec![l(1)], 0), Err(ClauseError::ZeroWeight));
    }

    #[test]
    fn cost_evaluation() {
        let f = weighted_example();
        assert_eq!(f.cost(&[false, false, false]), Some(3));
        assert_eq!(f.cost(&[true, false, false]), None);
        assert_eq!(f.cost(&[true, true, true]), Some(4));
        let m = Model::checked(&f, vec![false, false, false]).unwrap();
        assert_eq!(m.cost(), 3);
    }

    #[test]
    fn solver_output_optimum() {
        let out = parse_solver_output("o 3\ns OPTIMUM FOUND\nv -1 -2 -3 0\n", 3).unwrap();
        assert_eq!(out.status, SolverStatus::Optimum);
        assert_eq!(out.cost, Some(3));
        assert_eq!(out.model, Some(vec![false, false, false]));
    }

    #[test]
    fn solver_output_unsat() {
        let out = parse_solver_output("s UNSATISFIABLE\n", 3).unwrap();
        assert!(parse_solver_output("s UNSATISFIABLE /tmp/x\n", 3).is_err());
        assert_eq!(out.status, SolverStatus::Unsatisfiable);
        assert_eq!(out.cost, None);
        assert_eq!(out.model, None);
    }

    #[test]
    fn solver_output_last_cost_wins() {
        let out = parse_solver_output("o 10\no 4\ns OPTIMUM FOUND\nv 1 -2 0", 2).unwrap();
        assert_eq!(out.cost, Some(4));
        assert_eq!(out.model, Some(vec![true, false]));
    }

    #[test]
    fn solver_output_bitstring_and_errors() {
        let out = parse_solver_output("s OPTIMUM FOUND\no 0\nv 101\n", 3).unwrap();
        assert_eq!(out.model, Some(vec![true, false, true]));
        assert!(matches!(
            parse_solver_output("v 1 -4 0\n", 3),
            Err(SolverOutputError::ModelOutOfRange { var: 4, .. })
        ));
        assert!(matches!(
            parse_solver_output("v 01\n", 3),
            Err(SolverOutputError::ModelLength { found: 2, .. })
        ));
        assert_eq!(parse_solver_output("c nothing\n", 3).unwrap().status, SolverStatus::Unknown);
    }
}
