//! Boolean variables and literals shared by every layer of the pipeline.

use std::fmt;
use std::ops::Not;

/// A CNF variable index. Valid variables start at 1 (DIMACS convention).
pub type Var = u32;

/// A literal: a variable or its negation, stored as a signed DIMACS integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    /// Panics if `var` is 0 or does not fit in a DIMACS literal.
    pub fn new(var: Var, negated: bool) -> Lit {
        assert!(var >= 1 && var <= i32::MAX as u32, "variable index out of range: {var}");
        let v = var as i32;
        Lit(if negated { -v } else { v })
    }

    pub fn pos(var: Var) -> Lit {
        Lit::new(var, false)
    }

    pub fn neg(var: Var) -> Lit {
        Lit::new(var, true)
    }

    /// Returns `None` for 0, which is the DIMACS clause terminator.
    pub fn from_dimacs(value: i32) -> Option<Lit> {
        if value == 0 || value == i32::MIN {
            None
        } else {
            Some(Lit(value))
        }
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        self.0.unsigned_abs()
    }

    pub fn is_negated(self) -> bool {
        self.0 < 0
    }

    /// Truth value of the literal under an assignment indexed by `var - 1`.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[(self.var() - 1) as usize] != self.is_negated()
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Hands out fresh variables above every variable already in use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarAllocator {
    next: Var,
}

impl VarAllocator {
    /// `used` is the highest variable index already taken (0 if none).
    pub fn new(used: Var) -> VarAllocator {
        VarAllocator { next: used + 1 }
    }

    pub fn fresh(&mut self) -> Var {
        let v = self.next;
        self.next += 1;
        v
    }

    /// Highest variable handed out so far (or the initial `used` value).
    pub fn max_var(&self) -> Var {
        self.next - 1
    }
}
