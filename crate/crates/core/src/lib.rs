//! Course timetabling compiled to weighted partial Max-SAT.
//!
//! The pipeline is: parse an [`Instance`], [`encode`] it into a
//! [`WcnfFormula`], solve it with [`solve_maxsat`] (built-in or external),
//! then [`decode_timetable`] the model and score it with [`compute_cost`].

pub mod cardinality;
pub mod cnf;
pub mod decode;
pub mod encoder;
pub mod fixture;
pub mod generate;
pub mod lit;
pub mod model;
pub mod solver;

pub use cardinality::{encode_at_least, encode_at_most, encode_exactly, BoundKind, CardError, CardRequest, CardScheme};
pub use cnf::{
    parse_dimacs, parse_solver_output, write_dimacs, Clause, ClauseError, DimacsError, FormulaError, Model,
    SolverOutput, SolverStatus, WcnfFormula, Weight,
};
pub use decode::{
    check_hard, compute_cost, decode_timetable, parse_timetable_csv, render_timetable, DecodeError, HardViolation,
    Placement, RenderFormat, SoftViolation, Timetable, TimetableParseError, ViolationReport,
};
pub use encoder::{encode, EncodeError, EncodeOptions, Encoding, Family, FamilySet, SemanticVar, VarMap};
pub use generate::{gen_random_instance, GenError, GenParams};
pub use lit::{Lit, Var, VarAllocator};
pub use model::{has_errors, parse_instance, validate_instance, Finding, Instance, InstanceError, Severity};
pub use solver::{
    brute_force_maxsat, solve_external, solve_maxsat, solve_sat, MaxSatResult, Optimizer, SatResult, SolverConfig, SolverError, BRUTE_FORCE_MAX_VARS,
};
