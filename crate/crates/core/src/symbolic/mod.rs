//! Differential equivalence checking for arbitrary drifts through an SMT
//! solver.

pub mod formula;
pub mod refine;
pub mod smt;
pub mod solver;

pub use formula::{build_pair_fde, build_phi_bde, build_phi_fde, primed_names, Formula};
pub use refine::{symbolic_check, symbolic_coarsest, SymbolicCheck, SymbolicError, SymbolicOutcome};
pub use smt::smt_emit;
pub use solver::{solver_invoke, SolverCommand, SolverError, Verdict, DEFAULT_TIMEOUT};
