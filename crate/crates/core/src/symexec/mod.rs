//! Symbolic execution over hash-consed terms.

pub mod exec;
pub mod term;
pub mod value;

pub use exec::{
    assignment_of, concretize_outcome, frame_holds, holds, spec_conditions, spec_globals, values_equal, Loc,
    SpecConditions, SymError, SymExec, SymInst, SymOutcome, SymState,
};
pub use term::{Assignment, CVal, Sort, TermId, Terms};
pub use value::{canonicalize, merge_values, Leaf, SymTree, SymValue};
