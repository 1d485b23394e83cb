//! Machine descriptions, specifications, lowering, symbolic execution, and
//! counterexample-guided synthesis of assembly blocks.

pub mod lang;
pub mod lower;
pub mod batch;
pub mod corpus;
pub mod interp;
pub mod machine;
pub mod sample;
pub mod smt;
pub mod symexec;
pub mod synth;
pub mod syntax;
pub mod typeck;
