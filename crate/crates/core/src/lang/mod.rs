//! Syntax trees, types, values, and machine state shared by every stage.

pub mod ast;
pub mod bits;
pub mod state;
pub mod types;
pub mod value;

pub use ast::*;
pub use bits::Bitvec;
pub use state::{MachineState, RegInfo, RegionInfo, Shape, StateError};
pub use types::Type;
pub use value::{Pointer, RegId, RegionId, Value};
