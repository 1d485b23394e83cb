//! Resolved types.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Unit,
    Int,
    Bool,
    Str,
    Bits(u32),
    Reg(u32),
    RegSet(u32),
    Label(u32),
    Mem { cell: u32, len: u32, refw: u32 },
    Func(Vec<Type>, Box<Type>),
    Proc(Vec<Type>),
}

impl Type {
    pub fn is_base(&self) -> bool {
        !matches!(self, Type::Mem { .. } | Type::Func(..) | Type::Proc(_))
    }

    /// Width of a value usable as a bitvector (labels and pointers included).
    pub fn bits_width(&self) -> Option<u32> {
        match self {
            Type::Bits(w) | Type::Label(w) => Some(*w),
            _ => None,
        }
    }

    /// Label values are pointers and may stand wherever a bitvector of the
    /// same width is expected.
    pub fn compatible(&self, other: &Type) -> bool {
        match (self.bits_width(), other.bits_width()) {
            (Some(a), Some(b)) => a == b,
            _ => self == other,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Unit => write!(f, "unit"),
            Type::Int => write!(f, "int"),
            Type::Bool => write!(f, "bool"),
            Type::Str => write!(f, "string"),
            Type::Bits(w) => write!(f, "{w} bit"),
            Type::Reg(w) => write!(f, "{w} reg"),
            Type::RegSet(w) => write!(f, "{w} reg set"),
            Type::Label(w) => write!(f, "{w} label"),
            Type::Mem { cell, len, refw } => write!(f, "{cell} bit {len} len {refw} ref"),
            Type::Func(ps, r) => {
                write!(f, "(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ") {r}")
            }
            Type::Proc(ps) => {
                write!(f, "proc(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}
