//! Runtime values and the operators over them.

use super::ast::{Binop, Unop};
use super::bits::Bitvec;
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionId(pub u32);

/// A pointer into a memory region; `offset` is in bytes and `width` is the
/// region's reference width.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pointer {
    pub region: RegionId,
    pub offset: u64,
    pub width: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Unit,
    Bool(bool),
    Int(BigInt),
    Bits(Bitvec),
    Ptr(Pointer),
    Reg(RegId),
    RegSet(BTreeSet<RegId>, u32),
    Str(String),
    Fail,
}

impl Value {
    pub fn bits(width: u32, v: u64) -> Value {
        Value::Bits(Bitvec::from_u64(width, v))
    }

    pub fn int(i: i64) -> Value {
        Value::Int(BigInt::from(i))
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Value::Fail)
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_bits(&self) -> Option<&Bitvec> {
        match self {
            Value::Bits(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_reg(&self) -> Option<RegId> {
        match self {
            Value::Reg(r) => Some(*r),
            _ => None,
        }
    }

    /// Width of a word value (bitvector or pointer).
    pub fn word_width(&self) -> Option<u32> {
        match self {
            Value::Bits(b) => Some(b.width()),
            Value::Ptr(p) => Some(p.width),
            _ => None,
        }
    }

    pub fn is_word(&self) -> bool {
        self.word_width().is_some()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "()"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bits(b) => write!(f, "{b}"),
            Value::Ptr(p) => write!(f, "[region#{}, {}]", p.region.0, p.offset),
            Value::Reg(r) => write!(f, "reg#{}", r.0),
            Value::RegSet(s, _) => {
                let v: Vec<String> = s.iter().map(|r| format!("reg#{}", r.0)).collect();
                write!(f, "{{{}}}", v.join(", "))
            }
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Fail => write!(f, "fail"),
        }
    }
}

fn pointer_offset(p: &Pointer, delta: &Bitvec, add: bool) -> Value {
    let off = Bitvec::from_u64(p.width, p.offset);
    let r = if add { off.add(delta) } else { off.sub(delta) };
    Value::Ptr(Pointer { region: p.region, offset: r.to_u64().unwrap_or(0), width: p.width })
}

/// Equality over base values; pointers never equal bitvectors.
pub fn values_equal(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Fail, _) | (_, Value::Fail) => Value::Fail,
        (Value::Ptr(_), Value::Bits(_)) | (Value::Bits(_), Value::Ptr(_)) => Value::Bool(false),
        _ => Value::Bool(a == b),
    }
}

/// Bitvector operators. Only `b+` and `b-` accept a pointer (with a bitvector
/// on the other side); every other pointer use fails, as does division by zero.
pub fn bv_binop(op: Binop, v1: &Value, v2: &Value) -> Value {
    use Binop::*;
    let (a, b) = match (v1, v2) {
        (Value::Bits(a), Value::Bits(b)) if a.width() == b.width() => (a, b),
        (Value::Ptr(p), Value::Bits(d)) if matches!(op, BAdd | BSub) && d.width() == p.width => {
            return pointer_offset(p, d, op == BAdd);
        }
        (Value::Bits(d), Value::Ptr(p)) if op == BAdd && d.width() == p.width => {
            return pointer_offset(p, d, true);
        }
        (Value::Ptr(p), Value::Ptr(q))
            if matches!(op, BLt | BLe | BGt | BGe) && p.region == q.region =>
        {
            let r = match op {
                BLt => p.offset < q.offset,
                BLe => p.offset <= q.offset,
                BGt => p.offset > q.offset,
                _ => p.offset >= q.offset,
            };
            return Value::Bool(r);
        }
        _ => return Value::Fail,
    };
    match op {
        BAdd => Value::Bits(a.add(b)),
        BSub => Value::Bits(a.sub(b)),
        BMul => Value::Bits(a.mul(b)),
        BDiv => a.udiv(b).map(Value::Bits).unwrap_or(Value::Fail),
        BAnd => Value::Bits(a.and(b)),
        BOr => Value::Bits(a.or(b)),
        BXor => Value::Bits(a.xor(b)),
        Shl => Value::Bits(a.shl(b)),
        Shr => Value::Bits(a.lshr(b)),
        Sar => Value::Bits(a.ashr(b)),
        BLt => Value::Bool(a.ult(b)),
        BLe => Value::Bool(!b.ult(a)),
        BGt => Value::Bool(b.ult(a)),
        BGe => Value::Bool(!a.ult(b)),
        BSLt => Value::Bool(a.slt(b)),
        BSLe => Value::Bool(!b.slt(a)),
        BSGt => Value::Bool(b.slt(a)),
        BSGe => Value::Bool(!a.slt(b)),
        _ => Value::Fail,
    }
}

/// Every binary operator except the short-circuiting `&&` and `||`, which the
/// evaluators handle themselves.
pub fn binop(op: Binop, v1: &Value, v2: &Value) -> Value {
    use Binop::*;
    if v1.is_fail() || v2.is_fail() {
        return Value::Fail;
    }
    match op {
        Eq => values_equal(v1, v2),
        Neq => match values_equal(v1, v2) {
            Value::Bool(b) => Value::Bool(!b),
            v => v,
        },
        Add | Sub | Mul | Div | Lt | Le | Gt | Ge => {
            let (Value::Int(a), Value::Int(b)) = (v1, v2) else { return Value::Fail };
            match op {
                Add => Value::Int(a + b),
                Sub => Value::Int(a - b),
                Mul => Value::Int(a * b),
                Div if b.is_zero() => Value::Fail,
                Div => Value::Int(a / b),
                Lt => Value::Bool(a < b),
                Le => Value::Bool(a <= b),
                Gt => Value::Bool(a > b),
                _ => Value::Bool(a >= b),
            }
        }
        And | Or | Xor => {
            let (Value::Bool(a), Value::Bool(b)) = (v1, v2) else { return Value::Fail };
            Value::Bool(match op {
                And => *a && *b,
                Or => *a || *b,
                _ => a != b,
            })
        }
        Union | Intersect | Minus | Subset => {
            let (Value::RegSet(a, w), Value::RegSet(b, _)) = (v1, v2) else { return Value::Fail };
            match op {
                Union => Value::RegSet(a.union(b).copied().collect(), *w),
                Intersect => Value::RegSet(a.intersection(b).copied().collect(), *w),
                Minus => Value::RegSet(a.difference(b).copied().collect(), *w),
                _ => Value::Bool(a.is_subset(b)),
            }
        }
        Member => match (v1, v2) {
            (Value::Reg(r), Value::RegSet(s, _)) => Value::Bool(s.contains(r)),
            _ => Value::Fail,
        },
        _ => bv_binop(op, v1, v2),
    }
}

pub fn unop(op: Unop, v: &Value) -> Value {
    match (op, v) {
        (Unop::Neg, Value::Int(i)) => Value::Int(-i),
        (Unop::Not, Value::Bool(b)) => Value::Bool(!b),
        (Unop::BNeg, Value::Bits(b)) => Value::Bits(b.neg()),
        (Unop::BNot, Value::Bits(b)) => Value::Bits(b.not()),
        _ => Value::Fail,
    }
}

/// Bit `lo` alone, or the half-open slice `lo..hi`.
pub fn bit_extract(v: &Value, lo: u32, hi: Option<u32>) -> Value {
    let Value::Bits(b) = v else { return Value::Fail };
    let hi = hi.unwrap_or(lo + 1);
    if lo >= hi || hi > b.width() {
        return Value::Fail;
    }
    Value::Bits(b.extract(lo, hi))
}

fn int_arg(v: &Value) -> Option<u32> {
    v.as_int().and_then(|i| if i.is_negative() { None } else { i.to_u32() })
}

/// Context-free builtins. Returns `None` for names this function does not
/// handle; misuse of a known builtin yields `Fail`.
pub fn builtin(name: &str, args: &[Value]) -> Option<Value> {
    if args.iter().any(Value::is_fail) {
        return Some(Value::Fail);
    }
    let v = match (name, args) {
        ("bv_to_len", [n, Value::Bits(b)]) => match int_arg(n) {
            Some(w) if w > 0 => Value::Bits(b.resize(w)),
            _ => Value::Fail,
        },
        ("bv_to_uint", [Value::Bits(b)]) => Value::Int(BigInt::from(b.bits().clone())),
        ("uint_to_bv_l", [n, Value::Int(i)]) => match int_arg(n) {
            Some(w) if w > 0 && !i.is_negative() => {
                Value::Bits(Bitvec::new(w, i.to_biguint().unwrap_or_else(BigUint::zero)))
            }
            _ => Value::Fail,
        },
        ("isptr", [v]) => match v {
            Value::Ptr(_) => Value::Bool(true),
            Value::Bits(_) => Value::Bool(false),
            _ => Value::Fail,
        },
        ("empty", [n]) => match int_arg(n) {
            Some(w) if w > 0 => Value::RegSet(BTreeSet::new(), w),
            _ => Value::Fail,
        },
        ("hex", [Value::Bits(b)]) => Value::Str(format!("0x{}", b.to_hex_string())),
        ("hex", [Value::Int(i)]) => Value::Str(format!("0x{}", i.to_str_radix(16))),
        ("bin", [Value::Bits(b)]) => Value::Str(format!("0b{}", b.to_bin_string())),
        ("bin", [Value::Int(i)]) => Value::Str(format!("0b{}", i.to_str_radix(2))),
        ("dec", [Value::Bits(b)]) => Value::Str(b.bits().to_string()),
        ("dec", [Value::Int(i)]) => Value::Str(i.to_string()),
        ("format", [Value::Str(fmt), rest @ ..]) => match format_string(fmt, rest) {
            Some(s) => Value::Str(s),
            None => Value::Fail,
        },
        ("bv_to_len" | "bv_to_uint" | "uint_to_bv_l" | "isptr" | "empty" | "hex" | "bin"
        | "dec" | "format", _) => Value::Fail,
        _ => return None,
    };
    Some(v)
}

fn display_arg(v: &Value) -> Option<String> {
    match v {
        Value::Str(s) => Some(s.clone()),
        Value::Int(i) => Some(i.to_string()),
        Value::Bits(b) => Some(b.literal()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Substitutes `$N` and `{N}` (1-based) with the display form of the
/// arguments; `$$` is a literal dollar sign.
pub fn format_string(fmt: &str, args: &[Value]) -> Option<String> {
    let chars: Vec<char> = fmt.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    let digits_at = |start: usize| {
        let mut j = start;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '$' && i + 1 < chars.len() && chars[i + 1] == '$' {
            out.push('$');
            i += 2;
            continue;
        }
        if c == '$' || c == '{' {
            let j = digits_at(i + 1);
            let closed = c == '$' || (j < chars.len() && chars[j] == '}');
            if j > i + 1 && closed {
                let n: usize = chars[i + 1..j].iter().collect::<String>().parse().ok()?;
                let arg = args.get(n.checked_sub(1)?)?;
                out.push_str(&display_arg(arg)?);
                i = if c == '{' { j + 1 } else { j };
                continue;
            }
        }
        out.push(c);
        i += 1;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ptr(off: u64) -> Value {
        Value::Ptr(Pointer { region: RegionId(0), offset: off, width: 32 })
    }

    #[test]
    fn small_width_addition() {
        assert_eq!(bv_binop(Binop::BAdd, &Value::bits(4, 2), &Value::bits(4, 3)), Value::bits(4, 5));
    }

    #[test]
    fn pointer_offset_arithmetic() {
        assert_eq!(bv_binop(Binop::BAdd, &ptr(4), &Value::bits(32, 4)), ptr(8));
        assert_eq!(bv_binop(Binop::BSub, &ptr(8), &Value::bits(32, 4)), ptr(4));
        assert_eq!(bv_binop(Binop::BAdd, &Value::bits(32, 4), &ptr(4)), ptr(8));
    }

    #[test]
    fn other_pointer_arithmetic_fails() {
        assert_eq!(bv_binop(Binop::BMul, &ptr(4), &Value::bits(32, 2)), Value::Fail);
        assert_eq!(bv_binop(Binop::BAnd, &ptr(4), &Value::bits(32, 2)), Value::Fail);
        assert_eq!(bv_binop(Binop::BSub, &Value::bits(32, 4), &ptr(4)), Value::Fail);
        assert_eq!(bv_binop(Binop::BLt, &ptr(4), &Value::bits(32, 2)), Value::Fail);
    }

    #[test]
    fn same_region_pointer_comparison() {
        assert_eq!(bv_binop(Binop::BLt, &ptr(0), &ptr(4)), Value::Bool(true));
        let other = Value::Ptr(Pointer { region: RegionId(1), offset: 4, width: 32 });
        assert_eq!(bv_binop(Binop::BLt, &ptr(0), &other), Value::Fail);
    }

    #[test]
    fn division_by_zero_fails() {
        assert_eq!(bv_binop(Binop::BDiv, &Value::bits(4, 3), &Value::bits(4, 0)), Value::Fail);
    }

    #[test]
    fn pointer_never_equals_bits() {
        assert_eq!(values_equal(&ptr(0), &Value::bits(32, 0)), Value::Bool(false));
        assert_eq!(values_equal(&ptr(0), &ptr(0)), Value::Bool(true));
    }

    #[test]
    fn extraction() {
        assert_eq!(bit_extract(&Value::bits(4, 0b0010), 0, None), Value::bits(1, 0));
        assert_eq!(bit_extract(&Value::bits(4, 0b0110), 1, Some(3)), Value::bits(2, 0b11));
        assert_eq!(bit_extract(&ptr(0), 0, None), Value::Fail);
    }

    #[test]
    fn builtins() {
        assert_eq!(builtin("bv_to_uint", &[Value::bits(4, 0b1010)]), Some(Value::int(10)));
        assert_eq!(builtin("uint_to_bv_l", &[Value::int(4), Value::int(10)]), Some(Value::bits(4, 10)));
        assert_eq!(builtin("isptr", &[ptr(0)]), Some(Value::Bool(true)));
        assert_eq!(builtin("bv_to_len", &[Value::int(2), Value::bits(4, 0b1110)]), Some(Value::bits(2, 0b10)));
        assert_eq!(builtin("dec", &[Value::bits(16, 0x58)]), Some(Value::Str("88".into())));
        assert_eq!(builtin("isptr", &[Value::int(3)]), Some(Value::Fail));
        assert_eq!(builtin("nosuch", &[]), None);
    }

    #[test]
    fn format_accepts_both_placeholder_styles() {
        let args = [Value::Str("$4".into()), Value::Str("88".into())];
        assert_eq!(format_string("lw {1}, {2}", &args).unwrap(), "lw $4, 88");
        assert_eq!(format_string("lw $1, $2 $$", &args).unwrap(), "lw $4, 88 $");
        assert_eq!(format_string("{3}", &args), None);
    }
}
