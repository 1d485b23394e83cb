//! Typing judgments for types, expressions, and statements.

use crate::lang::ast::*;
use crate::lang::types::Type;
use num_traits::ToPrimitive;
use std::collections::HashMap;

/// Type aliases (Δ), identifier types (Γ), integer constants usable as sizes,
/// and operation signatures.
#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    pub aliases: HashMap<Ident, Type>,
    pub vars: HashMap<Ident, Type>,
    pub consts: HashMap<Ident, i64>,
    pub ops: HashMap<Ident, Vec<Type>>,
}

/// Local bindings introduced by `let`, parameters, and loop binders.
pub type Scope = Vec<(Ident, Type)>;

type TResult<T> = Result<T, String>;

pub const BUILTINS: &[&str] = &[
    "bv_to_len",
    "bv_to_uint",
    "uint_to_bv_l",
    "isptr",
    "empty",
    "hex",
    "bin",
    "dec",
    "lbl",
    "textlabel",
    "format",
];

fn lookup<'a>(sc: &'a Scope, x: &str) -> Option<&'a Type> {
    sc.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
}

fn bits_of(t: &Type, what: &str) -> TResult<u32> {
    t.bits_width().ok_or_else(|| format!("{what} must be a bitvector, found {t}"))
}

fn same_bits(a: &Type, b: &Type, op: &str) -> TResult<u32> {
    let (wa, wb) = (bits_of(a, op)?, bits_of(b, op)?);
    if wa != wb {
        return Err(format!("operands of `{op}` have widths {wa} and {wb}"));
    }
    Ok(wa)
}

impl TypeEnv {
    pub fn bound(&self, x: &str) -> bool {
        self.vars.contains_key(x) || self.aliases.contains_key(x) || self.ops.contains_key(x)
    }

    /// Value of a size; `None` for a loop binder, whose value is only known
    /// at run time.
    pub fn size(&self, sc: &Scope, s: &Size) -> TResult<Option<u64>> {
        match s {
            Size::Lit(n) => Ok(Some(*n)),
            Size::Sym(x) => {
                if let Some(t) = lookup(sc, x) {
                    return match t {
                        Type::Int => Ok(None),
                        t => Err(format!("`{x}` has type {t}, expected int")),
                    };
                }
                match self.consts.get(x) {
                    Some(&n) if n >= 0 => Ok(Some(n as u64)),
                    Some(n) => Err(format!("`{x}` is {n}, expected a non-negative size")),
                    None => Err(format!("`{x}` is not an integer constant")),
                }
            }
        }
    }

    fn positive(&self, s: &Size) -> TResult<u32> {
        match self.size(&Vec::new(), s)? {
            Some(n) if n > 0 && n <= u32::MAX as u64 => Ok(n as u32),
            Some(n) => Err(format!("size must be positive, found {n}")),
            None => Err(format!("size `{s}` is not a constant")),
        }
    }

    /// Type well-formedness: resolves aliases and checks sizes are positive.
    pub fn resolve(&self, t: &TypeExpr) -> TResult<Type> {
        Ok(match t {
            TypeExpr::Unit => Type::Unit,
            TypeExpr::Int => Type::Int,
            TypeExpr::Bool => Type::Bool,
            TypeExpr::Str => Type::Str,
            TypeExpr::Bits(n) | TypeExpr::Ptr(n) | TypeExpr::Vec(n) => Type::Bits(self.positive(n)?),
            TypeExpr::Reg(n) => Type::Reg(self.positive(n)?),
            TypeExpr::RegSet(n) => Type::RegSet(self.positive(n)?),
            TypeExpr::Label(n) => Type::Label(self.positive(n)?),
            TypeExpr::Mem(c, l, r) => {
                let cell = self.positive(c)?;
                Type::Mem { cell, len: self.positive(l)?, refw: self.positive(r)? }
            }
            TypeExpr::Func(ps, r) => {
                let ps = ps.iter().map(|p| self.resolve_base(p)).collect::<TResult<Vec<_>>>()?;
                Type::Func(ps, Box::new(self.resolve_base(r)?))
            }
            TypeExpr::Named(x) => {
                self.aliases.get(x).cloned().ok_or_else(|| format!("unknown type `{x}`"))?
            }
        })
    }

    pub fn resolve_base(&self, t: &TypeExpr) -> TResult<Type> {
        let t = self.resolve(t)?;
        if !t.is_base() {
            return Err(format!("{t} is not a base type"));
        }
        Ok(t)
    }

    /// An integer known at type-checking time.
    pub fn const_int(&self, e: &Expr) -> Option<i64> {
        match e {
            Expr::Int(i) => i.to_i64(),
            Expr::Var(x) => self.consts.get(x).copied(),
            Expr::Unop(Unop::Neg, a) => self.const_int(a).map(|v| -v),
            Expr::Binop(op, a, b) => {
                let (a, b) = (self.const_int(a)?, self.const_int(b)?);
                match op {
                    Binop::Add => a.checked_add(b),
                    Binop::Sub => a.checked_sub(b),
                    Binop::Mul => a.checked_mul(b),
                    Binop::Div if b != 0 => Some(a / b),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn width_arg(&self, e: &Expr, f: &str) -> TResult<u32> {
        match self.const_int(e) {
            Some(n) if n > 0 && n <= u32::MAX as i64 => Ok(n as u32),
            _ => Err(format!("first argument of `{f}` must be a positive integer constant")),
        }
    }

    fn builtin(&self, sc: &mut Scope, f: &str, args: &[Expr]) -> TResult<Type> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("`{f}` expects {n} argument(s), found {}", args.len()))
            }
        };
        match f {
            "bv_to_len" => {
                arity(2)?;
                let w = self.width_arg(&args[0], f)?;
                bits_of(&self.expr(sc, &args[1])?, "argument of bv_to_len")?;
                Ok(Type::Bits(w))
            }
            "bv_to_uint" => {
                arity(1)?;
                bits_of(&self.expr(sc, &args[0])?, "argument of bv_to_uint")?;
                Ok(Type::Int)
            }
            "uint_to_bv_l" => {
                arity(2)?;
                let w = self.width_arg(&args[0], f)?;
                self.expect(sc, &args[1], &Type::Int)?;
                Ok(Type::Bits(w))
            }
            "isptr" => {
                arity(1)?;
                bits_of(&self.expr(sc, &args[0])?, "argument of isptr")?;
                Ok(Type::Bool)
            }
            "empty" => {
                arity(1)?;
                Ok(Type::RegSet(self.width_arg(&args[0], f)?))
            }
            "hex" | "bin" | "dec" => {
                arity(1)?;
                match self.expr(sc, &args[0])? {
                    Type::Int | Type::Bits(_) | Type::Label(_) => Ok(Type::Str),
                    t => Err(format!("`{f}` prints integers or bitvectors, found {t}")),
                }
            }
            "lbl" => {
                arity(1)?;
                bits_of(&self.expr(sc, &args[0])?, "argument of lbl")?;
                Ok(Type::Str)
            }
            "textlabel" => {
                arity(1)?;
                self.expect(sc, &args[0], &Type::Bits(8))?;
                Ok(Type::Str)
            }
            "format" => {
                if args.is_empty() {
                    return Err("`format` needs a format string".into());
                }
                self.expect(sc, &args[0], &Type::Str)?;
                for a in &args[1..] {
                    let t = self.expr(sc, a)?;
                    if !matches!(t, Type::Str | Type::Int | Type::Bits(_) | Type::Label(_) | Type::Bool) {
                        return Err(format!("cannot format a value of type {t}"));
                    }
                }
                Ok(Type::Str)
            }
            _ => Err(format!("unknown function `{f}`")),
        }
    }

    pub fn expect(&self, sc: &mut Scope, e: &Expr, t: &Type) -> TResult<()> {
        let found = self.expr(sc, e)?;
        if found.compatible(t) {
            Ok(())
        } else {
            Err(format!("expected {t}, found {found}"))
        }
    }

    fn bind_local(&self, sc: &Scope, x: &str) -> TResult<()> {
        if lookup(sc, x).is_some() || self.bound(x) {
            return Err(format!("`{x}` is already bound"));
        }
        Ok(())
    }

    pub fn expr(&self, sc: &mut Scope, e: &Expr) -> TResult<Type> {
        use Binop::*;
        Ok(match e {
            Expr::Bool(_) => Type::Bool,
            Expr::Int(_) => Type::Int,
            Expr::Bits(b) => Type::Bits(b.width()),
            Expr::Str(_) => Type::Str,
            Expr::SizedLit(_, w) => Type::Bits(self.positive(w)?),
            Expr::Var(x) => {
                let t = lookup(sc, x)
                    .or_else(|| self.vars.get(x))
                    .ok_or_else(|| format!("unbound identifier `{x}`"))?;
                if !t.is_base() {
                    return Err(format!("`{x}` of type {t} is not a value"));
                }
                t.clone()
            }
            Expr::Txt(a) => match self.expr(sc, a)? {
                Type::Reg(_) => Type::Str,
                t => Err(format!("`.txt` applies to registers, found {t}"))?,
            },
            Expr::Call(f, args) => {
                let ft = lookup(sc, f).or_else(|| self.vars.get(f)).cloned();
                match ft {
                    Some(Type::Func(ps, r)) => {
                        if ps.len() != args.len() {
                            return Err(format!("`{f}` expects {} argument(s), found {}", ps.len(), args.len()));
                        }
                        for (p, a) in ps.iter().zip(args) {
                            self.expect(sc, a, p).map_err(|m| format!("argument of `{f}`: {m}"))?;
                        }
                        *r
                    }
                    Some(t) => return Err(format!("`{f}` of type {t} is not a function")),
                    None => self.builtin(sc, f, args)?,
                }
            }
            Expr::Unop(op, a) => {
                let t = self.expr(sc, a)?;
                match op {
                    Unop::Neg if t == Type::Int => Type::Int,
                    Unop::Not if t == Type::Bool => Type::Bool,
                    Unop::BNeg | Unop::BNot => Type::Bits(bits_of(&t, op.spelling())?),
                    _ => return Err(format!("`{}` does not apply to {t}", op.spelling())),
                }
            }
            Expr::Binop(op, a, b) => {
                let (ta, tb) = (self.expr(sc, a)?, self.expr(sc, b)?);
                let s = op.spelling();
                match op {
                    Eq | Neq => {
                        if !ta.is_base() || !ta.compatible(&tb) {
                            return Err(format!("cannot compare {ta} with {tb}"));
                        }
                        Type::Bool
                    }
                    Add | Sub | Mul | Div | Lt | Le | Gt | Ge => {
                        if ta != Type::Int || tb != Type::Int {
                            return Err(format!("`{s}` needs integers, found {ta} and {tb}"));
                        }
                        if matches!(op, Lt | Le | Gt | Ge) {
                            Type::Bool
                        } else {
                            Type::Int
                        }
                    }
                    And | Or | Xor => {
                        if ta != Type::Bool || tb != Type::Bool {
                            return Err(format!("`{s}` needs booleans, found {ta} and {tb}"));
                        }
                        Type::Bool
                    }
                    Shl | Shr | Sar => {
                        let w = bits_of(&ta, s)?;
                        if tb != Type::Int {
                            bits_of(&tb, s)?;
                        }
                        Type::Bits(w)
                    }
                    BAnd | BOr | BXor | BAdd | BSub | BMul | BDiv => Type::Bits(same_bits(&ta, &tb, s)?),
                    BLt | BLe | BGt | BGe | BSLt | BSLe | BSGt | BSGe => {
                        same_bits(&ta, &tb, s)?;
                        Type::Bool
                    }
                    Union | Intersect | Minus | Subset => match (&ta, &tb) {
                        (Type::RegSet(x), Type::RegSet(y)) if x == y => {
                            if *op == Subset {
                                Type::Bool
                            } else {
                                ta.clone()
                            }
                        }
                        _ => return Err(format!("`{s}` needs register sets, found {ta} and {tb}")),
                    },
                    Member => match (&ta, &tb) {
                        (Type::Reg(x), Type::RegSet(y)) if x == y => Type::Bool,
                        _ => return Err(format!("`in` needs a register and a set, found {ta} and {tb}")),
                    },
                }
            }
            Expr::Index(a, i) => {
                let w = bits_of(&self.expr(sc, a)?, "indexed value")?;
                if let Some(i) = self.size(sc, i)? {
                    if i >= w as u64 {
                        return Err(format!("bit index {i} out of range for width {w}"));
                    }
                }
                Type::Bits(1)
            }
            Expr::Slice(a, lo, hi) => {
                let w = bits_of(&self.expr(sc, a)?, "sliced value")?;
                match (self.size(sc, lo)?, self.size(sc, hi)?) {
                    (Some(l), Some(h)) if l < h && h <= w as u64 => Type::Bits((h - l) as u32),
                    (Some(l), Some(h)) => return Err(format!("slice [{l}:{h}] invalid for width {w}")),
                    _ => return Err("slice bounds must be constants".into()),
                }
            }
            Expr::Let(x, t, v, body) => {
                let t = self.resolve_base(t)?;
                self.expect(sc, v, &t).map_err(|m| format!("in `let {x}`: {m}"))?;
                self.bind_local(sc, x)?;
                sc.push((x.clone(), t));
                let r = self.expr(sc, body);
                sc.pop();
                r?
            }
            Expr::If(c, a, b) => {
                self.expect(sc, c, &Type::Bool).map_err(|m| format!("condition: {m}"))?;
                let (ta, tb) = (self.expr(sc, a)?, self.expr(sc, b)?);
                if !ta.compatible(&tb) {
                    return Err(format!("branches have types {ta} and {tb}"));
                }
                if matches!(ta, Type::Label(_)) {
                    tb
                } else {
                    ta
                }
            }
            Expr::Ptr(r, off) => match self.vars.get(r) {
                Some(Type::Mem { refw, .. }) => {
                    let refw = *refw;
                    match self.expr(sc, off)? {
                        Type::Int => {}
                        t if t.bits_width() == Some(refw) => {}
                        t => return Err(format!("pointer offset must be int or {refw} bit, found {t}")),
                    }
                    Type::Bits(refw)
                }
                _ => return Err(format!("`{r}` is not a memory region")),
            },
            Expr::Deref(a) => match self.expr(sc, a)? {
                Type::Reg(w) => Type::Bits(w),
                t => return Err(format!("`*` applies to registers, found {t}")),
            },
            Expr::Fetch(p, w) => {
                bits_of(&self.expr(sc, p)?, "fetch address")?;
                Type::Bits(self.positive(w)?)
            }
            Expr::BranchTo(_) => Type::Bool,
            Expr::Set(items) => {
                let mut width = None;
                for it in items {
                    match self.expr(sc, it)? {
                        Type::Reg(w) if width.is_none() || width == Some(w) => width = Some(w),
                        t => return Err(format!("register set element has type {t}")),
                    }
                }
                Type::RegSet(width.ok_or("empty set literal; use `empty(C)`")?)
            }
            Expr::Card(a) => match self.expr(sc, a)? {
                Type::RegSet(_) => Type::Int,
                t => return Err(format!("`|…|` applies to register sets, found {t}")),
            },
        })
    }

    pub fn stmt(&self, sc: &mut Scope, s: &Stmt) -> TResult<()> {
        match s {
            Stmt::Skip | Stmt::Crash => Ok(()),
            Stmt::Seq(v) => v.iter().try_for_each(|s| self.stmt(sc, s)),
            Stmt::Call(p, args) => match self.vars.get(p) {
                Some(Type::Proc(ps)) => {
                    if ps.len() != args.len() {
                        return Err(format!("`{p}` expects {} argument(s), found {}", ps.len(), args.len()));
                    }
                    for (t, a) in ps.iter().zip(args) {
                        self.expect(sc, a, t).map_err(|m| format!("argument of `{p}`: {m}"))?;
                    }
                    Ok(())
                }
                _ => Err(format!("`{p}` is not a procedure")),
            },
            Stmt::Let(x, t, v, body) => {
                let t = self.resolve_base(t)?;
                self.expect(sc, v, &t).map_err(|m| format!("in `let {x}`: {m}"))?;
                self.bind_local(sc, x)?;
                sc.push((x.clone(), t));
                let r = self.stmt(sc, body);
                sc.pop();
                r
            }
            Stmt::For(x, lo, hi, body) => {
                for b in [lo, hi] {
                    if self.size(sc, b)?.is_none() {
                        return Err("loop bounds must be constants".into());
                    }
                }
                self.bind_local(sc, x)?;
                sc.push((x.clone(), Type::Int));
                let r = self.stmt(sc, body);
                sc.pop();
                r
            }
            Stmt::If(c, a, b) => {
                self.expect(sc, c, &Type::Bool).map_err(|m| format!("condition: {m}"))?;
                self.stmt(sc, a)?;
                self.stmt(sc, b)
            }
            Stmt::Assign(target, v) => match self.expr(sc, target)? {
                Type::Reg(w) => self.expect(sc, v, &Type::Bits(w)).map_err(|m| format!("assignment: {m}")),
                t => Err(format!("assignment target must be a register, found {t}")),
            },
            Stmt::Store(p, w, v) => {
                bits_of(&self.expr(sc, p)?, "store address")?;
                let w = self.positive(w)?;
                self.expect(sc, v, &Type::Bits(w)).map_err(|m| format!("store: {m}"))
            }
            Stmt::Branch(e) => self.expect(sc, e, &Type::Bits(8)).map_err(|m| format!("BRANCH: {m}")),
            Stmt::Assert(e) => self.expect(sc, e, &Type::Bool).map_err(|m| format!("assert: {m}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_stmt};

    fn env() -> TypeEnv {
        let mut t = TypeEnv::default();
        t.aliases.insert("word".into(), Type::Bits(32));
        t.vars.insert("r6".into(), Type::Reg(32));
        t.vars.insert("rd".into(), Type::Reg(32));
        t.vars.insert("x8".into(), Type::Bits(8));
        t.vars.insert("x32".into(), Type::Bits(32));
        t.vars.insert("p".into(), Type::Bits(32));
        t.vars.insert("DispMem".into(), Type::Mem { cell: 32, len: 268, refw: 32 });
        t.consts.insert("wordsize".into(), 32);
        t
    }

    fn ty(s: &str) -> TResult<Type> {
        env().expr(&mut Vec::new(), &parse_expr(s).unwrap())
    }

    fn st(s: &str) -> TResult<()> {
        env().stmt(&mut Vec::new(), &parse_stmt(s).unwrap())
    }

    #[test]
    fn well_formed_types() {
        let e = env();
        assert_eq!(e.resolve(&TypeExpr::Bits(Size::Lit(32))), Ok(Type::Bits(32)));
        assert!(e.resolve(&TypeExpr::Bits(Size::Lit(0))).is_err());
        assert_eq!(e.resolve(&TypeExpr::Named("word".into())), Ok(Type::Bits(32)));
        assert_eq!(e.resolve(&TypeExpr::Bits(Size::Sym("wordsize".into()))), Ok(Type::Bits(32)));
        assert!(e.resolve(&TypeExpr::Named("nope".into())).is_err());
    }

    #[test]
    fn expressions() {
        assert_eq!(ty("*r6 == [DispMem, 0]"), Ok(Type::Bool));
        assert_eq!(ty("fetch(p, 32)"), Ok(Type::Bits(32)));
        assert!(ty("0b01 b+ 0b011").is_err());
        assert_eq!(ty("bv_to_len(wordsize, x8)"), Ok(Type::Bits(32)));
        assert_eq!(ty("x32[4:12]"), Ok(Type::Bits(8)));
        assert!(ty("x8[8]").is_err());
        assert_eq!(ty("let y: 8 bit = x8 in y b+ 0x01"), Ok(Type::Bits(8)));
        assert!(ty("let x8: 8 bit = x8 in x8").is_err());
    }

    #[test]
    fn statements() {
        assert_eq!(st("*rd <- fetch[p, 32]"), Ok(()));
        assert_eq!(st("BRANCH(x8)"), Ok(()));
        assert!(st("BRANCH(x32)").is_err());
        assert!(st("*x32 <- 0x00000000").is_err());
        assert_eq!(st("for i in 0..3 do *rd <- bv_to_len(32, x32[i])"), Ok(()));
    }
}
