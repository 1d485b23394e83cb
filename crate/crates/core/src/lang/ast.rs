//! Surface syntax trees for machine descriptions, specifications, lowering
//! modules, machine-independent specifications, and programs.

use super::bits::Bitvec;
use num_bigint::BigInt;
use std::fmt;

pub type Ident = String;

/// A width, length, or index: either a literal or a named integer constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Size {
    Lit(u64),
    Sym(Ident),
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Size::Lit(n) => write!(f, "{n}"),
            Size::Sym(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Unit,
    Int,
    Bool,
    Str,
    Bits(Size),
    Reg(Size),
    RegSet(Size),
    Label(Size),
    /// `k ptr`, only meaningful before lowering.
    Ptr(Size),
    /// `k vec`, only meaningful before lowering.
    Vec(Size),
    Mem(Size, Size, Size),
    Func(Vec<TypeExpr>, Box<TypeExpr>),
    Named(Ident),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unop {
    Neg,
    BNeg,
    Not,
    BNot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Binop {
    Eq,
    Neq,
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Xor,
    Shr,
    Sar,
    Shl,
    BAnd,
    BOr,
    BXor,
    BAdd,
    BSub,
    BMul,
    BDiv,
    BLt,
    BLe,
    BGt,
    BGe,
    BSLt,
    BSLe,
    BSGt,
    BSGe,
    Union,
    Intersect,
    Minus,
    Subset,
    Member,
}

impl Binop {
    pub fn spelling(self) -> &'static str {
        use Binop::*;
        match self {
            Eq => "==",
            Neq => "!=",
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            And => "&&",
            Or => "||",
            Xor => "^^",
            Shr => ">>",
            Sar => ">>S",
            Shl => "<<",
            BAnd => "band",
            BOr => "bor",
            BXor => "bxor",
            BAdd => "b+",
            BSub => "b-",
            BMul => "b*",
            BDiv => "b/",
            BLt => "b<",
            BLe => "b<=",
            BGt => "b>",
            BGe => "b>=",
            BSLt => "bs<",
            BSLe => "bs<=",
            BSGt => "bs>",
            BSGe => "bs>=",
            Union => "union",
            Intersect => "intersect",
            Minus => "setminus",
            Subset => "subseteq",
            Member => "in",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        use Binop::*;
        match self {
            Or => 1,
            Xor => 2,
            And => 3,
            BOr => 4,
            BXor => 5,
            BAnd => 6,
            Eq | Neq => 7,
            Lt | Le | Gt | Ge | BLt | BLe | BGt | BGe | BSLt | BSLe | BSGt | BSGe | Subset
            | Member => 8,
            Shr | Sar | Shl => 9,
            Add | Sub | BAdd | BSub | Union | Minus => 10,
            Mul | Div | BMul | BDiv | Intersect => 11,
        }
    }
}

impl Unop {
    pub fn spelling(self) -> &'static str {
        match self {
            Unop::Neg => "-",
            Unop::BNeg => "b-",
            Unop::Not => "!",
            Unop::BNot => "bnot",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Bool(bool),
    Int(BigInt),
    Bits(Bitvec),
    Str(String),
    /// `(C: k vec)`: an integer literal at a possibly symbolic width.
    SizedLit(BigInt, Size),
    Var(Ident),
    Txt(Box<Expr>),
    Call(Ident, Vec<Expr>),
    Unop(Unop, Box<Expr>),
    Binop(Binop, Box<Expr>, Box<Expr>),
    Index(Box<Expr>, Size),
    /// Half-open slice `e[lo:hi]`.
    Slice(Box<Expr>, Size, Size),
    Let(Ident, TypeExpr, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Ptr(Ident, Box<Expr>),
    Deref(Box<Expr>),
    Fetch(Box<Expr>, Size),
    BranchTo(Ident),
    Set(Vec<Expr>),
    Card(Box<Expr>),
}

impl Expr {
    pub fn var(s: &str) -> Expr {
        Expr::Var(s.to_string())
    }

    pub fn bin(op: Binop, a: Expr, b: Expr) -> Expr {
        Expr::Binop(op, Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::bin(Binop::And, a, b)
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::bin(Binop::Eq, a, b)
    }

    pub fn deref(a: Expr) -> Expr {
        Expr::Deref(Box::new(a))
    }

    /// Top-level conjuncts of `a && b && …`.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        match self {
            Expr::Binop(Binop::And, a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            Expr::Bool(true) => vec![],
            e => vec![e],
        }
    }

    /// Visits every subexpression, outermost first.
    pub fn walk(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Bool(_)
            | Expr::Int(_)
            | Expr::Bits(_)
            | Expr::Str(_)
            | Expr::SizedLit(..)
            | Expr::Var(_)
            | Expr::BranchTo(_) => {}
            Expr::Txt(e) | Expr::Unop(_, e) | Expr::Index(e, _) | Expr::Slice(e, ..) => e.walk(f),
            Expr::Deref(e) | Expr::Fetch(e, _) | Expr::Card(e) | Expr::Ptr(_, e) => e.walk(f),
            Expr::Call(_, args) | Expr::Set(args) => args.iter().for_each(|a| a.walk(f)),
            Expr::Binop(_, a, b) | Expr::Let(_, _, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::If(c, a, b) => {
                c.walk(f);
                a.walk(f);
                b.walk(f);
            }
        }
    }

    /// Rewrites bottom-up.
    pub fn map(&self, f: &mut dyn FnMut(Expr) -> Expr) -> Expr {
        let b = |e: &Expr, f: &mut dyn FnMut(Expr) -> Expr| Box::new(e.map(f));
        let out = match self {
            Expr::Txt(e) => Expr::Txt(b(e, f)),
            Expr::Unop(o, e) => Expr::Unop(*o, b(e, f)),
            Expr::Index(e, i) => Expr::Index(b(e, f), i.clone()),
            Expr::Slice(e, l, h) => Expr::Slice(b(e, f), l.clone(), h.clone()),
            Expr::Deref(e) => Expr::Deref(b(e, f)),
            Expr::Fetch(e, w) => Expr::Fetch(b(e, f), w.clone()),
            Expr::Card(e) => Expr::Card(b(e, f)),
            Expr::Ptr(r, e) => Expr::Ptr(r.clone(), b(e, f)),
            Expr::Call(n, args) => Expr::Call(n.clone(), args.iter().map(|a| a.map(f)).collect()),
            Expr::Set(args) => Expr::Set(args.iter().map(|a| a.map(f)).collect()),
            Expr::Binop(o, x, y) => Expr::Binop(*o, b(x, f), b(y, f)),
            Expr::Let(x, t, v, body) => Expr::Let(x.clone(), t.clone(), b(v, f), b(body, f)),
            Expr::If(c, x, y) => Expr::If(b(c, f), b(x, f), b(y, f)),
            leaf => leaf.clone(),
        };
        f(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Crash,
    Seq(Vec<Stmt>),
    Call(Ident, Vec<Expr>),
    Let(Ident, TypeExpr, Expr, Box<Stmt>),
    For(Ident, Size, Size, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
    Assign(Expr, Expr),
    Store(Expr, Size, Expr),
    Branch(Expr),
    Assert(Expr),
}

impl Stmt {
    pub fn walk_exprs(&self, f: &mut dyn FnMut(&Expr)) {
        match self {
            Stmt::Skip | Stmt::Crash => {}
            Stmt::Seq(v) => v.iter().for_each(|s| s.walk_exprs(f)),
            Stmt::Call(_, args) => args.iter().for_each(|a| a.walk(f)),
            Stmt::Let(_, _, e, s) => {
                e.walk(f);
                s.walk_exprs(f);
            }
            Stmt::For(_, _, _, s) => s.walk_exprs(f),
            Stmt::If(c, a, b) => {
                c.walk(f);
                a.walk_exprs(f);
                b.walk_exprs(f);
            }
            Stmt::Assign(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Stmt::Store(a, _, b) => {
                a.walk(f);
                b.walk(f);
            }
            Stmt::Branch(e) | Stmt::Assert(e) => e.walk(f),
        }
    }

    pub fn walk(&self, f: &mut dyn FnMut(&Stmt)) {
        f(self);
        match self {
            Stmt::Seq(v) => v.iter().for_each(|s| s.walk(f)),
            Stmt::Let(_, _, _, s) | Stmt::For(_, _, _, s) => s.walk(f),
            Stmt::If(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            _ => {}
        }
    }
}

pub type Params = Vec<(Ident, TypeExpr)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MemDecl {
    pub name: Ident,
    pub cell: Size,
    pub len: Size,
    pub refw: Size,
    pub label: Option<Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Decl {
    Type(Ident, TypeExpr),
    Let(Ident, TypeExpr, Expr),
    RegText(Ident, Expr),
    Def(Ident, Params, TypeExpr, Expr),
    Proc(Ident, Params, Stmt),
    Reg { name: Ident, ty: TypeExpr, control: bool, dontgate: bool },
    Mem(MemDecl),
    Op { name: Ident, params: Params, txt: Expr, sem: Stmt },
    Invariant(Expr),
    Include(String),
}

impl Decl {
    /// The identifier this declaration binds, if any.
    pub fn name(&self) -> Option<&str> {
        match self {
            Decl::Type(n, _) | Decl::Let(n, ..) | Decl::Def(n, ..) | Decl::Proc(n, ..) => Some(n),
            Decl::Reg { name, .. } | Decl::Op { name, .. } => Some(name),
            Decl::Mem(m) => Some(&m.name),
            Decl::RegText(..) | Decl::Invariant(_) | Decl::Include(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FrameItem {
    Reg(Expr),
    Mem(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineAst {
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum SpecItem {
    Decl(Decl),
    Frame(Vec<FrameItem>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecAst {
    pub items: Vec<SpecItem>,
    pub pre: Expr,
    pub post: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoweringAst {
    pub name: Ident,
    pub items: Vec<SpecItem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AleDecl {
    RequireType(Ident),
    RequireValue(Ident, TypeExpr),
    RequireFunc(Ident, Vec<TypeExpr>, TypeExpr),
    ProvideType(Ident, TypeExpr),
    ProvideValue(Ident, TypeExpr, Expr),
    ProvideFunc(Ident, Params, TypeExpr, Expr),
    Region(MemDecl),
    LowerWith(Vec<Ident>),
    Frame(Vec<FrameItem>),
    Let(Ident, TypeExpr, Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AleSpecAst {
    pub decls: Vec<AleDecl>,
    pub pre: Expr,
    pub post: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstAst {
    pub op: Ident,
    pub args: Vec<Expr>,
}
