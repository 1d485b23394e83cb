//! Recursive-descent parser for every surface language.

use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;
use crate::lang::ast::*;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// Words that begin a declaration; they end open-ended lists such as frames.
const DECL_WORDS: &[&str] = &[
    "let", "def", "type", "letstate", "pre", "post", "frame", "modify", "reg-modify",
    "mem-modify", "require", "provide", "region", "lower-with", "invariant", "include", "defop",
    "proc", "lowering",
];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Start positions of top-level items in the order they were parsed.
    pub marks: Vec<(usize, usize)>,
}

type PResult<T> = Result<T, SyntaxError>;

fn binop_of(tok: &Tok) -> Option<Binop> {
    use Binop::*;
    let s = match tok {
        Tok::Sym(s) => *s,
        Tok::Ident(s) => s.as_str(),
        _ => return None,
    };
    Some(match s {
        "==" | "=" => Eq,
        "!=" => Neq,
        "+" => Add,
        "-" => Sub,
        "*" => Mul,
        "/" => Div,
        "<" => Lt,
        "<=" => Le,
        ">" => Gt,
        ">=" => Ge,
        "&&" => And,
        "||" => Or,
        "^^" => Xor,
        ">>" => Shr,
        ">>S" => Sar,
        "<<" => Shl,
        "band" => BAnd,
        "bor" => BOr,
        "bxor" => BXor,
        "b+" => BAdd,
        "b-" => BSub,
        "b*" => BMul,
        "b/" => BDiv,
        "b<" => BLt,
        "b<=" => BLe,
        "b>" => BGt,
        "b>=" => BGe,
        "bs<" => BSLt,
        "bs<=" => BSLe,
        "bs>" => BSGt,
        "bs>=" => BSGe,
        "union" => Union,
        "intersect" => Intersect,
        "setminus" => Minus,
        "subseteq" => Subset,
        "in" => Member,
        _ => return None,
    })
}

impl Parser {
    pub fn new(text: &str) -> PResult<Parser> {
        Ok(Parser { toks: tokenize(text)?, pos: 0, marks: Vec::new() })
    }

    fn mark(&mut self) {
        let t = &self.toks[self.pos];
        self.marks.push((t.line, t.col));
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(SyntaxError { file: None, line: t.line, col: t.col, msg: msg.into() })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Bits(b) => format!("`{b}`"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.next();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, s: &str) -> bool {
        if self.is_word(s) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn expect_word(&mut self, s: &str) -> PResult<()> {
        if self.eat_word(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => self.error(format!("expected identifier, found {}", self.describe())),
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.describe()))
        }
    }

    // ----- types -----

    fn size(&mut self) -> PResult<Size> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.next();
                match i.to_u64() {
                    Some(n) => Ok(Size::Lit(n)),
                    None => self.error("size out of range"),
                }
            }
            Tok::Ident(s) => {
                self.next();
                Ok(Size::Sym(s))
            }
            _ => self.error(format!("expected a size, found {}", self.describe())),
        }
    }

    fn sized_kind_follows(&self) -> bool {
        matches!(self.peek_at(1), Tok::Ident(s) if ["bit", "reg", "label", "ptr", "vec"].contains(&s.as_str()))
    }

    pub fn type_expr(&mut self) -> PResult<TypeExpr> {
        if self.eat_sym("(") {
            let mut params = Vec::new();
            if !self.eat_sym(")") {
                loop {
                    params.push(self.type_expr()?);
                    if self.eat_sym(")") {
                        break;
                    }
                    self.expect_sym(",")?;
                }
            }
            let ret = self.type_expr()?;
            return Ok(TypeExpr::Func(params, Box::new(ret)));
        }
        let simple = match self.peek() {
            Tok::Ident(s) => match s.as_str() {
                "unit" => Some(TypeExpr::Unit),
                "int" => Some(TypeExpr::Int),
                "bool" => Some(TypeExpr::Bool),
                "string" => Some(TypeExpr::Str),
                _ => None,
            },
            _ => None,
        };
        if let Some(t) = simple {
            self.next();
            return Ok(t);
        }
        let sized = matches!(self.peek(), Tok::Int(_)) || self.sized_kind_follows();
        if !sized {
            return Ok(TypeExpr::Named(self.ident()?));
        }
        let n = self.size()?;
        let kind = self.ident()?;
        Ok(match kind.as_str() {
            "bit" => {
                let mem_follows = matches!(self.peek(), Tok::Int(_) | Tok::Ident(_))
                    && matches!(self.peek_at(1), Tok::Ident(s) if s == "len");
                if mem_follows {
                    let len = self.size()?;
                    self.expect_word("len")?;
                    let refw = self.size()?;
                    self.expect_word("ref")?;
                    TypeExpr::Mem(n, len, refw)
                } else if self.eat_word("set") {
                    TypeExpr::RegSet(n)
                } else {
                    TypeExpr::Bits(n)
                }
            }
            "reg" => {
                if self.eat_word("set") {
                    TypeExpr::RegSet(n)
                } else {
                    TypeExpr::Reg(n)
                }
            }
            "label" => TypeExpr::Label(n),
            "ptr" => TypeExpr::Ptr(n),
            "vec" => TypeExpr::Vec(n),
            other => return self.error(format!("unknown type constructor `{other}`")),
        })
    }

    // ----- expressions -----

    pub fn expr(&mut self) -> PResult<Expr> {
        self.expr_ctx(true)
    }

    fn expr_ctx(&mut self, allow_in: bool) -> PResult<Expr> {
        self.binary(1, allow_in)
    }

    fn binary(&mut self, min: u8, allow_in: bool) -> PResult<Expr> {
        let mut lhs = self.unary(allow_in)?;
        while let Some(op) = binop_of(self.peek()) {
            if op == Binop::Member && !allow_in {
                break;
            }
            let p = op.precedence();
            if p < min {
                break;
            }
            self.next();
            let rhs = self.binary(p + 1, allow_in)?;
            lhs = Expr::Binop(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self, allow_in: bool) -> PResult<Expr> {
        let op = match self.peek() {
            Tok::Sym("-") => Some(Unop::Neg),
            Tok::Sym("b-") => Some(Unop::BNeg),
            Tok::Sym("!") => Some(Unop::Not),
            Tok::Ident(s) if s == "bnot" => Some(Unop::BNot),
            _ => None,
        };
        if let Some(op) = op {
            self.next();
            let e = self.unary(allow_in)?;
            return Ok(match (op, e) {
                (Unop::Neg, Expr::Int(i)) => Expr::Int(-i),
                (op, e) => Expr::Unop(op, Box::new(e)),
            });
        }
        if self.eat_sym("*") {
            let e = self.unary(allow_in)?;
            return Ok(Expr::Deref(Box::new(e)));
        }
        self.postfix(allow_in)
    }

    fn postfix(&mut self, allow_in: bool) -> PResult<Expr> {
        let mut e = self.primary(allow_in)?;
        loop {
            if self.eat_sym("[") {
                let lo = self.size()?;
                if self.eat_sym(":") {
                    let hi = self.size()?;
                    self.expect_sym("]")?;
                    e = Expr::Slice(Box::new(e), lo, hi);
                } else {
                    self.expect_sym("]")?;
                    e = Expr::Index(Box::new(e), lo);
                }
            } else if self.is_sym(".") && matches!(self.peek_at(1), Tok::Ident(_)) {
                self.next();
                let field = self.ident()?;
                e = match field.as_str() {
                    "txt" => Expr::Txt(Box::new(e)),
                    "hex" | "dec" | "bin" | "lbl" => Expr::Call(field, vec![e]),
                    other => return self.error(format!("unknown projection `.{other}`")),
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat_sym(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat_sym(")") {
                return Ok(args);
            }
            self.expect_sym(",")?;
        }
    }

    fn primary(&mut self, allow_in: bool) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.next();
                Ok(Expr::Int(i))
            }
            Tok::Bits(b) => {
                self.next();
                Ok(Expr::Bits(b))
            }
            Tok::Str(s) => {
                self.next();
                Ok(Expr::Str(s))
            }
            Tok::Sym("(") => {
                self.next();
                let e = self.expr()?;
                if self.eat_sym(":") {
                    let t = self.type_expr()?;
                    self.expect_sym(")")?;
                    let value = match e {
                        Expr::Int(i) => i,
                        _ => return self.error("sized literal needs an integer"),
                    };
                    return match t {
                        TypeExpr::Vec(w) | TypeExpr::Bits(w) => Ok(Expr::SizedLit(value, w)),
                        _ => self.error("sized literal needs a `bit` or `vec` type"),
                    };
                }
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("[") => {
                self.next();
                let region = self.ident()?;
                self.expect_sym(",")?;
                let off = self.expr()?;
                self.expect_sym("]")?;
                Ok(Expr::Ptr(region, Box::new(off)))
            }
            Tok::Sym("{") => {
                self.next();
                let mut items = Vec::new();
                if !self.eat_sym("}") {
                    loop {
                        items.push(self.expr()?);
                        if self.eat_sym("}") {
                            break;
                        }
                        self.expect_sym(",")?;
                    }
                }
                Ok(Expr::Set(items))
            }
            Tok::Sym("|") => {
                self.next();
                let e = self.expr()?;
                self.expect_sym("|")?;
                Ok(Expr::Card(Box::new(e)))
            }
            Tok::Ident(w) => match w.as_str() {
                "true" => {
                    self.next();
                    Ok(Expr::Bool(true))
                }
                "false" => {
                    self.next();
                    Ok(Expr::Bool(false))
                }
                "if" => {
                    self.next();
                    let c = self.expr()?;
                    self.expect_word("then")?;
                    let a = self.expr_ctx(allow_in)?;
                    self.expect_word("else")?;
                    let b = self.expr_ctx(allow_in)?;
                    Ok(Expr::If(Box::new(c), Box::new(a), Box::new(b)))
                }
                "let" => {
                    self.next();
                    let x = self.ident()?;
                    self.expect_sym(":")?;
                    let t = self.type_expr()?;
                    self.expect_sym("=")?;
                    let v = self.expr_ctx(false)?;
                    self.expect_word("in")?;
                    let body = self.expr_ctx(allow_in)?;
                    Ok(Expr::Let(x, t, Box::new(v), Box::new(body)))
                }
                "fetch" => {
                    self.next();
                    let close = if self.eat_sym("(") {
                        ")"
                    } else {
                        self.expect_sym("[")?;
                        "]"
                    };
                    let p = self.expr()?;
                    self.expect_sym(",")?;
                    let w = self.size()?;
                    self.expect_sym(close)?;
                    Ok(Expr::Fetch(Box::new(p), w))
                }
                "branchto" => {
                    self.next();
                    self.expect_sym("(")?;
                    let x = self.ident()?;
                    self.expect_sym(")")?;
                    Ok(Expr::BranchTo(x))
                }
                _ => {
                    self.next();
                    if self.eat_sym("(") {
                        let args = self.args()?;
                        Ok(Expr::Call(w, args))
                    } else {
                        Ok(Expr::Var(w))
                    }
                }
            },
            _ => self.error(format!("expected an expression, found {}", self.describe())),
        }
    }

    // ----- statements -----

    /// A `;`-separated sequence up to (not including) a closing bracket.
    fn stmt_seq(&mut self) -> PResult<Stmt> {
        let mut out = Vec::new();
        loop {
            if self.is_sym("]") || self.is_sym("}") || self.at_eof() {
                break;
            }
            if self.is_word("let") {
                self.next();
                let x = self.ident()?;
                self.expect_sym(":")?;
                let t = self.type_expr()?;
                self.expect_sym("=")?;
                let v = self.expr_ctx(false)?;
                self.expect_word("in")?;
                let body = self.stmt_seq()?;
                out.push(Stmt::Let(x, t, v, Box::new(body)));
                break;
            }
            out.push(self.stmt()?);
            if !self.eat_sym(";") {
                break;
            }
        }
        Ok(match out.len() {
            0 => Stmt::Skip,
            1 => out.pop().unwrap(),
            _ => Stmt::Seq(out),
        })
    }

    fn block(&mut self) -> PResult<Stmt> {
        let close = if self.eat_sym("[") {
            "]"
        } else {
            self.expect_sym("{")?;
            "}"
        };
        let s = self.stmt_seq()?;
        self.expect_sym(close)?;
        Ok(s)
    }

    pub fn stmt(&mut self) -> PResult<Stmt> {
        if self.is_sym("[") || self.is_sym("{") {
            return self.block();
        }
        if self.eat_sym("*") {
            let target = self.unary(true)?;
            self.expect_sym("<-")?;
            let v = self.expr()?;
            return Ok(Stmt::Assign(target, v));
        }
        let word = match self.peek() {
            Tok::Ident(w) => w.clone(),
            _ => return self.error(format!("expected a statement, found {}", self.describe())),
        };
        match word.as_str() {
            "skip" => {
                self.next();
                Ok(Stmt::Skip)
            }
            "crash" => {
                self.next();
                Ok(Stmt::Crash)
            }
            "assert" | "BRANCH" => {
                self.next();
                self.expect_sym("(")?;
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(if word == "assert" { Stmt::Assert(e) } else { Stmt::Branch(e) })
            }
            "let" => {
                let s = self.stmt_seq()?;
                Ok(s)
            }
            "for" => {
                self.next();
                let x = self.ident()?;
                self.expect_word("in")?;
                let lo = self.size()?;
                self.expect_sym("..")?;
                let hi = self.size()?;
                self.expect_word("do")?;
                let body = self.stmt()?;
                Ok(Stmt::For(x, lo, hi, Box::new(body)))
            }
            "if" => {
                self.next();
                let c = self.expr()?;
                self.expect_word("then")?;
                let a = self.stmt()?;
                let b = if self.eat_word("else") { self.stmt()? } else { Stmt::Skip };
                Ok(Stmt::If(c, Box::new(a), Box::new(b)))
            }
            "store" => {
                self.next();
                let close = if self.eat_sym("(") {
                    ")"
                } else {
                    self.expect_sym("[")?;
                    "]"
                };
                let p = self.expr()?;
                self.expect_sym(",")?;
                let w = self.size()?;
                self.expect_sym(close)?;
                self.expect_sym("<-")?;
                let v = self.expr()?;
                Ok(Stmt::Store(p, w, v))
            }
            _ => {
                self.next();
                self.expect_sym("(")?;
                let args = self.args()?;
                Ok(Stmt::Call(word, args))
            }
        }
    }

    // ----- declarations -----

    fn params(&mut self) -> PResult<Params> {
        let mut ps = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Sym(":")) {
            let x = self.ident()?;
            self.expect_sym(":")?;
            ps.push((x, self.type_expr()?));
        }
        Ok(ps)
    }

    fn mem_decl(&mut self, name: Ident) -> PResult<MemDecl> {
        let (cell, len, refw) = match self.type_expr()? {
            TypeExpr::Mem(c, l, r) => (c, l, r),
            _ => return self.error("expected a memory type `C bit C len C ref`"),
        };
        self.eat_word("memory");
        let label = if self.eat_word("with") { Some(self.ident()?) } else { None };
        Ok(MemDecl { name, cell, len, refw, label })
    }

    fn at_decl_word(&self) -> bool {
        matches!(self.peek(), Tok::Ident(w) if DECL_WORDS.contains(&w.as_str()))
    }

    /// Items of a `modify:` list; `reg_only`/`mem_only` come from the
    /// `reg-modify:` and `mem-modify:` spellings.
    fn frame_items(&mut self, kind: &str) -> PResult<Vec<FrameItem>> {
        let mut items = Vec::new();
        loop {
            if self.at_decl_word() {
                break;
            }
            match self.peek() {
                Tok::Ident(_) if kind != "mem-modify" => {
                    let x = self.ident()?;
                    items.push(FrameItem::Reg(Expr::Var(x)));
                }
                Tok::Sym("[") if kind != "reg-modify" => {
                    let e = self.primary(true)?;
                    items.push(FrameItem::Mem(e));
                }
                Tok::Ident(_) => {
                    let e = self.expr()?;
                    items.push(FrameItem::Mem(e));
                }
                _ => break,
            }
            self.eat_sym(",");
        }
        Ok(items)
    }

    fn modify_clause(&mut self) -> PResult<Option<Vec<FrameItem>>> {
        for kind in ["modify", "reg-modify", "mem-modify"] {
            if self.is_word(kind) && matches!(self.peek_at(1), Tok::Sym(":")) {
                self.next();
                self.next();
                return Ok(Some(self.frame_items(kind)?));
            }
        }
        Ok(None)
    }

    /// `frame:` followed by one or more modify clauses, or a bare modify clause.
    fn frame(&mut self) -> PResult<Option<Vec<FrameItem>>> {
        if self.is_word("frame") && matches!(self.peek_at(1), Tok::Sym(":")) {
            self.next();
            self.next();
            let mut items = Vec::new();
            let mut any = false;
            while let Some(more) = self.modify_clause()? {
                items.extend(more);
                any = true;
            }
            if !any {
                return self.error("expected `modify:` after `frame:`");
            }
            return Ok(Some(items));
        }
        self.modify_clause()
    }

    pub fn decl(&mut self) -> PResult<Decl> {
        let word = match self.peek() {
            Tok::Ident(w) => w.clone(),
            _ => return self.error(format!("expected a declaration, found {}", self.describe())),
        };
        self.next();
        match word.as_str() {
            "type" => {
                let x = self.ident()?;
                self.expect_sym("=")?;
                Ok(Decl::Type(x, self.type_expr()?))
            }
            "let" => {
                let x = self.ident()?;
                if self.eat_sym(".") {
                    self.expect_word("txt")?;
                    self.expect_sym("=")?;
                    return Ok(Decl::RegText(x, self.expr()?));
                }
                self.expect_sym(":")?;
                let t = self.type_expr()?;
                self.expect_sym("=")?;
                Ok(Decl::Let(x, t, self.expr()?))
            }
            "def" => {
                let x = self.ident()?;
                let ps = self.params()?;
                self.expect_sym("->")?;
                let ret = self.type_expr()?;
                self.expect_sym("=")?;
                Ok(Decl::Def(x, ps, ret, self.expr()?))
            }
            "proc" => {
                let x = self.ident()?;
                let ps = self.params()?;
                self.expect_sym("=")?;
                Ok(Decl::Proc(x, ps, self.block()?))
            }
            "letstate" => {
                let mut control = false;
                let mut dontgate = false;
                loop {
                    if self.is_word("control") && !matches!(self.peek_at(1), Tok::Sym(":")) {
                        self.next();
                        control = true;
                    } else if self.is_word("dontgate") && !matches!(self.peek_at(1), Tok::Sym(":")) {
                        self.next();
                        dontgate = true;
                    } else {
                        break;
                    }
                }
                let x = self.ident()?;
                self.expect_sym(":")?;
                let save = self.pos;
                if let TypeExpr::Mem(..) = self.type_expr()? {
                    self.pos = save;
                    return Ok(Decl::Mem(self.mem_decl(x)?));
                }
                self.pos = save;
                let ty = self.type_expr()?;
                Ok(Decl::Reg { name: x, ty, control, dontgate })
            }
            "defop" => {
                let x = self.ident()?;
                let ps = self.params()?;
                self.expect_sym("{")?;
                self.expect_word("txt")?;
                self.expect_sym("=")?;
                let txt = self.expr()?;
                self.expect_sym(",")?;
                self.expect_word("sem")?;
                self.expect_sym("=")?;
                let sem = self.block()?;
                self.eat_sym(",");
                self.expect_sym("}")?;
                Ok(Decl::Op { name: x, params: ps, txt, sem })
            }
            "invariant" => {
                self.expect_sym(":")?;
                Ok(Decl::Invariant(self.expr()?))
            }
            "include" => match self.next() {
                Tok::Str(s) => Ok(Decl::Include(s)),
                _ => self.error("expected a file name after `include`"),
            },
            other => {
                self.pos -= 1;
                self.error(format!("unknown declaration `{other}`"))
            }
        }
    }

    pub fn machine(&mut self) -> PResult<MachineAst> {
        let mut decls = Vec::new();
        while !self.at_eof() {
            self.mark();
            decls.push(self.decl()?);
        }
        Ok(MachineAst { decls })
    }

    fn spec_items(&mut self, stop: &dyn Fn(&Parser) -> bool) -> PResult<Vec<SpecItem>> {
        let mut items = Vec::new();
        while !stop(self) && !self.at_eof() {
            self.mark();
            if let Some(f) = self.frame()? {
                items.push(SpecItem::Frame(f));
            } else {
                items.push(SpecItem::Decl(self.decl()?));
            }
        }
        Ok(items)
    }

    pub fn spec(&mut self) -> PResult<SpecAst> {
        let items = self.spec_items(&|p| p.is_word("pre"))?;
        self.mark();
        self.expect_word("pre")?;
        self.expect_sym(":")?;
        let pre = self.expr()?;
        self.mark();
        self.expect_word("post")?;
        self.expect_sym(":")?;
        let post = self.expr()?;
        self.expect_eof()?;
        Ok(SpecAst { items, pre, post })
    }

    pub fn lowerings(&mut self) -> PResult<Vec<LoweringAst>> {
        let mut out = Vec::new();
        while !self.at_eof() {
            self.expect_word("lowering")?;
            let name = self.ident()?;
            self.expect_sym("{")?;
            let items = self.spec_items(&|p| p.is_sym("}"))?;
            self.expect_sym("}")?;
            out.push(LoweringAst { name, items });
        }
        Ok(out)
    }

    pub fn alewife(&mut self) -> PResult<AleSpecAst> {
        let mut decls = Vec::new();
        loop {
            if self.is_word("pre") || self.at_eof() {
                break;
            }
            self.mark();
            if let Some(f) = self.frame()? {
                decls.push(AleDecl::Frame(f));
                continue;
            }
            let word = self.ident()?;
            match word.as_str() {
                "require" => {
                    let kind = self.ident()?;
                    let x = self.ident()?;
                    match kind.as_str() {
                        "type" => decls.push(AleDecl::RequireType(x)),
                        "value" => {
                            self.expect_sym(":")?;
                            decls.push(AleDecl::RequireValue(x, self.type_expr()?));
                        }
                        "function" => {
                            self.expect_sym(":")?;
                            match self.type_expr()? {
                                TypeExpr::Func(ps, r) => decls.push(AleDecl::RequireFunc(x, ps, *r)),
                                _ => return self.error("expected a function type `(τ, …) τ`"),
                            }
                        }
                        _ => return self.error(format!("unknown require kind `{kind}`")),
                    }
                }
                "provide" => {
                    let kind = self.ident()?;
                    let x = self.ident()?;
                    match kind.as_str() {
                        "type" => {
                            self.expect_sym("=")?;
                            decls.push(AleDecl::ProvideType(x, self.type_expr()?));
                        }
                        "value" => {
                            self.expect_sym(":")?;
                            let t = self.type_expr()?;
                            self.expect_sym("=")?;
                            decls.push(AleDecl::ProvideValue(x, t, self.expr()?));
                        }
                        "function" => {
                            let ps = self.params()?;
                            self.expect_sym("->")?;
                            let r = self.type_expr()?;
                            self.expect_sym("=")?;
                            decls.push(AleDecl::ProvideFunc(x, ps, r, self.expr()?));
                        }
                        _ => return self.error(format!("unknown provide kind `{kind}`")),
                    }
                }
                "region" => {
                    let x = self.ident()?;
                    self.expect_sym(":")?;
                    decls.push(AleDecl::Region(self.mem_decl(x)?));
                }
                "lower-with" => {
                    self.expect_sym(":")?;
                    let mut names = Vec::new();
                    while matches!(self.peek(), Tok::Ident(_)) && !self.at_decl_word() {
                        names.push(self.ident()?);
                    }
                    decls.push(AleDecl::LowerWith(names));
                }
                "let" => {
                    let x = self.ident()?;
                    self.expect_sym(":")?;
                    let t = self.type_expr()?;
                    self.expect_sym("=")?;
                    decls.push(AleDecl::Let(x, t, self.expr()?));
                }
                other => {
                    self.pos -= 1;
                    return self.error(format!("unknown declaration `{other}`"));
                }
            }
        }
        self.mark();
        self.expect_word("pre")?;
        self.expect_sym(":")?;
        let pre = self.expr()?;
        self.mark();
        self.expect_word("post")?;
        self.expect_sym(":")?;
        let post = self.expr()?;
        self.expect_eof()?;
        Ok(AleSpecAst { decls, pre, post })
    }

    pub fn program(&mut self) -> PResult<Vec<InstAst>> {
        let mut out = Vec::new();
        while !self.at_eof() {
            self.expect_sym("(")?;
            let op = self.ident()?;
            let mut args = Vec::new();
            while !self.eat_sym(")") {
                if self.at_eof() {
                    return self.error("unterminated instruction");
                }
                args.push(self.unary(true)?);
            }
            out.push(InstAst { op, args });
        }
        Ok(out)
    }

    pub fn finish_expr(mut self) -> PResult<Expr> {
        let e = self.expr()?;
        self.expect_eof()?;
        Ok(e)
    }
}

pub fn int_literal(i: i64) -> Expr {
    Expr::Int(BigInt::from(i))
}
