//! Printing syntax trees back to concrete syntax that reparses to the same tree.

use crate::lang::ast::*;
use num_traits::Signed;

const UNARY: u8 = 12;
const POSTFIX: u8 = 13;
const ATOM: u8 = 14;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Binop(op, ..) => op.precedence(),
        Expr::Unop(..) | Expr::Deref(_) => UNARY,
        Expr::Int(i) if i.is_negative() => UNARY,
        Expr::Index(..) | Expr::Slice(..) | Expr::Txt(_) => POSTFIX,
        Expr::Call(f, args) if args.len() == 1 && is_projection(f) => POSTFIX,
        Expr::If(..) | Expr::Let(..) => 0,
        _ => ATOM,
    }
}

fn is_projection(f: &str) -> bool {
    matches!(f, "hex" | "dec" | "bin" | "lbl")
}

fn contains_member(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |x| found |= matches!(x, Expr::Binop(Binop::Member, ..)));
    found
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Parenthesizes, keeping `(` and `*` apart so the pair never opens a comment.
fn paren(s: &str) -> String {
    if s.starts_with('*') {
        format!("( {s})")
    } else {
        format!("({s})")
    }
}

fn at(e: &Expr, min: u8) -> String {
    let s = expr(e);
    if level(e) < min {
        paren(&s)
    } else {
        s
    }
}

fn list(es: &[Expr]) -> String {
    es.iter().map(expr).collect::<Vec<_>>().join(", ")
}

pub fn ty(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Unit => "unit".into(),
        TypeExpr::Int => "int".into(),
        TypeExpr::Bool => "bool".into(),
        TypeExpr::Str => "string".into(),
        TypeExpr::Bits(n) => format!("{n} bit"),
        TypeExpr::Reg(n) => format!("{n} reg"),
        TypeExpr::RegSet(n) => format!("{n} reg set"),
        TypeExpr::Label(n) => format!("{n} label"),
        TypeExpr::Ptr(n) => format!("{n} ptr"),
        TypeExpr::Vec(n) => format!("{n} vec"),
        TypeExpr::Mem(c, l, r) => format!("{c} bit {l} len {r} ref"),
        TypeExpr::Func(ps, r) => {
            let ps: Vec<String> = ps.iter().map(ty).collect();
            format!("({}) {}", ps.join(", "), ty(r))
        }
        TypeExpr::Named(n) => n.clone(),
    }
}

pub fn expr(e: &Expr) -> String {
    match e {
        Expr::Bool(b) => b.to_string(),
        Expr::Int(i) => i.to_string(),
        Expr::Bits(b) => b.literal(),
        Expr::Str(s) => quote(s),
        Expr::SizedLit(v, w) => format!("({v}: {w} vec)"),
        Expr::Var(x) => x.clone(),
        Expr::Txt(e) => format!("{}.txt", at(e, POSTFIX)),
        Expr::Call(f, args) if args.len() == 1 && is_projection(f) => {
            format!("{}.{f}", at(&args[0], POSTFIX))
        }
        Expr::Call(f, args) => format!("{f}{}", paren(&list(args))),
        Expr::Unop(op, a) => {
            let inner = at(a, UNARY);
            let sep = if *op == Unop::BNot || inner.starts_with('-') { " " } else { "" };
            format!("{}{sep}{inner}", op.spelling())
        }
        Expr::Binop(op, a, b) => {
            let p = op.precedence();
            format!("{} {} {}", at(a, p), op.spelling(), at(b, p + 1))
        }
        Expr::Index(a, i) => format!("{}[{i}]", at(a, POSTFIX)),
        Expr::Slice(a, lo, hi) => format!("{}[{lo}:{hi}]", at(a, POSTFIX)),
        Expr::Let(x, t, v, body) => {
            let v = if contains_member(v) { paren(&expr(v)) } else { expr(v) };
            format!("let {x}: {} = {v} in {}", ty(t), expr(body))
        }
        Expr::If(c, a, b) => format!("if {} then {} else {}", expr(c), expr(a), expr(b)),
        Expr::Ptr(r, off) => format!("[{r}, {}]", expr(off)),
        Expr::Deref(a) => format!("*{}", at(a, UNARY)),
        Expr::Fetch(p, w) => format!("fetch{}", paren(&format!("{}, {w}", expr(p)))),
        Expr::BranchTo(x) => format!("branchto({x})"),
        Expr::Set(items) => format!("{{{}}}", list(items)),
        Expr::Card(a) => match **a {
            Expr::Var(ref x) => format!("|{x}|"),
            _ => format!("|{}|", paren(&expr(a))),
        },
    }
}

fn indent(depth: usize) -> String {
    "  ".repeat(depth)
}

fn seq_items(s: &Stmt) -> Vec<&Stmt> {
    match s {
        Stmt::Seq(v) => v.iter().collect(),
        Stmt::Skip => vec![],
        s => vec![s],
    }
}

/// Statements in a block; a trailing `let` absorbs the rest of its block.
fn block_body(items: &[&Stmt], depth: usize) -> String {
    let mut lines = Vec::new();
    for (i, s) in items.iter().enumerate() {
        let last = i + 1 == items.len();
        lines.push(format!("{}{}", indent(depth), stmt_at(s, depth, last)));
    }
    lines.join(";\n")
}

fn block(s: &Stmt, depth: usize) -> String {
    let items = seq_items(s);
    if items.is_empty() {
        return "[ ]".into();
    }
    format!("[\n{}\n{}]", block_body(&items, depth + 1), indent(depth))
}

/// A statement in a position where a following `;` could continue it.
fn stmt_at(s: &Stmt, depth: usize, tail: bool) -> String {
    match s {
        Stmt::Let(..) if !tail => block(s, depth),
        _ => stmt(s, depth),
    }
}

fn branch(s: &Stmt, depth: usize) -> String {
    match s {
        Stmt::Seq(_) | Stmt::Let(..) | Stmt::If(..) | Stmt::For(..) => block(s, depth),
        s => stmt(s, depth),
    }
}

pub fn stmt(s: &Stmt, depth: usize) -> String {
    match s {
        Stmt::Skip => "skip".into(),
        Stmt::Crash => "crash".into(),
        Stmt::Seq(_) => block(s, depth),
        Stmt::Call(p, args) => format!("{p}{}", paren(&list(args))),
        Stmt::Let(x, t, v, body) => {
            let v = if contains_member(v) { paren(&expr(v)) } else { expr(v) };
            let items = seq_items(body);
            let rest = if items.is_empty() {
                "skip".to_string()
            } else {
                block_body(&items, depth).trim_start().to_string()
            };
            format!("let {x}: {} = {v} in\n{}{rest}", ty(t), indent(depth))
        }
        Stmt::For(x, lo, hi, body) => format!("for {x} in {lo}..{hi} do {}", branch(body, depth)),
        Stmt::If(c, a, b) => {
            let head = format!("if {} then {}", expr(c), branch(a, depth));
            match **b {
                Stmt::Skip => head,
                Stmt::If(..) => format!("{head}\n{}else {}", indent(depth), stmt(b, depth)),
                _ => format!("{head}\n{}else {}", indent(depth), branch(b, depth)),
            }
        }
        Stmt::Assign(t, v) => format!("*{} <- {}", at(t, UNARY), expr(v)),
        Stmt::Store(p, w, v) => format!("store[{}, {w}] <- {}", expr(p), expr(v)),
        Stmt::Branch(e) => format!("BRANCH{}", paren(&expr(e))),
        Stmt::Assert(e) => format!("assert{}", paren(&expr(e))),
    }
}

fn params(ps: &Params) -> String {
    ps.iter().map(|(x, t)| format!(" {x}: {}", ty(t))).collect()
}

fn mem_decl(m: &MemDecl, keyword: &str) -> String {
    let mut s = format!("{}: {} bit {} len {} ref{keyword}", m.name, m.cell, m.len, m.refw);
    if let Some(l) = &m.label {
        s.push_str(&format!(" with {l}"));
    }
    s
}

pub fn decl(d: &Decl) -> String {
    match d {
        Decl::Type(x, t) => format!("type {x} = {}", ty(t)),
        Decl::Let(x, t, e) => format!("let {x}: {} = {}", ty(t), expr(e)),
        Decl::RegText(r, e) => format!("let {r}.txt = {}", expr(e)),
        Decl::Def(f, ps, r, e) => format!("def {f}{} -> {} =\n  {}", params(ps), ty(r), expr(e)),
        Decl::Proc(p, ps, body) => format!("proc {p}{} = {}", params(ps), block(body, 0)),
        Decl::Reg { name, ty: t, control, dontgate } => {
            let mut s = String::from("letstate ");
            if *control {
                s.push_str("control ");
            }
            if *dontgate {
                s.push_str("dontgate ");
            }
            format!("{s}{name}: {}", ty(t))
        }
        Decl::Mem(m) => format!("letstate {}", mem_decl(m, " memory")),
        Decl::Op { name, params: ps, txt, sem } => format!(
            "defop {name}{} {{\n  txt = {},\n  sem = {}\n}}",
            params(ps),
            expr(txt),
            block(sem, 1)
        ),
        Decl::Invariant(e) => format!("invariant: {}", expr(e)),
        Decl::Include(p) => format!("include {}", quote(p)),
    }
}

fn frame_items(items: &[FrameItem]) -> String {
    let regs: Vec<String> = items
        .iter()
        .filter_map(|i| match i {
            FrameItem::Reg(e) => Some(expr(e)),
            _ => None,
        })
        .collect();
    let mems: Vec<String> = items
        .iter()
        .filter_map(|i| match i {
            FrameItem::Mem(e) => Some(expr(e)),
            _ => None,
        })
        .collect();
    let mut parts = Vec::new();
    if !regs.is_empty() {
        parts.push(format!("reg-modify: {}", regs.join(" ")));
    }
    if !mems.is_empty() {
        parts.push(format!("mem-modify: {}", mems.join(" ")));
    }
    if parts.is_empty() {
        return String::new();
    }
    format!("frame: {}", parts.join(" "))
}

fn spec_item(it: &SpecItem) -> String {
    match it {
        SpecItem::Decl(d) => decl(d),
        SpecItem::Frame(f) => frame_items(f),
    }
}

pub fn machine(m: &MachineAst) -> String {
    let mut out: Vec<String> = m.decls.iter().map(decl).collect();
    out.push(String::new());
    out.join("\n")
}

pub fn spec(s: &SpecAst) -> String {
    let mut out: Vec<String> =
        s.items.iter().map(spec_item).filter(|l| !l.is_empty()).collect();
    out.push(format!("pre: {}", expr(&s.pre)));
    out.push(format!("post: {}", expr(&s.post)));
    out.push(String::new());
    out.join("\n")
}

pub fn lowerings(ms: &[LoweringAst]) -> String {
    let mut out = String::new();
    for m in ms {
        out.push_str(&format!("lowering {} {{\n", m.name));
        for it in &m.items {
            let line = spec_item(it);
            if !line.is_empty() {
                out.push_str(&format!("  {}\n", line.replace('\n', "\n  ")));
            }
        }
        out.push_str("}\n");
    }
    out
}

pub fn alewife(a: &AleSpecAst) -> String {
    let mut out = Vec::new();
    for d in &a.decls {
        out.push(match d {
            AleDecl::RequireType(x) => format!("require type {x}"),
            AleDecl::RequireValue(x, t) => format!("require value {x}: {}", ty(t)),
            AleDecl::RequireFunc(f, ps, r) => {
                format!("require function {f}: {}", ty(&TypeExpr::Func(ps.clone(), Box::new(r.clone()))))
            }
            AleDecl::ProvideType(x, t) => format!("provide type {x} = {}", ty(t)),
            AleDecl::ProvideValue(x, t, e) => format!("provide value {x}: {} = {}", ty(t), expr(e)),
            AleDecl::ProvideFunc(f, ps, r, e) => {
                format!("provide function {f}{} -> {} = {}", params(ps), ty(r), expr(e))
            }
            AleDecl::Region(m) => format!("region {}", mem_decl(m, "")),
            AleDecl::LowerWith(ms) => format!("lower-with: {}", ms.join(" ")),
            AleDecl::Frame(f) => frame_items(f),
            AleDecl::Let(x, t, e) => format!("let {x}: {} = {}", ty(t), expr(e)),
        });
    }
    out.retain(|l| !l.is_empty());
    out.push(format!("pre: {}", expr(&a.pre)));
    out.push(format!("post: {}", expr(&a.post)));
    out.push(String::new());
    out.join("\n")
}

pub fn inst(i: &InstAst) -> String {
    let mut s = format!("({}", i.op);
    for a in &i.args {
        s.push(' ');
        s.push_str(&at(a, UNARY));
    }
    s.push(')');
    s
}

pub fn program(p: &[InstAst]) -> String {
    p.iter().map(|i| format!("{}\n", inst(i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_machine, parse_stmt};

    fn round_expr(s: &str) {
        let e = parse_expr(s).unwrap();
        let printed = expr(&e);
        assert_eq!(parse_expr(&printed).unwrap(), e, "{s} printed as {printed}");
    }

    #[test]
    fn expressions_round_trip() {
        for s in [
            "a b+ b b* c",
            "(a b+ b) b* c",
            "a - (b - c)",
            "- -x",
            "*(p b+ 0x04)",
            "( *r)[3]",
            "fetch( *r, 8)",
            "let x: 4 bit = a in x b+ 0x1",
            "(if c then a else b) b+ d",
            "fetch([M, 4], 32)[0:4]",
            "imm.dec",
            "{r0, r1} union s",
            "r0 in {r1} && !b",
            "|s| == 2",
            "(3: wordsize vec)",
            "format(\"a {1}\\n\", x.hex)",
        ] {
            round_expr(s);
        }
    }

    #[test]
    fn statements_round_trip() {
        for s in [
            "[ if rd == r0 then skip else if *rs b< *rt then *rd <- 0x1 else *rd <- 0x0 ]",
            "[ let a: 4 bit = *r in *r <- a; BRANCH(0x01) ]",
            "[ if a then [ if b then skip ] else crash; skip ]",
            "[ for i in 0..3 do [ let t: 4 bit = *r in *r <- t ]; skip ]",
            "store[p, 8] <- 0x00",
        ] {
            let st = parse_stmt(s).unwrap();
            let printed = stmt(&st, 0);
            assert_eq!(parse_stmt(&printed).unwrap(), st, "{s} printed as {printed}");
        }
    }

    #[test]
    fn machine_round_trip() {
        let text = "type word = 32 bit\nletstate control dontgate f: 1 reg\nletstate M: 32 bit 4 len 32 ref memory with base\n\
                    defop NOP x: 4 bit { txt = \"nop\", sem = [ skip ] }\ninvariant: *f == 0b0";
        let m = parse_machine(text).unwrap();
        assert_eq!(parse_machine(&machine(&m)).unwrap(), m);
    }

    fn arb_expr() -> impl proptest::strategy::Strategy<Value = Expr> {
        use crate::lang::{Binop, Bitvec, Unop};
        use proptest::prelude::*;
        let leaf = prop_oneof![
            prop::sample::select(vec!["a", "b", "rd", "x1"]).prop_map(Expr::var),
            (1u32..=16, any::<u16>()).prop_map(|(w, v)| Expr::Bits(Bitvec::from_u64(w, v as u64))),
            any::<bool>().prop_map(Expr::Bool),
            (0u32..1000).prop_map(|n| Expr::Int(n.into())),
        ];
        let ops = vec![
            Binop::Eq, Binop::Neq, Binop::Add, Binop::Sub, Binop::Mul, Binop::Lt, Binop::And, Binop::Or,
            Binop::BAnd, Binop::BOr, Binop::BXor, Binop::BAdd, Binop::BSub, Binop::BLt, Binop::BSLe, Binop::Shl,
        ];
        leaf.prop_recursive(4, 24, 3, move |inner| {
            prop_oneof![
                (prop::sample::select(ops.clone()), inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::bin(o, a, b)),
                (prop::sample::select(vec![Unop::Neg, Unop::BNeg, Unop::Not, Unop::BNot]), inner.clone())
                    .prop_map(|(o, a)| match a {
                        Expr::Int(n) if o == Unop::Neg => Expr::Int(-n),
                        a => Expr::Unop(o, Box::new(a)),
                    }),
                (inner.clone(), inner.clone(), inner.clone()).prop_map(|(c, a, b)| Expr::If(Box::new(c), Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Deref(Box::new(a))),
                (inner, 1u64..64).prop_map(|(a, k)| Expr::Fetch(Box::new(a), Size::Lit(k))),
            ]
        })
    }

    proptest::proptest! {
        #[test]
        fn generated_expressions_round_trip(e in arb_expr()) {
            let printed = expr(&e);
            proptest::prop_assert_eq!(parse_expr(&printed).unwrap(), e, "{}", printed);
        }
    }
}
