//! Lowering machine-independent specifications to machine-dependent ones.

use crate::interp::int_to_bits;
use crate::lang::ast::*;
use crate::lang::Type;
use crate::machine::{Machine, Spec, TypeError};
use crate::syntax::{Loc, Source};
use std::collections::{BTreeSet, HashMap, HashSet};

/// Integer constants available for substitution into types.
pub type ConstEnv = HashMap<Ident, u64>;

/// The result of lowering: the emitted specification and its checked form.
#[derive(Clone, Debug)]
pub struct Lowered {
    pub ast: SpecAst,
    pub spec: Spec,
}

fn err(loc: Option<&Loc>, msg: impl Into<String>) -> TypeError {
    TypeError { loc: loc.cloned(), msg: msg.into() }
}

/// Binds exactly the identifiers declared as `let x: int = C`.
pub fn extract_constants<'a>(decls: impl IntoIterator<Item = &'a Decl>, sigma: &mut ConstEnv) {
    for d in decls {
        if let Decl::Let(x, TypeExpr::Int, Expr::Int(c)) = d {
            if let Ok(c) = u64::try_from(c) {
                sigma.insert(x.clone(), c);
            }
        }
    }
}

fn lower_size(sigma: &ConstEnv, s: &Size) -> Result<Size, String> {
    match s {
        Size::Lit(n) => Ok(Size::Lit(*n)),
        Size::Sym(x) => sigma.get(x).map(|&n| Size::Lit(n)).ok_or_else(|| format!("unresolved symbolic constant `{x}`")),
    }
}

/// Substitutes integer constants and erases pointer and vector types to
/// bitvectors.
pub fn lower_type(sigma: &ConstEnv, t: &TypeExpr) -> Result<TypeExpr, String> {
    let s = |n: &Size| lower_size(sigma, n);
    Ok(match t {
        TypeExpr::Bits(n) | TypeExpr::Ptr(n) | TypeExpr::Vec(n) => TypeExpr::Bits(s(n)?),
        TypeExpr::Reg(n) => TypeExpr::Reg(s(n)?),
        TypeExpr::RegSet(n) => TypeExpr::RegSet(s(n)?),
        TypeExpr::Label(n) => TypeExpr::Label(s(n)?),
        TypeExpr::Mem(c, l, r) => TypeExpr::Mem(s(c)?, s(l)?, s(r)?),
        TypeExpr::Func(ps, r) => TypeExpr::Func(
            ps.iter().map(|p| lower_type(sigma, p)).collect::<Result<_, _>>()?,
            Box::new(lower_type(sigma, r)?),
        ),
        t => t.clone(),
    })
}

fn soft_size(sigma: &ConstEnv, s: &Size) -> Size {
    lower_size(sigma, s).unwrap_or_else(|_| s.clone())
}

/// Structural expression translation. Identifiers pass through; their
/// existence is checked when the result is typechecked.
pub fn lower_expr(sigma: &ConstEnv, e: &Expr) -> Result<Expr, String> {
    let b = |e: &Expr| lower_expr(sigma, e).map(Box::new);
    Ok(match e {
        Expr::SizedLit(v, w) => match soft_size(sigma, w) {
            Size::Lit(n) if n > 0 && n <= u32::MAX as u64 => match int_to_bits(n as u32, v) {
                Some(bits) => Expr::Bits(bits),
                None => return Err(format!("constant {v} does not fit in {n} bits")),
            },
            w => Expr::SizedLit(v.clone(), w),
        },
        Expr::Txt(a) => Expr::Txt(b(a)?),
        Expr::Call(f, args) => {
            Expr::Call(f.clone(), args.iter().map(|a| lower_expr(sigma, a)).collect::<Result<_, _>>()?)
        }
        Expr::Unop(op, a) => Expr::Unop(*op, b(a)?),
        Expr::Binop(op, x, y) => Expr::Binop(*op, b(x)?, b(y)?),
        Expr::Index(a, i) => Expr::Index(b(a)?, soft_size(sigma, i)),
        Expr::Slice(a, l, h) => Expr::Slice(b(a)?, soft_size(sigma, l), soft_size(sigma, h)),
        Expr::Let(x, t, v, body) => Expr::Let(x.clone(), lower_type(sigma, t)?, b(v)?, b(body)?),
        Expr::If(c, x, y) => Expr::If(b(c)?, b(x)?, b(y)?),
        Expr::Ptr(r, off) => Expr::Ptr(r.clone(), b(off)?),
        Expr::Deref(a) => Expr::Deref(b(a)?),
        Expr::Fetch(p, w) => Expr::Fetch(b(p)?, lower_size(sigma, w)?),
        Expr::Set(items) => Expr::Set(items.iter().map(|a| lower_expr(sigma, a)).collect::<Result<_, _>>()?),
        Expr::Card(a) => Expr::Card(b(a)?),
        leaf => leaf.clone(),
    })
}

fn lower_frame(sigma: &ConstEnv, items: &[FrameItem]) -> Result<Vec<FrameItem>, String> {
    items
        .iter()
        .map(|it| {
            Ok(match it {
                FrameItem::Reg(e) => FrameItem::Reg(lower_expr(sigma, e)?),
                FrameItem::Mem(e) => FrameItem::Mem(lower_expr(sigma, e)?),
            })
        })
        .collect()
}

fn size_refs(s: &Size, out: &mut BTreeSet<Ident>) {
    if let Size::Sym(x) = s {
        out.insert(x.clone());
    }
}

fn type_refs(t: &TypeExpr, out: &mut BTreeSet<Ident>) {
    match t {
        TypeExpr::Bits(n)
        | TypeExpr::Reg(n)
        | TypeExpr::RegSet(n)
        | TypeExpr::Label(n)
        | TypeExpr::Ptr(n)
        | TypeExpr::Vec(n) => size_refs(n, out),
        TypeExpr::Mem(a, b, c) => [a, b, c].into_iter().for_each(|s| size_refs(s, out)),
        TypeExpr::Func(ps, r) => {
            ps.iter().for_each(|p| type_refs(p, out));
            type_refs(r, out);
        }
        TypeExpr::Named(x) => {
            out.insert(x.clone());
        }
        _ => {}
    }
}

fn expr_refs(e: &Expr, out: &mut BTreeSet<Ident>) {
    e.walk(&mut |sub| match sub {
        Expr::Var(x) | Expr::Call(x, _) | Expr::Ptr(x, _) => {
            out.insert(x.clone());
        }
        Expr::SizedLit(_, s) | Expr::Index(_, s) | Expr::Fetch(_, s) => size_refs(s, out),
        Expr::Slice(_, l, h) => {
            size_refs(l, out);
            size_refs(h, out);
        }
        Expr::Let(_, t, ..) => type_refs(t, out),
        _ => {}
    });
}

fn stmt_refs(s: &Stmt, out: &mut BTreeSet<Ident>) {
    s.walk_exprs(&mut |e| expr_refs(e, out));
    s.walk(&mut |st| match st {
        Stmt::Call(p, _) => {
            out.insert(p.clone());
        }
        Stmt::Let(_, t, ..) => type_refs(t, out),
        Stmt::For(_, l, h, _) => {
            size_refs(l, out);
            size_refs(h, out);
        }
        Stmt::Store(_, w, _) => size_refs(w, out),
        _ => {}
    });
}

/// Identifiers a declaration defines.
pub fn defines(d: &Decl) -> Vec<Ident> {
    match d {
        Decl::Mem(m) => std::iter::once(m.name.clone()).chain(m.label.clone()).collect(),
        d => d.name().map(str::to_string).into_iter().collect(),
    }
}

/// Identifiers a declaration refers to.
pub fn references(d: &Decl) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    match d {
        Decl::Type(_, t) => type_refs(t, &mut out),
        Decl::Let(_, t, e) => {
            type_refs(t, &mut out);
            expr_refs(e, &mut out);
        }
        Decl::RegText(r, e) => {
            out.insert(r.clone());
            expr_refs(e, &mut out);
        }
        Decl::Def(_, ps, r, e) => {
            ps.iter().for_each(|(_, t)| type_refs(t, &mut out));
            type_refs(r, &mut out);
            expr_refs(e, &mut out);
            ps.iter().for_each(|(x, _)| {
                out.remove(x);
            });
        }
        Decl::Proc(_, ps, s) => {
            ps.iter().for_each(|(_, t)| type_refs(t, &mut out));
            stmt_refs(s, &mut out);
            ps.iter().for_each(|(x, _)| {
                out.remove(x);
            });
        }
        Decl::Reg { ty, .. } => type_refs(ty, &mut out),
        Decl::Mem(m) => [&m.cell, &m.len, &m.refw].into_iter().for_each(|s| size_refs(s, &mut out)),
        Decl::Op { params, txt, sem, .. } => {
            params.iter().for_each(|(_, t)| type_refs(t, &mut out));
            expr_refs(txt, &mut out);
            stmt_refs(sem, &mut out);
        }
        Decl::Invariant(e) => expr_refs(e, &mut out),
        Decl::Include(_) => {}
    }
    for x in defines(d) {
        out.remove(&x);
    }
    out
}

/// Orders declarations so every identifier is defined before use, keeping
/// the given order wherever dependencies allow. Reports cycles.
pub fn dependency_order<T: Clone>(items: &[(Decl, T)]) -> Result<Vec<(Decl, T)>, String> {
    let mut owner: HashMap<Ident, usize> = HashMap::new();
    for (i, (d, _)) in items.iter().enumerate() {
        for x in defines(d) {
            if owner.insert(x.clone(), i).is_some() {
                return Err(format!("`{x}` is declared more than once"));
            }
        }
    }
    let deps: Vec<BTreeSet<usize>> = items
        .iter()
        .enumerate()
        .map(|(i, (d, _))| references(d).iter().filter_map(|x| owner.get(x).copied()).filter(|&j| j != i).collect())
        .collect();
    let mut done = vec![false; items.len()];
    let mut out = Vec::with_capacity(items.len());
    while out.len() < items.len() {
        let next = (0..items.len()).find(|&i| !done[i] && deps[i].iter().all(|&j| done[j]));
        match next {
            Some(i) => {
                done[i] = true;
                out.push(items[i].clone());
            }
            None => {
                let cycle = find_cycle(&deps, &done);
                let names: Vec<String> =
                    cycle.iter().map(|&i| defines(&items[i].0).first().cloned().unwrap_or_default()).collect();
                return Err(format!("circular declarations: {}", names.join(" -> ")));
            }
        }
    }
    Ok(out)
}

fn find_cycle(deps: &[BTreeSet<usize>], done: &[bool]) -> Vec<usize> {
    let start = (0..deps.len()).find(|&i| !done[i]).unwrap_or(0);
    let mut path = vec![start];
    let mut seen = HashSet::from([start]);
    let mut cur = start;
    loop {
        let Some(&next) = deps[cur].iter().find(|&&j| !done[j]) else { return path };
        if seen.contains(&next) {
            let pos = path.iter().position(|&p| p == next).unwrap_or(0);
            let mut cycle = path[pos..].to_vec();
            cycle.push(next);
            return cycle;
        }
        seen.insert(next);
        path.push(next);
        cur = next;
    }
}

/// True if every identifier a declaration uses is declared by the machine
/// or by an earlier declaration.
pub fn declared_before_use(machine: &Machine, decls: &[Decl]) -> bool {
    let mut known: HashSet<Ident> = machine.tenv.vars.keys().chain(machine.tenv.aliases.keys()).cloned().collect();
    known.extend(machine.tenv.consts.keys().cloned());
    let all: HashSet<Ident> = decls.iter().flat_map(defines).collect();
    for d in decls {
        if references(d).iter().any(|x| all.contains(x) && !known.contains(x)) {
            return false;
        }
        known.extend(defines(d));
    }
    true
}

/// Lowers an Alewife specification against a machine and lowering modules.
pub fn lower_spec(
    machine: &Machine,
    machine_decls: &[Decl],
    modules: &[Source<LoweringAst>],
    ale: &Source<AleSpecAst>,
) -> Result<Lowered, TypeError> {
    let ale_loc = |i: usize| ale.locs.get(i);
    let n = ale.ast.decls.len();
    let (pre_loc, post_loc) = (ale.locs.get(n), ale.locs.get(n + 1));

    let mut wanted: Vec<(&Ident, usize)> = Vec::new();
    for (i, d) in ale.ast.decls.iter().enumerate() {
        if let AleDecl::LowerWith(names) = d {
            wanted.extend(names.iter().map(|x| (x, i)));
        }
    }
    let mut used: Vec<&Source<LoweringAst>> = Vec::new();
    for (name, i) in wanted {
        let m = modules
            .iter()
            .find(|m| &m.ast.name == name)
            .ok_or_else(|| err(ale_loc(i), format!("lowering module `{name}` not found")))?;
        if !used.iter().any(|u| u.ast.name == *name) {
            used.push(m);
        }
    }

    let mut sigma = ConstEnv::new();
    extract_constants(machine_decls, &mut sigma);
    for m in &used {
        extract_constants(m.ast.items.iter().filter_map(|it| if let SpecItem::Decl(d) = it { Some(d) } else { None }), &mut sigma);
    }
    for d in &ale.ast.decls {
        if let AleDecl::ProvideValue(x, TypeExpr::Int, Expr::Int(c)) = d {
            if let Ok(c) = u64::try_from(c) {
                sigma.insert(x.clone(), c);
            }
        }
    }

    // Alewife declarations first, then module material, then block-lets.
    let mut decls: Vec<(Decl, Option<Loc>)> = Vec::new();
    let mut block_lets: Vec<(Decl, Option<Loc>)> = Vec::new();
    let mut frames: Vec<FrameItem> = Vec::new();
    let mut frame_loc: Option<Loc> = None;
    let mut requires = Vec::new();
    for (i, d) in ale.ast.decls.iter().enumerate() {
        let loc = ale_loc(i).cloned();
        let fail = |m: String| err(loc.as_ref(), m);
        match d {
            AleDecl::RequireType(_) | AleDecl::RequireValue(..) | AleDecl::RequireFunc(..) => requires.push((d, loc)),
            AleDecl::ProvideType(x, t) => decls.push((Decl::Type(x.clone(), lower_type(&sigma, t).map_err(fail)?), loc)),
            AleDecl::ProvideValue(x, t, e) => {
                let t = lower_type(&sigma, t).map_err(&fail)?;
                decls.push((Decl::Let(x.clone(), t, lower_expr(&sigma, e).map_err(fail)?), loc));
            }
            AleDecl::ProvideFunc(f, ps, r, e) => {
                let ps = ps
                    .iter()
                    .map(|(x, t)| Ok((x.clone(), lower_type(&sigma, t)?)))
                    .collect::<Result<Vec<_>, String>>()
                    .map_err(&fail)?;
                let r = lower_type(&sigma, r).map_err(&fail)?;
                decls.push((Decl::Def(f.clone(), ps, r, lower_expr(&sigma, e).map_err(fail)?), loc));
            }
            AleDecl::Region(m) => {
                let s = |z: &Size| lower_size(&sigma, z);
                let md = MemDecl {
                    name: m.name.clone(),
                    cell: s(&m.cell).map_err(&fail)?,
                    len: s(&m.len).map_err(&fail)?,
                    refw: s(&m.refw).map_err(&fail)?,
                    label: m.label.clone(),
                };
                decls.push((Decl::Mem(md), loc));
            }
            AleDecl::LowerWith(_) => {}
            AleDecl::Frame(items) => {
                frames.extend(lower_frame(&sigma, items).map_err(fail)?);
                frame_loc = frame_loc.or(loc);
            }
            AleDecl::Let(x, t, e) => {
                let t = lower_type(&sigma, t).map_err(&fail)?;
                block_lets.push((Decl::Let(x.clone(), t, lower_expr(&sigma, e).map_err(fail)?), loc));
            }
        }
    }
    for m in &used {
        for (it, loc) in m.ast.items.iter().zip(m.locs.iter().map(Some).chain(std::iter::repeat(None))) {
            match it {
                SpecItem::Decl(d) => decls.push((d.clone(), loc.cloned())),
                SpecItem::Frame(items) => {
                    frames.extend(items.iter().cloned());
                    frame_loc = frame_loc.or(loc.cloned());
                }
            }
        }
    }
    decls.extend(block_lets);

    let defined: HashSet<Ident> = decls.iter().flat_map(|(d, _)| defines(d)).collect();
    let type_defined: HashSet<Ident> =
        decls.iter().filter_map(|(d, _)| if let Decl::Type(x, _) = d { Some(x.clone()) } else { None }).collect();
    for (d, loc) in &requires {
        let (x, is_type) = match d {
            AleDecl::RequireType(x) => (x, true),
            AleDecl::RequireValue(x, _) | AleDecl::RequireFunc(x, ..) => (x, false),
            _ => unreachable!(),
        };
        let present = if is_type {
            machine.tenv.aliases.contains_key(x) || type_defined.contains(x)
        } else {
            machine.tenv.vars.contains_key(x) || defined.contains(x)
        };
        if !present {
            let kind = if is_type { "type" } else { "value" };
            return Err(err(loc.as_ref(), format!("required {kind} `{x}` is not provided by the machine or lowering modules")));
        }
    }

    let ordered = dependency_order(&decls).map_err(|m| err(None, m))?;
    let mut items: Vec<SpecItem> = ordered.iter().map(|(d, _)| SpecItem::Decl(d.clone())).collect();
    let mut locs: Vec<Loc> = Vec::new();
    let dummy = Loc { file: "<lowered>".into(), line: 0, col: 0 };
    locs.extend(ordered.iter().map(|(_, l)| l.clone().unwrap_or_else(|| dummy.clone())));
    if !frames.is_empty() {
        items.push(SpecItem::Frame(frames));
        locs.push(frame_loc.unwrap_or_else(|| dummy.clone()));
    }
    locs.push(pre_loc.cloned().unwrap_or_else(|| dummy.clone()));
    locs.push(post_loc.cloned().unwrap_or_else(|| dummy.clone()));

    let mut pre = lower_expr(&sigma, &ale.ast.pre).map_err(|m| err(pre_loc, m))?;
    let mut post = lower_expr(&sigma, &ale.ast.post).map_err(|m| err(post_loc, m))?;
    for inv in &machine.invariants {
        pre = Expr::and(pre, inv.clone());
        post = Expr::and(post, inv.clone());
    }
    let unlocated = |mut e: TypeError| {
        if e.loc.as_ref().is_some_and(|l| l.line == 0) {
            e.loc = None;
        }
        e
    };
    let decls_only = SpecAst { items: items.clone(), pre: Expr::Bool(true), post: Expr::Bool(true) };
    let env = Spec::from_ast(machine, &decls_only, &locs).map_err(unlocated)?;
    check_requires(&env, &sigma, &requires)?;
    let ast = SpecAst { items, pre, post };
    let spec = Spec::from_ast(machine, &ast, &locs).map_err(unlocated)?;
    Ok(Lowered { ast, spec })
}

fn check_requires(env: &Spec, sigma: &ConstEnv, requires: &[(&AleDecl, Option<Loc>)]) -> Result<(), TypeError> {

    for (d, loc) in requires {
        let want = match d {
            AleDecl::RequireValue(x, t) => Some((x, lower_type(sigma, t))),
            AleDecl::RequireFunc(x, ps, r) => Some((x, lower_type(sigma, &TypeExpr::Func(ps.clone(), Box::new(r.clone()))))),
            _ => None,
        };
        if let Some((x, t)) = want {
            let t = t.map_err(|m| err(loc.as_ref(), m))?;
            let want = env.machine.tenv.resolve(&t).map_err(|m| err(loc.as_ref(), m))?;
            let have = env.machine.tenv.vars.get(x).cloned().unwrap_or(Type::Unit);
            let ok = match (&want, &have) {
                (Type::Func(pa, ra), Type::Func(pb, rb)) => {
                    pa.len() == pb.len() && pa.iter().zip(pb).all(|(a, b)| a.compatible(b)) && ra.compatible(rb)
                }
                (a, b) => a.compatible(b),
            };
            if !ok {
                return Err(err(loc.as_ref(), format!("`{x}` is required as {want} but provided as {have}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_alewife, parse_lowerings, parse_machine};

    const MACHINE: &str = "let wordsize: int = 8\ntype word = 8 bit\ntype register = 8 reg\n\
        letstate r0: register\nletstate r1: register\nletstate r2: register\n\
        invariant: *r0 == 0x00";

    const ALE: &str = "require type word\nrequire value wordsize: int\n\
        require value src: wordsize reg\nrequire value N: int\n\
        require function bump: (word) word\n\
        region Buf: wordsize bit N len wordsize ref\n\
        lower-with: defs\n\
        let p: wordsize ptr = bump([Buf, 0])\n\
        pre: *src == [Buf, 0]\npost: fetch(p, wordsize) == (1: wordsize vec)";

    const LOWERING: &str = "lowering defs { let src: register = r1  let N: int = 4 \
        def bump base: word -> word = base b+ 0x01 } lowering other { modify: r2 }";

    fn lower(ale: &str, lowering: &str) -> Result<Lowered, TypeError> {
        let mast = parse_machine(MACHINE).unwrap();
        let m = Machine::from_ast(&mast, &[]).unwrap();
        let mods: Vec<_> = parse_lowerings(lowering).unwrap().into_iter().map(|ast| Source { ast, locs: vec![] }).collect();
        lower_spec(&m, &mast.decls, &mods, &Source { ast: parse_alewife(ale).unwrap(), locs: vec![] })
    }

    #[test]
    fn constants_are_literal_lets_only() {
        let mut sigma = ConstEnv::new();
        let decls = parse_machine("let a: int = 32\nlet b: int = 3 + 4\ntype w = 8 bit").unwrap().decls;
        extract_constants(&decls, &mut sigma);
        assert_eq!(sigma, ConstEnv::from([("a".to_string(), 32)]));
    }

    #[test]
    fn types_substitute_constants() {
        let sigma = ConstEnv::from([("wordsize".to_string(), 32), ("DISP_MAX".to_string(), 268)]);
        let ws = || Size::Sym("wordsize".into());
        assert_eq!(lower_type(&sigma, &TypeExpr::Ptr(ws())), Ok(TypeExpr::Bits(Size::Lit(32))));
        assert_eq!(
            lower_type(&sigma, &TypeExpr::Mem(ws(), Size::Sym("DISP_MAX".into()), ws())),
            Ok(TypeExpr::Mem(Size::Lit(32), Size::Lit(268), Size::Lit(32)))
        );
        assert!(lower_type(&sigma, &TypeExpr::Bits(Size::Sym("k".into()))).is_err());
    }

    #[test]
    fn lowering_orders_declarations_and_adds_invariants() {
        let l = lower(ALE, LOWERING).unwrap();
        let decls: Vec<Decl> =
            l.ast.items.iter().filter_map(|i| if let SpecItem::Decl(d) = i { Some(d.clone()) } else { None }).collect();
        let names: Vec<&str> = decls.iter().filter_map(Decl::name).collect();
        assert_eq!(names, vec!["Buf", "src", "N", "bump", "p"]);
        let m = &l.spec.machine;
        assert!(declared_before_use(&Machine::from_ast(&parse_machine(MACHINE).unwrap(), &[]).unwrap(), &decls));
        assert_eq!(l.ast.post.conjuncts().len(), 2);
        assert_eq!(m.shape.regions[0].len, 4);
        let again = dependency_order(&decls.iter().map(|d| (d.clone(), ())).collect::<Vec<_>>()).unwrap();
        assert_eq!(again.into_iter().map(|(d, _)| d).collect::<Vec<_>>(), decls);
    }

    #[test]
    fn missing_requirements_are_reported() {
        let e = lower(ALE, "lowering defs { let N: int = 4 def bump base: word -> word = base }").unwrap_err();
        assert!(e.msg.contains("`src`"), "{e}");
        let e = lower(ALE, "lowering other { }").unwrap_err();
        assert!(e.msg.contains("`defs` not found"), "{e}");
        let e = lower(ALE, "lowering defs { let src: 8 bit = 0x00 let N: int = 4 def bump base: word -> word = base }")
            .unwrap_err();
        assert!(e.msg.contains("required as"), "{e}");
    }

    #[test]
    fn cycles_are_reported() {
        let d = |t: &str| parse_machine(t).unwrap().decls.remove(0);
        let items = vec![(d("let a: int = b"), ()), (d("let b: int = a"), ())];
        let e = dependency_order(&items).unwrap_err();
        assert!(e.contains("a -> b -> a") || e.contains("b -> a -> b"), "{e}");
    }
}
