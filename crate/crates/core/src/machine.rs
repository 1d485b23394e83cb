//! Checked machine descriptions, specifications, and programs.

use crate::interp::{int_to_bits, Binding, Env, Interp, Stuck};
use crate::lang::ast::*;
use crate::lang::{RegId, RegionId, RegionInfo, RegInfo, Shape, Type, Value};
use crate::syntax::{pretty, Loc, Source};
use crate::typeck::{TypeEnv, BUILTINS};
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub loc: Option<Loc>,
    pub msg: String,
}

impl TypeError {
    fn at(loc: Option<&Loc>, msg: impl Into<String>) -> TypeError {
        TypeError { loc: loc.cloned(), msg: msg.into() }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.loc {
            Some(l) => write!(f, "{l}: {}", self.msg),
            None => write!(f, "{}", self.msg),
        }
    }
}

impl std::error::Error for TypeError {}

#[derive(Clone, Debug)]
pub struct OpDef {
    pub name: Ident,
    pub params: Vec<(Ident, Type)>,
    pub txt: Expr,
    pub sem: Stmt,
}

/// A checked machine description.
#[derive(Clone, Debug, Default)]
pub struct Machine {
    pub shape: Shape,
    pub tenv: TypeEnv,
    pub env: Env,
    pub ops: Vec<OpDef>,
    pub invariants: Vec<Expr>,
    pub decls: Vec<Decl>,
}

/// A state-dependent specification binding, evaluated in the initial state.
#[derive(Clone, Debug)]
pub struct SpecLet {
    pub name: Ident,
    pub ty: Type,
    pub expr: Expr,
}

/// A checked specification over a machine.
#[derive(Clone, Debug)]
pub struct Spec {
    pub machine: Machine,
    pub lets: Vec<SpecLet>,
    pub frame_regs: BTreeSet<RegId>,
    pub frame_cells: BTreeSet<(RegionId, usize)>,
    /// Frame plus the locations the postcondition names.
    pub modifiable_regs: BTreeSet<RegId>,
    pub modifiable_cells: BTreeSet<(RegionId, usize)>,
    /// Registers the specification mentions anywhere.
    pub mentioned_regs: BTreeSet<RegId>,
    pub pre: Expr,
    pub post: Expr,
    pub ext_label: Option<Ident>,
    pub ast: SpecAst,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inst {
    pub op: usize,
    pub args: Vec<Value>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Machine,
    Spec,
}

fn static_eval(m: &Machine, e: &Expr) -> Result<Value, Stuck> {
    Interp::new(&m.env, &m.shape).eval(None, &mut Vec::new(), e)
}

impl Machine {
    pub fn from_ast(ast: &MachineAst, locs: &[Loc]) -> Result<Machine, TypeError> {
        let mut m = Machine::default();
        for (i, d) in ast.decls.iter().enumerate() {
            m.add_decl(d, Mode::Machine, &mut Vec::new()).map_err(|msg| TypeError::at(locs.get(i), msg))?;
        }
        Ok(m)
    }

    pub fn from_source(src: &Source<MachineAst>) -> Result<Machine, TypeError> {
        Machine::from_ast(&src.ast, &src.locs)
    }

    pub fn op_by_name(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    fn bind_name(&mut self, x: &str, t: Type) -> Result<(), String> {
        if self.tenv.bound(x) {
            return Err(format!("`{x}` is already declared"));
        }
        self.tenv.vars.insert(x.to_string(), t);
        Ok(())
    }

    fn params(&self, ps: &Params) -> Result<Vec<(Ident, Type)>, String> {
        let mut out: Vec<(Ident, Type)> = Vec::new();
        for (x, t) in ps {
            if out.iter().any(|(y, _)| y == x) || self.tenv.bound(x) {
                return Err(format!("parameter `{x}` is already bound"));
            }
            out.push((x.clone(), self.tenv.resolve_base(t)?));
        }
        Ok(out)
    }

    fn add_decl(&mut self, d: &Decl, mode: Mode, dynamic: &mut Vec<SpecLet>) -> Result<(), String> {
        match d {
            Decl::Type(x, t) => {
                if self.tenv.bound(x) {
                    return Err(format!("`{x}` is already declared"));
                }
                let t = self.tenv.resolve(t)?;
                self.tenv.aliases.insert(x.clone(), t);
            }
            Decl::Let(x, t, e) => {
                let t = self.tenv.resolve_base(t)?;
                self.tenv.expect(&mut Vec::new(), e, &t).map_err(|m| format!("in `let {x}`: {m}"))?;
                self.bind_name(x, t.clone())?;
                match static_eval(self, e) {
                    Ok(Value::Fail) => return Err(format!("`let {x}` fails to evaluate")),
                    Ok(v) => {
                        if let Value::Int(i) = &v {
                            if let Ok(n) = i64::try_from(i.clone()) {
                                self.tenv.consts.insert(x.clone(), n);
                            }
                        }
                        self.env.map.insert(x.clone(), Binding::Val(v));
                    }
                    Err(Stuck::NeedsState) if mode == Mode::Spec => {
                        dynamic.push(SpecLet { name: x.clone(), ty: t, expr: e.clone() });
                    }
                    Err(Stuck::Unbound(y)) if mode == Mode::Spec && dynamic.iter().any(|l| l.name == y) => {
                        dynamic.push(SpecLet { name: x.clone(), ty: t, expr: e.clone() });
                    }
                    Err(s) => return Err(format!("`let {x}` must be computable without a machine state: {s}")),
                }
            }
            Decl::RegText(r, e) => {
                let Some(Binding::Val(Value::Reg(id))) = self.env.map.get(r).cloned() else {
                    return Err(format!("`{r}` is not a register"));
                };
                self.tenv.expect(&mut Vec::new(), e, &Type::Str).map_err(|m| format!("`{r}.txt`: {m}"))?;
                if self.env.reg_text.contains_key(&id) {
                    return Err(format!("`{r}.txt` is already declared"));
                }
                match static_eval(self, e) {
                    Ok(Value::Str(s)) => {
                        self.env.reg_text.insert(id, s);
                    }
                    _ => return Err(format!("`{r}.txt` must be a constant string")),
                }
            }
            Decl::Def(f, ps, r, e) => {
                let params = self.params(ps)?;
                let rt = self.tenv.resolve_base(r)?;
                if self.tenv.bound(f) {
                    return Err(format!("`{f}` is already declared"));
                }
                let mut sc = params.clone();
                self.tenv.expect(&mut sc, e, &rt).map_err(|m| format!("in `def {f}`: {m}"))?;
                let ft = Type::Func(params.iter().map(|(_, t)| t.clone()).collect(), Box::new(rt));
                self.bind_name(f, ft)?;
                let names = params.into_iter().map(|(x, _)| x).collect();
                self.env.map.insert(f.clone(), Binding::Func(Arc::new((names, e.clone()))));
            }
            Decl::Proc(p, ps, s) => {
                let params = self.params(ps)?;
                if self.tenv.bound(p) {
                    return Err(format!("`{p}` is already declared"));
                }
                let mut sc = params.clone();
                self.tenv.stmt(&mut sc, s).map_err(|m| format!("in `proc {p}`: {m}"))?;
                self.bind_name(p, Type::Proc(params.iter().map(|(_, t)| t.clone()).collect()))?;
                let names = params.into_iter().map(|(x, _)| x).collect();
                self.env.map.insert(p.clone(), Binding::Proc(Arc::new((names, s.clone()))));
            }
            Decl::Reg { name, ty, control, dontgate } => {
                let Type::Reg(width) = self.tenv.resolve(ty)? else {
                    return Err(format!("state element `{name}` must have a register type"));
                };
                self.bind_name(name, Type::Reg(width))?;
                let id = RegId(self.shape.regs.len() as u32);
                self.shape.regs.push(RegInfo { name: name.clone(), width, control: *control, dontgate: *dontgate });
                self.env.map.insert(name.clone(), Binding::Val(Value::Reg(id)));
            }
            Decl::Mem(md) => {
                let t = self.tenv.resolve(&TypeExpr::Mem(md.cell.clone(), md.len.clone(), md.refw.clone()))?;
                let Type::Mem { cell, len, refw } = t else { unreachable!() };
                if refw < 64 && (len as u64) * (cell.div_ceil(8).max(1) as u64) > 1u64 << refw {
                    return Err(format!("region `{}` does not fit in a {refw}-bit offset", md.name));
                }
                self.bind_name(&md.name, t)?;
                let id = RegionId(self.shape.regions.len() as u32);
                self.shape.regions.push(RegionInfo { name: md.name.clone(), cell, len, refw, label: md.label.clone() });
                if let Some(l) = &md.label {
                    self.bind_name(l, Type::Label(refw))?;
                    let p = self.shape.base_pointer(id);
                    self.env.map.insert(l.clone(), Binding::Val(Value::Ptr(p)));
                }
            }
            Decl::Op { name, params, txt, sem } => {
                let ps = self.params(params)?;
                if let Some((x, t)) = ps.iter().find(|(_, t)| matches!(t, Type::Str | Type::Unit)) {
                    return Err(format!("operand `{x}` of `{name}` has type {t}"));
                }
                if self.tenv.bound(name) {
                    return Err(format!("`{name}` is already declared"));
                }
                let mut sc = ps.clone();
                self.tenv.expect(&mut sc, txt, &Type::Str).map_err(|m| format!("`{name}` txt: {m}"))?;
                self.tenv.stmt(&mut sc, sem).map_err(|m| format!("`{name}` sem: {m}"))?;
                self.tenv.ops.insert(name.clone(), ps.iter().map(|(_, t)| t.clone()).collect());
                self.ops.push(OpDef { name: name.clone(), params: ps, txt: txt.clone(), sem: sem.clone() });
            }
            Decl::Invariant(e) => {
                self.tenv.expect(&mut Vec::new(), e, &Type::Bool).map_err(|m| format!("invariant: {m}"))?;
                self.invariants.push(e.clone());
            }
            Decl::Include(f) => return Err(format!("unexpanded include \"{f}\"")),
        }
        self.decls.push(d.clone());
        Ok(())
    }

    /// Checks and evaluates the operands of a program.
    pub fn program(&self, insts: &[InstAst]) -> Result<Vec<Inst>, TypeError> {
        insts
            .iter()
            .enumerate()
            .map(|(i, ia)| self.inst(ia).map_err(|m| TypeError::at(None, format!("instruction {}: {m}", i + 1))))
            .collect()
    }

    fn inst(&self, ia: &InstAst) -> Result<Inst, String> {
        let op = self.op_by_name(&ia.op).ok_or_else(|| format!("unknown operation `{}`", ia.op))?;
        let def = &self.ops[op];
        if def.params.len() != ia.args.len() {
            return Err(format!("`{}` expects {} operand(s), found {}", def.name, def.params.len(), ia.args.len()));
        }
        let mut args = Vec::new();
        for ((x, t), a) in def.params.iter().zip(&ia.args) {
            let v = static_eval(self, a).map_err(|s| format!("operand `{x}`: {s}"))?;
            let v = match (t, v) {
                (Type::Bits(w), Value::Int(i)) => {
                    Value::Bits(int_to_bits(*w, &i).ok_or_else(|| format!("operand `{x}` does not fit {w} bits"))?)
                }
                (_, v) => v,
            };
            if !self.value_has_type(&v, t) {
                return Err(format!("operand `{x}` expects {t}, found {}", self.shape.show_value(&v)));
            }
            args.push(v);
        }
        Ok(Inst { op, args })
    }

    pub fn value_has_type(&self, v: &Value, t: &Type) -> bool {
        match (v, t) {
            (Value::Bool(_), Type::Bool) | (Value::Int(_), Type::Int) | (Value::Str(_), Type::Str) => true,
            (Value::Unit, Type::Unit) => true,
            (Value::Bits(b), Type::Bits(w)) => b.width() == *w,
            (Value::Ptr(p), Type::Bits(w) | Type::Label(w)) => p.width == *w,
            (Value::Reg(r), Type::Reg(w)) => self.shape.reg(*r).width == *w,
            (Value::RegSet(_, a), Type::RegSet(b)) => a == b,
            _ => false,
        }
    }

    /// The program in `(OP arg …)` form.
    pub fn show_program(&self, prog: &[Inst]) -> String {
        prog.iter().map(|i| self.show_inst(i)).collect::<Vec<_>>().join("\n")
    }

    pub fn show_inst(&self, inst: &Inst) -> String {
        let mut s = format!("({}", self.ops[inst.op].name);
        for a in &inst.args {
            s.push(' ');
            s.push_str(&self.show_arg(a));
        }
        s.push(')');
        s
    }

    fn show_arg(&self, v: &Value) -> String {
        match v {
            Value::Bits(b) => b.literal(),
            Value::Ptr(p) => match &self.shape.region(p.region).label {
                Some(l) if p.offset == 0 => l.clone(),
                _ => format!("[{}, {}]", self.shape.region(p.region).name, p.offset),
            },
            v => self.shape.show_value(v),
        }
    }
}

/// Registers a statically known expression denotes, looking through
/// `def` bodies.
struct Mentions<'a> {
    m: &'a Machine,
    regs: BTreeSet<RegId>,
    cells: BTreeSet<(RegionId, usize)>,
    seen: HashSet<Ident>,
}

impl Mentions<'_> {
    fn expr(&mut self, e: &Expr) {
        e.walk(&mut |sub| match sub {
            Expr::Var(x) => match self.m.env.map.get(x) {
                Some(Binding::Val(Value::Reg(r))) => {
                    self.regs.insert(*r);
                }
                Some(Binding::Val(Value::RegSet(s, _))) => self.regs.extend(s.iter().copied()),
                _ => {}
            },
            Expr::Fetch(p, w) => {
                if let (Ok(pv), Some(w)) = (static_eval(self.m, p), size_lit(self.m, w)) {
                    if let Some(c) = Interp::new(&self.m.env, &self.m.shape).cell_of(&pv, w) {
                        self.cells.insert(c);
                    }
                }
            }
            Expr::Call(f, _) => {
                if let Some(Binding::Func(def)) = self.m.env.map.get(f) {
                    if self.seen.insert(f.clone()) {
                        let body = def.1.clone();
                        self.expr(&body);
                    }
                }
            }
            _ => {}
        });
    }
}

fn size_lit(m: &Machine, s: &Size) -> Option<u32> {
    m.tenv.size(&Vec::new(), s).ok().flatten().map(|n| n as u32)
}

impl Spec {
    pub fn from_source(machine: &Machine, src: &Source<SpecAst>) -> Result<Spec, TypeError> {
        Spec::from_ast(machine, &src.ast, &src.locs)
    }

    pub fn from_ast(machine: &Machine, ast: &SpecAst, locs: &[Loc]) -> Result<Spec, TypeError> {
        let mut m = machine.clone();
        let mut lets = Vec::new();
        let mut frames = Vec::new();
        for (i, it) in ast.items.iter().enumerate() {
            match it {
                SpecItem::Decl(d) => {
                    if matches!(d, Decl::Reg { .. } | Decl::Op { .. }) {
                        return Err(TypeError::at(locs.get(i), "specifications cannot declare registers or operations"));
                    }
                    m.add_decl(d, Mode::Spec, &mut lets).map_err(|msg| TypeError::at(locs.get(i), msg))?;
                }
                SpecItem::Frame(f) => frames.push((i, f)),
            }
        }
        let n = ast.items.len();
        let (pre_loc, post_loc) = (locs.get(n), locs.get(n + 1));
        let check = |e: &Expr, loc: Option<&Loc>, what: &str| {
            m.tenv.expect(&mut Vec::new(), e, &Type::Bool).map_err(|msg| TypeError::at(loc, format!("{what}: {msg}")))
        };
        check(&ast.pre, pre_loc, "precondition")?;
        check(&ast.post, post_loc, "postcondition")?;

        let mut frame_regs = BTreeSet::new();
        let mut frame_cells = BTreeSet::new();
        for (i, items) in frames {
            for item in items {
                frame_item(&m, item, &mut frame_regs, &mut frame_cells)
                    .map_err(|msg| TypeError::at(locs.get(i), msg))?;
            }
        }

        let mut labels = BTreeSet::new();
        ast.post.walk(&mut |e| {
            if let Expr::BranchTo(l) = e {
                labels.insert(l.clone());
            }
        });
        ast.pre.walk(&mut |e| {
            if let Expr::BranchTo(l) = e {
                labels.insert(format!("\0{l}"));
            }
        });
        if labels.iter().any(|l| l.starts_with('\0')) {
            return Err(TypeError::at(pre_loc, "`branchto` may only appear in the postcondition"));
        }
        if labels.len() > 1 {
            return Err(TypeError::at(post_loc, "a specification may name only one external label"));
        }
        let ext_label = labels.into_iter().next();

        let mut post = Mentions { m: &m, regs: BTreeSet::new(), cells: BTreeSet::new(), seen: HashSet::new() };
        post.expr(&ast.post);
        let modifiable_regs = frame_regs.union(&post.regs).copied().collect();
        let modifiable_cells = frame_cells.union(&post.cells).copied().collect();
        let mut all = Mentions { m: &m, regs: BTreeSet::new(), cells: BTreeSet::new(), seen: HashSet::new() };
        all.expr(&ast.pre);
        all.expr(&ast.post);
        for l in &lets {
            all.expr(&l.expr);
        }
        let mentioned_regs = all.regs.union(&frame_regs).copied().collect();

        Ok(Spec {
            machine: m,
            lets,
            frame_regs,
            frame_cells,
            modifiable_regs,
            modifiable_cells,
            mentioned_regs,
            pre: ast.pre.clone(),
            post: ast.post.clone(),
            ext_label,
            ast: ast.clone(),
        })
    }

    /// Registers and statically addressed cells that `e` mentions.
    pub fn mentions(&self, e: &Expr) -> (BTreeSet<RegId>, BTreeSet<(RegionId, usize)>) {
        let mut m = Mentions { m: &self.machine, regs: BTreeSet::new(), cells: BTreeSet::new(), seen: HashSet::new() };
        m.expr(e);
        (m.regs, m.cells)
    }

    /// Registers and cells the precondition mentions, directly or through
    /// the lets it uses.
    pub fn pre_mentions(&self) -> (BTreeSet<RegId>, BTreeSet<(RegionId, usize)>) {
        let mut m = Mentions { m: &self.machine, regs: BTreeSet::new(), cells: BTreeSet::new(), seen: HashSet::new() };
        m.expr(&self.pre);
        let mut used = HashSet::new();
        self.pre.walk(&mut |e| {
            if let Expr::Var(x) = e {
                used.insert(x.clone());
            }
        });
        for l in self.lets.iter().rev() {
            if used.contains(&l.name) {
                m.expr(&l.expr);
                l.expr.walk(&mut |e| {
                    if let Expr::Var(x) = e {
                        used.insert(x.clone());
                    }
                });
            }
        }
        (m.regs, m.cells)
    }

    /// The specification in concrete syntax.
    pub fn text(&self) -> String {
        pretty::spec(&self.ast)
    }
}

fn frame_item(
    m: &Machine,
    item: &FrameItem,
    regs: &mut BTreeSet<RegId>,
    cells: &mut BTreeSet<(RegionId, usize)>,
) -> Result<(), String> {
    match item {
        FrameItem::Reg(e) => match m.tenv.expr(&mut Vec::new(), e)? {
            Type::Reg(_) | Type::RegSet(_) => match static_eval(m, e) {
                Ok(Value::Reg(r)) => {
                    regs.insert(r);
                    Ok(())
                }
                Ok(Value::RegSet(s, _)) => {
                    regs.extend(s);
                    Ok(())
                }
                _ => Err(format!("frame entry `{}` is not a fixed register", pretty::expr(e))),
            },
            t => Err(format!("frame entry `{}` has type {t}, expected a register", pretty::expr(e))),
        },
        FrameItem::Mem(e) => {
            if let Expr::Var(x) = e {
                if let Some(r) = m.shape.region_by_name(x) {
                    cells.extend((0..m.shape.region(r).len as usize).map(|i| (r, i)));
                    return Ok(());
                }
            }
            let t = m.tenv.expr(&mut Vec::new(), e)?;
            let v = static_eval(m, e).map_err(|s| format!("memory frame entry: {s}"))?;
            let Value::Ptr(p) = &v else {
                return Err(format!("memory frame entry `{}` is not a pointer", pretty::expr(e)));
            };
            if let Type::Label(_) = t {
                let r = p.region;
                cells.extend((0..m.shape.region(r).len as usize).map(|i| (r, i)));
                return Ok(());
            }
            let info = m.shape.region(p.region);
            let i = info
                .cell_index(p.offset)
                .ok_or_else(|| format!("memory frame entry `{}` is not a cell", pretty::expr(e)))?;
            cells.insert((p.region, i));
            Ok(())
        }
    }
}

/// True if `name` can be used without clashing with a builtin.
pub fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_machine, parse_program, parse_spec};

    const MACHINE: &str = "type word = 8 bit\n\
        letstate r0: 8 reg\nletstate r1: 8 reg\nletstate control f: 1 reg\n\
        letstate M: 8 bit 4 len 8 ref memory with base\n\
        let r0.txt = \"a\"\nlet r1.txt = \"b\"\n\
        let four: int = 4\n\
        def inc x: word -> word = x b+ 0x01\n\
        defop MOV rd: 8 reg rs: 8 reg { txt = format(\"mov {1}, {2}\", rd.txt, rs.txt), sem = [ *rd <- *rs ] }\n\
        defop LI rd: 8 reg v: 8 bit { txt = \"li\", sem = [ *rd <- v ] }\n\
        invariant: *f == 0b0";

    fn machine() -> Machine {
        Machine::from_ast(&parse_machine(MACHINE).unwrap(), &[]).unwrap()
    }

    #[test]
    fn machine_layout() {
        let m = machine();
        assert_eq!(m.shape.regs.len(), 3);
        assert!(m.shape.regs[2].control);
        assert_eq!(m.shape.regions[0].label.as_deref(), Some("base"));
        assert_eq!(m.tenv.consts.get("four"), Some(&4));
        assert_eq!(m.ops.len(), 2);
        assert_eq!(m.invariants.len(), 1);
    }

    #[test]
    fn duplicate_and_ill_typed_declarations() {
        let bad = |extra: &str| {
            let text = format!("letstate r0: 8 reg\n{extra}");
            Machine::from_ast(&parse_machine(&text).unwrap(), &[]).unwrap_err()
        };
        assert!(bad("letstate r0: 8 reg").msg.contains("already"));
        assert!(bad("let x: 8 bit = *r0").msg.contains("machine state"));
        assert!(bad("let x: 8 bit = 0x001").msg.contains("expected"));
        assert!(bad("letstate M: 12 bit 200 len 8 ref memory").msg.contains("does not fit"));
        Machine::from_ast(&parse_machine("letstate M: 12 bit 128 len 8 ref memory").unwrap(), &[]).unwrap();
    }

    #[test]
    fn errors_carry_locations() {
        let src = crate::syntax::Source {
            ast: parse_machine("letstate r0: 8 reg\nletstate r0: 8 reg").unwrap(),
            locs: vec![
                Loc { file: "m.casp".into(), line: 1, col: 1 },
                Loc { file: "m.casp".into(), line: 2, col: 1 },
            ],
        };
        let e = Machine::from_source(&src).unwrap_err();
        assert!(e.to_string().starts_with("m.casp:2:1:"), "{e}");
    }

    #[test]
    fn programs_resolve_operands() {
        let m = machine();
        let p = m.program(&parse_program("(MOV r0 r1)(LI r1 0x05)(LI r0 base)").unwrap()).unwrap();
        assert_eq!(p[0].args, vec![Value::Reg(RegId(0)), Value::Reg(RegId(1))]);
        assert_eq!(m.show_program(&p), "(MOV r0 r1)\n(LI r1 0x05)\n(LI r0 base)");
        assert!(m.program(&parse_program("(LI r1 0x005)").unwrap()).is_err());
        assert!(m.program(&parse_program("(NOPE)").unwrap()).is_err());
        assert!(m.program(&parse_program("(MOV r0)").unwrap()).is_err());
    }

    #[test]
    fn spec_frames_and_mentions() {
        let m = machine();
        let text = "let p: 8 bit = [M, 2]\nlet old: 8 bit = *r0\nframe: modify: r1 mem-modify: [M, 1]\n\
                    pre: *r0 == inc(0x00)\npost: fetch(p, 8) == old";
        let s = Spec::from_ast(&m, &parse_spec(text).unwrap(), &[]).unwrap();
        assert_eq!(s.lets.len(), 1);
        assert_eq!(s.lets[0].name, "old");
        assert_eq!(s.frame_regs, BTreeSet::from([RegId(1)]));
        assert_eq!(s.frame_cells, BTreeSet::from([(RegionId(0), 1)]));
        assert_eq!(s.modifiable_cells, BTreeSet::from([(RegionId(0), 1), (RegionId(0), 2)]));
        assert_eq!(s.mentioned_regs, BTreeSet::from([RegId(0), RegId(1)]));
        assert_eq!(s.ext_label, None);
    }

    #[test]
    fn spec_errors() {
        let m = machine();
        let err = |t: &str| Spec::from_ast(&m, &parse_spec(t).unwrap(), &[]).unwrap_err().msg;
        assert!(err("pre: *r0\npost: true").contains("precondition"));
        assert!(err("frame: modify: four\npre: true\npost: true").contains("expected a register"));
        assert!(err("pre: true\npost: branchto(a) || branchto(b)").contains("one external label"));
    }
}
