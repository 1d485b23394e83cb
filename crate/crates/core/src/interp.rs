//! Concrete big-step evaluation of expressions, statements, and programs.

use crate::lang::ast::*;
use crate::lang::value::{self, binop, bit_extract, unop};
use crate::lang::{Bitvec, MachineState, Pointer, RegId, Shape, Value};
use crate::machine::{Inst, Machine, Spec};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum Binding {
    Val(Value),
    Func(Arc<(Vec<Ident>, Expr)>),
    Proc(Arc<(Vec<Ident>, Stmt)>),
}

/// The execution environment Λ: global bindings plus register text forms.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub map: HashMap<Ident, Binding>,
    pub reg_text: HashMap<RegId, String>,
}

impl Env {
    pub fn value(&self, x: &str) -> Option<&Value> {
        match self.map.get(x) {
            Some(Binding::Val(v)) => Some(v),
            _ => None,
        }
    }
}

/// Why evaluation could not produce a value at all (as opposed to `Fail`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stuck {
    NeedsState,
    Unbound(String),
    Other(String),
}

impl fmt::Display for Stuck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stuck::NeedsState => write!(f, "expression refers to machine state"),
            Stuck::Unbound(x) => write!(f, "unbound identifier `{x}`"),
            Stuck::Other(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Next,
    Skip(u8),
    Ext,
}

impl Branch {
    pub fn from_code(code: u8) -> Branch {
        match code {
            0 => Branch::Next,
            0xff => Branch::Ext,
            n => Branch::Skip(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crash(pub String);

/// A failed run: the instruction index and the cause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bottom {
    pub index: usize,
    pub cause: String,
}

impl fmt::Display for Bottom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instruction {}: {}", self.index, self.cause)
    }
}

pub type Locals = Vec<(Ident, Value)>;

type EResult = Result<Value, Stuck>;

/// Normalizes a shift amount to the width of the shifted value. Amounts at
/// or beyond the width saturate, which every shift treats alike.
pub fn shift_amount(width: u32, amount: &Value) -> Value {
    let n = match amount {
        Value::Int(i) if !i.is_negative() => i.to_u64().unwrap_or(u64::MAX),
        Value::Bits(b) => b.to_u64().unwrap_or(u64::MAX),
        _ => return Value::Fail,
    };
    Value::Bits(Bitvec::from_u64(width, n.min(width as u64)))
}

pub fn int_to_bits(width: u32, i: &BigInt) -> Option<Bitvec> {
    let lo = -(BigInt::from(1) << (width.saturating_sub(1) as usize));
    let hi = BigInt::from(1) << width as usize;
    (i >= &lo && i < &hi).then(|| Bitvec::from_int(width, i))
}

pub struct Interp<'a> {
    pub env: &'a Env,
    pub shape: &'a Shape,
    /// Specification-level bindings evaluated in the initial state.
    pub globals: &'a [(Ident, Value)],
    /// The branch outcome visible to `branchto`.
    pub ext: Option<bool>,
    /// Renders a branch code as an assembler label during extraction.
    pub textlabel: Option<&'a dyn Fn(u8) -> String>,
}

impl<'a> Interp<'a> {
    pub fn new(env: &'a Env, shape: &'a Shape) -> Interp<'a> {
        Interp { env, shape, globals: &[], ext: None, textlabel: None }
    }

    fn lookup(&self, locals: &Locals, x: &str) -> EResult {
        if let Some((_, v)) = locals.iter().rev().find(|(y, _)| y == x) {
            return Ok(v.clone());
        }
        if let Some((_, v)) = self.globals.iter().rev().find(|(y, _)| y == x) {
            return Ok(v.clone());
        }
        match self.env.map.get(x) {
            Some(Binding::Val(v)) => Ok(v.clone()),
            Some(_) => Err(Stuck::Other(format!("`{x}` is not a value"))),
            None => Err(Stuck::Unbound(x.to_string())),
        }
    }

    pub fn size(&self, locals: &Locals, s: &Size) -> Result<u64, Stuck> {
        match s {
            Size::Lit(n) => Ok(*n),
            Size::Sym(x) => match self.lookup(locals, x)? {
                Value::Int(i) => i.to_u64().ok_or_else(|| Stuck::Other(format!("`{x}` is not a size"))),
                _ => Err(Stuck::Other(format!("`{x}` is not an integer"))),
            },
        }
    }

    /// Evaluates `e`; with `state == None` only state-free expressions succeed.
    pub fn eval(&self, st: Option<&MachineState>, locals: &mut Locals, e: &Expr) -> EResult {
        Ok(match e {
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Int(i) => Value::Int(i.clone()),
            Expr::Bits(b) => Value::Bits(b.clone()),
            Expr::Str(s) => Value::Str(s.clone()),
            Expr::SizedLit(v, w) => {
                let w = self.size(locals, w)? as u32;
                match int_to_bits(w, v) {
                    Some(b) => Value::Bits(b),
                    None => Value::Fail,
                }
            }
            Expr::Var(x) => self.lookup(locals, x)?,
            Expr::Txt(a) => match self.eval(st, locals, a)? {
                Value::Reg(r) => match self.env.reg_text.get(&r) {
                    Some(s) => Value::Str(s.clone()),
                    None => Value::Fail,
                },
                _ => Value::Fail,
            },
            Expr::Call(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(st, locals, a)?);
                }
                self.call(st, f, vals)?
            }
            Expr::Unop(op, a) => unop(*op, &self.eval(st, locals, a)?),
            Expr::Binop(Binop::And, a, b) => match self.eval(st, locals, a)? {
                Value::Bool(true) => self.eval(st, locals, b)?,
                Value::Bool(false) => Value::Bool(false),
                _ => Value::Fail,
            },
            Expr::Binop(Binop::Or, a, b) => match self.eval(st, locals, a)? {
                Value::Bool(false) => self.eval(st, locals, b)?,
                Value::Bool(true) => Value::Bool(true),
                _ => Value::Fail,
            },
            Expr::Binop(op @ (Binop::Shl | Binop::Shr | Binop::Sar), a, b) => {
                let va = self.eval(st, locals, a)?;
                let vb = self.eval(st, locals, b)?;
                match &va {
                    Value::Bits(x) => binop(*op, &va, &shift_amount(x.width(), &vb)),
                    _ => Value::Fail,
                }
            }
            Expr::Binop(op, a, b) => {
                let va = self.eval(st, locals, a)?;
                let vb = self.eval(st, locals, b)?;
                binop(*op, &va, &vb)
            }
            Expr::Index(a, i) => {
                let v = self.eval(st, locals, a)?;
                let i = self.size(locals, i)? as u32;
                bit_extract(&v, i, None)
            }
            Expr::Slice(a, lo, hi) => {
                let v = self.eval(st, locals, a)?;
                let (lo, hi) = (self.size(locals, lo)? as u32, self.size(locals, hi)? as u32);
                bit_extract(&v, lo, Some(hi))
            }
            Expr::Let(x, _, v, body) => {
                let v = self.eval(st, locals, v)?;
                if v.is_fail() {
                    return Ok(Value::Fail);
                }
                locals.push((x.clone(), v));
                let r = self.eval(st, locals, body);
                locals.pop();
                r?
            }
            Expr::If(c, a, b) => match self.eval(st, locals, c)? {
                Value::Bool(true) => self.eval(st, locals, a)?,
                Value::Bool(false) => self.eval(st, locals, b)?,
                _ => Value::Fail,
            },
            Expr::Ptr(r, off) => {
                let region = self
                    .shape
                    .region_by_name(r)
                    .ok_or_else(|| Stuck::Other(format!("`{r}` is not a memory region")))?;
                let width = self.shape.region(region).refw;
                let offset = match self.eval(st, locals, off)? {
                    Value::Int(i) => match int_to_bits(width, &i) {
                        Some(b) => b,
                        None => return Ok(Value::Fail),
                    },
                    Value::Bits(b) if b.width() == width => b,
                    _ => return Ok(Value::Fail),
                };
                Value::Ptr(Pointer { region, offset: offset.to_u64().unwrap_or(0), width })
            }
            Expr::Deref(a) => match self.eval(st, locals, a)? {
                Value::Reg(r) => st.ok_or(Stuck::NeedsState)?.reg(r).clone(),
                _ => Value::Fail,
            },
            Expr::Fetch(p, w) => {
                let p = self.eval(st, locals, p)?;
                let w = self.size(locals, w)? as u32;
                let st = st.ok_or(Stuck::NeedsState)?;
                match self.cell_of(&p, w) {
                    Some((region, i)) => st.cell(region, i).clone(),
                    None => Value::Fail,
                }
            }
            Expr::BranchTo(_) => match self.ext {
                Some(b) => Value::Bool(b),
                None => Value::Fail,
            },
            Expr::Set(items) => {
                let mut set = std::collections::BTreeSet::new();
                let mut width = 0;
                for it in items {
                    match self.eval(st, locals, it)? {
                        Value::Reg(r) => {
                            width = self.shape.reg(r).width;
                            set.insert(r);
                        }
                        _ => return Ok(Value::Fail),
                    }
                }
                Value::RegSet(set, width)
            }
            Expr::Card(a) => match self.eval(st, locals, a)? {
                Value::RegSet(s, _) => Value::Int(BigInt::from(s.len())),
                _ => Value::Fail,
            },
        })
    }

    /// The memory cell a pointer designates for an access of width `w`.
    pub fn cell_of(&self, p: &Value, w: u32) -> Option<(crate::lang::RegionId, usize)> {
        let Value::Ptr(p) = p else { return None };
        let info = self.shape.regions.get(p.region.0 as usize)?;
        if info.cell != w {
            return None;
        }
        info.cell_index(p.offset).map(|i| (p.region, i))
    }

    fn call(&self, st: Option<&MachineState>, f: &str, args: Vec<Value>) -> EResult {
        if let Some(Binding::Func(def)) = self.env.map.get(f) {
            let (params, body) = &**def;
            if args.iter().any(Value::is_fail) {
                return Ok(Value::Fail);
            }
            let mut locals: Locals = params.iter().cloned().zip(args).collect();
            return self.eval(st, &mut locals, body);
        }
        if args.iter().any(Value::is_fail) {
            return Ok(Value::Fail);
        }
        match (f, args.as_slice()) {
            ("lbl", [Value::Ptr(p)]) => Ok(match &self.shape.region(p.region).label {
                Some(l) if p.offset == 0 => Value::Str(l.clone()),
                _ => Value::Fail,
            }),
            ("lbl", _) => Ok(Value::Fail),
            ("textlabel", [Value::Bits(b)]) => Ok(match (self.textlabel, b.to_u64()) {
                (Some(render), Some(code)) if b.width() == 8 => Value::Str(render(code as u8)),
                _ => Value::Fail,
            }),
            ("textlabel", _) => Ok(Value::Fail),
            ("hex" | "bin" | "dec", [Value::Ptr(_)]) => Ok(Value::Fail),
            _ => value::builtin(f, &args).ok_or_else(|| Stuck::Unbound(f.to_string())),
        }
    }

    fn truth(&self, st: &MachineState, locals: &mut Locals, e: &Expr, what: &str) -> Result<bool, Crash> {
        match self.eval(Some(st), locals, e) {
            Ok(Value::Bool(b)) => Ok(b),
            Ok(_) => Err(Crash(format!("{what} failed to evaluate"))),
            Err(s) => Err(Crash(s.to_string())),
        }
    }

    fn value(&self, st: &MachineState, locals: &mut Locals, e: &Expr) -> Result<Value, Crash> {
        match self.eval(Some(st), locals, e) {
            Ok(Value::Fail) => Err(Crash(format!("`{}` failed", crate::syntax::pretty::expr(e)))),
            Ok(v) => Ok(v),
            Err(s) => Err(Crash(s.to_string())),
        }
    }

    /// Executes a statement, updating the state and the branch outcome.
    pub fn exec(
        &self,
        st: &mut MachineState,
        locals: &mut Locals,
        s: &Stmt,
        br: &mut Branch,
    ) -> Result<(), Crash> {
        match s {
            Stmt::Skip => Ok(()),
            Stmt::Crash => Err(Crash("crash".into())),
            Stmt::Seq(v) => v.iter().try_for_each(|s| self.exec(st, locals, s, br)),
            Stmt::Call(p, args) => {
                let Some(Binding::Proc(def)) = self.env.map.get(p) else {
                    return Err(Crash(format!("`{p}` is not a procedure")));
                };
                let (params, body) = &**def;
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.value(st, locals, a)?);
                }
                let mut inner: Locals = params.iter().cloned().zip(vals).collect();
                self.exec(st, &mut inner, body, br)
            }
            Stmt::Let(x, _, v, body) => {
                let v = self.value(st, locals, v)?;
                locals.push((x.clone(), v));
                let r = self.exec(st, locals, body, br);
                locals.pop();
                r
            }
            Stmt::For(x, lo, hi, body) => {
                let lo = self.size(locals, lo).map_err(|s| Crash(s.to_string()))?;
                let hi = self.size(locals, hi).map_err(|s| Crash(s.to_string()))?;
                for i in lo..=hi {
                    locals.push((x.clone(), Value::Int(BigInt::from(i))));
                    let r = self.exec(st, locals, body, br);
                    locals.pop();
                    r?;
                }
                Ok(())
            }
            Stmt::If(c, a, b) => {
                if self.truth(st, locals, c, "condition")? {
                    self.exec(st, locals, a, br)
                } else {
                    self.exec(st, locals, b, br)
                }
            }
            Stmt::Assign(target, v) => {
                let Value::Reg(r) = self.value(st, locals, target)? else {
                    return Err(Crash("assignment target is not a register".into()));
                };
                let v = self.value(st, locals, v)?;
                if v.word_width() != Some(self.shape.reg(r).width) {
                    return Err(Crash(format!("value {v} does not fit register {}", self.shape.reg(r).name)));
                }
                st.set_reg(r, v);
                Ok(())
            }
            Stmt::Store(p, w, v) => {
                let p = self.value(st, locals, p)?;
                let w = self.size(locals, w).map_err(|s| Crash(s.to_string()))? as u32;
                let Some((region, i)) = self.cell_of(&p, w) else {
                    return Err(Crash(format!("store to {} is not a valid {w}-bit cell", self.shape.show_value(&p))));
                };
                let v = self.value(st, locals, v)?;
                if v.word_width() != Some(w) {
                    return Err(Crash(format!("stored value {v} is not {w} bits")));
                }
                st.mem[region.0 as usize][i] = v;
                Ok(())
            }
            Stmt::Branch(e) => match self.value(st, locals, e)? {
                Value::Bits(b) if b.width() == 8 => {
                    *br = Branch::from_code(b.to_u64().unwrap_or(0) as u8);
                    Ok(())
                }
                _ => Err(Crash("branch target is not an 8-bit value".into())),
            },
            Stmt::Assert(e) => {
                if self.truth(st, locals, e, "assertion")? {
                    Ok(())
                } else {
                    Err(Crash(format!("assertion `{}` failed", crate::syntax::pretty::expr(e))))
                }
            }
        }
    }
}

/// Executes one instruction; returns its branch outcome.
pub fn exec_inst(m: &Machine, st: &mut MachineState, inst: &Inst) -> Result<Branch, Crash> {
    let op = &m.ops[inst.op];
    let interp = Interp::new(&m.env, &m.shape);
    let mut locals: Locals = op.params.iter().map(|(x, _)| x.clone()).zip(inst.args.iter().cloned()).collect();
    let mut br = Branch::Next;
    interp.exec(st, &mut locals, &op.sem, &mut br)?;
    Ok(br)
}

/// Runs a program: the final state and whether it left through the external
/// label, or the failing instruction.
pub fn run_program(m: &Machine, st: &MachineState, prog: &[Inst]) -> Result<(MachineState, bool), Bottom> {
    let mut st = st.clone();
    let mut pc = 0;
    while pc < prog.len() {
        match exec_inst(m, &mut st, &prog[pc]) {
            Err(Crash(cause)) => return Err(Bottom { index: pc, cause }),
            Ok(Branch::Ext) => return Ok((st, true)),
            Ok(Branch::Next) => pc += 1,
            Ok(Branch::Skip(n)) => {
                pc += 1 + n as usize;
                if pc > prog.len() {
                    return Err(Bottom { index: pc - 1 - n as usize, cause: format!("skip of {n} runs past the end") });
                }
            }
        }
    }
    Ok((st, false))
}

/// Binds the specification's state-dependent `let`s in the initial state.
pub fn spec_globals(spec: &Spec, init: &MachineState) -> Locals {
    let m = &spec.machine;
    let mut globals: Locals = Vec::new();
    for l in &spec.lets {
        let v = {
            let interp = Interp { globals: &globals, ..Interp::new(&m.env, &m.shape) };
            interp.eval(Some(init), &mut Vec::new(), &l.expr).unwrap_or(Value::Fail)
        };
        globals.push((l.name.clone(), v));
    }
    globals
}

pub fn eval_bool(spec: &Spec, globals: &Locals, st: &MachineState, ext: Option<bool>, e: &Expr) -> bool {
    let m = &spec.machine;
    let interp = Interp { globals, ext, ..Interp::new(&m.env, &m.shape) };
    matches!(interp.eval(Some(st), &mut Vec::new(), e), Ok(Value::Bool(true)))
}

pub fn pre_holds(spec: &Spec, st: &MachineState) -> bool {
    let g = spec_globals(spec, st);
    eval_bool(spec, &g, st, None, &spec.pre)
}

/// Registers and cells that differ between the states but may not change.
pub fn frame_violations(spec: &Spec, a: &MachineState, b: &MachineState) -> Vec<String> {
    let shape = &spec.machine.shape;
    let mut out = Vec::new();
    for r in shape.reg_ids() {
        if a.reg(r) != b.reg(r) && !spec.modifiable_regs.contains(&r) {
            out.push(shape.reg(r).name.clone());
        }
    }
    for m in shape.region_ids() {
        let info = shape.region(m);
        for i in 0..info.len as usize {
            if a.cell(m, i) != b.cell(m, i) && !spec.modifiable_cells.contains(&(m, i)) {
                out.push(format!("[{}, {}]", info.name, i as u64 * info.stride()));
            }
        }
    }
    out
}

/// Whether the pair satisfies the specification: a run from a state meeting
/// the precondition must meet the postcondition and leave unframed state
/// untouched. `None` as the outcome stands for a failed run.
pub fn check_spec(spec: &Spec, init: &MachineState, outcome: Option<(&MachineState, bool)>) -> bool {
    let g = spec_globals(spec, init);
    if !eval_bool(spec, &g, init, None, &spec.pre) {
        return true;
    }
    let Some((fin, ext)) = outcome else { return false };
    eval_bool(spec, &g, fin, Some(ext), &spec.post) && frame_violations(spec, init, fin).is_empty()
}

/// Runs the program and checks the specification on the result.
pub fn check_program(spec: &Spec, init: &MachineState, prog: &[Inst]) -> bool {
    match run_program(&spec.machine, init, prog) {
        Ok((fin, ext)) => check_spec(spec, init, Some((&fin, ext))),
        Err(_) => check_spec(spec, init, None),
    }
}

/// A uniformly random state satisfying the precondition, by rejection
/// sampling with the given attempt cap.
pub fn sample_pre_state<R: Rng>(spec: &Spec, rng: &mut R, attempts: usize) -> Option<MachineState> {
    (0..attempts).map(|_| spec.machine.shape.random_state(rng)).find(|s| pre_holds(spec, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::Machine;
    use crate::syntax::{parse_expr, parse_machine};

    fn machine() -> Machine {
        let text = "letstate r0: 4 reg\nletstate r1: 4 reg\n\
                    letstate M: 8 bit 4 len 4 ref memory with base\n\
                    defop LD rd: 4 reg rs: 4 reg { txt = \"ld\", sem = [ *rd <- fetch( *rs, 8)[0:4] ] }\n\
                    defop SKIP n: 8 bit { txt = \"skip\", sem = [ BRANCH(n) ] }\n\
                    defop BAD x: 4 bit { txt = \"bad\", sem = [ assert(x == 0x0) ] }";
        Machine::from_ast(&parse_machine(text).unwrap(), &[]).unwrap()
    }

    fn eval_in(m: &Machine, st: &MachineState, e: &str) -> Value {
        Interp::new(&m.env, &m.shape).eval(Some(st), &mut Vec::new(), &parse_expr(e).unwrap()).unwrap()
    }

    #[test]
    fn fetch_reads_the_cell() {
        let m = machine();
        let mut st = m.shape.zero_state();
        st.mem[0][2] = Value::bits(8, 0x5a);
        assert_eq!(eval_in(&m, &st, "fetch([M, 2], 8)"), Value::bits(8, 0x5a));
        assert_eq!(eval_in(&m, &st, "fetch(0x2, 8)"), Value::Fail);
        assert_eq!(eval_in(&m, &st, "fetch([M, 2], 16)"), Value::Fail);
        assert_eq!(eval_in(&m, &st, "fetch([M, 4], 8)"), Value::Fail);
        assert_eq!(eval_in(&m, &st, "base == [M, 0]"), Value::Bool(true));
    }

    #[test]
    fn branchto_reads_the_outcome() {
        let m = machine();
        let st = m.shape.zero_state();
        let interp = Interp { ext: Some(true), ..Interp::new(&m.env, &m.shape) };
        let v = interp.eval(Some(&st), &mut Vec::new(), &parse_expr("branchto(out)").unwrap());
        assert_eq!(v, Ok(Value::Bool(true)));
    }

    #[test]
    fn short_circuit_skips_failures() {
        let m = machine();
        let st = m.shape.zero_state();
        assert_eq!(eval_in(&m, &st, "false && fetch(0x0, 8) == 0x00"), Value::Bool(false));
        assert_eq!(eval_in(&m, &st, "true || fetch(0x0, 8) == 0x00"), Value::Bool(true));
        assert_eq!(eval_in(&m, &st, "true && fetch(0x0, 8) == 0x00"), Value::Fail);
    }

    fn inst(m: &Machine, text: &str) -> Vec<Inst> {
        m.program(&crate::syntax::parse_program(text).unwrap()).unwrap()
    }

    #[test]
    fn programs_run_and_skip() {
        let m = machine();
        let mut st = m.shape.zero_state();
        st.regs[1] = Value::Ptr(Pointer { region: crate::lang::RegionId(0), offset: 1, width: 4 });
        st.mem[0][1] = Value::bits(8, 0x37);
        let (fin, ext) = run_program(&m, &st, &inst(&m, "(LD r0 r1)")).unwrap();
        assert_eq!(fin.regs[0], Value::bits(4, 7));
        assert!(!ext);
        assert_eq!(run_program(&m, &st, &[]).unwrap(), (st.clone(), false));
        let (fin, _) = run_program(&m, &st, &inst(&m, "(SKIP 0x01)(LD r0 r1)")).unwrap();
        assert_eq!(fin.regs[0], Value::bits(4, 0));
        assert!(run_program(&m, &st, &inst(&m, "(SKIP 0x05)(LD r0 r1)")).is_err());
        assert!(run_program(&m, &st, &inst(&m, "(SKIP 0x01)")).is_err());
        assert!(run_program(&m, &st, &inst(&m, "(SKIP 0xff)(BAD 0x1)")).unwrap().1);
        let b = run_program(&m, &st, &inst(&m, "(SKIP 0x00)(BAD 0x1)")).unwrap_err();
        assert_eq!(b.index, 1);
    }

    #[test]
    fn load_through_non_pointer_crashes() {
        let m = machine();
        let st = m.shape.zero_state();
        assert!(run_program(&m, &st, &inst(&m, "(LD r0 r1)")).is_err());
    }
}
