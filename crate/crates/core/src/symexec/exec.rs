//! Symbolic evaluation of expressions, statements, and programs, mirroring
//! the concrete interpreter alternative by alternative.

use super::term::{Assignment, BvOp, CVal, CmpOp, Evaluator, TermId, Terms};
use super::value::{assign_word, fresh_word, merge_values, Leaf, SymValue};
use crate::interp::{int_to_bits, Binding};
use crate::lang::ast::*;
use crate::lang::value::{self as cv};
use crate::lang::{Bitvec, MachineState, RegId, RegionId, Shape, Value};
use crate::machine::{Inst, Machine, Spec};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

/// An expression the symbolic evaluator cannot handle, such as an integer
/// that depends on symbolic bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymError(pub String);

impl fmt::Display for SymError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for SymError {}

type SResult<T> = Result<T, SymError>;

pub type SymLocals = Vec<(Ident, SymValue)>;

/// A storage location of the machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Loc {
    Reg(RegId),
    Cell(RegionId, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymState {
    pub regs: Vec<SymValue>,
    pub mem: Vec<Rc<Vec<SymValue>>>,
    /// Holds exactly when some explored path has failed.
    pub err: TermId,
    /// The 8-bit branch code of the instruction being executed.
    pub br: TermId,
}

pub fn reg_var(shape: &Shape, r: RegId) -> String {
    format!("reg.{}", shape.reg(r).name)
}

pub fn cell_var(shape: &Shape, m: RegionId, i: usize) -> String {
    format!("mem.{}.{}", shape.region(m).name, i)
}

impl SymState {
    /// A state of fresh variables; `may_be_pointer` decides which locations
    /// may hold pointers.
    pub fn fresh(terms: &mut Terms, shape: &Shape, may_be_pointer: &dyn Fn(Loc) -> bool) -> SymState {
        SymState::fresh_named(terms, shape, "", may_be_pointer)
    }

    /// Like `fresh`, with every variable name prefixed.
    pub fn fresh_named(terms: &mut Terms, shape: &Shape, prefix: &str, may_be_pointer: &dyn Fn(Loc) -> bool) -> SymState {
        let regs = shape
            .reg_ids()
            .map(|r| {
                let w = shape.reg(r).width;
                fresh_word(terms, shape, &format!("{prefix}{}", reg_var(shape, r)), w, may_be_pointer(Loc::Reg(r)))
            })
            .collect();
        let mem = shape
            .region_ids()
            .map(|m| {
                let info = shape.region(m);
                Rc::new(
                    (0..info.len as usize)
                        .map(|i| {
                            let name = format!("{prefix}{}", cell_var(shape, m, i));
                            fresh_word(terms, shape, &name, info.cell, may_be_pointer(Loc::Cell(m, i)))
                        })
                        .collect(),
                )
            })
            .collect();
        let br = terms.bv_u64(8, 0);
        SymState { regs, mem, err: terms.f, br }
    }

    pub fn from_concrete(terms: &mut Terms, st: &MachineState) -> SymState {
        let regs = st.regs.iter().map(|v| SymValue::from_value(terms, v)).collect();
        let mem = st
            .mem
            .iter()
            .map(|cells| Rc::new(cells.iter().map(|v| SymValue::from_value(terms, v)).collect()))
            .collect();
        let br = terms.bv_u64(8, 0);
        SymState { regs, mem, err: terms.f, br }
    }

    pub fn get(&self, l: Loc) -> &SymValue {
        match l {
            Loc::Reg(r) => &self.regs[r.0 as usize],
            Loc::Cell(m, i) => &self.mem[m.0 as usize][i],
        }
    }

    pub fn concretize(&self, ev: &mut Evaluator, shape: &Shape) -> MachineState {
        MachineState {
            regs: self.regs.iter().map(|v| v.concretize(ev, shape)).collect(),
            mem: self.mem.iter().map(|cells| cells.iter().map(|v| v.concretize(ev, shape)).collect()).collect(),
        }
    }

    pub fn locations(shape: &Shape) -> Vec<Loc> {
        let mut out: Vec<Loc> = shape.reg_ids().map(Loc::Reg).collect();
        for m in shape.region_ids() {
            out.extend((0..shape.region(m).len as usize).map(|i| Loc::Cell(m, i)));
        }
        out
    }
}

/// The variable assignment under which a fresh state denotes `st`.
pub fn assignment_of(shape: &Shape, st: &MachineState) -> Assignment {
    let mut a = Assignment::new();
    for r in shape.reg_ids() {
        assign_word(&mut a, shape, &reg_var(shape, r), st.reg(r));
    }
    for m in shape.region_ids() {
        for i in 0..shape.region(m).len as usize {
            assign_word(&mut a, shape, &cell_var(shape, m, i), st.cell(m, i));
        }
    }
    a
}

/// The state an assignment denotes, reading the variables of a fresh state.
pub fn state_of_assignment(terms: &Terms, shape: &Shape, init: &SymState, a: &Assignment) -> MachineState {
    let mut ev = terms.evaluator(a);
    init.concretize(&mut ev, shape)
}

/// One instruction slot: guarded alternatives of operation and operands.
/// Guards are exclusive; the last alternative applies whenever no earlier
/// guard holds.
#[derive(Clone, Debug)]
pub struct SymInst {
    pub alts: Vec<(TermId, usize, Vec<SymValue>)>,
}

impl SymInst {
    pub fn concrete(terms: &mut Terms, inst: &Inst) -> SymInst {
        let args = inst.args.iter().map(|v| SymValue::from_value(terms, v)).collect();
        SymInst { alts: vec![(terms.t, inst.op, args)] }
    }
}

/// The result of running a program symbolically.
#[derive(Clone, Debug)]
pub struct SymOutcome {
    pub state: SymState,
    /// Holds when the program left through the external label.
    pub ext: TermId,
}

pub struct SymExec<'a> {
    pub terms: &'a mut Terms,
    pub machine: &'a Machine,
    pub globals: SymLocals,
    pub ext: Option<TermId>,
}

fn leaf_const(terms: &Terms, shape: &Shape, l: &Leaf) -> Option<Value> {
    SymValue::leaf(terms, l.clone()).as_concrete(terms, shape)
}

impl<'a> SymExec<'a> {
    pub fn new(terms: &'a mut Terms, machine: &'a Machine) -> SymExec<'a> {
        SymExec { terms, machine, globals: Vec::new(), ext: None }
    }

    fn shape(&self) -> &'a Shape {
        &self.machine.shape
    }

    fn fail(&self) -> SymValue {
        SymValue::fail(self.terms)
    }

    fn leaf(&self, l: Leaf) -> SymValue {
        SymValue::leaf(self.terms, l)
    }

    fn boolean(&mut self, t: TermId) -> SymValue {
        SymValue::leaf(self.terms, Leaf::Bool(t))
    }

    fn const_bool(&mut self, b: bool) -> SymValue {
        let t = self.terms.bool(b);
        self.boolean(t)
    }

    fn lookup(&mut self, locals: &SymLocals, x: &str) -> SResult<SymValue> {
        if let Some((_, v)) = locals.iter().rev().find(|(y, _)| y == x) {
            return Ok(v.clone());
        }
        if let Some((_, v)) = self.globals.iter().rev().find(|(y, _)| y == x) {
            return Ok(v.clone());
        }
        match self.machine.env.map.get(x) {
            Some(Binding::Val(v)) => Ok(SymValue::from_value(self.terms, v)),
            Some(_) => Err(SymError(format!("`{x}` is not a value"))),
            None => Err(SymError(format!("unbound identifier `{x}`"))),
        }
    }

    fn int_of(&mut self, locals: &SymLocals, x: &str) -> SResult<BigInt> {
        match self.lookup(locals, x)?.single() {
            Some(Leaf::Int(i)) => Ok(i.clone()),
            _ => Err(SymError(format!("`{x}` is not a concrete integer"))),
        }
    }

    pub fn size(&mut self, locals: &SymLocals, s: &Size) -> SResult<u64> {
        match s {
            Size::Lit(n) => Ok(*n),
            Size::Sym(x) => self
                .int_of(locals, x)?
                .to_u64()
                .ok_or_else(|| SymError(format!("`{x}` is not a size"))),
        }
    }

    /// Applies `f` to every alternative, conjoining guards.
    fn lift1(
        &mut self,
        a: &SymValue,
        mut f: impl FnMut(&mut Self, &Leaf) -> SResult<SymValue>,
    ) -> SResult<SymValue> {
        if let Some(l) = a.single() {
            return f(self, l);
        }
        let mut alts = Vec::new();
        for (g, l) in a.alts() {
            let r = f(self, l)?;
            for (gr, lr) in r.alts() {
                let g2 = self.terms.and(*g, *gr);
                alts.push((g2, lr.clone()));
            }
        }
        Ok(SymValue::from_alts(self.terms, alts))
    }

    fn lift2(
        &mut self,
        a: &SymValue,
        b: &SymValue,
        mut f: impl FnMut(&mut Self, &Leaf, &Leaf) -> SResult<SymValue>,
    ) -> SResult<SymValue> {
        self.lift_n(&[a.clone(), b.clone()], |s, ls| f(s, &ls[0], &ls[1]))
    }

    fn lift_n(
        &mut self,
        args: &[SymValue],
        mut f: impl FnMut(&mut Self, &[Leaf]) -> SResult<SymValue>,
    ) -> SResult<SymValue> {
        let mut combos: Vec<(TermId, Vec<Leaf>)> = vec![(self.terms.t, Vec::new())];
        for a in args {
            let mut next = Vec::new();
            for (g, ls) in &combos {
                for (ga, la) in a.alts() {
                    let g2 = self.terms.and(*g, *ga);
                    if self.terms.is_false(g2) {
                        continue;
                    }
                    let mut ls2 = ls.clone();
                    ls2.push(la.clone());
                    next.push((g2, ls2));
                }
            }
            combos = next;
        }
        if let [(g, ls)] = combos.as_slice() {
            if self.terms.is_true(*g) {
                return f(self, ls);
            }
        }
        let mut alts = Vec::new();
        for (g, ls) in combos {
            let r = f(self, &ls)?;
            for (gr, lr) in r.alts() {
                let g2 = self.terms.and(g, *gr);
                alts.push((g2, lr.clone()));
            }
        }
        Ok(SymValue::from_alts(self.terms, alts))
    }

    /// Guards under which a value is `true` and `false`; it fails otherwise.
    pub fn truth(&mut self, v: &SymValue) -> (TermId, TermId) {
        let mut t = self.terms.f;
        let mut f = self.terms.f;
        for (g, l) in v.alts() {
            if let Leaf::Bool(b) = l {
                t = self.terms.and(*g, *b);
                let nb = self.terms.not(*b);
                f = self.terms.and(*g, nb);
            }
        }
        (t, f)
    }

    /// `g ? a : b`.
    fn choose(&mut self, g: TermId, a: &SymValue, b: &SymValue) -> SymValue {
        merge_values(self.terms, g, a, b)
    }

    /// `t` where it holds, else `f` where it holds, else failure.
    fn select(&mut self, t: TermId, a: Option<&SymValue>, f: TermId, b: Option<&SymValue>) -> SymValue {
        let fail = self.fail();
        let rest = match b {
            Some(b) => self.choose(f, b, &fail),
            None => fail,
        };
        match a {
            Some(a) => self.choose(t, a, &rest),
            None => rest,
        }
    }

    fn guard_fail(&mut self, g: TermId, v: SymValue) -> SymValue {
        if self.terms.is_false(g) {
            return v;
        }
        let fail = self.fail();
        self.choose(g, &fail, &v)
    }

    pub fn eval(&mut self, st: &SymState, locals: &mut SymLocals, e: &Expr) -> SResult<SymValue> {
        Ok(match e {
            Expr::Bool(b) => self.const_bool(*b),
            Expr::Int(i) => self.leaf(Leaf::Int(i.clone())),
            Expr::Bits(b) => SymValue::from_value(self.terms, &Value::Bits(b.clone())),
            Expr::Str(s) => self.leaf(Leaf::Str(s.clone())),
            Expr::SizedLit(v, w) => {
                let w = self.size(locals, w)? as u32;
                match int_to_bits(w, v) {
                    Some(b) => SymValue::from_value(self.terms, &Value::Bits(b)),
                    None => self.fail(),
                }
            }
            Expr::Var(x) => self.lookup(locals, x)?,
            Expr::Txt(a) => {
                let v = self.eval(st, locals, a)?;
                let m = self.machine;
                let env = &m.env;
                self.lift1(&v, |s, l| {
                    Ok(match l {
                        Leaf::Reg(r) => match env.reg_text.get(r) {
                            Some(t) => s.leaf(Leaf::Str(t.clone())),
                            None => s.fail(),
                        },
                        _ => s.fail(),
                    })
                })?
            }
            Expr::Call(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(st, locals, a)?);
                }
                self.call(st, f, vals)?
            }
            Expr::Unop(op, a) => {
                let v = self.eval(st, locals, a)?;
                self.lift1(&v, |s, l| s.leaf_unop(*op, l))?
            }
            Expr::Binop(Binop::And, a, b) => {
                let va = self.eval(st, locals, a)?;
                let (at, af) = self.truth(&va);
                if self.terms.is_false(at) {
                    let no = self.const_bool(false);
                    return Ok(self.select(af, Some(&no), self.terms.f, None));
                }
                let vb = self.eval(st, locals, b)?;
                let (bt, bf) = self.truth(&vb);
                let b_ok = self.terms.or(bt, bf);
                let a_then = self.terms.and(at, b_ok);
                let ok = self.terms.or(af, a_then);
                let val = self.terms.and(at, bt);
                let nok = self.terms.not(ok);
                SymValue::from_alts(self.terms, [(ok, Leaf::Bool(val)), (nok, Leaf::Fail)])
            }
            Expr::Binop(Binop::Or, a, b) => {
                let va = self.eval(st, locals, a)?;
                let (at, af) = self.truth(&va);
                if self.terms.is_false(af) {
                    let yes = self.const_bool(true);
                    return Ok(self.select(at, Some(&yes), self.terms.f, None));
                }
                let vb = self.eval(st, locals, b)?;
                let (bt, bf) = self.truth(&vb);
                let b_ok = self.terms.or(bt, bf);
                let a_then = self.terms.and(af, b_ok);
                let ok = self.terms.or(at, a_then);
                let af_bt = self.terms.and(af, bt);
                let val = self.terms.or(at, af_bt);
                let nok = self.terms.not(ok);
                SymValue::from_alts(self.terms, [(ok, Leaf::Bool(val)), (nok, Leaf::Fail)])
            }
            Expr::Binop(op @ (Binop::Shl | Binop::Shr | Binop::Sar), a, b) => {
                let va = self.eval(st, locals, a)?;
                let vb = self.eval(st, locals, b)?;
                let op = match op {
                    Binop::Shl => BvOp::Shl,
                    Binop::Shr => BvOp::Lshr,
                    _ => BvOp::Ashr,
                };
                self.lift2(&va, &vb, |s, x, n| {
                    let Leaf::Bits(x) = x else { return Ok(s.fail()) };
                    let w = s.terms.width(*x);
                    let Some(n) = s.shift_amount(w, n) else { return Ok(s.fail()) };
                    let r = s.terms.bvop(op, *x, n);
                    Ok(s.leaf(Leaf::Bits(r)))
                })?
            }
            Expr::Binop(op, a, b) => {
                let va = self.eval(st, locals, a)?;
                let vb = self.eval(st, locals, b)?;
                self.lift2(&va, &vb, |s, x, y| s.leaf_binop(*op, x, y))?
            }
            Expr::Index(a, i) => {
                let v = self.eval(st, locals, a)?;
                let i = self.size(locals, i)? as u32;
                self.lift1(&v, |s, l| Ok(s.extract(l, i, i + 1)))?
            }
            Expr::Slice(a, lo, hi) => {
                let v = self.eval(st, locals, a)?;
                let lo = self.size(locals, lo)? as u32;
                let hi = self.size(locals, hi)? as u32;
                self.lift1(&v, |s, l| Ok(s.extract(l, lo, hi)))?
            }
            Expr::Let(x, _, v, body) => {
                let v = self.eval(st, locals, v)?;
                let fg = v.fail_guard(self.terms);
                let Some(v) = v.restrict(self.terms, |l| !matches!(l, Leaf::Fail)) else {
                    return Ok(self.fail());
                };
                locals.push((x.clone(), v));
                let r = self.eval(st, locals, body);
                locals.pop();
                let r = r?;
                self.guard_fail(fg, r)
            }
            Expr::If(c, a, b) => {
                let vc = self.eval(st, locals, c)?;
                let (ct, cf) = self.truth(&vc);
                let va = if self.terms.is_false(ct) { None } else { Some(self.eval(st, locals, a)?) };
                let vb = if self.terms.is_false(cf) { None } else { Some(self.eval(st, locals, b)?) };
                self.select(ct, va.as_ref(), cf, vb.as_ref())
            }
            Expr::Ptr(r, off) => {
                let shape = self.shape();
                let region = shape
                    .region_by_name(r)
                    .ok_or_else(|| SymError(format!("`{r}` is not a memory region")))?;
                let width = shape.region(region).refw;
                let v = self.eval(st, locals, off)?;
                self.lift1(&v, |s, l| {
                    Ok(match l {
                        Leaf::Int(i) => match int_to_bits(width, i) {
                            Some(b) => {
                                let t = s.terms.bv(b);
                                s.leaf(Leaf::Ptr(region, t))
                            }
                            None => s.fail(),
                        },
                        Leaf::Bits(t) if s.terms.width(*t) == width => s.leaf(Leaf::Ptr(region, *t)),
                        _ => s.fail(),
                    })
                })?
            }
            Expr::Deref(a) => {
                let v = self.eval(st, locals, a)?;
                self.lift1(&v, |s, l| {
                    Ok(match l {
                        Leaf::Reg(r) => st.regs[r.0 as usize].clone(),
                        _ => s.fail(),
                    })
                })?
            }
            Expr::Fetch(p, w) => {
                let p = self.eval(st, locals, p)?;
                let w = self.size(locals, w)? as u32;
                self.lift1(&p, |s, l| {
                    Ok(match l {
                        Leaf::Ptr(r, off) => s.read_mem(st, *r, *off, w),
                        _ => s.fail(),
                    })
                })?
            }
            Expr::BranchTo(_) => match self.ext {
                Some(t) => self.boolean(t),
                None => self.fail(),
            },
            Expr::Set(items) => {
                let mut vals = Vec::new();
                for it in items {
                    vals.push(self.eval(st, locals, it)?);
                }
                self.lift_n(&vals, |s, ls| {
                    let mut set = BTreeSet::new();
                    let mut width = 0;
                    for l in ls {
                        match l {
                            Leaf::Reg(r) => {
                                width = s.shape().reg(*r).width;
                                set.insert(*r);
                            }
                            _ => return Ok(s.fail()),
                        }
                    }
                    Ok(s.leaf(Leaf::RegSet(set, width)))
                })?
            }
            Expr::Card(a) => {
                let v = self.eval(st, locals, a)?;
                self.lift1(&v, |s, l| {
                    Ok(match l {
                        Leaf::RegSet(set, _) => s.leaf(Leaf::Int(BigInt::from(set.len()))),
                        _ => s.fail(),
                    })
                })?
            }
        })
    }

    /// The clamped shift amount at width `w`, as in the interpreter.
    fn shift_amount(&mut self, w: u32, n: &Leaf) -> Option<TermId> {
        match n {
            Leaf::Int(_) => {
                let v = leaf_const(self.terms, self.shape(), n)?;
                match crate::interp::shift_amount(w, &v) {
                    Value::Bits(b) => Some(self.terms.bv(b)),
                    _ => None,
                }
            }
            Leaf::Bits(t) => {
                let wn = self.terms.width(*t);
                let limit_fits = wn >= 64 || (w as u64) < (1u64 << wn);
                let resized = self.terms.resize(w, *t);
                if !limit_fits {
                    return Some(resized);
                }
                let limit = self.terms.bv_u64(wn, w as u64);
                let big = self.terms.cmp(CmpOp::Ule, limit, *t);
                let clamp = self.terms.bv_u64(w, w as u64);
                Some(self.terms.ite(big, clamp, resized))
            }
            _ => None,
        }
    }

    fn extract(&mut self, l: &Leaf, lo: u32, hi: u32) -> SymValue {
        match l {
            Leaf::Bits(t) if lo < hi && hi <= self.terms.width(*t) => {
                let r = self.terms.extract(lo, hi, *t);
                self.leaf(Leaf::Bits(r))
            }
            _ => self.fail(),
        }
    }

    fn leaf_unop(&mut self, op: Unop, l: &Leaf) -> SResult<SymValue> {
        Ok(match (op, l) {
            (Unop::Neg, Leaf::Int(i)) => self.leaf(Leaf::Int(-i)),
            (Unop::Not, Leaf::Bool(b)) => {
                let t = self.terms.not(*b);
                self.boolean(t)
            }
            (Unop::BNeg, Leaf::Bits(b)) => {
                let t = self.terms.bvneg(*b);
                self.leaf(Leaf::Bits(t))
            }
            (Unop::BNot, Leaf::Bits(b)) => {
                let t = self.terms.bvnot(*b);
                self.leaf(Leaf::Bits(t))
            }
            _ => self.fail(),
        })
    }

    /// Equality of two alternatives; pointers never equal bitvectors.
    fn leaf_eq(&mut self, a: &Leaf, b: &Leaf) -> TermId {
        match (a, b) {
            (Leaf::Bits(x), Leaf::Bits(y)) | (Leaf::Bool(x), Leaf::Bool(y)) => {
                if self.terms.sort(*x) == self.terms.sort(*y) {
                    self.terms.eq(*x, *y)
                } else {
                    self.terms.f
                }
            }
            (Leaf::Ptr(r1, x), Leaf::Ptr(r2, y)) => {
                if r1 == r2 {
                    self.terms.eq(*x, *y)
                } else {
                    self.terms.f
                }
            }
            _ => {
                let r = a == b;
                self.terms.bool(r)
            }
        }
    }

    fn leaf_binop(&mut self, op: Binop, a: &Leaf, b: &Leaf) -> SResult<SymValue> {
        use Binop::*;
        if matches!(a, Leaf::Fail) || matches!(b, Leaf::Fail) {
            return Ok(self.fail());
        }
        Ok(match op {
            Eq => {
                let t = self.leaf_eq(a, b);
                self.boolean(t)
            }
            Neq => {
                let t = self.leaf_eq(a, b);
                let t = self.terms.not(t);
                self.boolean(t)
            }
            And | Or | Xor => match (a, b) {
                (Leaf::Bool(x), Leaf::Bool(y)) => {
                    let t = match op {
                        And => self.terms.and(*x, *y),
                        Or => self.terms.or(*x, *y),
                        _ => {
                            let e = self.terms.eq(*x, *y);
                            self.terms.not(e)
                        }
                    };
                    self.boolean(t)
                }
                _ => self.fail(),
            },
            Add | Sub | Mul | Div | Lt | Le | Gt | Ge | Union | Intersect | Minus | Subset | Member => {
                let shape = self.shape();
                match (leaf_const(self.terms, shape, a), leaf_const(self.terms, shape, b)) {
                    (Some(x), Some(y)) => SymValue::from_value(self.terms, &cv::binop(op, &x, &y)),
                    _ => self.fail(),
                }
            }
            _ => self.bv_binop(op, a, b),
        })
    }

    fn bv_binop(&mut self, op: Binop, a: &Leaf, b: &Leaf) -> SymValue {
        use Binop::*;
        let t = &mut *self.terms;
        match (a, b) {
            (Leaf::Bits(x), Leaf::Bits(y)) if t.width(*x) == t.width(*y) => {
                let (x, y) = (*x, *y);
                let bits = |t: &mut Terms, op| {
                    let r = t.bvop(op, x, y);
                    SymValue::leaf(t, Leaf::Bits(r))
                };
                let cmp = |t: &mut Terms, op, swap: bool, negate: bool| {
                    let r = if swap { t.cmp(op, y, x) } else { t.cmp(op, x, y) };
                    let r = if negate { t.not(r) } else { r };
                    SymValue::leaf(t, Leaf::Bool(r))
                };
                match op {
                    BAdd => bits(t, BvOp::Add),
                    BSub => bits(t, BvOp::Sub),
                    BMul => bits(t, BvOp::Mul),
                    BAnd => bits(t, BvOp::And),
                    BOr => bits(t, BvOp::Or),
                    BXor => bits(t, BvOp::Xor),
                    BDiv => {
                        let w = t.width(y);
                        let zero = t.bv_u64(w, 0);
                        let by_zero = t.eq(y, zero);
                        let q = t.bvop(BvOp::Udiv, x, y);
                        let ok = t.not(by_zero);
                        SymValue::from_alts(t, [(by_zero, Leaf::Fail), (ok, Leaf::Bits(q))])
                    }
                    BLt => cmp(t, CmpOp::Ult, false, false),
                    BLe => cmp(t, CmpOp::Ult, true, true),
                    BGt => cmp(t, CmpOp::Ult, true, false),
                    BGe => cmp(t, CmpOp::Ult, false, true),
                    BSLt => cmp(t, CmpOp::Slt, false, false),
                    BSLe => cmp(t, CmpOp::Slt, true, true),
                    BSGt => cmp(t, CmpOp::Slt, true, false),
                    BSGe => cmp(t, CmpOp::Slt, false, true),
                    _ => SymValue::fail(t),
                }
            }
            (Leaf::Ptr(r, o), Leaf::Bits(d)) if matches!(op, BAdd | BSub) && t.width(*d) == t.width(*o) => {
                let bop = if op == BAdd { BvOp::Add } else { BvOp::Sub };
                let n = t.bvop(bop, *o, *d);
                SymValue::leaf(t, Leaf::Ptr(*r, n))
            }
            (Leaf::Bits(d), Leaf::Ptr(r, o)) if op == BAdd && t.width(*d) == t.width(*o) => {
                let n = t.bvop(BvOp::Add, *o, *d);
                SymValue::leaf(t, Leaf::Ptr(*r, n))
            }
            (Leaf::Ptr(r1, x), Leaf::Ptr(r2, y)) if r1 == r2 && matches!(op, BLt | BLe | BGt | BGe) => {
                let (x, y) = (*x, *y);
                let r = match op {
                    BLt => t.cmp(CmpOp::Ult, x, y),
                    BLe => t.cmp(CmpOp::Ule, x, y),
                    BGt => t.cmp(CmpOp::Ult, y, x),
                    _ => t.cmp(CmpOp::Ule, y, x),
                };
                SymValue::leaf(t, Leaf::Bool(r))
            }
            _ => SymValue::fail(t),
        }
    }

    fn call(&mut self, st: &SymState, f: &str, args: Vec<SymValue>) -> SResult<SymValue> {
        if let Some(Binding::Func(def)) = self.machine.env.map.get(f) {
            let (params, body) = &**def;
            let mut fg = self.terms.f;
            let mut clean = Vec::with_capacity(args.len());
            for a in &args {
                let g = a.fail_guard(self.terms);
                fg = self.terms.or(fg, g);
                match a.restrict(self.terms, |l| !matches!(l, Leaf::Fail)) {
                    Some(v) => clean.push(v),
                    None => return Ok(self.fail()),
                }
            }
            let mut locals: SymLocals = params.iter().cloned().zip(clean).collect();
            let r = self.eval(st, &mut locals, body)?;
            return Ok(self.guard_fail(fg, r));
        }
        let shape = self.shape();
        let name = f.to_string();
        self.lift_n(&args, |s, ls| {
            if ls.iter().any(|l| matches!(l, Leaf::Fail)) {
                return Ok(s.fail());
            }
            match (name.as_str(), ls) {
                ("isptr", [l]) => {
                    return Ok(match l {
                        Leaf::Ptr(..) => s.const_bool(true),
                        Leaf::Bits(_) => s.const_bool(false),
                        _ => s.fail(),
                    })
                }
                ("bv_to_len", [n, Leaf::Bits(b)]) => {
                    return Ok(match n {
                        Leaf::Int(i) => match i.to_u32() {
                            Some(w) if w > 0 => {
                                let r = s.terms.resize(w, *b);
                                s.leaf(Leaf::Bits(r))
                            }
                            _ => s.fail(),
                        },
                        _ => s.fail(),
                    })
                }
                ("textlabel", _) => return Ok(s.fail()),
                ("hex" | "bin" | "dec", [Leaf::Ptr(..)]) => return Ok(s.fail()),
                _ => {}
            }
            let vals: Option<Vec<Value>> = ls.iter().map(|l| leaf_const(s.terms, shape, l)).collect();
            let Some(vals) = vals else {
                return Err(SymError(format!("`{name}` needs concrete arguments")));
            };
            let v = match (name.as_str(), vals.as_slice()) {
                ("lbl", [Value::Ptr(p)]) => match &shape.region(p.region).label {
                    Some(l) if p.offset == 0 => Value::Str(l.clone()),
                    _ => Value::Fail,
                },
                ("lbl", _) => Value::Fail,
                _ => cv::builtin(&name, &vals).ok_or_else(|| SymError(format!("unbound identifier `{name}`")))?,
            };
            Ok(SymValue::from_value(s.terms, &v))
        })
    }

    /// The cells a pointer with offset `off` may designate, with guards, and
    /// the guard under which it designates none.
    fn cells_of(&mut self, m: RegionId, off: TermId) -> (Vec<(TermId, usize)>, TermId) {
        let info = self.shape().region(m);
        if let Some(b) = self.terms.as_bv(off) {
            let idx = b.to_u64().and_then(|o| info.cell_index(o));
            return match idx {
                Some(i) => (vec![(self.terms.t, i)], self.terms.f),
                None => (vec![], self.terms.t),
            };
        }
        let w = self.terms.width(off);
        let candidates: Vec<u64> = match self.terms.possible_constants(off, 64) {
            Some(cs) => cs.iter().filter_map(|c| c.to_u64()).collect(),
            None => info.offsets().collect(),
        };
        let mut out = Vec::new();
        let mut any = self.terms.f;
        for o in candidates {
            if let Some(i) = info.cell_index(o) {
                let k = self.terms.bv(Bitvec::from_u64(w, o));
                let g = self.terms.eq(off, k);
                any = self.terms.or(any, g);
                out.push((g, i));
            }
        }
        let none = self.terms.not(any);
        (out, none)
    }

    /// A read of width `w` at `off` in region `m`: an ite over the feasible
    /// cells, failing where no cell matches.
    pub fn read_mem(&mut self, st: &SymState, m: RegionId, off: TermId, w: u32) -> SymValue {
        if self.shape().region(m).cell != w {
            return self.fail();
        }
        let (cells, _) = self.cells_of(m, off);
        let mut acc = self.fail();
        for (g, i) in cells.into_iter().rev() {
            let cell = st.mem[m.0 as usize][i].clone();
            acc = self.choose(g, &cell, &acc);
        }
        acc
    }

    fn add_error(&mut self, st: &mut SymState, g: TermId) {
        st.err = self.terms.or(st.err, g);
    }

    /// A write of `v` through every pointer alternative of `p`.
    pub fn write_mem(&mut self, st: &mut SymState, p: &SymValue, w: u32, v: &SymValue) {
        for (g, l) in p.alts() {
            let (m, off) = match l {
                Leaf::Ptr(m, off) if self.shape().region(*m).cell == w => (*m, *off),
                _ => {
                    self.add_error(st, *g);
                    continue;
                }
            };
            let (cells, none) = self.cells_of(m, off);
            let bad = self.terms.and(*g, none);
            self.add_error(st, bad);
            for (gc, i) in cells {
                let guard = self.terms.and(*g, gc);
                let old = st.mem[m.0 as usize][i].clone();
                let new = self.choose(guard, v, &old);
                if new != old {
                    Rc::make_mut(&mut st.mem[m.0 as usize])[i] = new;
                }
            }
        }
    }

    /// Evaluates an expression whose failure crashes the statement; returns
    /// the non-failing part, or `None` when it always fails.
    fn value(&mut self, st: &mut SymState, locals: &mut SymLocals, e: &Expr) -> SResult<Option<SymValue>> {
        let v = self.eval(st, locals, e)?;
        let fg = v.fail_guard(self.terms);
        self.add_error(st, fg);
        Ok(v.restrict(self.terms, |l| !matches!(l, Leaf::Fail)))
    }

    /// The guard under which `v` is a word of width `w`, and that part of it.
    fn word_part(&mut self, v: &SymValue, w: u32) -> (TermId, Option<SymValue>) {
        let shape = self.shape();
        let mut fit = self.terms.f;
        let mut kept = Vec::new();
        for (g, l) in v.alts() {
            let ok = match l {
                Leaf::Bits(t) => self.terms.width(*t) == w,
                Leaf::Ptr(m, _) => shape.region(*m).refw == w,
                _ => false,
            };
            if ok {
                fit = self.terms.or(fit, *g);
                kept.push((*g, l.clone()));
            }
        }
        if kept.is_empty() {
            return (fit, None);
        }
        (fit, Some(SymValue::from_alts(self.terms, kept)))
    }

    fn merge_state(&mut self, g: TermId, a: SymState, b: SymState) -> SymState {
        if self.terms.is_true(g) {
            return a;
        }
        if self.terms.is_false(g) {
            return b;
        }
        let regs = a.regs.iter().zip(&b.regs).map(|(x, y)| merge_values(self.terms, g, x, y)).collect();
        let mem = a
            .mem
            .iter()
            .zip(&b.mem)
            .map(|(x, y)| {
                if Rc::ptr_eq(x, y) || x == y {
                    x.clone()
                } else {
                    Rc::new(x.iter().zip(y.iter()).map(|(p, q)| merge_values(self.terms, g, p, q)).collect())
                }
            })
            .collect();
        let err = self.terms.ite(g, a.err, b.err);
        let br = self.terms.ite(g, a.br, b.br);
        SymState { regs, mem, err, br }
    }

    pub fn exec(&mut self, st: &mut SymState, locals: &mut SymLocals, s: &Stmt) -> SResult<()> {
        if self.terms.is_true(st.err) {
            return Ok(());
        }
        match s {
            Stmt::Skip => {}
            Stmt::Crash => st.err = self.terms.t,
            Stmt::Seq(v) => {
                for s in v {
                    self.exec(st, locals, s)?;
                }
            }
            Stmt::Call(p, args) => {
                let Some(Binding::Proc(def)) = self.machine.env.map.get(p) else {
                    return Err(SymError(format!("`{p}` is not a procedure")));
                };
                let (params, body) = &**def;
                let mut vals = Vec::new();
                for a in args {
                    match self.value(st, locals, a)? {
                        Some(v) => vals.push(v),
                        None => return Ok(()),
                    }
                }
                let mut inner: SymLocals = params.iter().cloned().zip(vals).collect();
                self.exec(st, &mut inner, body)?;
            }
            Stmt::Let(x, _, v, body) => {
                let Some(v) = self.value(st, locals, v)? else { return Ok(()) };
                locals.push((x.clone(), v));
                let r = self.exec(st, locals, body);
                locals.pop();
                r?;
            }
            Stmt::For(x, lo, hi, body) => {
                let lo = self.size(locals, lo)?;
                let hi = self.size(locals, hi)?;
                for i in lo..=hi {
                    locals.push((x.clone(), self.leaf(Leaf::Int(BigInt::from(i)))));
                    let r = self.exec(st, locals, body);
                    locals.pop();
                    r?;
                }
            }
            Stmt::If(c, a, b) => {
                let vc = self.eval(st, locals, c)?;
                let (ct, cf) = self.truth(&vc);
                let ok = self.terms.or(ct, cf);
                let bad = self.terms.not(ok);
                self.add_error(st, bad);
                if self.terms.is_true(ct) {
                    return self.exec(st, locals, a);
                }
                if self.terms.is_true(cf) {
                    return self.exec(st, locals, b);
                }
                if self.terms.is_false(ok) {
                    return Ok(());
                }
                let mut sa = st.clone();
                let mut sb = st.clone();
                self.exec(&mut sa, locals, a)?;
                self.exec(&mut sb, locals, b)?;
                *st = self.merge_state(ct, sa, sb);
            }
            Stmt::Assign(target, v) => {
                let Some(target) = self.value(st, locals, target)? else { return Ok(()) };
                let Some(v) = self.value(st, locals, v)? else { return Ok(()) };
                let shape = self.shape();
                for (g, l) in target.alts() {
                    let Leaf::Reg(r) = l else {
                        self.add_error(st, *g);
                        continue;
                    };
                    let (fit, vw) = self.word_part(&v, shape.reg(*r).width);
                    let misfit = self.terms.not(fit);
                    let bad = self.terms.and(*g, misfit);
                    self.add_error(st, bad);
                    let Some(vw) = vw else { continue };
                    let old = st.regs[r.0 as usize].clone();
                    st.regs[r.0 as usize] = merge_values(self.terms, *g, &vw, &old);
                }
            }
            Stmt::Store(p, w, v) => {
                let Some(p) = self.value(st, locals, p)? else { return Ok(()) };
                let w = self.size(locals, w)? as u32;
                let Some(v) = self.value(st, locals, v)? else { return Ok(()) };
                let (fit, vw) = self.word_part(&v, w);
                let misfit = self.terms.not(fit);
                self.add_error(st, misfit);
                let Some(vw) = vw else { return Ok(()) };
                self.write_mem(st, &p, w, &vw);
            }
            Stmt::Branch(e) => {
                let Some(v) = self.value(st, locals, e)? else { return Ok(()) };
                let mut code = None;
                let mut ok = self.terms.f;
                for (g, l) in v.alts() {
                    if let Leaf::Bits(t) = l {
                        if self.terms.width(*t) == 8 {
                            code = Some(*t);
                            ok = *g;
                        }
                    }
                }
                let bad = self.terms.not(ok);
                self.add_error(st, bad);
                if let Some(c) = code {
                    st.br = c;
                }
            }
            Stmt::Assert(e) => {
                let v = self.eval(st, locals, e)?;
                let (ct, _) = self.truth(&v);
                let bad = self.terms.not(ct);
                self.add_error(st, bad);
            }
        }
        Ok(())
    }

    /// Executes one instruction slot; the branch code is left in `br`.
    pub fn exec_inst(&mut self, st: &SymState, inst: &SymInst) -> SResult<SymState> {
        let mut acc: Option<SymState> = None;
        for (g, op, args) in inst.alts.iter().rev() {
            let def = &self.machine.ops[*op];
            let mut s = st.clone();
            s.br = self.terms.bv_u64(8, 0);
            let mut locals: SymLocals = def.params.iter().map(|(x, _)| x.clone()).zip(args.iter().cloned()).collect();
            self.exec(&mut s, &mut locals, &def.sem)?;
            acc = Some(match acc {
                None => s,
                Some(rest) => self.merge_state(*g, s, rest),
            });
        }
        acc.ok_or_else(|| SymError("instruction slot without alternatives".into()))
    }

    /// Runs a program with forward branches. Slot `i` executes under the
    /// guard that control reaches it; skips past the end fail.
    pub fn exec_program(&mut self, init: &SymState, prog: &[SymInst]) -> SResult<SymOutcome> {
        let n = prog.len();
        let mut reach = vec![self.terms.f; n + 1];
        reach[0] = self.terms.t;
        let mut st = init.clone();
        let mut ext = self.terms.f;
        for i in 0..n {
            let act = reach[i];
            if self.terms.is_false(act) {
                continue;
            }
            let after = self.exec_inst(&st, &prog[i])?;
            let br = after.br;
            let mut next = self.merge_state(act, after, st);
            let ff = self.terms.bv_u64(8, 0xff);
            let to_ext = self.terms.eq(br, ff);
            let g = self.terms.and(act, to_ext);
            ext = self.terms.or(ext, g);
            let mut lands = self.terms.f;
            for (d, j) in (i + 1..=n).enumerate() {
                if d > 254 {
                    break;
                }
                let k = self.terms.bv_u64(8, d as u64);
                let hit = self.terms.eq(br, k);
                lands = self.terms.or(lands, hit);
                let g = self.terms.and(act, hit);
                reach[j] = self.terms.or(reach[j], g);
            }
            let ok = self.terms.or(lands, to_ext);
            let overshoot = self.terms.not(ok);
            let bad = self.terms.and(act, overshoot);
            next.err = self.terms.or(next.err, bad);
            next.br = self.terms.bv_u64(8, 0);
            st = next;
        }
        Ok(SymOutcome { state: st, ext })
    }
}

/// Symbolic specification conditions over an initial and final state.
pub struct SpecConditions {
    pub pre: TermId,
    pub post: TermId,
    pub frame: TermId,
    pub err: TermId,
}

/// Binds the specification's state-dependent lets in the initial state.
pub fn spec_globals(terms: &mut Terms, spec: &Spec, init: &SymState) -> SResult<SymLocals> {
    let mut globals: SymLocals = Vec::new();
    for l in &spec.lets {
        let mut ex = SymExec { globals: globals.clone(), ..SymExec::new(terms, &spec.machine) };
        let v = ex.eval(init, &mut Vec::new(), &l.expr)?;
        globals.push((l.name.clone(), v));
    }
    Ok(globals)
}

/// The guard under which `e` evaluates to true.
pub fn holds(
    terms: &mut Terms,
    spec: &Spec,
    globals: &SymLocals,
    st: &SymState,
    ext: Option<TermId>,
    e: &Expr,
) -> SResult<TermId> {
    let mut ex = SymExec { globals: globals.clone(), ext, ..SymExec::new(terms, &spec.machine) };
    let v = ex.eval(st, &mut Vec::new(), e)?;
    Ok(ex.truth(&v).0)
}

/// The guard under which two values are equal.
pub fn values_equal(terms: &mut Terms, a: &SymValue, b: &SymValue) -> TermId {
    if a == b {
        return terms.t;
    }
    let mut out = terms.f;
    for (ga, la) in a.alts() {
        for (gb, lb) in b.alts() {
            let e = match (la, lb) {
                (Leaf::Bits(x), Leaf::Bits(y)) | (Leaf::Bool(x), Leaf::Bool(y)) if terms.sort(*x) == terms.sort(*y) => {
                    terms.eq(*x, *y)
                }
                (Leaf::Ptr(r1, x), Leaf::Ptr(r2, y)) if r1 == r2 => terms.eq(*x, *y),
                (Leaf::Bits(_), _) | (Leaf::Bool(_), _) | (Leaf::Ptr(..), _) => terms.f,
                _ => terms.bool(la == lb),
            };
            let g = terms.and_all([*ga, *gb, e]);
            out = terms.or(out, g);
        }
    }
    out
}

/// The guard under which every location outside the modifiable frame keeps
/// its initial value.
pub fn frame_holds(terms: &mut Terms, spec: &Spec, init: &SymState, fin: &SymState) -> TermId {
    let shape = &spec.machine.shape;
    let mut out = terms.t;
    for l in SymState::locations(shape) {
        let modifiable = match l {
            Loc::Reg(r) => spec.modifiable_regs.contains(&r),
            Loc::Cell(m, i) => spec.modifiable_cells.contains(&(m, i)),
        };
        if modifiable {
            continue;
        }
        let e = values_equal(terms, init.get(l), fin.get(l));
        out = terms.and(out, e);
    }
    out
}

pub fn spec_conditions(terms: &mut Terms, spec: &Spec, init: &SymState, out: &SymOutcome) -> SResult<SpecConditions> {
    let globals = spec_globals(terms, spec, init)?;
    let pre = holds(terms, spec, &globals, init, None, &spec.pre)?;
    let post = holds(terms, spec, &globals, &out.state, Some(out.ext), &spec.post)?;
    let frame = frame_holds(terms, spec, init, &out.state);
    Ok(SpecConditions { pre, post, frame, err: out.state.err })
}

/// Concrete reading of a symbolic outcome: the final state and exit flag, or
/// `None` when the run fails.
pub fn concretize_outcome(
    terms: &Terms,
    shape: &Shape,
    out: &SymOutcome,
    a: &Assignment,
) -> Option<(MachineState, bool)> {
    let mut ev = terms.evaluator(a);
    if ev.eval_bool(out.state.err) {
        return None;
    }
    Some((out.state.concretize(&mut ev, shape), ev.eval_bool(out.ext)))
}

/// Evaluates a single term's value under an assignment.
pub fn eval_term(terms: &Terms, t: TermId, a: &Assignment) -> CVal {
    terms.evaluator(a).eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexec::value::merge_values;
    use crate::symexec::Sort;
    use crate::syntax::{parse_expr, parse_machine, parse_program};

    fn machine() -> Machine {
        let text = "letstate r0: 4 reg\nletstate r1: 4 reg\nletstate r2: 32 reg\n\
                    letstate R1: 32 bit 2 len 4 ref memory\nletstate R2: 32 bit 2 len 4 ref memory\n\
                    defop ADD rd: 4 reg rs: 4 reg { txt = \"add\", sem = [ *rd <- *rd b+ *rs ] }";
        Machine::from_ast(&parse_machine(text).unwrap(), &[]).unwrap()
    }

    fn setup(terms: &mut Terms, m: &Machine) -> SymState {
        SymState::fresh(terms, &m.shape, &|_| false)
    }

    fn fetch(terms: &mut Terms, m: &Machine, st: &SymState, p: SymValue) -> SymValue {
        let mut locals: SymLocals = vec![("p".into(), p)];
        SymExec::new(terms, m).eval(st, &mut locals, &parse_expr("fetch(p, 32)").unwrap()).unwrap()
    }

    fn cell(st: &SymState, m: u32, i: usize) -> TermId {
        match st.mem[m as usize][i].single() {
            Some(Leaf::Bits(t)) => *t,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn concrete_pointer_reads_its_cell() {
        let (m, mut terms) = (machine(), Terms::new());
        let st = setup(&mut terms, &m);
        let four = terms.bv_u64(4, 4);
        let p = SymValue::leaf(&terms, Leaf::Ptr(RegionId(0), four));
        let v = fetch(&mut terms, &m, &st, p);
        assert_eq!(v, st.mem[0][1]);
    }

    #[test]
    fn symbolic_offset_reads_an_ite_of_cells() {
        let (m, mut terms) = (machine(), Terms::new());
        let st = setup(&mut terms, &m);
        let g = terms.var("g", Sort::Bool);
        let (zero, four) = (terms.bv_u64(4, 0), terms.bv_u64(4, 4));
        let off = terms.ite(g, zero, four);
        let p = SymValue::leaf(&terms, Leaf::Ptr(RegionId(0), off));
        let v = fetch(&mut terms, &m, &st, p);
        let Some(Leaf::Bits(t)) = v.single() else { panic!("{v:?}") };
        let want = terms.ite(g, cell(&st, 0, 0), cell(&st, 0, 1));
        assert_eq!(*t, want);
    }

    #[test]
    fn cross_region_pointer_reads_two_branches() {
        let (m, mut terms) = (machine(), Terms::new());
        let st = setup(&mut terms, &m);
        let g = terms.var("g", Sort::Bool);
        let zero = terms.bv_u64(4, 0);
        let a = SymValue::leaf(&terms, Leaf::Ptr(RegionId(0), zero));
        let b = SymValue::leaf(&terms, Leaf::Ptr(RegionId(1), zero));
        let p = merge_values(&mut terms, g, &a, &b);
        assert_eq!(p.alts().len(), 2);
        let v = fetch(&mut terms, &m, &st, p);
        let Some(Leaf::Bits(t)) = v.single() else { panic!("{v:?}") };
        let vars = terms.free_vars(&[*t]);
        assert_eq!(vars.len(), 3);
        let want = terms.ite(g, cell(&st, 0, 0), cell(&st, 1, 0));
        assert_eq!(*t, want);
    }

    #[test]
    fn writes_update_the_addressed_cells() {
        let (m, mut terms) = (machine(), Terms::new());
        let st = setup(&mut terms, &m);
        let seven = terms.bv_u64(32, 7);
        let v = SymValue::leaf(&terms, Leaf::Bits(seven));
        let four = terms.bv_u64(4, 4);
        let mut one = st.clone();
        let p = SymValue::leaf(&terms, Leaf::Ptr(RegionId(0), four));
        SymExec::new(&mut terms, &m).write_mem(&mut one, &p, 32, &v);
        assert_eq!(one.mem[0][1], v);
        assert_eq!(one.mem[0][0], st.mem[0][0]);
        assert!(Rc::ptr_eq(&one.mem[1], &st.mem[1]));

        let g = terms.var("g", Sort::Bool);
        let zero = terms.bv_u64(4, 0);
        let a = SymValue::leaf(&terms, Leaf::Ptr(RegionId(0), zero));
        let b = SymValue::leaf(&terms, Leaf::Ptr(RegionId(1), zero));
        let p = merge_values(&mut terms, g, &a, &b);
        let mut two = st.clone();
        SymExec::new(&mut terms, &m).write_mem(&mut two, &p, 32, &v);
        let ng = terms.not(g);
        assert_eq!(two.mem[0][0], merge_values(&mut terms, g, &v, &st.mem[0][0]));
        assert_eq!(two.mem[1][0], merge_values(&mut terms, ng, &v, &st.mem[1][0]));
        assert!(terms.is_false(two.err));
    }

    #[test]
    fn writing_through_bits_is_an_error() {
        let (m, mut terms) = (machine(), Terms::new());
        let st = setup(&mut terms, &m);
        let seven = terms.bv_u64(32, 7);
        let v = SymValue::leaf(&terms, Leaf::Bits(seven));
        let z = terms.bv_u64(4, 0);
        let p = SymValue::leaf(&terms, Leaf::Bits(z));
        let mut out = st.clone();
        SymExec::new(&mut terms, &m).write_mem(&mut out, &p, 32, &v);
        assert!(terms.is_true(out.err));
        assert_eq!(out.mem, st.mem);
    }

    #[test]
    fn repeated_execution_shares_terms_and_grows_linearly() {
        let m = machine();
        let mut terms = Terms::new();
        let st = setup(&mut terms, &m);
        let inst = m.program(&parse_program("(ADD r0 r1)").unwrap()).unwrap();
        let si = SymInst::concrete(&mut terms, &inst[0]);
        let a = SymExec::new(&mut terms, &m).exec_inst(&st, &si).unwrap();
        let before = terms.len();
        let b = SymExec::new(&mut terms, &m).exec_inst(&st, &si).unwrap();
        assert_eq!(a.regs, b.regs);
        assert_eq!(terms.len(), before);

        let mut sizes = Vec::new();
        let mut cur = st.clone();
        for _ in 0..3 {
            let start = terms.len();
            for _ in 0..20 {
                cur = SymExec::new(&mut terms, &m).exec_inst(&cur, &si).unwrap();
            }
            sizes.push(terms.len() - start);
        }
        assert!(sizes.iter().all(|s| *s <= sizes[0] + 4), "{sizes:?}");
    }
}
