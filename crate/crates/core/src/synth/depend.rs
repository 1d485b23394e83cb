//! Dependency analysis: which final locations the specification determines
//! uniquely, and which initial locations they depend on; plus the use-flow
//! constraints that candidate programs must then satisfy.

use super::footprint::Footprint;
use super::program::SymbolicProgram;
use super::verify::initial_state;
use crate::lang::{RegionId, Shape};
use crate::machine::Spec;
use crate::smt::{Session, SmtResult, SolverConfig};
use crate::symexec::exec::{holds, spec_globals, values_equal, Loc, SymState};
use crate::symexec::value::fresh_word;
use crate::symexec::{Sort, TermId, Terms};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepInfo {
    /// Uniquely determined locations with the initial locations they
    /// depend on.
    pub unique: BTreeMap<Loc, BTreeSet<Loc>>,
    pub not_unique: BTreeSet<Loc>,
    /// Locations whose queries the solver could not settle.
    pub unknown: BTreeSet<Loc>,
}

/// Pre and post over one initial state and two arbitrary final states.
struct Pair {
    pre: TermId,
    post1: TermId,
    post2: TermId,
    fin1: SymState,
    fin2: SymState,
}

fn conditions(terms: &mut Terms, spec: &Spec, init: &SymState, tag: &str) -> Result<(TermId, TermId, SymState), String> {
    let shape = &spec.machine.shape;
    let globals = spec_globals(terms, spec, init).map_err(|e| e.to_string())?;
    let pre = holds(terms, spec, &globals, init, None, &spec.pre).map_err(|e| e.to_string())?;
    let fin = SymState::fresh_named(terms, shape, &format!("{tag}."), &|_| true);
    let ext = terms.var(&format!("{tag}.ext"), Sort::Bool);
    let post = holds(terms, spec, &globals, &fin, Some(ext), &spec.post).map_err(|e| e.to_string())?;
    Ok((pre, post, fin))
}

fn pair(terms: &mut Terms, spec: &Spec, a: &SymState, b: &SymState) -> Result<Pair, String> {
    let (pre1, post1, fin1) = conditions(terms, spec, a, "f1")?;
    let (pre2, post2, fin2) = conditions(terms, spec, b, "f2")?;
    let pre = terms.and(pre1, pre2);
    Ok(Pair { pre, post1, post2, fin1, fin2 })
}

fn differs(terms: &mut Terms, p: &Pair, l: Loc) -> TermId {
    let e = values_equal(terms, p.fin1.get(l), p.fin2.get(l));
    let d = terms.not(e);
    terms.and_all([p.pre, p.post1, p.post2, d])
}

/// Initial locations whose variables occur in the given terms.
fn touched(terms: &Terms, shape: &Shape, init: &SymState, ts: &[TermId]) -> BTreeSet<Loc> {
    let mut owner: HashMap<u32, Loc> = HashMap::new();
    for l in SymState::locations(shape) {
        let mut vs = Vec::new();
        super::footprint::value_terms(init.get(l), &mut vs);
        for v in terms.free_vars(&vs) {
            owner.insert(v, l);
        }
    }
    terms.free_vars(ts).into_iter().filter_map(|v| owner.get(&v).copied()).collect()
}

fn with_location(terms: &mut Terms, spec: &Spec, st: &SymState, l: Loc) -> SymState {
    let shape = &spec.machine.shape;
    let policy = super::verify::PointerPolicy::of(spec);
    let mut out = st.clone();
    match l {
        Loc::Reg(r) => {
            out.regs[r.0 as usize] =
                fresh_word(terms, shape, &format!("alt.reg.{}", shape.reg(r).name), shape.reg(r).width, policy.allows(l));
        }
        Loc::Cell(m, i) => {
            let info = shape.region(m);
            let v = fresh_word(terms, shape, &format!("alt.mem.{}.{i}", info.name), info.cell, policy.allows(l));
            std::rc::Rc::make_mut(&mut out.mem[m.0 as usize])[i] = v;
        }
    }
    out
}

fn ask(s: &mut Session, terms: &Terms, q: TermId) -> SmtResult {
    s.push();
    s.assert(terms, q);
    let r = s.check();
    s.pop();
    r
}

/// Runs the uniqueness query for every modifiable location and the
/// dependence query for every initial location the specification reads.
pub fn analyze(spec: &Spec, cfg: &SolverConfig) -> Result<DepInfo, String> {
    let shape = &spec.machine.shape;
    let mut terms = Terms::new();
    let init = initial_state(&mut terms, spec, "");
    let base = pair(&mut terms, spec, &init, &init)?;
    let targets: Vec<Loc> = spec
        .modifiable_regs
        .iter()
        .map(|r| Loc::Reg(*r))
        .chain(spec.modifiable_cells.iter().map(|(m, i)| Loc::Cell(*m, *i)))
        .collect();
    let sources = touched(&terms, shape, &init, &[base.pre, base.post1]);
    let mut s = Session::start(cfg)?;
    let mut info = DepInfo::default();
    for l in targets {
        let q = differs(&mut terms, &base, l);
        match ask(&mut s, &terms, q) {
            SmtResult::Sat(_) => {
                info.not_unique.insert(l);
            }
            SmtResult::Unknown(_) => {
                info.unknown.insert(l);
            }
            SmtResult::Unsat => {
                let mut deps = BTreeSet::new();
                for x in &sources {
                    let alt = with_location(&mut terms, spec, &init, *x);
                    let p = pair(&mut terms, spec, &init, &alt)?;
                    let q = differs(&mut terms, &p, l);
                    match ask(&mut s, &terms, q) {
                        SmtResult::Sat(_) => {
                            deps.insert(*x);
                        }
                        SmtResult::Unsat => {}
                        SmtResult::Unknown(_) => {
                            deps.insert(*x);
                            info.unknown.insert(l);
                        }
                    }
                }
                info.unique.insert(l, deps);
            }
        }
    }
    Ok(info)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Key {
    Reg(u32),
    Mem(RegionId),
}

fn key(l: Loc) -> Key {
    match l {
        Loc::Reg(r) => Key::Reg(r.0),
        Loc::Cell(m, _) => Key::Mem(m),
    }
}

/// Guard over control variables that a value may flow from `from` to `to`
/// through the program. Memory regions are tracked as single locations and
/// a branch that may read tainted state taints everything after it.
pub fn may_flow(terms: &mut Terms, shape: &Shape, sp: &SymbolicProgram, fps: &[Footprint], from: Loc, to: Loc) -> TermId {
    let keys: Vec<Key> = shape
        .reg_ids()
        .map(|r| Key::Reg(r.0))
        .chain(shape.region_ids().map(Key::Mem))
        .collect();
    let mut taint: BTreeMap<Key, TermId> = keys.iter().map(|k| (*k, terms.f)).collect();
    taint.insert(key(from), terms.t);
    for slot in &sp.slots {
        let mut next = taint.clone();
        let mut branch = terms.f;
        for o in &slot.ops {
            let fp = &fps[o.op];
            let mut reads = Vec::new();
            for (p, x) in o.operands.iter().enumerate() {
                if !fp.reads_param.get(p).copied().unwrap_or(false) {
                    continue;
                }
                if let super::program::Operand::Reg { choice, options } = x {
                    for (g, r) in choice.guards.iter().zip(options) {
                        let t = terms.and(*g, taint[&Key::Reg(r.0)]);
                        reads.push(t);
                    }
                }
            }
            reads.extend(fp.implicit_reads.iter().map(|r| taint[&Key::Reg(r.0)]));
            if fp.reads_mem {
                reads.extend(shape.region_ids().map(|m| taint[&Key::Mem(m)]));
            }
            let any = terms.or_all(reads);
            let act = terms.and(o.guard, any);
            if terms.is_false(act) {
                continue;
            }
            for (p, x) in o.operands.iter().enumerate() {
                if !fp.writes_param.get(p).copied().unwrap_or(false) {
                    continue;
                }
                if let super::program::Operand::Reg { choice, options } = x {
                    for (g, r) in choice.guards.iter().zip(options) {
                        let k = Key::Reg(r.0);
                        let w = terms.and(act, *g);
                        let t = terms.or(next[&k], w);
                        next.insert(k, t);
                    }
                }
            }
            for r in &fp.implicit_writes {
                let k = Key::Reg(r.0);
                let t = terms.or(next[&k], act);
                next.insert(k, t);
            }
            if fp.writes_mem {
                for m in shape.region_ids() {
                    let k = Key::Mem(m);
                    let t = terms.or(next[&k], act);
                    next.insert(k, t);
                }
            }
            if fp.branches {
                branch = terms.or(branch, act);
            }
        }
        if !terms.is_false(branch) {
            for k in &keys {
                let t = terms.or(next[k], branch);
                next.insert(*k, t);
            }
        }
        taint = next;
    }
    taint[&key(to)]
}

/// For each uniquely determined location, a flow from each location it
/// depends on.
pub fn dependency_constraints(terms: &mut Terms, shape: &Shape, sp: &SymbolicProgram, fps: &[Footprint], deps: &DepInfo) -> TermId {
    let mut out = terms.t;
    for (l, srcs) in &deps.unique {
        for x in srcs {
            if key(*x) == key(*l) {
                continue;
            }
            let f = may_flow(terms, shape, sp, fps, *x, *l);
            out = terms.and(out, f);
        }
    }
    out
}
