//! Verification of concrete programs and generation of precondition states.

use crate::interp::{check_program, pre_holds};
use crate::lang::ast::Expr;
use crate::lang::{MachineState, RegId, RegionId};
use crate::machine::{Inst, Spec};
use crate::sample::random_state_with_pointers_at;
use crate::smt::{Session, SmtResult, SolverConfig};
use crate::symexec::exec::{
    assignment_of, spec_conditions, spec_globals, holds, state_of_assignment, values_equal, Loc, SymInst, SymState,
};
use crate::symexec::{CVal, SymExec, SymValue, TermId, Terms};
use rand::Rng;
use std::collections::BTreeSet;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    /// A state meeting the precondition on which the program fails.
    Refuted(MachineState),
    Unknown(String),
}

/// The specification with the machine invariants added to its
/// precondition, unless they are already among its conjuncts.
pub fn with_invariants(spec: &Spec) -> Spec {
    let mut out = spec.clone();
    for inv in &spec.machine.invariants {
        if !out.pre.conjuncts().contains(&inv) {
            out.pre = match out.pre {
                Expr::Bool(true) => inv.clone(),
                pre => Expr::and(pre, inv.clone()),
            };
            out.ast.pre = out.pre.clone();
            let (regs, _) = spec.mentions(inv);
            out.mentioned_regs.extend(regs);
        }
    }
    out
}

/// Locations the precondition mentions; only these may hold pointers in
/// the initial states considered.
#[derive(Clone, Debug)]
pub struct PointerPolicy {
    regs: BTreeSet<RegId>,
    cells: BTreeSet<(RegionId, usize)>,
}

impl PointerPolicy {
    pub fn of(spec: &Spec) -> PointerPolicy {
        let (regs, cells) = spec.pre_mentions();
        PointerPolicy { regs, cells }
    }

    pub fn allows(&self, l: Loc) -> bool {
        match l {
            Loc::Reg(r) => self.regs.contains(&r),
            Loc::Cell(m, i) => self.cells.contains(&(m, i)),
        }
    }
}

/// A fresh initial state under the pointer policy.
pub fn initial_state(terms: &mut Terms, spec: &Spec, prefix: &str) -> SymState {
    let policy = PointerPolicy::of(spec);
    SymState::fresh_named(terms, &spec.machine.shape, prefix, &|l| policy.allows(l))
}

/// Checks `prog` against the specification for every initial state.
pub fn verify(spec: &Spec, prog: &[Inst], cfg: &SolverConfig) -> Verdict {
    let m = &spec.machine;
    let mut terms = Terms::new();
    let init = initial_state(&mut terms, spec, "");
    let insts: Vec<SymInst> = prog.iter().map(|i| SymInst::concrete(&mut terms, i)).collect();
    let out = match SymExec::new(&mut terms, m).exec_program(&init, &insts) {
        Ok(o) => o,
        Err(e) => return Verdict::Unknown(e.to_string()),
    };
    let c = match spec_conditions(&mut terms, spec, &init, &out) {
        Ok(c) => c,
        Err(e) => return Verdict::Unknown(e.to_string()),
    };
    let np = terms.not(c.post);
    let nf = terms.not(c.frame);
    let bad = terms.or_all([np, nf, c.err]);
    let q = terms.and(c.pre, bad);
    let mut s = match Session::start(cfg) {
        Ok(s) => s,
        Err(e) => return Verdict::Unknown(e),
    };
    s.assert(&terms, q);
    match s.check() {
        SmtResult::Unsat => Verdict::Verified,
        SmtResult::Sat(model) => {
            let st = state_of_assignment(&terms, &m.shape, &init, &model);
            debug_assert!(!check_program(spec, &st, prog), "counterexample not confirmed by the interpreter");
            Verdict::Refuted(st)
        }
        SmtResult::Unknown(r) => Verdict::Unknown(r),
    }
}

/// The guard under which the symbolic state `st` denotes `c`.
pub fn state_equals(terms: &mut Terms, st: &SymState, c: &MachineState, shape: &crate::lang::Shape) -> TermId {
    let mut out = terms.t;
    for l in SymState::locations(shape) {
        let v = match l {
            Loc::Reg(r) => c.reg(r),
            Loc::Cell(m, i) => c.cell(m, i),
        };
        let cv = SymValue::from_value(terms, v);
        let e = values_equal(terms, st.get(l), &cv);
        out = terms.and(out, e);
    }
    out
}

/// A solver-backed source of initial states meeting the precondition.
pub struct PreStates<'a> {
    spec: &'a Spec,
    terms: Terms,
    init: SymState,
    session: Session,
    pub satisfiable: Option<bool>,
}

impl<'a> PreStates<'a> {
    pub fn new(spec: &'a Spec, cfg: &SolverConfig) -> Result<PreStates<'a>, String> {
        let mut terms = Terms::new();
        let init = initial_state(&mut terms, spec, "");
        let globals = spec_globals(&mut terms, spec, &init).map_err(|e| e.to_string())?;
        let pre = holds(&mut terms, spec, &globals, &init, None, &spec.pre).map_err(|e| e.to_string())?;
        let mut session = Session::start(cfg)?;
        session.assert(&terms, pre);
        Ok(PreStates { spec, terms, init, session, satisfiable: None })
    }

    fn model_state(&self, model: &crate::symexec::Assignment) -> MachineState {
        state_of_assignment(&self.terms, &self.spec.machine.shape, &self.init, model)
    }

    /// Some initial state different from every state in `avoid`.
    pub fn next(&mut self, avoid: &[MachineState]) -> Result<Option<MachineState>, String> {
        self.session.push();
        for a in avoid {
            let e = state_equals(&mut self.terms, &self.init, a, &self.spec.machine.shape);
            let ne = self.terms.not(e);
            self.session.assert(&self.terms, ne);
        }
        let r = self.session.check();
        self.session.pop();
        match r {
            SmtResult::Sat(m) => {
                self.satisfiable = Some(true);
                Ok(Some(self.model_state(&m)))
            }
            SmtResult::Unsat => {
                if avoid.is_empty() {
                    self.satisfiable = Some(false);
                }
                Ok(None)
            }
            SmtResult::Unknown(e) => Err(e),
        }
    }

    /// An initial state pulled towards a random target: a random subset of
    /// the target's variables is pinned, halving the subset until the
    /// precondition allows it.
    pub fn random<R: Rng>(&mut self, rng: &mut R) -> Result<Option<MachineState>, String> {
        let shape = &self.spec.machine.shape;
        let policy = PointerPolicy::of(self.spec);
        let target = random_state_with_pointers_at(shape, rng, 0.5, &|l| policy.allows(l));
        let goal = assignment_of(shape, &target);
        let mut names: Vec<&String> = goal.keys().collect();
        names.sort();
        let mut keep: Vec<&String> = names.into_iter().filter(|_| rng.gen_bool(0.7)).collect();
        loop {
            self.session.push();
            for n in &keep {
                let t = match &goal[*n] {
                    CVal::Bv(b) => {
                        let Some(v) = self.terms.vars().iter().position(|(x, _)| x == *n) else { continue };
                        let sort = self.terms.vars()[v].1;
                        let x = self.terms.var(n, sort);
                        let c = self.terms.bv(b.clone());
                        self.terms.eq(x, c)
                    }
                    CVal::Bool(_) => continue,
                };
                self.session.assert(&self.terms, t);
            }
            let r = self.session.check();
            self.session.pop();
            match r {
                SmtResult::Sat(m) => {
                    let mut full = goal.clone();
                    full.extend(m);
                    return Ok(Some(self.model_state(&full)));
                }
                SmtResult::Unsat if keep.is_empty() => return Ok(None),
                SmtResult::Unsat => keep.truncate(keep.len() / 2),
                SmtResult::Unknown(e) => return Err(e),
            }
        }
    }
}

/// Random initial states meeting the precondition: rejection sampling
/// first, then solver-guided sampling.
pub fn sample_pre_states<R: Rng>(spec: &Spec, n: usize, rng: &mut R, cfg: &SolverConfig) -> Result<Vec<MachineState>, String> {
    let shape = &spec.machine.shape;
    let policy = PointerPolicy::of(spec);
    let mut out = Vec::new();
    let mut solver: Option<PreStates> = None;
    while out.len() < n {
        let found = (0..64)
            .map(|_| random_state_with_pointers_at(shape, rng, 0.5, &|l| policy.allows(l)))
            .find(|s| pre_holds(spec, s));
        match found {
            Some(s) => out.push(s),
            None => {
                if solver.is_none() {
                    solver = Some(PreStates::new(spec, cfg)?);
                }
                match solver.as_mut().unwrap().random(rng)? {
                    Some(s) => out.push(s),
                    None => break,
                }
            }
        }
    }
    Ok(out)
}

/// Runs the program on `n` random precondition states with the
/// interpreter; returns the states on which the specification fails.
pub fn random_checks<R: Rng>(
    spec: &Spec,
    prog: &[Inst],
    n: usize,
    rng: &mut R,
    cfg: &SolverConfig,
) -> Result<Vec<MachineState>, String> {
    let states = sample_pre_states(spec, n, rng, cfg)?;
    Ok(crate::batch::failures(spec, prog, &states))
}

/// Wall time of `f` in milliseconds, with its result.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed().as_millis())
}
