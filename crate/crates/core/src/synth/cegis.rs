//! Counterexample-guided synthesis over symbolic programs.

use super::depend::{analyze, dependency_constraints, DepInfo};
use super::footprint::{footprints, Footprint};
use super::gate::{gate_state, ungated, Gate};
use super::program::{Operand, SymbolicProgram};
use super::verify::{verify, PreStates, Verdict};
use super::{Options, Stats};
use crate::lang::{MachineState, RegId};
use crate::machine::{Inst, Spec};
use crate::smt::{Session, SmtResult};
use crate::symexec::exec::{spec_conditions, SymInst, SymState};
use crate::symexec::{SymExec, TermId, Terms};
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found(Vec<Inst>),
    /// No program of the requested length exists over the gated machine.
    NoSolution,
    Unknown(String),
}

/// Registers every slot may read: those the specification mentions or may
/// modify, control registers, and `dontgate` registers.
pub fn static_available(spec: &Spec) -> BTreeSet<RegId> {
    let shape = &spec.machine.shape;
    let mut out: BTreeSet<RegId> = spec.mentioned_regs.union(&spec.modifiable_regs).copied().collect();
    out.extend(shape.reg_ids().filter(|r| shape.reg(*r).control || shape.reg(*r).dontgate));
    out
}

/// Every register read by slot `i` is statically available or written by
/// an earlier slot.
pub fn rw_constraints(terms: &mut Terms, spec: &Spec, sp: &SymbolicProgram, fps: &[Footprint]) -> TermId {
    let avail = static_available(spec);
    let mut written: BTreeMap<RegId, TermId> = BTreeMap::new();
    let mut out = terms.t;
    for slot in &sp.slots {
        let mut writes: Vec<(RegId, TermId)> = Vec::new();
        for o in &slot.ops {
            let fp = &fps[o.op];
            let mut reads: Vec<(RegId, TermId)> = fp.implicit_reads.iter().map(|r| (*r, o.guard)).collect();
            for r in &fp.implicit_writes {
                writes.push((*r, o.guard));
            }
            for (p, x) in o.operands.iter().enumerate() {
                let Operand::Reg { choice, options } = x else { continue };
                for (g, r) in choice.guards.iter().zip(options) {
                    let both = terms.and(o.guard, *g);
                    if fp.reads_param[p] {
                        reads.push((*r, both));
                    }
                    if fp.writes_param[p] {
                        writes.push((*r, both));
                    }
                }
            }
            for (r, g) in reads {
                if avail.contains(&r) {
                    continue;
                }
                let w = written.get(&r).copied().unwrap_or(terms.f);
                let c = terms.implies(g, w);
                out = terms.and(out, c);
            }
        }
        for (r, g) in writes {
            let w = written.get(&r).copied().unwrap_or(terms.f);
            let t = terms.or(w, g);
            written.insert(r, t);
        }
    }
    out
}

/// Per-specification synthesis state shared across program lengths.
pub struct Engine {
    pub spec: Rc<Spec>,
    pub opts: Options,
    pub fps: Vec<Footprint>,
    pub gate: Gate,
    pub deps: Option<DepInfo>,
    pub stats: Stats,
    first: Option<Option<MachineState>>,
}

impl Engine {
    pub fn new(spec: &Spec, opts: Options) -> Engine {
        let t = Instant::now();
        let m = &spec.machine;
        let fps = footprints(m);
        let gate = if opts.gate { gate_state(m, spec, &fps) } else { ungated(m, &fps) };
        let mut stats = Stats::default();
        stats.analysis_ms += t.elapsed().as_millis();
        Engine { spec: Rc::new(spec.clone()), opts, fps, gate, deps: None, stats, first: None }
    }

    fn deps(&mut self) -> Option<&DepInfo> {
        if !self.opts.dep {
            return None;
        }
        if self.deps.is_none() {
            let t = Instant::now();
            self.deps = Some(analyze(&self.spec, &self.opts.solver).unwrap_or_default());
            self.stats.analysis_ms += t.elapsed().as_millis();
        }
        self.deps.as_ref()
    }

    /// The solver-generated first counterexample, or `None` when no state
    /// meets the precondition.
    fn first_state(&mut self) -> Result<Option<MachineState>, String> {
        if let Some(f) = &self.first {
            return Ok(f.clone());
        }
        let mut p = PreStates::new(&self.spec, &self.opts.solver)?;
        let f = p.next(&[])?;
        self.first = Some(f.clone());
        Ok(f)
    }

    fn remaining(deadline: Option<Instant>) -> Option<u64> {
        deadline.map(|d| d.saturating_duration_since(Instant::now()).as_millis() as u64)
    }

    fn verify_timed(&mut self, prog: &[Inst]) -> Verdict {
        let t = Instant::now();
        let v = verify(&self.spec, prog, &self.opts.solver);
        self.stats.verify_ms += t.elapsed().as_millis();
        v
    }

    /// Guess-and-verify at exactly `n` instructions.
    pub fn cegis(&mut self, n: usize, deadline: Option<Instant>) -> Outcome {
        let spec = self.spec.clone();
        let m = &spec.machine;
        self.stats.stage = self.stats.stage.max(n);
        let mut terms = Terms::new();
        let sp = SymbolicProgram::new(&mut terms, m, &self.gate, n);
        if sp.len() < n {
            return Outcome::NoSolution;
        }
        let first = match self.first_state() {
            Ok(f) => f,
            Err(e) => return Outcome::Unknown(e),
        };
        let Some(first) = first else {
            return Outcome::Found(sp.decode(m, &Default::default()));
        };
        let mut session = match Session::start(&self.opts.solver) {
            Ok(s) => s,
            Err(e) => return Outcome::Unknown(e),
        };
        if self.opts.rw {
            let c = rw_constraints(&mut terms, &self.spec, &sp, &self.fps);
            session.assert(&terms, c);
        }
        if let Some(deps) = self.deps().cloned() {
            let c = dependency_constraints(&mut terms, &m.shape, &sp, &self.fps, &deps);
            session.assert(&terms, c);
        }
        let insts: Vec<SymInst> = sp.insts(&mut terms, m);
        let mut cexs: Vec<MachineState> = Vec::new();
        let mut next = first;
        loop {
            if Self::remaining(deadline) == Some(0) {
                return Outcome::Unknown("timeout".into());
            }
            let t = Instant::now();
            let st = SymState::from_concrete(&mut terms, &next);
            let ok = SymExec::new(&mut terms, m)
                .exec_program(&st, &insts)
                .map_err(|e| e.to_string())
                .and_then(|out| spec_conditions(&mut terms, &self.spec, &st, &out).map_err(|e| e.to_string()));
            let c = match ok {
                Ok(c) => c,
                Err(e) => return Outcome::Unknown(e),
            };
            let ne = terms.not(c.err);
            let good = terms.and_all([c.post, c.frame, ne]);
            session.assert(&terms, good);
            cexs.push(next);
            self.stats.counterexamples += 1;
            session.set_timeout(Self::remaining(deadline).map(|ms| ms.max(1)));
            let r = session.check();
            self.stats.guess_ms += t.elapsed().as_millis();
            self.stats.cegis_iterations += 1;
            let model = match r {
                SmtResult::Sat(model) => model,
                SmtResult::Unsat => return Outcome::NoSolution,
                SmtResult::Unknown(e) => return Outcome::Unknown(e),
            };
            let prog = sp.decode(m, &model);
            match self.verify_timed(&prog) {
                Verdict::Verified => return Outcome::Found(prog),
                Verdict::Refuted(c) => {
                    if cexs.contains(&c) {
                        return Outcome::Unknown("counterexample repeated".into());
                    }
                    next = c;
                }
                Verdict::Unknown(e) => return Outcome::Unknown(e),
            }
        }
    }

    /// Lengths `from..=to` in order; the first success wins.
    pub fn search(&mut self, from: usize, to: usize, deadline: Option<Instant>) -> Outcome {
        for n in from..=to {
            match self.cegis(n, deadline) {
                Outcome::NoSolution => continue,
                other => return other,
            }
        }
        Outcome::NoSolution
    }
}

/// Tries lengths 0, 1, 2, … up to the configured maximum within the budget.
pub fn synthesize(spec: &Spec, opts: &Options) -> (Outcome, Stats) {
    let start = Instant::now();
    let deadline = opts.timeout.map(|t| start + t);
    let mut e = Engine::new(spec, opts.clone());
    let r = e.search(0, opts.max_len, deadline);
    e.stats.total_ms = start.elapsed().as_millis();
    (r, e.stats)
}

pub fn duration_ms(d: Duration) -> u64 {
    d.as_millis() as u64
}
