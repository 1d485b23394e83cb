//! Per-operation read and write sets, found by running each operation body
//! symbolically on a fully symbolic state.

use crate::lang::{RegId, Shape, Type, Value};
use crate::machine::Machine;
use crate::symexec::exec::{Loc, SymInst, SymState};
use crate::symexec::{Leaf, SymExec, SymValue, TermId, Terms};
use std::collections::{BTreeSet, HashMap, HashSet};

/// What an operation may touch. Register operands are tracked by position;
/// everything else by location.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Footprint {
    /// Register operands whose previous contents may be used.
    pub reads_param: Vec<bool>,
    /// Register operands that may be overwritten.
    pub writes_param: Vec<bool>,
    pub implicit_reads: BTreeSet<RegId>,
    pub implicit_writes: BTreeSet<RegId>,
    pub reads_mem: bool,
    pub writes_mem: bool,
    pub branches: bool,
    /// False when the body needs operands the symbolic engine cannot leave
    /// open; such operations are not offered to the synthesizer.
    pub synthesizable: bool,
}

impl Footprint {
    pub fn reads_anything(&self) -> bool {
        self.reads_param.iter().any(|b| *b) || !self.implicit_reads.is_empty() || self.reads_mem
    }
}

pub fn value_terms(v: &SymValue, out: &mut Vec<TermId>) {
    for (g, l) in v.alts() {
        out.push(*g);
        match l {
            Leaf::Bool(t) | Leaf::Bits(t) | Leaf::Ptr(_, t) => out.push(*t),
            _ => {}
        }
    }
}

/// Free variables of each location of a fresh state.
fn location_vars(terms: &Terms, shape: &Shape, st: &SymState) -> HashMap<u32, Loc> {
    let mut out = HashMap::new();
    for l in SymState::locations(shape) {
        let mut ts = Vec::new();
        value_terms(st.get(l), &mut ts);
        for v in terms.free_vars(&ts) {
            out.insert(v, l);
        }
    }
    out
}

/// Symbolic operands for the non-register parameters of an operation.
fn open_operand(terms: &mut Terms, m: &Machine, name: &str, t: &Type) -> Option<SymValue> {
    Some(match t {
        Type::Bits(w) => {
            let x = terms.var(name, crate::symexec::Sort::Bv(*w));
            SymValue::leaf(terms, Leaf::Bits(x))
        }
        Type::Bool => {
            let x = terms.var(name, crate::symexec::Sort::Bool);
            SymValue::leaf(terms, Leaf::Bool(x))
        }
        Type::Label(w) => {
            let r = m.shape.region_ids().find(|r| m.shape.region(*r).label.is_some() && m.shape.region(*r).refw == *w)?;
            SymValue::from_value(terms, &Value::Ptr(m.shape.base_pointer(r)))
        }
        _ => return None,
    })
}

/// The footprint of operation `op`, unioned over register bindings that
/// give every register a turn in every operand position.
pub fn footprint(m: &Machine, op: usize) -> Footprint {
    let def = &m.ops[op];
    let shape = &m.shape;
    let regs: Vec<RegId> = shape.reg_ids().collect();
    let mut fp = Footprint {
        reads_param: vec![false; def.params.len()],
        writes_param: vec![false; def.params.len()],
        synthesizable: true,
        ..Footprint::default()
    };
    for rot in 0..regs.len().max(1) {
        let mut terms = Terms::new();
        let init = SymState::fresh(&mut terms, shape, &|_| true);
        let loc_vars = location_vars(&terms, shape, &init);
        let mut args = Vec::new();
        let mut bound: Vec<Option<RegId>> = Vec::new();
        for (p, (x, t)) in def.params.iter().enumerate() {
            if let Type::Reg(w) = t {
                let same: Vec<RegId> = regs.iter().copied().filter(|r| shape.reg(*r).width == *w).collect();
                if same.is_empty() {
                    fp.synthesizable = false;
                    return fp;
                }
                let r = same[(p + rot) % same.len()];
                bound.push(Some(r));
                args.push(SymValue::from_value(&mut terms, &Value::Reg(r)));
            } else {
                bound.push(None);
                match open_operand(&mut terms, m, &format!("operand.{x}"), t) {
                    Some(v) => args.push(v),
                    None => {
                        fp.synthesizable = false;
                        return fp;
                    }
                }
            }
        }
        let inst = SymInst { alts: vec![(terms.t, op, args)] };
        let out = match SymExec::new(&mut terms, m).exec_inst(&init, &inst) {
            Ok(s) => s,
            Err(_) => {
                fp.synthesizable = false;
                return fp;
            }
        };
        let mut outputs = vec![out.err, out.br];
        let mut changed = Vec::new();
        for l in SymState::locations(shape) {
            if out.get(l) != init.get(l) {
                value_terms(out.get(l), &mut outputs);
                changed.push(l);
            }
        }
        let zero = terms.bv_u64(8, 0);
        if out.br != zero {
            fp.branches = true;
        }
        let used: HashSet<Loc> = terms.free_vars(&outputs).into_iter().filter_map(|v| loc_vars.get(&v).copied()).collect();
        for l in used {
            match l {
                Loc::Reg(r) => match bound.iter().position(|b| *b == Some(r)) {
                    Some(p) => fp.reads_param[p] = true,
                    None => {
                        fp.implicit_reads.insert(r);
                    }
                },
                Loc::Cell(..) => fp.reads_mem = true,
            }
        }
        for l in changed {
            match l {
                Loc::Reg(r) => match bound.iter().position(|b| *b == Some(r)) {
                    Some(p) => fp.writes_param[p] = true,
                    None => {
                        fp.implicit_writes.insert(r);
                    }
                },
                Loc::Cell(..) => fp.writes_mem = true,
            }
        }
    }
    fp
}

pub fn footprints(m: &Machine) -> Vec<Footprint> {
    (0..m.ops.len()).map(|k| footprint(m, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_machine;

    fn machine() -> Machine {
        let text = "letstate r0: 4 reg\nletstate r1: 4 reg\nletstate r2: 4 reg\nletstate control f: 1 reg\n\
            letstate M: 4 bit 4 len 4 ref memory with buf\n\
            defop MOV rd: 4 reg rs: 4 reg { txt = \"mov\", sem = [ *rd <- *rs ] }\n\
            defop SEL rd: 4 reg rs: 4 reg { txt = \"sel\", sem = [ if *f == 0b1 then *rd <- *rs else skip ] }\n\
            defop LD rd: 4 reg rs: 4 reg { txt = \"ld\", sem = [ *rd <- fetch( *rs, 4) ] }\n\
            defop ST rs: 4 reg rt: 4 reg { txt = \"st\", sem = [ store[ *rs, 4] <- *rt ] }\n\
            defop SKIP n: 8 bit { txt = \"skip\", sem = [ BRANCH(n) ] }";
        Machine::from_ast(&parse_machine(text).unwrap(), &[]).unwrap()
    }

    #[test]
    fn moves_read_the_source_and_write_the_destination() {
        let m = machine();
        let fp = footprint(&m, 0);
        assert_eq!(fp.reads_param, vec![false, true]);
        assert_eq!(fp.writes_param, vec![true, false]);
        assert!(fp.implicit_reads.is_empty() && !fp.reads_mem && !fp.branches);
    }

    #[test]
    fn conditional_moves_read_the_flag_and_the_old_value() {
        let m = machine();
        let fp = footprint(&m, 1);
        assert_eq!(fp.reads_param, vec![true, true]);
        let f = m.shape.reg_by_name("f").unwrap();
        assert_eq!(fp.implicit_reads, [f].into_iter().collect());
    }

    #[test]
    fn memory_and_branch_effects_are_seen() {
        let m = machine();
        let ld = footprint(&m, 2);
        assert!(ld.reads_mem && !ld.writes_mem && ld.reads_param[1]);
        let st = footprint(&m, 3);
        assert!(st.writes_mem && st.reads_param == vec![true, true]);
        assert!(footprint(&m, 4).branches);
    }
}
