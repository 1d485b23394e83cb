//! Symbolic programs: instruction slots whose operation and operands are
//! chosen by solver variables.

use super::gate::Gate;
use crate::lang::{Bitvec, RegId, RegionId, Type, Value};
use crate::machine::{Inst, Machine};
use crate::symexec::exec::SymInst;
use crate::symexec::{Assignment, CVal, Leaf, Sort, SymValue, TermId, Terms};

/// A choice among `k` options. Selector values past the last option pick
/// the last option, so every selector value denotes a choice.
#[derive(Clone, Debug)]
pub struct Choice {
    pub var: Option<String>,
    pub guards: Vec<TermId>,
}

impl Choice {
    pub fn new(terms: &mut Terms, name: &str, k: usize) -> Choice {
        assert!(k > 0, "choice without options");
        if k == 1 {
            return Choice { var: None, guards: vec![terms.t] };
        }
        let w = usize::BITS - (k - 1).leading_zeros();
        let x = terms.var(name, Sort::Bv(w));
        let mut guards = Vec::new();
        let mut earlier = Vec::new();
        for j in 0..k - 1 {
            let c = terms.bv_u64(w, j as u64);
            let g = terms.eq(x, c);
            guards.push(g);
            earlier.push(g);
        }
        let any = terms.or_all(earlier);
        let rest = terms.not(any);
        guards.push(rest);
        Choice { var: Some(name.to_string()), guards }
    }

    pub fn decode(&self, model: &Assignment) -> usize {
        let last = self.guards.len() - 1;
        match self.var.as_ref().and_then(|v| model.get(v)) {
            Some(CVal::Bv(b)) => b.to_u64().map_or(last, |v| (v as usize).min(last)),
            _ => 0,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Operand {
    Reg { choice: Choice, options: Vec<RegId> },
    Label { choice: Choice, options: Vec<RegionId> },
    Imm { var: String, term: TermId, width: u32 },
    Bool { var: String, term: TermId },
}

impl Operand {
    fn value(&self, terms: &mut Terms, m: &Machine) -> SymValue {
        match self {
            Operand::Reg { choice, options } => {
                let alts: Vec<(TermId, Leaf)> = choice.guards.iter().copied().zip(options.iter().map(|r| Leaf::Reg(*r))).collect();
                SymValue::from_alts(terms, alts)
            }
            Operand::Label { choice, options } => {
                let alts: Vec<(TermId, Leaf)> = choice
                    .guards
                    .iter()
                    .zip(options)
                    .map(|(g, r)| {
                        let p = m.shape.base_pointer(*r);
                        let off = terms.bv_u64(p.width, p.offset);
                        (*g, Leaf::Ptr(*r, off))
                    })
                    .collect();
                SymValue::from_alts(terms, alts)
            }
            Operand::Imm { term, .. } => SymValue::leaf(terms, Leaf::Bits(*term)),
            Operand::Bool { term, .. } => SymValue::leaf(terms, Leaf::Bool(*term)),
        }
    }

    fn decode(&self, m: &Machine, model: &Assignment) -> Value {
        match self {
            Operand::Reg { choice, options } => Value::Reg(options[choice.decode(model)]),
            Operand::Label { choice, options } => Value::Ptr(m.shape.base_pointer(options[choice.decode(model)])),
            Operand::Imm { var, width, .. } => match model.get(var) {
                Some(CVal::Bv(b)) => Value::Bits(b.clone()),
                _ => Value::Bits(Bitvec::zero(*width)),
            },
            Operand::Bool { var, .. } => Value::Bool(matches!(model.get(var), Some(CVal::Bool(true)))),
        }
    }

    /// Guard under which this register operand names `r`.
    pub fn names(&self, r: RegId) -> Option<TermId> {
        match self {
            Operand::Reg { choice, options } => options.iter().position(|x| *x == r).map(|i| choice.guards[i]),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SlotOp {
    pub op: usize,
    pub guard: TermId,
    pub operands: Vec<Operand>,
}

#[derive(Clone, Debug)]
pub struct Slot {
    pub choice: Choice,
    pub ops: Vec<SlotOp>,
}

/// A program of fixed length over the gated machine.
#[derive(Clone, Debug)]
pub struct SymbolicProgram {
    pub slots: Vec<Slot>,
}

fn operand(terms: &mut Terms, m: &Machine, gate: &Gate, name: &str, t: &Type) -> Option<Operand> {
    Some(match t {
        Type::Reg(w) => {
            let options: Vec<RegId> = gate.regs.iter().copied().filter(|r| m.shape.reg(*r).width == *w).collect();
            if options.is_empty() {
                return None;
            }
            Operand::Reg { choice: Choice::new(terms, name, options.len()), options }
        }
        Type::Label(w) => {
            let options: Vec<RegionId> = m
                .shape
                .region_ids()
                .filter(|r| m.shape.region(*r).label.is_some() && m.shape.region(*r).refw == *w)
                .collect();
            if options.is_empty() {
                return None;
            }
            Operand::Label { choice: Choice::new(terms, name, options.len()), options }
        }
        Type::Bits(w) => Operand::Imm { var: name.to_string(), term: terms.var(name, Sort::Bv(*w)), width: *w },
        Type::Bool => Operand::Bool { var: name.to_string(), term: terms.var(name, Sort::Bool) },
        _ => return None,
    })
}

impl SymbolicProgram {
    /// `n` slots, each choosing among the gated operations.
    pub fn new(terms: &mut Terms, m: &Machine, gate: &Gate, n: usize) -> SymbolicProgram {
        let mut slots = Vec::new();
        for i in 0..n {
            let mut cands = Vec::new();
            for &k in &gate.ops {
                let def = &m.ops[k];
                let ops: Option<Vec<Operand>> = def
                    .params
                    .iter()
                    .map(|(x, t)| operand(terms, m, gate, &format!("slot{i}.{}.{x}", def.name), t))
                    .collect();
                if let Some(ops) = ops {
                    cands.push((k, ops));
                }
            }
            if cands.is_empty() {
                return SymbolicProgram { slots: Vec::new() };
            }
            let choice = Choice::new(terms, &format!("slot{i}.op"), cands.len());
            let ops = cands
                .into_iter()
                .zip(&choice.guards)
                .map(|((op, operands), g)| SlotOp { op, guard: *g, operands })
                .collect();
            slots.push(Slot { choice, ops });
        }
        SymbolicProgram { slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn insts(&self, terms: &mut Terms, m: &Machine) -> Vec<SymInst> {
        self.slots
            .iter()
            .map(|s| SymInst {
                alts: s.ops.iter().map(|o| (o.guard, o.op, o.operands.iter().map(|x| x.value(terms, m)).collect())).collect(),
            })
            .collect()
    }

    pub fn decode(&self, m: &Machine, model: &Assignment) -> Vec<Inst> {
        self.slots
            .iter()
            .map(|s| {
                let o = &s.ops[s.choice.decode(model)];
                Inst { op: o.op, args: o.operands.iter().map(|x| x.decode(m, model)).collect() }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_range_selectors_pick_the_last_option() {
        let mut t = Terms::new();
        let c = Choice::new(&mut t, "s", 3);
        for (v, want) in [(0u64, 0usize), (1, 1), (2, 2), (3, 2)] {
            let mut a = Assignment::new();
            a.insert("s".into(), CVal::Bv(Bitvec::from_u64(2, v)));
            assert_eq!(c.decode(&a), want);
            let mut ev = t.evaluator(&a);
            let hot: Vec<usize> = (0..3).filter(|j| ev.eval_bool(c.guards[*j])).collect();
            assert_eq!(hot, vec![want]);
        }
    }
}
