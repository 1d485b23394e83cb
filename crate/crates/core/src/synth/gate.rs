//! State gating: the registers and operations a specification needs.

use super::footprint::Footprint;
use crate::lang::{RegId, Type};
use crate::machine::{Machine, Spec};
use std::collections::BTreeSet;

/// The part of a machine offered to the synthesizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub regs: BTreeSet<RegId>,
    pub ops: Vec<usize>,
}

fn op_fits(m: &Machine, fp: &Footprint, op: usize, regs: &BTreeSet<RegId>, allowed_implicit: &dyn Fn(RegId) -> bool) -> bool {
    if !fp.synthesizable {
        return false;
    }
    let operands_ok = m.ops[op].params.iter().all(|(_, t)| match t {
        Type::Reg(w) => regs.iter().any(|r| m.shape.reg(*r).width == *w),
        _ => true,
    });
    operands_ok && fp.implicit_reads.iter().chain(&fp.implicit_writes).all(|r| allowed_implicit(*r))
}

/// Every register and every operation the symbolic engine supports.
pub fn ungated(m: &Machine, fps: &[Footprint]) -> Gate {
    let regs: BTreeSet<RegId> = m.shape.reg_ids().collect();
    let ops = (0..m.ops.len()).filter(|k| op_fits(m, &fps[*k], *k, &regs, &|_| true)).collect();
    Gate { regs, ops }
}

/// Keeps the registers the specification mentions, the `dontgate`
/// registers, and the control registers that retained operations touch
/// implicitly; drops operations that need anything else.
pub fn gate_state(m: &Machine, spec: &Spec, fps: &[Footprint]) -> Gate {
    let shape = &m.shape;
    let mut regs: BTreeSet<RegId> = spec.mentioned_regs.clone();
    regs.extend(spec.modifiable_regs.iter().copied());
    regs.extend(shape.reg_ids().filter(|r| shape.reg(*r).dontgate));
    loop {
        let keep = |r: RegId| regs.contains(&r) || shape.reg(r).control;
        let ops: Vec<usize> = (0..m.ops.len()).filter(|k| op_fits(m, &fps[*k], *k, &regs, &keep)).collect();
        let mut grown = regs.clone();
        for k in &ops {
            grown.extend(fps[*k].implicit_reads.iter().chain(&fps[*k].implicit_writes).copied());
        }
        if grown == regs {
            return Gate { regs, ops };
        }
        regs = grown;
    }
}
