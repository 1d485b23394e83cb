//! Random instructions, programs, and machine states for testing.

use crate::lang::{Bitvec, MachineState, Pointer, RegId, RegionId, Shape, Type, Value};
use crate::symexec::exec::Loc;
use crate::machine::{Inst, Machine};
use num_bigint::BigUint;
use rand::Rng;

fn random_bits<R: Rng>(rng: &mut R, w: u32) -> Bitvec {
    let words: Vec<u32> = (0..w.div_ceil(32)).map(|_| rng.gen()).collect();
    Bitvec::new(w, BigUint::from_slice(&words))
}

/// A random operand of type `t`; 8-bit immediates favour short branch codes.
pub fn random_operand<R: Rng>(m: &Machine, t: &Type, rng: &mut R) -> Option<Value> {
    Some(match t {
        Type::Reg(w) => {
            let regs: Vec<RegId> = m.shape.reg_ids().filter(|r| m.shape.reg(*r).width == *w).collect();
            if regs.is_empty() {
                return None;
            }
            Value::Reg(regs[rng.gen_range(0..regs.len())])
        }
        Type::Bits(8) if rng.gen_bool(0.7) => {
            let code = if rng.gen_bool(0.2) { 0xff } else { rng.gen_range(0..4) };
            Value::bits(8, code)
        }
        Type::Bits(w) => Value::Bits(random_bits(rng, *w)),
        Type::Label(w) => {
            let labels: Vec<Pointer> = m
                .shape
                .region_ids()
                .filter(|r| m.shape.region(*r).label.is_some() && m.shape.region(*r).refw == *w)
                .map(|r| m.shape.base_pointer(r))
                .collect();
            if labels.is_empty() {
                return None;
            }
            Value::Ptr(labels[rng.gen_range(0..labels.len())].clone())
        }
        Type::Bool => Value::Bool(rng.gen()),
        _ => return None,
    })
}

pub fn random_inst<R: Rng>(m: &Machine, rng: &mut R) -> Inst {
    loop {
        let op = rng.gen_range(0..m.ops.len());
        let args: Option<Vec<Value>> = m.ops[op].params.iter().map(|(_, t)| random_operand(m, t, rng)).collect();
        if let Some(args) = args {
            return Inst { op, args };
        }
    }
}

pub fn random_program<R: Rng>(m: &Machine, max_len: usize, rng: &mut R) -> Vec<Inst> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| random_inst(m, rng)).collect()
}

/// A random state in which each word location of pointer width holds a
/// pointer with probability `p`; offsets are usually inside the region.
pub fn random_state_with_pointers<R: Rng>(shape: &Shape, rng: &mut R, p: f64) -> MachineState {
    random_state_with_pointers_at(shape, rng, p, &|_| true)
}

/// Like `random_state_with_pointers`, but only locations accepted by
/// `allowed` may hold pointers.
pub fn random_state_with_pointers_at<R: Rng>(
    shape: &Shape,
    rng: &mut R,
    p: f64,
    allowed: &dyn Fn(Loc) -> bool,
) -> MachineState {
    let mut st = shape.random_state(rng);
    let pick = |rng: &mut R, w: u32| -> Option<Value> {
        let regions: Vec<_> = shape.region_ids().filter(|r| shape.region(*r).refw == w).collect();
        if regions.is_empty() || !rng.gen_bool(p) {
            return None;
        }
        let r = regions[rng.gen_range(0..regions.len())];
        let info = shape.region(r);
        let span = (info.len as u64 * info.stride()).max(1);
        let offset = if rng.gen_bool(0.8) {
            rng.gen_range(0..span)
        } else {
            random_bits(rng, w).to_u64().unwrap_or(0)
        };
        Some(Value::Ptr(Pointer { region: r, offset, width: w }))
    };
    for r in shape.reg_ids() {
        if !allowed(Loc::Reg(r)) {
            continue;
        }
        if let Some(v) = pick(rng, shape.reg(r).width) {
            st.set_reg(r, v);
        }
    }
    for (m, cells) in st.mem.iter_mut().enumerate() {
        let w = shape.regions[m].cell;
        for (i, c) in cells.iter_mut().enumerate() {
            if !allowed(Loc::Cell(RegionId(m as u32), i)) {
                continue;
            }
            if let Some(v) = pick(rng, w) {
                *c = v;
            }
        }
    }
    st
}
