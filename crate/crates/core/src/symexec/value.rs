//! Symbolic values as guarded sums over value kinds.
//!
//! A value is a list of alternatives with pairwise exclusive, jointly
//! exhaustive guards. Each kind appears at most once: every bitvector of one
//! width shares one alternative, and every pointer into one region shares one
//! alternative whose offset is an ite over the merged offsets. Pointers into
//! different regions, and pointers versus bitvectors, stay apart under their
//! own guards.

use super::term::{Assignment, Evaluator, Sort, TermId, Terms};
use crate::lang::{Bitvec, Pointer, RegId, RegionId, Shape, Value};
use num_bigint::BigInt;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Leaf {
    Unit,
    Bool(TermId),
    Bits(TermId),
    Ptr(RegionId, TermId),
    Int(BigInt),
    Str(String),
    Reg(RegId),
    RegSet(BTreeSet<RegId>, u32),
    Fail,
}

/// Alternatives of one kind merge; different kinds stay separate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Unit,
    Bool,
    Bits(u32),
    Ptr(RegionId),
    Int(BigInt),
    Str(String),
    Reg(RegId),
    RegSet(BTreeSet<RegId>, u32),
    Fail,
}

impl Leaf {
    pub fn kind(&self, terms: &Terms) -> Kind {
        match self {
            Leaf::Unit => Kind::Unit,
            Leaf::Bool(_) => Kind::Bool,
            Leaf::Bits(t) => Kind::Bits(terms.width(*t)),
            Leaf::Ptr(r, _) => Kind::Ptr(*r),
            Leaf::Int(i) => Kind::Int(i.clone()),
            Leaf::Str(s) => Kind::Str(s.clone()),
            Leaf::Reg(r) => Kind::Reg(*r),
            Leaf::RegSet(s, w) => Kind::RegSet(s.clone(), *w),
            Leaf::Fail => Kind::Fail,
        }
    }

    fn payload(&self) -> Option<TermId> {
        match self {
            Leaf::Bool(t) | Leaf::Bits(t) | Leaf::Ptr(_, t) => Some(*t),
            _ => None,
        }
    }

    fn with_payload(&self, t: TermId) -> Leaf {
        match self {
            Leaf::Bool(_) => Leaf::Bool(t),
            Leaf::Bits(_) => Leaf::Bits(t),
            Leaf::Ptr(r, _) => Leaf::Ptr(*r, t),
            l => l.clone(),
        }
    }

    pub fn is_word(&self) -> bool {
        matches!(self, Leaf::Bits(_) | Leaf::Ptr(..))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymValue {
    alts: Vec<(TermId, Leaf)>,
}

/// A value in tree form, as produced before canonicalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymTree {
    Leaf(Leaf),
    Ite(TermId, Box<SymTree>, Box<SymTree>),
}

impl SymValue {
    pub fn leaf(terms: &Terms, l: Leaf) -> SymValue {
        SymValue { alts: vec![(terms.t, l)] }
    }

    pub fn fail(terms: &Terms) -> SymValue {
        SymValue::leaf(terms, Leaf::Fail)
    }

    pub fn alts(&self) -> &[(TermId, Leaf)] {
        &self.alts
    }

    /// The single alternative, when the value has exactly one kind.
    pub fn single(&self) -> Option<&Leaf> {
        match self.alts.as_slice() {
            [(_, l)] => Some(l),
            _ => None,
        }
    }

    /// Builds a canonical value from guarded alternatives whose guards are
    /// exclusive and exhaustive.
    pub fn from_alts(terms: &mut Terms, alts: impl IntoIterator<Item = (TermId, Leaf)>) -> SymValue {
        let mut keyed: Vec<(Kind, TermId, Leaf)> = Vec::new();
        for (g, l) in alts {
            if terms.is_false(g) {
                continue;
            }
            let k = l.kind(terms);
            match keyed.iter_mut().find(|(k2, _, _)| *k2 == k) {
                Some(slot) => {
                    let (g0, l0) = (slot.1, slot.2.clone());
                    slot.1 = terms.or(g0, g);
                    if let (Some(p0), Some(p)) = (l0.payload(), l.payload()) {
                        let merged = terms.ite(g0, p0, p);
                        slot.2 = l0.with_payload(merged);
                    }
                }
                None => keyed.push((k, g, l)),
            }
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        let mut alts: Vec<(TermId, Leaf)> = keyed.into_iter().map(|(_, g, l)| (g, l)).collect();
        if alts.len() == 1 {
            alts[0].0 = terms.t;
        }
        assert!(!alts.is_empty(), "symbolic value without alternatives");
        SymValue { alts }
    }

    pub fn from_value(terms: &mut Terms, v: &Value) -> SymValue {
        let l = match v {
            Value::Unit => Leaf::Unit,
            Value::Bool(b) => Leaf::Bool(terms.bool(*b)),
            Value::Int(i) => Leaf::Int(i.clone()),
            Value::Bits(b) => Leaf::Bits(terms.bv(b.clone())),
            Value::Ptr(p) => Leaf::Ptr(p.region, terms.bv_u64(p.width, p.offset)),
            Value::Reg(r) => Leaf::Reg(*r),
            Value::RegSet(s, w) => Leaf::RegSet(s.clone(), *w),
            Value::Str(s) => Leaf::Str(s.clone()),
            Value::Fail => Leaf::Fail,
        };
        SymValue::leaf(terms, l)
    }

    /// The concrete value when every part is constant.
    pub fn as_concrete(&self, terms: &Terms, shape: &Shape) -> Option<Value> {
        let [(_, l)] = self.alts.as_slice() else { return None };
        Some(match l {
            Leaf::Unit => Value::Unit,
            Leaf::Bool(t) => Value::Bool(terms.as_bool(*t)?),
            Leaf::Bits(t) => Value::Bits(terms.as_bv(*t)?.clone()),
            Leaf::Ptr(r, t) => Value::Ptr(Pointer {
                region: *r,
                offset: terms.as_bv(*t)?.to_u64()?,
                width: shape.region(*r).refw,
            }),
            Leaf::Int(i) => Value::Int(i.clone()),
            Leaf::Str(s) => Value::Str(s.clone()),
            Leaf::Reg(r) => Value::Reg(*r),
            Leaf::RegSet(s, w) => Value::RegSet(s.clone(), *w),
            Leaf::Fail => Value::Fail,
        })
    }

    /// The guard under which the value is an alternative of the given kind.
    pub fn guard_where(&self, terms: &mut Terms, pred: impl Fn(&Leaf) -> bool) -> TermId {
        let gs: Vec<TermId> = self.alts.iter().filter(|(_, l)| pred(l)).map(|(g, _)| *g).collect();
        terms.or_all(gs)
    }

    pub fn fail_guard(&self, terms: &mut Terms) -> TermId {
        self.guard_where(terms, |l| matches!(l, Leaf::Fail))
    }

    /// Drops the alternatives rejected by `keep`; the remaining guards are
    /// then relative to the assumption that a kept alternative applies.
    pub fn restrict(&self, terms: &mut Terms, keep: impl Fn(&Leaf) -> bool) -> Option<SymValue> {
        let alts: Vec<(TermId, Leaf)> = self.alts.iter().filter(|(_, l)| keep(l)).cloned().collect();
        if alts.is_empty() {
            return None;
        }
        Some(SymValue::from_alts(terms, alts))
    }

    pub fn to_tree(&self) -> SymTree {
        let mut it = self.alts.iter().rev();
        let (_, last) = it.next().expect("nonempty");
        let mut t = SymTree::Leaf(last.clone());
        for (g, l) in it {
            t = SymTree::Ite(*g, Box::new(SymTree::Leaf(l.clone())), Box::new(t));
        }
        t
    }

    /// The concrete value under an assignment.
    pub fn concretize(&self, ev: &mut Evaluator, shape: &Shape) -> Value {
        let (_, l) = self
            .alts
            .iter()
            .find(|(g, _)| ev.eval_bool(*g))
            .unwrap_or_else(|| self.alts.last().unwrap());
        concretize_leaf(l, ev, shape)
    }
}

pub fn concretize_leaf(l: &Leaf, ev: &mut Evaluator, shape: &Shape) -> Value {
    match l {
        Leaf::Unit => Value::Unit,
        Leaf::Bool(t) => Value::Bool(ev.eval_bool(*t)),
        Leaf::Bits(t) => Value::Bits(ev.eval_bv(*t)),
        Leaf::Ptr(r, t) => Value::Ptr(Pointer {
            region: *r,
            offset: ev.eval_bv(*t).to_u64().unwrap_or(0),
            width: shape.region(*r).refw,
        }),
        Leaf::Int(i) => Value::Int(i.clone()),
        Leaf::Str(s) => Value::Str(s.clone()),
        Leaf::Reg(r) => Value::Reg(*r),
        Leaf::RegSet(s, w) => Value::RegSet(s.clone(), *w),
        Leaf::Fail => Value::Fail,
    }
}

/// `g ? a : b` in canonical form.
pub fn merge_values(terms: &mut Terms, g: TermId, a: &SymValue, b: &SymValue) -> SymValue {
    if a == b || terms.is_true(g) {
        return a.clone();
    }
    if terms.is_false(g) {
        return b.clone();
    }
    let ng = terms.not(g);
    let mut alts = Vec::with_capacity(a.alts.len() + b.alts.len());
    let mut from_a: Vec<(Kind, TermId, Leaf)> = Vec::new();
    for (ga, l) in &a.alts {
        let guard = terms.and(g, *ga);
        from_a.push((l.kind(terms), guard, l.clone()));
    }
    let mut from_b: Vec<(Kind, TermId, Leaf)> = Vec::new();
    for (gb, l) in &b.alts {
        let guard = terms.and(ng, *gb);
        from_b.push((l.kind(terms), guard, l.clone()));
    }
    // Kinds present on both sides merge their payloads under `g` itself,
    // which keeps the offsets of same-region pointers as `ite g x y`.
    for (k, ga, la) in from_a {
        match from_b.iter().position(|(kb, _, _)| *kb == k) {
            Some(i) => {
                let (_, gb, lb) = from_b.remove(i);
                let guard = terms.or(ga, gb);
                let leaf = match (la.payload(), lb.payload()) {
                    (Some(pa), Some(pb)) => {
                        let p = terms.ite(g, pa, pb);
                        la.with_payload(p)
                    }
                    _ => la,
                };
                alts.push((guard, leaf));
            }
            None => alts.push((ga, la)),
        }
    }
    alts.extend(from_b.into_iter().map(|(_, g, l)| (g, l)));
    SymValue::from_alts(terms, alts)
}

/// Flattens a tree of ites into the canonical guarded-sum form.
pub fn canonicalize(terms: &mut Terms, t: &SymTree) -> SymValue {
    match t {
        SymTree::Leaf(l) => SymValue::leaf(terms, l.clone()),
        SymTree::Ite(g, a, b) => {
            let a = canonicalize(terms, a);
            let b = canonicalize(terms, b);
            merge_values(terms, *g, &a, &b)
        }
    }
}

/// A tree evaluated directly under an assignment.
pub fn concretize_tree(t: &SymTree, ev: &mut Evaluator, shape: &Shape) -> Value {
    match t {
        SymTree::Leaf(l) => concretize_leaf(l, ev, shape),
        SymTree::Ite(g, a, b) => {
            if ev.eval_bool(*g) {
                concretize_tree(a, ev, shape)
            } else {
                concretize_tree(b, ev, shape)
            }
        }
    }
}

/// A fresh variable of a location that may hold a pointer into any region
/// of matching reference width: a tag selects the region, zero meaning a
/// plain bitvector.
pub fn fresh_word(
    terms: &mut Terms,
    shape: &Shape,
    name: &str,
    width: u32,
    may_be_pointer: bool,
) -> SymValue {
    let x = terms.var(name, Sort::Bv(width));
    let regions: Vec<RegionId> = shape.region_ids().filter(|r| shape.region(*r).refw == width).collect();
    if !may_be_pointer || regions.is_empty() {
        return SymValue::leaf(terms, Leaf::Bits(x));
    }
    let tw = tag_width(shape);
    let tag = terms.var(&tag_name(name), Sort::Bv(tw));
    let mut alts = Vec::new();
    let mut ptr_guards = Vec::new();
    for r in regions {
        let k = terms.bv_u64(tw, r.0 as u64 + 1);
        let g = terms.eq(tag, k);
        ptr_guards.push(g);
        alts.push((g, Leaf::Ptr(r, x)));
    }
    let any = terms.or_all(ptr_guards);
    let not_ptr = terms.not(any);
    alts.push((not_ptr, Leaf::Bits(x)));
    SymValue::from_alts(terms, alts)
}

/// Bits needed for region tags, with zero reserved for non-pointers.
pub fn tag_width(shape: &Shape) -> u32 {
    let n = shape.regions.len() as u64 + 1;
    (64 - (n - 1).leading_zeros()).max(1)
}

pub fn tag_name(name: &str) -> String {
    format!("{name}.tag")
}

/// Assigns the variables of `fresh_word` so that it denotes `v`.
pub fn assign_word(assign: &mut Assignment, shape: &Shape, name: &str, v: &Value) {
    use super::term::CVal;
    let tw = tag_width(shape);
    match v {
        Value::Bits(b) => {
            assign.insert(name.to_string(), CVal::Bv(b.clone()));
            assign.insert(tag_name(name), CVal::Bv(Bitvec::zero(tw)));
        }
        Value::Ptr(p) => {
            assign.insert(name.to_string(), CVal::Bv(Bitvec::from_u64(p.width, p.offset)));
            assign.insert(tag_name(name), CVal::Bv(Bitvec::from_u64(tw, p.region.0 as u64 + 1)));
        }
        _ => {}
    }
}
