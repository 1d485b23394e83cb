//! Hash-consed bitvector and boolean terms with local simplification.

use crate::lang::Bitvec;
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Bool,
    Bv(u32),
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => write!(f, "Bool"),
            Sort::Bv(w) => write!(f, "(_ BitVec {w})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BvOp {
    Add,
    Sub,
    Mul,
    Udiv,
    And,
    Or,
    Xor,
    Shl,
    Lshr,
    Ashr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Ult,
    Ule,
    Slt,
    Sle,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    BoolConst(bool),
    BvConst(Bitvec),
    Var(u32),
    Not(TermId),
    And(TermId, TermId),
    Or(TermId, TermId),
    Ite(TermId, TermId, TermId),
    Eq(TermId, TermId),
    Bv(BvOp, TermId, TermId),
    BvNot(TermId),
    BvNeg(TermId),
    Cmp(CmpOp, TermId, TermId),
    /// Half-open bit range `lo..hi`.
    Extract(u32, u32, TermId),
    /// Zero extension or truncation to the given width.
    Resize(u32, TermId),
}

/// A concrete term value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CVal {
    Bool(bool),
    Bv(Bitvec),
}

impl CVal {
    pub fn as_bool(&self) -> bool {
        matches!(self, CVal::Bool(true))
    }

    pub fn as_bv(&self) -> &Bitvec {
        match self {
            CVal::Bv(b) => b,
            CVal::Bool(_) => panic!("boolean where a bitvector was expected"),
        }
    }
}

/// Values for free variables, keyed by variable name.
pub type Assignment = HashMap<String, CVal>;

/// The term store. Structurally equal terms share one id.
#[derive(Clone, Debug)]
pub struct Terms {
    nodes: Vec<Node>,
    sorts: Vec<Sort>,
    table: HashMap<Node, TermId>,
    vars: Vec<(String, Sort)>,
    var_table: HashMap<String, u32>,
    pub t: TermId,
    pub f: TermId,
}

impl Default for Terms {
    fn default() -> Self {
        Terms::new()
    }
}

fn apply_bv(op: BvOp, a: &Bitvec, b: &Bitvec) -> Bitvec {
    match op {
        BvOp::Add => a.add(b),
        BvOp::Sub => a.sub(b),
        BvOp::Mul => a.mul(b),
        BvOp::Udiv => a.udiv(b).unwrap_or_else(|| Bitvec::ones(a.width())),
        BvOp::And => a.and(b),
        BvOp::Or => a.or(b),
        BvOp::Xor => a.xor(b),
        BvOp::Shl => a.shl(b),
        BvOp::Lshr => a.lshr(b),
        BvOp::Ashr => a.ashr(b),
    }
}

fn apply_cmp(op: CmpOp, a: &Bitvec, b: &Bitvec) -> bool {
    match op {
        CmpOp::Ult => a.ult(b),
        CmpOp::Ule => !b.ult(a),
        CmpOp::Slt => a.slt(b),
        CmpOp::Sle => !b.slt(a),
    }
}

impl Terms {
    pub fn new() -> Terms {
        let mut s = Terms {
            nodes: Vec::new(),
            sorts: Vec::new(),
            table: HashMap::new(),
            vars: Vec::new(),
            var_table: HashMap::new(),
            t: TermId(0),
            f: TermId(0),
        };
        s.t = s.intern(Node::BoolConst(true), Sort::Bool);
        s.f = s.intern(Node::BoolConst(false), Sort::Bool);
        s
    }

    fn intern(&mut self, n: Node, sort: Sort) -> TermId {
        if let Some(&id) = self.table.get(&n) {
            return id;
        }
        let id = TermId(self.nodes.len() as u32);
        self.nodes.push(n.clone());
        self.sorts.push(sort);
        self.table.insert(n, id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, t: TermId) -> &Node {
        &self.nodes[t.0 as usize]
    }

    pub fn sort(&self, t: TermId) -> Sort {
        self.sorts[t.0 as usize]
    }

    pub fn width(&self, t: TermId) -> u32 {
        match self.sort(t) {
            Sort::Bv(w) => w,
            Sort::Bool => panic!("boolean term used as a bitvector"),
        }
    }

    pub fn var_name(&self, v: u32) -> &str {
        &self.vars[v as usize].0
    }

    pub fn vars(&self) -> &[(String, Sort)] {
        &self.vars
    }

    pub fn var(&mut self, name: &str, sort: Sort) -> TermId {
        let v = match self.var_table.get(name) {
            Some(&v) => {
                assert_eq!(self.vars[v as usize].1, sort, "variable {name} redeclared at another sort");
                v
            }
            None => {
                let v = self.vars.len() as u32;
                self.vars.push((name.to_string(), sort));
                self.var_table.insert(name.to_string(), v);
                v
            }
        };
        self.intern(Node::Var(v), sort)
    }

    pub fn bool(&mut self, b: bool) -> TermId {
        if b {
            self.t
        } else {
            self.f
        }
    }

    pub fn bv(&mut self, b: Bitvec) -> TermId {
        let w = b.width();
        self.intern(Node::BvConst(b), Sort::Bv(w))
    }

    pub fn bv_u64(&mut self, width: u32, v: u64) -> TermId {
        self.bv(Bitvec::from_u64(width, v))
    }

    pub fn as_bool(&self, t: TermId) -> Option<bool> {
        match self.node(t) {
            Node::BoolConst(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_bv(&self, t: TermId) -> Option<&Bitvec> {
        match self.node(t) {
            Node::BvConst(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_true(&self, t: TermId) -> bool {
        t == self.t
    }

    pub fn is_false(&self, t: TermId) -> bool {
        t == self.f
    }

    fn negation_of(&self, a: TermId, b: TermId) -> bool {
        matches!(self.node(a), Node::Not(x) if *x == b) || matches!(self.node(b), Node::Not(x) if *x == a)
    }

    pub fn not(&mut self, a: TermId) -> TermId {
        match self.node(a) {
            Node::BoolConst(b) => {
                let b = !*b;
                self.bool(b)
            }
            Node::Not(x) => *x,
            _ => self.intern(Node::Not(a), Sort::Bool),
        }
    }

    pub fn and(&mut self, a: TermId, b: TermId) -> TermId {
        if self.is_false(a) || self.is_false(b) {
            return self.f;
        }
        if self.is_true(a) {
            return b;
        }
        if self.is_true(b) || a == b {
            return a;
        }
        if self.negation_of(a, b) {
            return self.f;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.intern(Node::And(a, b), Sort::Bool)
    }

    pub fn or(&mut self, a: TermId, b: TermId) -> TermId {
        if self.is_true(a) || self.is_true(b) {
            return self.t;
        }
        if self.is_false(a) {
            return b;
        }
        if self.is_false(b) || a == b {
            return a;
        }
        if self.negation_of(a, b) {
            return self.t;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.intern(Node::Or(a, b), Sort::Bool)
    }

    pub fn and_all(&mut self, ts: impl IntoIterator<Item = TermId>) -> TermId {
        ts.into_iter().fold(self.t, |acc, t| self.and(acc, t))
    }

    pub fn or_all(&mut self, ts: impl IntoIterator<Item = TermId>) -> TermId {
        ts.into_iter().fold(self.f, |acc, t| self.or(acc, t))
    }

    pub fn implies(&mut self, a: TermId, b: TermId) -> TermId {
        let na = self.not(a);
        self.or(na, b)
    }

    pub fn ite(&mut self, c: TermId, a: TermId, b: TermId) -> TermId {
        if a == b {
            return a;
        }
        match self.node(c) {
            Node::BoolConst(true) => return a,
            Node::BoolConst(false) => return b,
            Node::Not(x) => {
                let x = *x;
                return self.ite(x, b, a);
            }
            _ => {}
        }
        let a = match self.node(a) {
            Node::Ite(c2, a2, _) if *c2 == c => *a2,
            _ => a,
        };
        let b = match self.node(b) {
            Node::Ite(c2, _, b2) if *c2 == c => *b2,
            _ => b,
        };
        if a == b {
            return a;
        }
        let sort = self.sort(a);
        if sort == Sort::Bool {
            match (self.as_bool(a), self.as_bool(b)) {
                (Some(true), Some(false)) => return c,
                (Some(false), Some(true)) => return self.not(c),
                (Some(true), _) => return self.or(c, b),
                (Some(false), _) => {
                    let nc = self.not(c);
                    return self.and(nc, b);
                }
                (_, Some(true)) => {
                    let nc = self.not(c);
                    return self.or(nc, a);
                }
                (_, Some(false)) => return self.and(c, a),
                _ => {}
            }
        }
        self.intern(Node::Ite(c, a, b), sort)
    }

    pub fn eq(&mut self, a: TermId, b: TermId) -> TermId {
        if a == b {
            return self.t;
        }
        match (self.node(a), self.node(b)) {
            (Node::BvConst(x), Node::BvConst(y)) => {
                let r = x == y;
                return self.bool(r);
            }
            (Node::BoolConst(x), Node::BoolConst(y)) => {
                let r = x == y;
                return self.bool(r);
            }
            _ => {}
        }
        // An ite with constant arms compared against a constant.
        for (i, k) in [(a, b), (b, a)] {
            if let (Node::Ite(c, x, y), Node::BvConst(_)) = (self.node(i).clone(), self.node(k)) {
                if matches!(self.node(x), Node::BvConst(_)) && matches!(self.node(y), Node::BvConst(_)) {
                    let ex = self.eq(x, k);
                    let ey = self.eq(y, k);
                    return self.ite(c, ex, ey);
                }
            }
        }
        if self.sort(a) == Sort::Bool {
            match (self.as_bool(a), self.as_bool(b)) {
                (Some(true), _) => return b,
                (_, Some(true)) => return a,
                (Some(false), _) => return self.not(b),
                (_, Some(false)) => return self.not(a),
                _ => {}
            }
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.intern(Node::Eq(a, b), Sort::Bool)
    }

    pub fn bvop(&mut self, op: BvOp, a: TermId, b: TermId) -> TermId {
        let w = self.width(a);
        debug_assert_eq!(w, self.width(b));
        if let (Some(x), Some(y)) = (self.as_bv(a), self.as_bv(b)) {
            let r = apply_bv(op, x, y);
            return self.bv(r);
        }
        let zero_b = self.as_bv(b).is_some_and(Bitvec::is_zero);
        let zero_a = self.as_bv(a).is_some_and(Bitvec::is_zero);
        match op {
            BvOp::Add | BvOp::Or | BvOp::Xor if zero_b => return a,
            BvOp::Add | BvOp::Or | BvOp::Xor if zero_a => return b,
            BvOp::Sub | BvOp::Shl | BvOp::Lshr | BvOp::Ashr if zero_b => return a,
            BvOp::And | BvOp::Mul if zero_a || zero_b => return self.bv(Bitvec::zero(w)),
            _ => {}
        }
        let (a, b) = match op {
            BvOp::Add | BvOp::Mul | BvOp::And | BvOp::Or | BvOp::Xor if b < a => (b, a),
            _ => (a, b),
        };
        self.intern(Node::Bv(op, a, b), Sort::Bv(w))
    }

    pub fn bvnot(&mut self, a: TermId) -> TermId {
        if let Some(x) = self.as_bv(a) {
            let r = x.not();
            return self.bv(r);
        }
        if let Node::BvNot(x) = self.node(a) {
            return *x;
        }
        let w = self.width(a);
        self.intern(Node::BvNot(a), Sort::Bv(w))
    }

    pub fn bvneg(&mut self, a: TermId) -> TermId {
        if let Some(x) = self.as_bv(a) {
            let r = x.neg();
            return self.bv(r);
        }
        let w = self.width(a);
        self.intern(Node::BvNeg(a), Sort::Bv(w))
    }

    pub fn cmp(&mut self, op: CmpOp, a: TermId, b: TermId) -> TermId {
        if let (Some(x), Some(y)) = (self.as_bv(a), self.as_bv(b)) {
            let r = apply_cmp(op, x, y);
            return self.bool(r);
        }
        if a == b {
            return self.bool(matches!(op, CmpOp::Ule | CmpOp::Sle));
        }
        self.intern(Node::Cmp(op, a, b), Sort::Bool)
    }

    pub fn extract(&mut self, lo: u32, hi: u32, a: TermId) -> TermId {
        let w = self.width(a);
        assert!(lo < hi && hi <= w);
        if lo == 0 && hi == w {
            return a;
        }
        if let Some(x) = self.as_bv(a) {
            let r = x.extract(lo, hi);
            return self.bv(r);
        }
        self.intern(Node::Extract(lo, hi, a), Sort::Bv(hi - lo))
    }

    pub fn resize(&mut self, width: u32, a: TermId) -> TermId {
        let w = self.width(a);
        if w == width {
            return a;
        }
        if let Some(x) = self.as_bv(a) {
            let r = x.resize(width);
            return self.bv(r);
        }
        if width < w {
            return self.extract(0, width, a);
        }
        self.intern(Node::Resize(width, a), Sort::Bv(width))
    }

    /// The constants an ite tree of constants can take, up to `cap` of them.
    pub fn possible_constants(&self, t: TermId, cap: usize) -> Option<Vec<Bitvec>> {
        let mut out: Vec<Bitvec> = Vec::new();
        let mut stack = vec![t];
        let mut seen = std::collections::HashSet::new();
        while let Some(t) = stack.pop() {
            if !seen.insert(t) {
                continue;
            }
            match self.node(t) {
                Node::BvConst(b) => {
                    if !out.contains(b) {
                        out.push(b.clone());
                        if out.len() > cap {
                            return None;
                        }
                    }
                }
                Node::Ite(_, a, b) => {
                    stack.push(*b);
                    stack.push(*a);
                }
                _ => return None,
            }
        }
        Some(out)
    }

    /// Every term reachable from `roots`, children before parents.
    pub fn topo(&self, roots: &[TermId]) -> Vec<TermId> {
        let mut out = Vec::new();
        let mut state: HashMap<TermId, bool> = HashMap::new();
        let mut stack: Vec<(TermId, bool)> = roots.iter().rev().map(|&r| (r, false)).collect();
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                state.insert(t, true);
                out.push(t);
                continue;
            }
            if state.contains_key(&t) {
                continue;
            }
            state.insert(t, false);
            stack.push((t, true));
            for c in self.children(t).into_iter().rev() {
                if !state.contains_key(&c) {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn children(&self, t: TermId) -> Vec<TermId> {
        match self.node(t) {
            Node::BoolConst(_) | Node::BvConst(_) | Node::Var(_) => vec![],
            Node::Not(a) | Node::BvNot(a) | Node::BvNeg(a) | Node::Extract(_, _, a) | Node::Resize(_, a) => {
                vec![*a]
            }
            Node::And(a, b) | Node::Or(a, b) | Node::Eq(a, b) | Node::Bv(_, a, b) | Node::Cmp(_, a, b) => {
                vec![*a, *b]
            }
            Node::Ite(c, a, b) => vec![*c, *a, *b],
        }
    }

    /// Variables occurring in the given terms.
    pub fn free_vars(&self, roots: &[TermId]) -> Vec<u32> {
        let mut vs: Vec<u32> = self
            .topo(roots)
            .into_iter()
            .filter_map(|t| match self.node(t) {
                Node::Var(v) => Some(*v),
                _ => None,
            })
            .collect();
        vs.sort_unstable();
        vs
    }

    /// Evaluates terms under an assignment; unassigned variables are zero.
    pub fn evaluator<'a>(&'a self, assign: &'a Assignment) -> Evaluator<'a> {
        Evaluator { terms: self, assign, memo: HashMap::new() }
    }

    /// Rebuilds `t` with variables replaced by the given constants.
    pub fn substitute(&mut self, t: TermId, assign: &Assignment) -> TermId {
        let order = self.topo(&[t]);
        let mut map: HashMap<TermId, TermId> = HashMap::new();
        for id in order {
            let n = self.node(id).clone();
            let m = |x: &TermId| map[x];
            let r = match n {
                Node::BoolConst(_) | Node::BvConst(_) => id,
                Node::Var(v) => match assign.get(self.var_name(v)) {
                    Some(CVal::Bool(b)) => self.bool(*b),
                    Some(CVal::Bv(b)) => self.bv(b.clone()),
                    None => id,
                },
                Node::Not(a) => self.not(m(&a)),
                Node::And(a, b) => self.and(m(&a), m(&b)),
                Node::Or(a, b) => self.or(m(&a), m(&b)),
                Node::Ite(c, a, b) => self.ite(m(&c), m(&a), m(&b)),
                Node::Eq(a, b) => self.eq(m(&a), m(&b)),
                Node::Bv(op, a, b) => self.bvop(op, m(&a), m(&b)),
                Node::BvNot(a) => self.bvnot(m(&a)),
                Node::BvNeg(a) => self.bvneg(m(&a)),
                Node::Cmp(op, a, b) => self.cmp(op, m(&a), m(&b)),
                Node::Extract(lo, hi, a) => self.extract(lo, hi, m(&a)),
                Node::Resize(w, a) => self.resize(w, m(&a)),
            };
            map.insert(id, r);
        }
        map[&t]
    }
}

pub struct Evaluator<'a> {
    terms: &'a Terms,
    assign: &'a Assignment,
    memo: HashMap<TermId, CVal>,
}

impl Evaluator<'_> {
    pub fn eval(&mut self, t: TermId) -> CVal {
        if let Some(v) = self.memo.get(&t) {
            return v.clone();
        }
        for id in self.terms.topo(&[t]) {
            if self.memo.contains_key(&id) {
                continue;
            }
            let v = self.step(id);
            self.memo.insert(id, v);
        }
        self.memo[&t].clone()
    }

    pub fn eval_bool(&mut self, t: TermId) -> bool {
        self.eval(t).as_bool()
    }

    pub fn eval_bv(&mut self, t: TermId) -> Bitvec {
        self.eval(t).as_bv().clone()
    }

    fn step(&self, id: TermId) -> CVal {
        let g = |t: &TermId| &self.memo[t];
        let b = |t: &TermId| self.memo[t].as_bool();
        let v = |t: &TermId| self.memo[t].as_bv();
        match self.terms.node(id) {
            Node::BoolConst(x) => CVal::Bool(*x),
            Node::BvConst(x) => CVal::Bv(x.clone()),
            Node::Var(x) => match self.assign.get(self.terms.var_name(*x)) {
                Some(c) => c.clone(),
                None => match self.terms.sort(id) {
                    Sort::Bool => CVal::Bool(false),
                    Sort::Bv(w) => CVal::Bv(Bitvec::zero(w)),
                },
            },
            Node::Not(a) => CVal::Bool(!b(a)),
            Node::And(x, y) => CVal::Bool(b(x) && b(y)),
            Node::Or(x, y) => CVal::Bool(b(x) || b(y)),
            Node::Ite(c, x, y) => {
                if b(c) {
                    g(x).clone()
                } else {
                    g(y).clone()
                }
            }
            Node::Eq(x, y) => CVal::Bool(g(x) == g(y)),
            Node::Bv(op, x, y) => CVal::Bv(apply_bv(*op, v(x), v(y))),
            Node::BvNot(x) => CVal::Bv(v(x).not()),
            Node::BvNeg(x) => CVal::Bv(v(x).neg()),
            Node::Cmp(op, x, y) => CVal::Bool(apply_cmp(*op, v(x), v(y))),
            Node::Extract(lo, hi, x) => CVal::Bv(v(x).extract(*lo, *hi)),
            Node::Resize(w, x) => CVal::Bv(v(x).resize(*w)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_consing_shares_nodes() {
        let mut s = Terms::new();
        let x = s.var("x", Sort::Bv(4));
        let y = s.var("y", Sort::Bv(4));
        let a = s.bvop(BvOp::Add, x, y);
        let b = s.bvop(BvOp::Add, y, x);
        assert_eq!(a, b);
        let n = s.len();
        s.bvop(BvOp::Add, x, y);
        assert_eq!(s.len(), n);
    }

    #[test]
    fn guard_simplification() {
        let mut s = Terms::new();
        let g = s.var("g", Sort::Bool);
        let x = s.var("x", Sort::Bv(4));
        let y = s.var("y", Sort::Bv(4));
        let z = s.var("z", Sort::Bv(4));
        assert_eq!(s.ite(s.t, x, y), x);
        assert_eq!(s.ite(g, x, x), x);
        let inner = s.ite(g, x, y);
        assert_eq!(s.ite(g, inner, z), s.ite(g, x, z));
        let ng = s.not(g);
        assert_eq!(s.and(g, ng), s.f);
        assert_eq!(s.or(g, ng), s.t);
        let one = s.bv_u64(4, 1);
        let two = s.bv_u64(4, 2);
        assert_eq!(s.bvop(BvOp::Add, one, one), two);
    }

    #[test]
    fn evaluation_matches_bitvector_ops() {
        let mut s = Terms::new();
        let x = s.var("x", Sort::Bv(4));
        let k = s.bv_u64(4, 3);
        let e = s.bvop(BvOp::Shl, x, k);
        let mut a = Assignment::new();
        a.insert("x".into(), CVal::Bv(Bitvec::from_u64(4, 3)));
        assert_eq!(s.evaluator(&a).eval_bv(e), Bitvec::from_u64(4, 8));
        let sub = s.substitute(e, &a);
        assert_eq!(s.as_bv(sub), Some(&Bitvec::from_u64(4, 8)));
    }

    #[test]
    fn possible_constants_of_ite_trees() {
        let mut s = Terms::new();
        let g = s.var("g", Sort::Bool);
        let zero = s.bv_u64(4, 0);
        let four = s.bv_u64(4, 4);
        let t = s.ite(g, zero, four);
        let mut cs = s.possible_constants(t, 8).unwrap();
        cs.sort();
        assert_eq!(cs, vec![Bitvec::from_u64(4, 0), Bitvec::from_u64(4, 4)]);
        let x = s.var("x", Sort::Bv(4));
        assert!(s.possible_constants(x, 8).is_none());
    }
}
