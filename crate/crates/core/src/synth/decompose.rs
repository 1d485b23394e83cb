//! Rule-based goal decomposition layered over CEGIS.

use super::cegis::{Engine, Outcome};
use super::depend::{analyze, DepInfo};
use super::verify::{initial_state, verify, Verdict};
use super::{Options, Stats};
use crate::lang::ast::{Binop, Expr, FrameItem, Size, SpecAst, SpecItem};
use crate::lang::{RegId, RegionId};
use crate::machine::{Inst, Machine, Spec};
use crate::smt::{check_sat, SmtResult};
use crate::symexec::exec::{holds, spec_globals, Loc};
use crate::symexec::Terms;
use crate::syntax::pretty;
use num_bigint::BigInt;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    LoadMem,
    LoadLbl,
    SetReg,
    SetMem,
    FindPtr,
}

pub const RULES: [Rule; 5] = [Rule::LoadMem, Rule::LoadLbl, Rule::SetReg, Rule::SetMem, Rule::FindPtr];

/// A specification to discharge, with the rule that produced it.
#[derive(Clone, Debug)]
pub struct Goal {
    pub spec: Spec,
    pub origin: Option<(Rule, Option<(RegionId, usize)>)>,
    pub depth: usize,
}

impl Goal {
    pub fn root(spec: &Spec) -> Goal {
        Goal { spec: spec.clone(), origin: None, depth: 0 }
    }

    pub fn key(&self) -> String {
        self.spec.text()
    }
}

/// Shared inputs of rule application.
pub struct RuleContext<'a> {
    pub base: &'a Machine,
    pub opts: &'a Options,
    deps: HashMap<String, DepInfo>,
}

impl<'a> RuleContext<'a> {
    pub fn new(base: &'a Machine, opts: &'a Options) -> RuleContext<'a> {
        RuleContext { base, opts, deps: HashMap::new() }
    }

    fn deps(&mut self, g: &Goal) -> DepInfo {
        let k = g.key();
        if let Some(d) = self.deps.get(&k) {
            return d.clone();
        }
        let d = analyze(&g.spec, &self.opts.solver).unwrap_or_default();
        self.deps.insert(k, d.clone());
        d
    }
}

fn conj(es: impl IntoIterator<Item = Expr>) -> Expr {
    es.into_iter().reduce(Expr::and).unwrap_or(Expr::Bool(true))
}

/// Conjunction with duplicates removed and conjuncts in text order, so that
/// goals reached along different rule orders coincide.
fn canonical_conj(es: impl IntoIterator<Item = Expr>) -> Expr {
    let mut parts: Vec<(String, Expr)> = Vec::new();
    for e in es {
        for c in e.conjuncts() {
            if *c != Expr::Bool(true) {
                parts.push((pretty::expr(c), c.clone()));
            }
        }
    }
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    parts.dedup_by(|a, b| a.0 == b.0);
    conj(parts.into_iter().map(|p| p.1))
}

fn reg_expr(spec: &Spec, r: RegId) -> Expr {
    Expr::deref(Expr::var(&spec.machine.shape.reg(r).name))
}

fn cell_ptr(spec: &Spec, (m, i): (RegionId, usize)) -> Expr {
    let info = spec.machine.shape.region(m);
    Expr::Ptr(info.name.clone(), Box::new(Expr::Int(BigInt::from(i as u64 * info.stride()))))
}

fn cell_expr(spec: &Spec, c: (RegionId, usize)) -> Expr {
    let w = spec.machine.shape.region(c.0).cell;
    Expr::Fetch(Box::new(cell_ptr(spec, c)), Size::Lit(w as u64))
}

fn has_fetch(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |x| found |= matches!(x, Expr::Fetch(..) | Expr::Call(..)));
    found
}

type Mentioned = (BTreeSet<RegId>, BTreeSet<(RegionId, usize)>);

fn let_mentions(spec: &Spec) -> Mentioned {
    let mut out: Mentioned = Default::default();
    for l in &spec.lets {
        let (r, c) = spec.mentions(&l.expr);
        out.0.extend(r);
        out.1.extend(c);
    }
    out
}

fn lets_touch_memory(spec: &Spec) -> bool {
    spec.lets.iter().any(|l| has_fetch(&l.expr))
}

/// Frame registers the specification never mentions otherwise.
fn scratch(spec: &Spec) -> Vec<RegId> {
    let (pr, _) = spec.mentions(&spec.pre);
    let (qr, _) = spec.mentions(&spec.post);
    let (lr, _) = let_mentions(spec);
    spec.frame_regs.iter().copied().filter(|r| !pr.contains(r) && !qr.contains(r) && !lr.contains(r)).collect()
}

/// Precondition conjuncts that survive a subprogram modifying `regs` and
/// `cells`.
fn stable_pre(spec: &Spec, regs: &BTreeSet<RegId>, cells: &BTreeSet<(RegionId, usize)>) -> Vec<Expr> {
    spec.pre
        .conjuncts()
        .into_iter()
        .filter(|e| {
            let (r, c) = spec.mentions(e);
            r.is_disjoint(regs) && c.is_disjoint(cells) && (cells.is_empty() || !has_fetch(e))
        })
        .cloned()
        .collect()
}

/// Builds a goal over the base machine with the original declarations and
/// a new frame.
fn make_goal(
    ctx: &RuleContext,
    parent: &Goal,
    pre: Expr,
    post: Expr,
    regs: &BTreeSet<RegId>,
    cells: &BTreeSet<(RegionId, usize)>,
    origin: Option<(Rule, Option<(RegionId, usize)>)>,
) -> Option<Goal> {
    let spec = &parent.spec;
    let mut items: Vec<SpecItem> = spec.ast.items.iter().filter(|i| matches!(i, SpecItem::Decl(_))).cloned().collect();
    let mut frame: Vec<FrameItem> = regs.iter().map(|r| FrameItem::Reg(Expr::var(&spec.machine.shape.reg(*r).name))).collect();
    frame.extend(cells.iter().map(|c| FrameItem::Mem(cell_ptr(spec, *c))));
    if !frame.is_empty() {
        items.push(SpecItem::Frame(frame));
    }
    let ast = SpecAst { items, pre, post };
    let s = Spec::from_ast(ctx.base, &ast, &[]).ok()?;
    Some(Goal { spec: s, origin, depth: parent.depth + 1 })
}

/// `(g1, g2)` with g1 establishing `fact` from the precondition while
/// modifying only `regs`/`cells`, and g2 finishing from there.
#[allow(clippy::too_many_arguments)]
fn split(
    ctx: &RuleContext,
    g: &Goal,
    fact: Expr,
    regs: BTreeSet<RegId>,
    cells: BTreeSet<(RegionId, usize)>,
    keep_pre: Vec<Expr>,
    rule: Rule,
    cell: Option<(RegionId, usize)>,
) -> Option<Vec<Goal>> {
    let spec = &g.spec;
    let mid = canonical_conj(keep_pre.into_iter().chain([fact]));
    let g1 = make_goal(ctx, g, spec.pre.clone(), mid.clone(), &regs, &cells, Some((rule, cell)))?;
    let g2 = make_goal(ctx, g, mid, spec.post.clone(), &spec.frame_regs, &spec.frame_cells, Some((rule, None)))?;
    Some(vec![g1, g2])
}

/// Whether some precondition conjunct already places `e` in a register.
fn pre_holds_in_register(spec: &Spec, e: &Expr) -> bool {
    spec.pre.conjuncts().into_iter().any(|c| match c {
        Expr::Binop(Binop::Eq, a, b) => {
            (matches!(**a, Expr::Deref(_)) && **b == *e) || (matches!(**b, Expr::Deref(_)) && **a == *e)
        }
        _ => false,
    })
}

/// Whether `conj` may fail to hold on the initial state when the
/// precondition holds.
fn not_yet_true(ctx: &RuleContext, spec: &Spec, conj_e: &Expr) -> bool {
    let mut terms = Terms::new();
    let init = initial_state(&mut terms, spec, "");
    let Ok(globals) = spec_globals(&mut terms, spec, &init) else { return true };
    let (Ok(pre), Ok(now)) = (
        holds(&mut terms, spec, &globals, &init, None, &spec.pre),
        holds(&mut terms, spec, &globals, &init, None, conj_e),
    ) else {
        return true;
    };
    let nn = terms.not(now);
    !matches!(check_sat(&ctx.opts.solver, &terms, &[pre, nn]), SmtResult::Unsat)
}

/// Subgoal sequences for one rule; empty when the rule does not apply.
pub fn apply_rule(ctx: &mut RuleContext, rule: Rule, g: &Goal) -> Vec<Vec<Goal>> {
    let spec = &g.spec;
    let shape = &spec.machine.shape;
    let scratch = scratch(spec);
    let (post_regs, post_cells) = spec.mentions(&spec.post);
    let (let_regs, let_cells) = let_mentions(spec);
    let mut out = Vec::new();
    match rule {
        Rule::LoadMem => {
            let cells: BTreeSet<(RegionId, usize)> = post_cells.union(&let_cells).copied().collect();
            for c in cells {
                let v = cell_expr(spec, c);
                if pre_holds_in_register(spec, &v) {
                    continue;
                }
                for &s in &scratch {
                    if shape.reg(s).width != shape.region(c.0).cell {
                        continue;
                    }
                    let fact = Expr::eq(reg_expr(spec, s), v.clone());
                    let regs: BTreeSet<RegId> = [s].into_iter().collect();
                    let keep = stable_pre(spec, &regs, &BTreeSet::new());
                    out.extend(split(ctx, g, fact, regs, BTreeSet::new(), keep, rule, Some(c)));
                }
            }
        }
        Rule::LoadLbl => {
            let mut labels: Vec<Expr> = Vec::new();
            let mut collect = |e: &Expr| {
                e.walk(&mut |x| {
                    let is_label = match x {
                        Expr::Var(n) => shape.regions.iter().any(|r| r.label.as_deref() == Some(n.as_str())),
                        Expr::Ptr(..) => true,
                        _ => false,
                    };
                    if is_label && !labels.contains(x) {
                        labels.push(x.clone());
                    }
                })
            };
            collect(&spec.post);
            for l in &spec.lets {
                collect(&l.expr);
            }
            for l in labels {
                if pre_holds_in_register(spec, &l) {
                    continue;
                }
                let width = match &l {
                    Expr::Var(n) => shape.regions.iter().find(|r| r.label.as_deref() == Some(n.as_str())).map(|r| r.refw),
                    Expr::Ptr(n, _) => shape.regions.iter().find(|r| r.name == *n).map(|r| r.refw),
                    _ => None,
                };
                for &s in &scratch {
                    if Some(shape.reg(s).width) != width {
                        continue;
                    }
                    let fact = Expr::eq(reg_expr(spec, s), l.clone());
                    let regs: BTreeSet<RegId> = [s].into_iter().collect();
                    let keep = stable_pre(spec, &regs, &BTreeSet::new());
                    out.extend(split(ctx, g, fact, regs, BTreeSet::new(), keep, rule, None));
                }
            }
        }
        Rule::SetReg => {
            let conjuncts: Vec<Expr> = spec.post.conjuncts().into_iter().cloned().collect();
            if conjuncts.len() < 2 {
                return out;
            }
            let deps = ctx.deps(g);
            for &r in &post_regs {
                if scratch.contains(&r) || let_regs.contains(&r) || !deps.unique.contains_key(&Loc::Reg(r)) {
                    continue;
                }
                let mine: Vec<Expr> = conjuncts.iter().filter(|c| spec.mentions(c).0.contains(&r)).cloned().collect();
                if mine.is_empty() || mine.len() == conjuncts.len() {
                    continue;
                }
                let fact = conj(mine);
                if !not_yet_true(ctx, spec, &fact) {
                    continue;
                }
                let mut regs: BTreeSet<RegId> = scratch.iter().copied().collect();
                regs.insert(r);
                let keep = stable_pre(spec, &regs, &BTreeSet::new());
                out.extend(split(ctx, g, fact, regs, BTreeSet::new(), keep, rule, None));
            }
        }
        Rule::SetMem => {
            let conjuncts: Vec<Expr> = spec.post.conjuncts().into_iter().cloned().collect();
            if conjuncts.len() < 2 || lets_touch_memory(spec) {
                return out;
            }
            let deps = ctx.deps(g);
            for &c in &post_cells {
                if let_cells.contains(&c) || !deps.unique.contains_key(&Loc::Cell(c.0, c.1)) {
                    continue;
                }
                let mine: Vec<Expr> = conjuncts.iter().filter(|e| spec.mentions(e).1.contains(&c)).cloned().collect();
                if mine.is_empty() || mine.len() == conjuncts.len() {
                    continue;
                }
                let fact = conj(mine);
                if !not_yet_true(ctx, spec, &fact) {
                    continue;
                }
                let regs: BTreeSet<RegId> = scratch.iter().copied().collect();
                let cells: BTreeSet<(RegionId, usize)> = [c].into_iter().collect();
                let keep = stable_pre(spec, &regs, &cells);
                out.extend(split(ctx, g, fact, regs, cells, keep, rule, Some(c)));
            }
        }
        Rule::FindPtr => {
            let Some((Rule::LoadMem | Rule::SetMem, Some(c))) = g.origin else { return out };
            let (pre_regs, _) = spec.mentions(&spec.pre);
            let ptr = cell_ptr(spec, c);
            if pre_holds_in_register(spec, &ptr) {
                return out;
            }
            for &s in &spec.frame_regs {
                if pre_regs.contains(&s) || let_regs.contains(&s) || shape.reg(s).width != shape.region(c.0).refw {
                    continue;
                }
                let fact = Expr::eq(reg_expr(spec, s), ptr.clone());
                let regs: BTreeSet<RegId> = [s].into_iter().collect();
                let keep = stable_pre(spec, &regs, &BTreeSet::new());
                out.extend(split(ctx, g, fact, regs, BTreeSet::new(), keep, rule, None));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
enum Node {
    Hole { goal: Rc<Goal>, size: usize, from: usize },
    Prog(Vec<Inst>),
}

#[derive(Clone, Debug)]
struct Tree {
    nodes: Vec<Node>,
    order: u64,
}

impl Tree {
    fn cost(&self, base: f64) -> f64 {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Hole { size, .. } => base.powi(*size as i32),
                Node::Prog(_) => 0.0,
            })
            .sum()
    }

    fn first_hole(&self) -> Option<usize> {
        self.nodes.iter().position(|n| matches!(n, Node::Hole { .. }))
    }

    fn program(&self) -> Vec<Inst> {
        let mut out = Vec::new();
        for n in &self.nodes {
            if let Node::Prog(p) = n {
                out.extend(p.iter().cloned());
            }
        }
        out
    }

    fn replace(&self, h: usize, with: Vec<Node>, order: u64) -> Tree {
        let mut nodes = self.nodes[..h].to_vec();
        nodes.extend(with);
        nodes.extend(self.nodes[h + 1..].iter().cloned());
        Tree { nodes, order }
    }
}

const MAX_DEPTH: usize = 4;

/// Searches trees of rule applications, discharging the leftmost hole of
/// the cheapest tree by CEGIS and decomposing holes CEGIS cannot fill.
pub fn decompose_synthesize(base: &Machine, spec: &Spec, opts: &Options) -> (Outcome, Stats) {
    let start = Instant::now();
    let deadline = opts.timeout.map(|t| start + t);
    let mut stats = Stats::default();
    let mut ctx = RuleContext::new(base, opts);
    let mut engines: HashMap<String, Engine> = HashMap::new();
    let mut decomposed: HashSet<String> = HashSet::new();
    // Per goal: lengths ruled out so far and any program found.
    let mut memo: HashMap<String, (Option<usize>, Option<Vec<Inst>>)> = HashMap::new();
    let mut order = 0u64;
    let mut set: Vec<Tree> = vec![Tree { nodes: vec![Node::Hole { goal: Rc::new(Goal::root(spec)), size: 1, from: 0 }], order }];
    let mut last_unknown: Option<String> = None;
    let finish = |mut stats: Stats, engines: &HashMap<String, Engine>, r: Outcome| {
        for e in engines.values() {
            stats.absorb(&e.stats);
        }
        stats.total_ms = start.elapsed().as_millis();
        (r, stats)
    };
    while !set.is_empty() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return finish(stats, &engines, Outcome::Unknown("timeout".into()));
        }
        let best = (0..set.len())
            .min_by(|a, b| {
                let (ta, tb) = (&set[*a], &set[*b]);
                ta.cost(opts.cost_base).total_cmp(&tb.cost(opts.cost_base)).then(ta.order.cmp(&tb.order))
            })
            .unwrap();
        let tree = set.remove(best);
        let Some(h) = tree.first_hole() else {
            let prog = tree.program();
            let t = Instant::now();
            let v = verify(spec, &prog, &opts.solver);
            stats.verify_ms += t.elapsed().as_millis();
            match v {
                Verdict::Verified => return finish(stats, &engines, Outcome::Found(prog)),
                Verdict::Unknown(e) => last_unknown = Some(e),
                Verdict::Refuted(_) => {}
            }
            continue;
        };
        let Node::Hole { goal, size, from } = tree.nodes[h].clone() else { unreachable!() };
        let key = goal.key();
        let hole_deadline = match (deadline, opts.hole_timeout) {
            (Some(d), Some(c)) => Some(d.min(Instant::now() + c)),
            (d, None) => d,
            (None, Some(c)) => Some(Instant::now() + c),
        };
        let (failed, known) = memo.get(&key).cloned().unwrap_or((None, None));
        let r = if let Some(p) = known {
            Outcome::Found(p)
        } else if failed.is_some_and(|f| f >= size) {
            Outcome::NoSolution
        } else {
            let lo = failed.map_or(from, |f| from.max(f + 1));
            let engine = engines.entry(key.clone()).or_insert_with(|| Engine::new(&goal.spec, opts.clone()));
            let r = engine.search(lo, size, hole_deadline);
            let entry = memo.entry(key.clone()).or_insert((None, None));
            match &r {
                Outcome::Found(p) => entry.1 = Some(p.clone()),
                Outcome::NoSolution => entry.0 = Some(size),
                Outcome::Unknown(_) => {}
            }
            r
        };
        match r {
            Outcome::Found(p) => {
                order += 1;
                set.push(tree.replace(h, vec![Node::Prog(p)], order));
                continue;
            }
            Outcome::Unknown(e) => last_unknown = Some(e),
            Outcome::NoSolution => {}
        }
        if goal.depth < MAX_DEPTH && decomposed.insert(key) {
            for rule in RULES {
                for subgoals in apply_rule(&mut ctx, rule, &goal) {
                    let holes = subgoals
                        .into_iter()
                        .map(|g| Node::Hole { goal: Rc::new(g), size: 1, from: 0 })
                        .collect();
                    order += 1;
                    set.push(tree.replace(h, holes, order));
                }
            }
        }
        if size < opts.max_len {
            order += 1;
            set.push(tree.replace(h, vec![Node::Hole { goal, size: size + 1, from: size + 1 }], order));
        }
    }
    let r = match last_unknown {
        Some(e) => Outcome::Unknown(e),
        None => Outcome::NoSolution,
    };
    finish(stats, &engines, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{lower_files, machine_file};
    use crate::syntax::parse_spec;
    use crate::synth::synthesize;
    use std::path::PathBuf;

    fn corpus(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
    }

    fn toy_goal(text: &str) -> (Machine, Goal) {
        let (m, _) = machine_file(&corpus("toy.casp")).unwrap();
        let s = Spec::from_ast(&m, &parse_spec(text).unwrap(), &[]).unwrap();
        (m, Goal::root(&s))
    }

    fn texts(splits: &[Vec<Goal>]) -> Vec<Vec<String>> {
        splits.iter().map(|gs| gs.iter().map(|g| g.spec.text()).collect()).collect()
    }

    const LOAD_AND_SET: &str =
        "let v: word = fetch([M, 0], 4)\nframe: modify: r1 r2\npre: *r4 == [M, 0]\npost: *r1 == v && *r2 == 0b0101";

    #[test]
    fn set_reg_splits_independent_updates() {
        let (m, g) = toy_goal(LOAD_AND_SET);
        let opts = Options::default();
        let mut ctx = RuleContext::new(&m, &opts);
        let splits = apply_rule(&mut ctx, Rule::SetReg, &g);
        assert_eq!(splits.len(), 2, "{:#?}", texts(&splits));
        for gs in &splits {
            assert_eq!(gs.len(), 2);
            assert_eq!(gs[0].spec.pre, g.spec.pre);
            assert_eq!(gs[1].spec.pre, gs[0].spec.post);
            assert_eq!(gs[1].spec.post, g.spec.post);
        }
        let (r, _) = decompose_synthesize(&m, &g.spec, &opts);
        let Outcome::Found(p) = r else { panic!("{r:?}") };
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn load_mem_puts_the_value_in_the_scratch_register() {
        let (m, low) = lower_files(&corpus("mips_subset.casp"), &corpus("disp_mips.casp"), &corpus("disp_check.ale")).unwrap();
        let g = Goal::root(&low.spec);
        let opts = Options::default();
        let mut ctx = RuleContext::new(&m, &opts);
        let splits = apply_rule(&mut ctx, Rule::LoadMem, &g);
        assert_eq!(splits.len(), 1);
        let g1 = &splits[0][0];
        assert_eq!(g1.spec.frame_regs.iter().map(|r| m.shape.reg(*r).name.as_str()).collect::<Vec<_>>(), ["r2"]);
        assert!(pretty::expr(&g1.spec.post).contains("*r2 == fetch([DispMem, 88], 32)"), "{}", g1.spec.text());
        let sets = apply_rule(&mut ctx, Rule::SetReg, &g);
        assert_eq!(sets.len(), 1);
        let r4 = m.shape.reg_by_name("r4").unwrap();
        assert!(sets[0][0].spec.frame_regs.contains(&r4));
        assert!(pretty::expr(&sets[0][0].spec.post).contains("*disp_area_reg == 0x00000001"));
    }

    #[test]
    fn find_ptr_applies_below_load_mem() {
        let (m, g) = toy_goal("let v: word = fetch([M, 0], 4)\nframe: modify: r1 r3\npre: true\npost: *r1 == v");
        let opts = Options::default();
        let mut ctx = RuleContext::new(&m, &opts);
        assert!(apply_rule(&mut ctx, Rule::FindPtr, &g).is_empty());
        let loads = apply_rule(&mut ctx, Rule::LoadMem, &g);
        assert_eq!(loads.len(), 1);
        let g1 = &loads[0][0];
        let ptrs = apply_rule(&mut ctx, Rule::FindPtr, g1);
        assert_eq!(ptrs.len(), 1);
        assert!(pretty::expr(&ptrs[0][0].spec.post).contains("*r3 == [M, 0]"), "{}", ptrs[0][0].spec.text());
        assert_eq!(ptrs[0][1].spec.post, g1.spec.post);
    }

    #[test]
    fn load_lbl_and_set_mem_apply_where_relevant() {
        let (m, g) = toy_goal("frame: modify: r1 r2\npre: true\npost: *r1 == buf");
        let opts = Options::default();
        let mut ctx = RuleContext::new(&m, &opts);
        let l = apply_rule(&mut ctx, Rule::LoadLbl, &g);
        assert_eq!(l.len(), 1);
        assert!(pretty::expr(&l[0][0].spec.post).contains("*r2 == buf"));
        let (m, g) = toy_goal("let x: word = *r3\nframe: mem-modify: [M, 1]\npre: *r2 == [M, 1]\npost: fetch([M, 1], 4) == x && *r5 == 0x1");
        let mut ctx = RuleContext::new(&m, &opts);
        let s = apply_rule(&mut ctx, Rule::SetMem, &g);
        assert_eq!(s.len(), 1, "{:#?}", texts(&s));
        assert_eq!(s[0][0].spec.frame_cells.len(), 1);
    }

    #[test]
    fn direct_goals_match_plain_synthesis() {
        let (m, g) = toy_goal("let x: word = *r2\nframe: modify: r1\npre: true\npost: *r1 == x b+ 0x1");
        let opts = Options::default();
        let (a, _) = decompose_synthesize(&m, &g.spec, &opts);
        let (b, _) = synthesize(&g.spec, &opts);
        assert_eq!(a, b);
    }
}
