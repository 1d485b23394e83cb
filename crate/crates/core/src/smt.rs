//! SMT-LIB v2 encoding of terms and a child-process solver interface.

use crate::lang::{Bitvec, RegionId, Shape};
use crate::symexec::term::{BvOp, CVal, CmpOp, Node, Sort, TermId, Terms};
use crate::symexec::value::{tag_width, Leaf, SymValue};
use rand::Rng;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

/// Model values for the declared variables, keyed by variable name.
pub type Model = HashMap<String, CVal>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmtResult {
    Sat(Model),
    Unsat,
    Unknown(String),
}

impl SmtResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SmtResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SmtResult::Unsat)
    }
}

/// How to run the solver.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub path: String,
    pub args: Vec<String>,
    /// Per-query timeout.
    pub timeout_ms: Option<u64>,
    /// Prefix every symbol with five random letters drawn from this seed.
    pub random_names: Option<u64>,
    /// Write each session's transcript here.
    pub dump_dir: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { path: "z3".into(), args: vec![], timeout_ms: None, random_names: None, dump_dir: None }
    }
}

impl SolverConfig {
    /// Reads `BLOCKSYNTH_SOLVER`, `BLOCKSYNTH_SOLVER_ARGS` (whitespace
    /// separated), and `BLOCKSYNTH_SMT_DUMP`.
    pub fn from_env() -> SolverConfig {
        let mut c = SolverConfig::default();
        if let Ok(p) = std::env::var("BLOCKSYNTH_SOLVER") {
            if !p.is_empty() {
                c.path = p;
            }
        }
        if let Ok(a) = std::env::var("BLOCKSYNTH_SOLVER_ARGS") {
            c.args = a.split_whitespace().map(String::from).collect();
        }
        if let Ok(d) = std::env::var("BLOCKSYNTH_SMT_DUMP") {
            if !d.is_empty() {
                c.dump_dir = Some(PathBuf::from(d));
            }
        }
        c
    }

    fn command_args(&self) -> Vec<String> {
        let base = std::path::Path::new(&self.path).file_name().and_then(|s| s.to_str()).unwrap_or("");
        let mut args = Vec::new();
        if base.starts_with("z3") {
            args.extend(["-in".to_string(), "-smt2".to_string()]);
        }
        args.extend(self.args.iter().cloned());
        args
    }
}

fn sort_text(s: Sort) -> String {
    s.to_string()
}

fn bv_literal(b: &Bitvec) -> String {
    format!("(_ bv{} {})", b.bits(), b.width())
}

fn bvop_name(op: BvOp) -> &'static str {
    match op {
        BvOp::Add => "bvadd",
        BvOp::Sub => "bvsub",
        BvOp::Mul => "bvmul",
        BvOp::Udiv => "bvudiv",
        BvOp::And => "bvand",
        BvOp::Or => "bvor",
        BvOp::Xor => "bvxor",
        BvOp::Shl => "bvshl",
        BvOp::Lshr => "bvlshr",
        BvOp::Ashr => "bvashr",
    }
}

fn cmp_name(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Ult => "bvult",
        CmpOp::Ule => "bvule",
        CmpOp::Slt => "bvslt",
        CmpOp::Sle => "bvsle",
    }
}

/// Incremental SMT-LIB text generation: each shared subterm is defined
/// once per scope and referred to by name.
#[derive(Debug, Default)]
pub struct Encoder {
    prefix: String,
    scopes: Vec<(HashSet<TermId>, Vec<String>)>,
}

impl Encoder {
    pub fn new(prefix: &str) -> Encoder {
        Encoder { prefix: prefix.to_string(), scopes: vec![(HashSet::new(), Vec::new())] }
    }

    fn known(&self, t: TermId) -> bool {
        self.scopes.iter().any(|(s, _)| s.contains(&t))
    }

    pub fn var_symbol(&self, name: &str) -> String {
        format!("|{}{}|", self.prefix, name.replace('|', "_"))
    }

    fn def_symbol(&self, t: TermId) -> String {
        format!("|{}!t{}|", self.prefix, t.0)
    }

    /// The variables declared in every open scope.
    pub fn declared(&self) -> Vec<String> {
        self.scopes.iter().flat_map(|(_, v)| v.iter().cloned()).collect()
    }

    pub fn push(&mut self) {
        self.scopes.push((HashSet::new(), Vec::new()));
    }

    pub fn pop(&mut self) {
        if self.scopes.len() > 1 {
            self.scopes.pop();
        }
    }

    /// The expression naming `t`, after emitting any definitions it needs.
    pub fn term(&mut self, terms: &Terms, t: TermId, out: &mut String) -> String {
        for id in terms.topo(&[t]) {
            if self.known(id) {
                continue;
            }
            match terms.node(id) {
                Node::BoolConst(_) | Node::BvConst(_) => continue,
                Node::Var(v) => {
                    let _ = writeln!(
                        out,
                        "(declare-fun {} () {})",
                        self.var_symbol(terms.var_name(*v)),
                        sort_text(terms.sort(id))
                    );
                    self.scopes.last_mut().unwrap().1.push(terms.var_name(*v).to_string());
                }
                _ => {
                    let body = self.node_text(terms, id);
                    let _ = writeln!(out, "(define-fun {} () {} {})", self.def_symbol(id), sort_text(terms.sort(id)), body);
                }
            }
            self.scopes.last_mut().unwrap().0.insert(id);
        }
        self.reference(terms, t)
    }

    fn reference(&self, terms: &Terms, t: TermId) -> String {
        match terms.node(t) {
            Node::BoolConst(b) => b.to_string(),
            Node::BvConst(b) => bv_literal(b),
            Node::Var(v) => self.var_symbol(terms.var_name(*v)),
            _ => self.def_symbol(t),
        }
    }

    fn node_text(&self, terms: &Terms, t: TermId) -> String {
        let r = |x: &TermId| self.reference(terms, *x);
        match terms.node(t) {
            Node::BoolConst(_) | Node::BvConst(_) | Node::Var(_) => self.reference(terms, t),
            Node::Not(a) => format!("(not {})", r(a)),
            Node::And(a, b) => format!("(and {} {})", r(a), r(b)),
            Node::Or(a, b) => format!("(or {} {})", r(a), r(b)),
            Node::Ite(c, a, b) => format!("(ite {} {} {})", r(c), r(a), r(b)),
            Node::Eq(a, b) => format!("(= {} {})", r(a), r(b)),
            Node::Bv(op, a, b) => format!("({} {} {})", bvop_name(*op), r(a), r(b)),
            Node::BvNot(a) => format!("(bvnot {})", r(a)),
            Node::BvNeg(a) => format!("(bvneg {})", r(a)),
            Node::Cmp(op, a, b) => format!("({} {} {})", cmp_name(*op), r(a), r(b)),
            Node::Extract(lo, hi, a) => format!("((_ extract {} {}) {})", hi - 1, lo, r(a)),
            Node::Resize(w, a) => format!("((_ zero_extend {}) {})", w - terms.width(*a), r(a)),
        }
    }
}

/// The tagged-pair encoding of a word value: a region tag (zero for a plain
/// bitvector) and the bits or offset.
pub fn encode_word(terms: &mut Terms, shape: &Shape, v: &SymValue, width: u32) -> (TermId, TermId) {
    let tw = tag_width(shape);
    let mut tag = terms.bv_u64(tw, 0);
    let mut payload = terms.bv_u64(width, 0);
    for (g, l) in v.alts().iter().rev() {
        let (k, p) = match l {
            Leaf::Bits(t) if terms.width(*t) == width => (0, *t),
            Leaf::Ptr(RegionId(r), t) if terms.width(*t) == width => (*r as u64 + 1, *t),
            _ => continue,
        };
        let kt = terms.bv_u64(tw, k);
        tag = terms.ite(*g, kt, tag);
        payload = terms.ite(*g, p, payload);
    }
    (tag, payload)
}

/// Equality of two tagged pairs.
pub fn encoded_eq(terms: &mut Terms, a: (TermId, TermId), b: (TermId, TermId)) -> TermId {
    let t = terms.eq(a.0, b.0);
    let p = terms.eq(a.1, b.1);
    terms.and(t, p)
}

fn random_prefix(seed: u64) -> String {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut s: String = (0..5).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
    s.push('.');
    s
}

static SESSION_COUNTER: AtomicU64 = AtomicU64::new(0);

/// One solver process. Assertions accumulate; `push` and `pop` scope them.
pub struct Session {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
    stderr: std::sync::Arc<std::sync::Mutex<String>>,
    enc: Encoder,
    pending: String,
    transcript: String,
    dump: Option<PathBuf>,
    timeout_ms: Option<u64>,
    dead: Option<String>,
}

impl Session {
    pub fn start(cfg: &SolverConfig) -> Result<Session, String> {
        let mut child = Command::new(&cfg.path)
            .args(cfg.command_args())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| format!("cannot start solver `{}`: {e}", cfg.path))?;
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let stderr = std::sync::Arc::new(std::sync::Mutex::new(String::new()));
        if let Some(mut e) = child.stderr.take() {
            let sink = stderr.clone();
            std::thread::spawn(move || {
                let mut buf = String::new();
                let _ = e.read_to_string(&mut buf);
                sink.lock().unwrap().push_str(&buf);
            });
        }
        let prefix = cfg.random_names.map(random_prefix).unwrap_or_default();
        let dump = cfg.dump_dir.as_ref().map(|d| {
            let n = SESSION_COUNTER.fetch_add(1, Ordering::Relaxed);
            d.join(format!("query-{}-{n:05}.smt2", std::process::id()))
        });
        let mut s = Session {
            stdin: child.stdin.take(),
            child,
            lines: rx,
            stderr,
            enc: Encoder::new(&prefix),
            pending: String::new(),
            transcript: String::new(),
            dump,
            timeout_ms: cfg.timeout_ms,
            dead: None,
        };
        s.pending.push_str("(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic QF_BV)\n");
        Ok(s)
    }

    pub fn set_timeout(&mut self, ms: Option<u64>) {
        self.timeout_ms = ms;
    }

    pub fn assert(&mut self, terms: &Terms, t: TermId) {
        let mut out = std::mem::take(&mut self.pending);
        let r = self.enc.term(terms, t, &mut out);
        let _ = writeln!(out, "(assert {r})");
        self.pending = out;
    }

    pub fn push(&mut self) {
        self.enc.push();
        self.pending.push_str("(push 1)\n");
    }

    pub fn pop(&mut self) {
        self.enc.pop();
        self.pending.push_str("(pop 1)\n");
    }

    fn send(&mut self, text: &str) -> Result<(), String> {
        self.transcript.push_str(text);
        if let Some(path) = &self.dump {
            if let Some(dir) = path.parent() {
                let _ = std::fs::create_dir_all(dir);
            }
            let _ = std::fs::write(path, &self.transcript);
        }
        let stdin = self.stdin.as_mut().ok_or("solver input closed")?;
        stdin.write_all(text.as_bytes()).and_then(|_| stdin.flush()).map_err(|e| format!("solver pipe: {e}"))
    }

    fn diagnostic(&mut self, what: &str) -> String {
        std::thread::sleep(Duration::from_millis(20));
        let status = self.child.try_wait().ok().flatten();
        let err = self.stderr.lock().unwrap().trim().to_string();
        let mut msg = what.to_string();
        if let Some(s) = status {
            let _ = write!(msg, " ({s})");
        }
        if !err.is_empty() {
            let _ = write!(msg, ": {err}");
        }
        msg
    }

    /// Reads one response: a line, or a parenthesized expression spanning
    /// several lines.
    fn read_response(&mut self, deadline: Option<Duration>) -> Result<String, String> {
        let mut buf = String::new();
        let mut depth: i64 = 0;
        loop {
            let line = match deadline {
                Some(d) => match self.lines.recv_timeout(d) {
                    Ok(l) => l,
                    Err(RecvTimeoutError::Timeout) => return Err("timeout".into()),
                    Err(RecvTimeoutError::Disconnected) => return Err(self.diagnostic("solver exited")),
                },
                None => self.lines.recv().map_err(|_| self.diagnostic("solver exited"))?,
            };
            let mut in_str = false;
            for c in line.chars() {
                match c {
                    '"' => in_str = !in_str,
                    '(' if !in_str => depth += 1,
                    ')' if !in_str => depth -= 1,
                    _ => {}
                }
            }
            if !buf.is_empty() {
                buf.push('\n');
            }
            buf.push_str(&line);
            if depth <= 0 && !buf.trim().is_empty() {
                return Ok(buf);
            }
        }
    }

    fn kill(&mut self, why: &str) {
        let _ = self.child.kill();
        let _ = self.child.wait();
        self.stdin = None;
        self.dead = Some(why.to_string());
    }

    /// Checks the current assertions. A satisfying model covers every
    /// variable declared so far.
    pub fn check(&mut self) -> SmtResult {
        if let Some(d) = &self.dead {
            return SmtResult::Unknown(format!("solver unavailable after {d}"));
        }
        let mut text = std::mem::take(&mut self.pending);
        if let Some(ms) = self.timeout_ms {
            let _ = writeln!(text, "(set-option :timeout {})", ms.max(1));
        }
        text.push_str("(check-sat)\n");
        if let Err(e) = self.send(&text) {
            let d = self.diagnostic(&e);
            self.kill("a pipe failure");
            return SmtResult::Unknown(d);
        }
        let deadline = self.timeout_ms.map(|ms| Duration::from_millis(ms + 2000));
        let mut errors = Vec::new();
        let answer = loop {
            match self.read_response(deadline) {
                Ok(r) if r.trim_start().starts_with("(error") => errors.push(r),
                Ok(r) => break r.trim().to_string(),
                Err(e) => {
                    let timed_out = e == "timeout";
                    self.kill(&e);
                    return SmtResult::Unknown(if timed_out { "timeout".into() } else { e });
                }
            }
        };
        if !errors.is_empty() {
            return SmtResult::Unknown(format!("solver error: {}", errors.join("; ")));
        }
        match answer.as_str() {
            "sat" => match self.model(deadline) {
                Ok(m) => SmtResult::Sat(m),
                Err(e) => SmtResult::Unknown(e),
            },
            "unsat" => SmtResult::Unsat,
            "unknown" => {
                let reason = self
                    .send("(get-info :reason-unknown)\n")
                    .and_then(|_| self.read_response(deadline))
                    .unwrap_or_default();
                let lower = reason.to_lowercase();
                if self.timeout_ms.is_some() && (lower.contains("timeout") || lower.contains("canceled") || lower.contains("\"\"")) {
                    SmtResult::Unknown("timeout".into())
                } else {
                    SmtResult::Unknown(reason)
                }
            }
            other => SmtResult::Unknown(format!("unexpected solver response `{other}`")),
        }
    }

    fn model(&mut self, deadline: Option<Duration>) -> Result<Model, String> {
        let vars = self.enc.declared();
        if vars.is_empty() {
            return Ok(Model::new());
        }
        let mut symbols = String::new();
        for v in &vars {
            let _ = write!(symbols, " {}", self.enc.var_symbol(v));
        }
        self.send(&format!("(get-value ({symbols}))\n"))?;
        let resp = self.read_response(deadline)?;
        parse_model(&resp, &self.enc.prefix)
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if self.dead.is_none() {
            let _ = self.send("(exit)\n");
            self.stdin = None;
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

/// Parses a `get-value` response into variable values, dropping `prefix`
/// from each symbol.
pub fn parse_model(text: &str, prefix: &str) -> Result<Model, String> {
    let toks = tokenize(text);
    let mut i = 0;
    let expect = |i: &mut usize, t: &str| -> Result<(), String> {
        if toks.get(*i).map(String::as_str) == Some(t) {
            *i += 1;
            Ok(())
        } else {
            Err(format!("malformed model near token {}: {text}", *i))
        }
    };
    let mut model = Model::new();
    expect(&mut i, "(")?;
    while toks.get(i).map(String::as_str) == Some("(") {
        i += 1;
        let sym = toks.get(i).ok_or("truncated model")?.clone();
        i += 1;
        let name = sym.trim_matches('|');
        let name = name.strip_prefix(prefix).unwrap_or(name).to_string();
        let value = match toks.get(i).map(String::as_str) {
            Some("(") => {
                // (_ bvN w)
                let lit = toks.get(i + 2).ok_or("truncated model")?;
                let w: u32 = toks.get(i + 3).and_then(|t| t.parse().ok()).ok_or("bad width")?;
                let n: num_bigint::BigUint = lit.strip_prefix("bv").and_then(|d| d.parse().ok()).ok_or("bad literal")?;
                expect(&mut { i + 4 }, ")")?;
                i += 5;
                CVal::Bv(Bitvec::new(w, n))
            }
            Some(t) => {
                i += 1;
                match t {
                    "true" => CVal::Bool(true),
                    "false" => CVal::Bool(false),
                    _ => {
                        let lit = t.strip_prefix('#').map(|d| format!("0{d}")).ok_or_else(|| format!("bad value `{t}`"))?;
                        CVal::Bv(Bitvec::parse_literal(&lit).ok_or_else(|| format!("bad value `{t}`"))?)
                    }
                }
            }
            None => return Err("truncated model".into()),
        };
        expect(&mut i, ")")?;
        model.insert(name, value);
    }
    expect(&mut i, ")")?;
    Ok(model)
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' | ')' => {
                out.push(c.to_string());
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '|' => {
                let mut s = String::from('|');
                chars.next();
                for d in chars.by_ref() {
                    s.push(d);
                    if d == '|' {
                        break;
                    }
                }
                out.push(s);
            }
            _ => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d == '(' || d == ')' || d.is_whitespace() {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                out.push(s);
            }
        }
    }
    out
}

/// Checks the conjunction of `assertions` in a fresh solver process.
pub fn check_sat(cfg: &SolverConfig, terms: &Terms, assertions: &[TermId]) -> SmtResult {
    let mut s = match Session::start(cfg) {
        Ok(s) => s,
        Err(e) => return SmtResult::Unknown(e),
    };
    for a in assertions {
        s.assert(terms, *a);
    }
    s.check()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexec::value::fresh_word;
    use crate::machine::Machine;
    use crate::syntax::parse_machine;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn constant_assignment_is_satisfiable_with_its_model() {
        let mut t = Terms::new();
        let x = t.var("x", Sort::Bv(4));
        let c = t.bv_u64(4, 3);
        let e = t.eq(x, c);
        match check_sat(&cfg(), &t, &[e]) {
            SmtResult::Sat(m) => assert_eq!(m["x"], CVal::Bv(Bitvec::from_u64(4, 3))),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn contradiction_is_unsat() {
        let mut t = Terms::new();
        let x = t.var("x", Sort::Bv(4));
        let y = t.var("y", Sort::Bv(4));
        let a = t.cmp(CmpOp::Ult, x, y);
        let b = t.cmp(CmpOp::Ult, y, x);
        assert_eq!(check_sat(&cfg(), &t, &[a, b]), SmtResult::Unsat);
    }

    #[test]
    fn models_satisfy_the_query() {
        let mut t = Terms::new();
        let x = t.var("x", Sort::Bv(7));
        let y = t.var("y", Sort::Bv(7));
        let p = t.bvop(BvOp::Mul, x, y);
        let k = t.bv_u64(7, 91);
        let e = t.eq(p, k);
        let one = t.bv_u64(7, 1);
        let nx = t.cmp(CmpOp::Ult, one, x);
        let ny = t.cmp(CmpOp::Ult, one, y);
        let hi = t.extract(3, 6, x);
        let z = t.bv_u64(3, 0);
        let hz = t.eq(hi, z);
        let q = t.and_all([e, nx, ny, hz]);
        let SmtResult::Sat(m) = check_sat(&cfg(), &t, &[q]) else { panic!() };
        assert!(t.evaluator(&m).eval_bool(q));
    }

    #[test]
    fn hard_query_times_out() {
        let mut t = Terms::new();
        let x = t.var("x", Sort::Bv(64));
        let y = t.var("y", Sort::Bv(64));
        let xw = t.resize(128, x);
        let yw = t.resize(128, y);
        let p = t.bvop(BvOp::Mul, xw, yw);
        let n = t.bv(Bitvec::from_u64(128, 18446744073709551557).mul(&Bitvec::from_u64(128, 18446744073709551533)));
        let e = t.eq(p, n);
        let one = t.bv_u64(64, 1);
        let a = t.cmp(CmpOp::Ult, one, x);
        let b = t.cmp(CmpOp::Ult, one, y);
        let mut c = cfg();
        c.timeout_ms = Some(1);
        assert_eq!(check_sat(&c, &t, &[e, a, b]), SmtResult::Unknown("timeout".into()));
    }

    #[test]
    fn missing_solver_is_unknown() {
        let mut t = Terms::new();
        let x = t.var("x", Sort::Bool);
        let c = SolverConfig { path: "/nonexistent/solver".into(), ..cfg() };
        assert!(matches!(check_sat(&c, &t, &[x]), SmtResult::Unknown(_)));
    }

    #[test]
    fn renaming_symbols_keeps_answers() {
        let mut t = Terms::new();
        let x = t.var("reg.r1", Sort::Bv(4));
        let y = t.var("mem.0.1", Sort::Bv(4));
        let s = t.bvop(BvOp::Add, x, y);
        let k = t.bv_u64(4, 9);
        let e = t.eq(s, k);
        for seed in 0..3 {
            let c = SolverConfig { random_names: Some(seed), ..cfg() };
            let SmtResult::Sat(m) = check_sat(&c, &t, &[e]) else { panic!() };
            assert!(m.contains_key("reg.r1") && m.contains_key("mem.0.1"));
            assert!(t.evaluator(&m).eval_bool(e));
        }
    }

    #[test]
    fn scopes_retract_assertions() {
        let mut t = Terms::new();
        let x = t.var("x", Sort::Bv(4));
        let z = t.bv_u64(4, 0);
        let e = t.eq(x, z);
        let ne = t.not(e);
        let mut s = Session::start(&cfg()).unwrap();
        s.assert(&t, e);
        s.push();
        s.assert(&t, ne);
        assert_eq!(s.check(), SmtResult::Unsat);
        s.pop();
        assert!(s.check().is_sat());
        s.push();
        let y = t.var("y", Sort::Bv(4));
        let d = t.eq(x, y);
        s.assert(&t, d);
        let SmtResult::Sat(m) = s.check() else { panic!() };
        assert_eq!(m["y"], CVal::Bv(Bitvec::zero(4)));
        s.pop();
        s.push();
        s.assert(&t, d);
        assert!(s.check().is_sat());
    }

    #[test]
    fn pointers_never_equal_plain_bits() {
        let text = "letstate r0: 4 reg\nletstate r1: 4 reg\nletstate M: 4 bit 4 len 4 ref memory with buf\n";
        let m = Machine::from_ast(&parse_machine(text).unwrap(), &[]).unwrap();
        let mut t = Terms::new();
        let a = fresh_word(&mut t, &m.shape, "a", 4, true);
        let ea = encode_word(&mut t, &m.shape, &a, 4);
        let b = t.var("b", Sort::Bv(4));
        let bv = SymValue::leaf(&t, Leaf::Bits(b));
        let eb = encode_word(&mut t, &m.shape, &bv, 4);
        let is_ptr = a.guard_where(&mut t, |l| matches!(l, Leaf::Ptr(..)));
        let eq = encoded_eq(&mut t, ea, eb);
        assert_eq!(check_sat(&cfg(), &t, &[is_ptr, eq]), SmtResult::Unsat);
        let not_ptr = t.not(is_ptr);
        assert!(check_sat(&cfg(), &t, &[not_ptr, eq]).is_sat());
    }

    #[test]
    fn parses_every_literal_form() {
        let m = parse_model("((|p.x| #b101)\n (y #xa3) (|p.z| (_ bv5 8)) (b true))", "p.").unwrap();
        assert_eq!(m["x"], CVal::Bv(Bitvec::from_u64(3, 5)));
        assert_eq!(m["y"], CVal::Bv(Bitvec::from_u64(8, 0xa3)));
        assert_eq!(m["z"], CVal::Bv(Bitvec::from_u64(8, 5)));
        assert_eq!(m["b"], CVal::Bool(true));
    }
}
