#![allow(dead_code)]

use blocksynth::corpus::{machine_file, spec_file};
use blocksynth::interp::{eval_bool, run_program, spec_globals};
use blocksynth::lang::{RegId, Value};
use blocksynth::machine::{Machine, Spec};
use blocksynth::sample::{random_program, random_state_with_pointers};
use blocksynth::symexec::exec::{assignment_of, concretize_outcome, Loc};
use blocksynth::symexec::{SymExec, SymInst, SymState, Terms};
use blocksynth::synth::{analyze, DepInfo};
use rand::SeedableRng;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

pub fn toy() -> Machine {
    machine_file(&corpus("toy.casp")).unwrap().0
}

pub fn toy_spec(m: &Machine, name: &str) -> Spec {
    spec_file(m, &corpus(&format!("toy_specs/{name}.casp"))).unwrap_or_else(|e| panic!("{e}"))
}

pub fn toy_spec_names() -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(corpus("toy_specs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "casp"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    out.sort();
    out
}

/// Symbolic execution concretized at random states against the
/// interpreter; returns the number of crashing cases.
pub fn oracle_equivalence(cases: usize, seed: u64) -> Result<usize, String> {
    let m = toy();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut crashes = 0;
    for k in 0..cases {
        let prog = random_program(&m, 3, &mut rng);
        let st = random_state_with_pointers(&m.shape, &mut rng, 0.4);
        let mut terms = Terms::new();
        let init = SymState::fresh(&mut terms, &m.shape, &|_| true);
        let insts: Vec<SymInst> = prog.iter().map(|i| SymInst::concrete(&mut terms, i)).collect();
        let out = SymExec::new(&mut terms, &m).exec_program(&init, &insts).map_err(|e| e.to_string())?;
        let sym = concretize_outcome(&terms, &m.shape, &out, &assignment_of(&m.shape, &st));
        let conc = run_program(&m, &st, &prog).ok();
        crashes += conc.is_none() as usize;
        if sym != conc {
            return Err(format!("case {k}: {}\nstate {}", m.show_program(&prog), m.shape.state_to_json(&st)));
        }
    }
    Ok(crashes)
}

/// Generated toy specifications over inputs r1..r3 and outputs r1 and r6,
/// each with the registers its brute force enumerates.
pub fn dependency_specs() -> Vec<String> {
    let lets = "let x: word = *r2\nlet y: word = *r3\n";
    let mut out = Vec::new();
    let posts = [
        "*r1 == x b+ y",
        "*r1 == x b- y",
        "*r1 == (x band y)",
        "*r1 == (x bxor 0b0110)",
        "*r1 == 0b1001",
        "*r1 b< x",
        "*r1 == x || *r1 == y",
        "( *r1 band 0b0001) == 0b0000",
        "*r1 == (x band 0b0000) b+ y",
        "if x b< y then *r1 == y else *r1 == x",
        "*r1 == (x bxor x)",
        "*r1 == (x << 0b0001)",
        "*r1 == x b/ y",
        "( *r1 b+ x) == y",
    ];
    for p in posts {
        out.push(format!("{lets}frame: modify: r1\npre: true\npost: {p}"));
    }
    out.push(format!("{lets}frame: modify: r1\npre: x == 0b0011\npost: *r1 == x b+ y"));
    out.push(format!("{lets}frame: modify: r1\npre: x b< y\npost: *r1 == y b- x"));
    out.push(format!("{lets}frame: modify: r1 r6\npre: true\npost: *r1 == x"));
    out.push(format!("{lets}frame: modify: r1 r6\npre: true\npost: *r1 == y && *r6 == (x bxor y)"));
    out.push("let z: word = *r1\nlet y: word = *r3\nframe: modify: r1\npre: true\npost: *r1 == z b+ y".into());
    out.push("let z: word = *r1\nframe: modify: r1\npre: z != 0b0000\npost: *r1 == z b- 0b0001".into());
    out
}

/// Uniquely determined modifiable registers and their dependences, by
/// enumerating every value of the relevant 4-bit registers; the remaining
/// state is zero.
pub fn brute_force_deps(spec: &Spec) -> (BTreeMap<RegId, BTreeSet<RegId>>, BTreeSet<RegId>) {
    let shape = &spec.machine.shape;
    let r = |n: &str| shape.reg_by_name(n).unwrap();
    let inputs = [r("r1"), r("r2"), r("r3")];
    let outputs: Vec<RegId> = spec.modifiable_regs.iter().copied().collect();
    let n_in = 1usize << (4 * inputs.len());
    let n_out = 1usize << (4 * outputs.len());
    let nib = |v: usize, i: usize| ((v >> (4 * i)) & 0xf) as u64;
    // For every initial valuation, the admissible final valuations.
    let mut finals: Vec<Vec<usize>> = vec![Vec::new(); n_in];
    let base = shape.zero_state();
    for (a, slot) in finals.iter_mut().enumerate() {
        let mut init = base.clone();
        for (i, x) in inputs.iter().enumerate() {
            init.set_reg(*x, Value::bits(4, nib(a, i)));
        }
        let g = spec_globals(spec, &init);
        if !eval_bool(spec, &g, &init, None, &spec.pre) {
            continue;
        }
        for b in 0..n_out {
            let mut fin = init.clone();
            for (i, o) in outputs.iter().enumerate() {
                fin.set_reg(*o, Value::bits(4, nib(b, i)));
            }
            if eval_bool(spec, &g, &fin, Some(false), &spec.post) {
                slot.push(b);
            }
        }
    }
    let mut unique = BTreeMap::new();
    let mut not_unique = BTreeSet::new();
    for (oi, o) in outputs.iter().enumerate() {
        let vals: Vec<BTreeSet<u64>> = finals.iter().map(|f| f.iter().map(|b| nib(*b, oi)).collect()).collect();
        if vals.iter().any(|v| v.len() > 1) {
            not_unique.insert(*o);
            continue;
        }
        let mut deps = BTreeSet::new();
        for (xi, x) in inputs.iter().enumerate() {
            let differs = (0..n_in).any(|a| {
                (0..16).any(|v| {
                    let b = (a & !(0xf << (4 * xi))) | (v << (4 * xi));
                    vals[a].iter().any(|p| vals[b].iter().any(|q| p != q))
                })
            });
            if differs {
                deps.insert(*x);
            }
        }
        unique.insert(*o, deps);
    }
    (unique, not_unique)
}

/// Agreement between the solver-based analysis and brute force for one
/// specification.
pub fn dependency_agrees(m: &Machine, text: &str) -> Result<(), String> {
    let spec = Spec::from_ast(m, &blocksynth::syntax::parse_spec(text).unwrap(), &[]).map_err(|e| e.to_string())?;
    let info: DepInfo = analyze(&spec, &Default::default())?;
    if !info.unknown.is_empty() {
        return Err(format!("solver inconclusive on {:?}", info.unknown));
    }
    let smt_unique: BTreeMap<RegId, BTreeSet<RegId>> = info
        .unique
        .iter()
        .filter_map(|(l, d)| match l {
            Loc::Reg(r) => Some((*r, d.iter().filter_map(|x| if let Loc::Reg(y) = x { Some(*y) } else { None }).collect())),
            _ => None,
        })
        .collect();
    let smt_not: BTreeSet<RegId> = info.not_unique.iter().filter_map(|l| if let Loc::Reg(r) = l { Some(*r) } else { None }).collect();
    let (bf_unique, bf_not) = brute_force_deps(&spec);
    if smt_unique != bf_unique || smt_not != bf_not {
        return Err(format!(
            "spec:\n{text}\nsolver: unique {smt_unique:?} not {smt_not:?}\nbrute force: unique {bf_unique:?} not {bf_not:?}"
        ));
    }
    Ok(())
}
