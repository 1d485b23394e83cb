//! One line per acceptance criterion; the test fails if any criterion does.

mod common;

use blocksynth::corpus::{corpus_validate, lower_files};
use blocksynth::machine::{Inst, Machine, Spec};
use blocksynth::synth::{self, footprints, gate_state, random_checks, with_invariants, Options, Outcome, Verdict};
use blocksynth::syntax::loader::load_program;
use common::*;
use rand::SeedableRng;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

type Verdicts = BTreeMap<u32, Result<String, String>>;

/// Programs produced along the way, rechecked for soundness.
type Produced = Vec<(String, Spec, Vec<Inst>)>;

fn disp_mips() -> (Machine, Spec) {
    let (m, low) = lower_files(&corpus("mips_subset.casp"), &corpus("disp_mips.casp"), &corpus("disp_check.ale")).unwrap();
    (m, low.spec)
}

fn disp_arm() -> (Machine, Spec) {
    let (m, low) = lower_files(&corpus("arm_subset.casp"), &corpus("disp_arm.casp"), &corpus("disp_check.ale")).unwrap();
    (m, low.spec)
}

fn solvable(o: &Outcome) -> Result<bool, String> {
    match o {
        Outcome::Found(_) => Ok(true),
        Outcome::NoSolution => Ok(false),
        Outcome::Unknown(e) => Err(e.clone()),
    }
}

fn disp_check_pipeline(produced: &mut Produced) -> Result<String, String> {
    let (base, spec) = disp_mips();
    let witness = spec.machine.program(&load_program(&corpus("disp_mips.prog")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if synth::verify_program(&spec, &witness, &Default::default()) != Verdict::Verified {
        return Err("witness does not verify".into());
    }
    let opts = Options { max_len: 2, timeout: Some(Duration::from_secs(600)), ..Options::default() };
    let t = Instant::now();
    let (r, stats) = synth::run(&base, &spec, &opts);
    let el = t.elapsed();
    let Outcome::Found(p) = r else { return Err(format!("synthesis gave {r:?}")) };
    if p.len() > 2 || el > Duration::from_secs(600) {
        return Err(format!("{} instructions in {el:?}", p.len()));
    }
    let text = spec.machine.show_program(&p).replace('\n', " ");
    produced.push(("disp_check mips".into(), spec, p));
    Ok(format!("lowered, witness verified, synthesized `{text}` in {:.1}s ({} iterations)", el.as_secs_f64(), stats.cegis_iterations))
}

fn verify_speed() -> Result<String, String> {
    let mut worst = Duration::ZERO;
    for ((_, spec), prog) in [(disp_mips(), "disp_mips.prog"), (disp_arm(), "disp_arm.prog")] {
        let p = spec.machine.program(&load_program(&corpus(prog)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let v = synth::verify_program(&spec, &p, &Default::default());
        worst = worst.max(t.elapsed());
        if v != Verdict::Verified {
            return Err(format!("{prog}: {v:?}"));
        }
    }
    if worst > Duration::from_secs(10) {
        return Err(format!("slowest verify took {worst:?}"));
    }
    Ok(format!("slowest verify {:.0} ms", worst.as_secs_f64() * 1e3))
}

fn oracle() -> Result<String, String> {
    let crashes = oracle_equivalence(1000, 7)?;
    Ok(format!("1000/1000 cases agree ({crashes} crashing)"))
}

fn soundness(produced: &Produced) -> Result<String, String> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for (name, spec, p) in produced {
        if synth::verify_program(spec, p, &Default::default()) != Verdict::Verified {
            return Err(format!("{name}: does not verify"));
        }
        let bad = random_checks(&with_invariants(spec), p, 100, &mut rng, &Default::default())?;
        if !bad.is_empty() {
            return Err(format!("{name}: {} of 100 random checks fail", bad.len()));
        }
    }
    Ok(format!("{} programs verified and passed 100 random checks each", produced.len()))
}

const TOGGLES: [&str; 5] = ["all", "no-rw", "no-gate", "no-dep", "no-decompose"];

fn toggled(name: &str) -> Options {
    let o = Options::default();
    match name {
        "no-rw" => Options { rw: false, ..o },
        "no-gate" => Options { gate: false, ..o },
        "no-dep" => Options { dep: false, ..o },
        "no-decompose" => Options { decompose: false, ..o },
        _ => o,
    }
}

fn spec_max_len(name: &str) -> usize {
    if name == "five_updates" {
        5
    } else {
        4
    }
}

/// Outcome and wall time per toy spec and toggle.
type ToyRuns = BTreeMap<(String, &'static str), (Result<bool, String>, Duration)>;

fn toy_runs(produced: &mut Produced) -> ToyRuns {
    let m = toy();
    let mut out = ToyRuns::new();
    for name in toy_spec_names() {
        let spec = toy_spec(&m, &name);
        for t in TOGGLES {
            let opts = Options { max_len: spec_max_len(&name), timeout: Some(Duration::from_secs(300)), ..toggled(t) };
            let start = Instant::now();
            let (r, _) = synth::run(&m, &spec, &opts);
            out.insert((name.clone(), t), (solvable(&r), start.elapsed()));
            if let Outcome::Found(p) = r {
                produced.push((format!("{name} {t}"), spec.clone(), p));
            }
        }
    }
    out
}

fn neutrality(runs: &ToyRuns) -> Result<String, String> {
    let names: Vec<String> = toy_spec_names();
    if names.len() < 10 {
        return Err(format!("only {} toy specs", names.len()));
    }
    for name in &names {
        let all = &runs[&(name.clone(), "all")].0;
        for t in TOGGLES {
            let r = &runs[&(name.clone(), t)].0;
            if r.is_err() || r != all {
                return Err(format!("{name}: {t} gives {r:?}, all gives {all:?}"));
            }
        }
    }
    let key = "five_updates".to_string();
    let (dec, base) = (&runs[&(key.clone(), "all")], &runs[&(key, "no-decompose")]);
    let faster = dec.0 == Ok(true) && (base.0 != Ok(true) || dec.1 < base.1);
    if !faster {
        return Err(format!("five_updates: decomposition {:?} vs {:?}", dec.1, base.1));
    }
    Ok(format!(
        "{} specs x {} toggles agree; five_updates {:.1}s with decomposition vs {:.1}s without",
        names.len(),
        TOGGLES.len(),
        dec.1.as_secs_f64(),
        base.1.as_secs_f64()
    ))
}

fn gating(runs: &ToyRuns) -> Result<String, String> {
    let m = toy();
    let mut specs: Vec<(String, Spec)> = toy_spec_names().into_iter().map(|n| (n.clone(), toy_spec(&m, &n))).collect();
    specs.push(("disp_check mips".into(), with_invariants(&disp_mips().1)));
    specs.push(("disp_check arm".into(), disp_arm().1));
    for (name, spec) in &specs {
        let mm = &spec.machine;
        let g = gate_state(mm, spec, &footprints(mm));
        let keep = spec.mentioned_regs.iter().chain(&spec.modifiable_regs).copied().chain(mm.shape.reg_ids().filter(|r| mm.shape.reg(*r).dontgate));
        for r in keep {
            if !g.regs.contains(&r) {
                return Err(format!("{name}: gating drops {}", mm.shape.reg(r).name));
            }
        }
    }
    for name in toy_spec_names() {
        let (gated, ungated) = (&runs[&(name.clone(), "all")].0, &runs[&(name.clone(), "no-gate")].0);
        if ungated == &Ok(true) && gated != &Ok(true) {
            return Err(format!("{name}: ungated succeeds but gated does not"));
        }
    }
    let (base, spec) = disp_mips();
    for gate in [true, false] {
        let opts = Options { gate, decompose: false, max_len: 2, timeout: Some(Duration::from_secs(600)), ..Options::default() };
        let (r, _) = synth::run(&base, &spec, &opts);
        if solvable(&r) != Ok(true) {
            return Err(format!("disp_check mips with gate={gate}: {r:?}"));
        }
    }
    Ok(format!("{} specs keep mentioned and dontgate registers; gated synthesis matches ungated", specs.len()))
}

fn dependencies() -> Result<String, String> {
    let m = toy();
    let specs = dependency_specs();
    for s in &specs {
        dependency_agrees(&m, s)?;
    }
    Ok(format!("{} specs agree with exhaustive enumeration", specs.len()))
}

fn goldens() -> Result<String, String> {
    let r = corpus_validate(&corpus(""));
    if !r.ok() {
        let bad: Vec<String> = r.failures().iter().map(|c| format!("{}: {}", c.name, c.result.clone().unwrap_err())).collect();
        return Err(bad.join("; "));
    }
    Ok(format!("{} corpus checks green, MIPS and ARM lowerings match the golden files", r.checks.len()))
}

#[test]
fn acceptance() {
    let mut produced = Produced::new();
    let mut v = Verdicts::new();
    v.insert(1, disp_check_pipeline(&mut produced));
    v.insert(2, verify_speed());
    v.insert(3, oracle());
    let runs = toy_runs(&mut produced);
    v.insert(5, neutrality(&runs));
    v.insert(6, gating(&runs));
    v.insert(7, dependencies());
    v.insert(8, goldens());
    v.insert(4, soundness(&produced));
    let names = [
        "",
        "disp_check MIPS pipeline",
        "verify speed",
        "symbolic/concrete oracle equivalence",
        "soundness of synthesized programs",
        "optimization neutrality and effect",
        "gating conservativity",
        "dependency analysis vs brute force",
        "golden lowerings",
    ];
    for (n, r) in &v {
        match r {
            Ok(d) => println!("criterion {n} PASS {}: {d}", names[*n as usize]),
            Err(e) => println!("criterion {n} FAIL {}: {e}", names[*n as usize]),
        }
    }
    let failed: Vec<u32> = v.iter().filter(|(_, r)| r.is_err()).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
