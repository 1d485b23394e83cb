use blocksynth::lower::lower_spec;
use blocksynth::machine::{Machine, Spec};
use blocksynth::synth::{self, Options, Outcome, Verdict};
use blocksynth::syntax::loader::*;
use blocksynth::syntax::parse_program;
use std::path::PathBuf;
use std::time::{Duration, Instant};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn lowered(m: &str, l: &str) -> (Machine, Spec) {
    let src = load_machine(&corpus(m)).unwrap();
    let mach = Machine::from_source(&src).unwrap();
    let mods = load_lowerings(&corpus(l)).unwrap();
    let ale = load_alewife(&corpus("disp_check.ale")).unwrap();
    let low = lower_spec(&mach, &src.ast.decls, &mods, &ale).unwrap();
    (mach, low.spec)
}

#[test]
fn mips_witness_verifies_and_swap_is_refuted() {
    let (_, spec) = lowered("mips_subset.casp", "disp_mips.casp");
    let m = &spec.machine;
    let good = m.program(&parse_program("(LW r2 r6 0x0058)\n(SLTU r4 r5 r2)").unwrap()).unwrap();
    let t = Instant::now();
    assert_eq!(synth::verify_program(&spec, &good, &Default::default()), Verdict::Verified);
    println!("verify: {:?}", t.elapsed());
    let bad = m.program(&parse_program("(LW r2 r6 0x0058)\n(SLTU r4 r2 r5)").unwrap()).unwrap();
    assert!(matches!(synth::verify_program(&spec, &bad, &Default::default()), Verdict::Refuted(_)));
}

#[test]
fn mips_dispatch_check_is_synthesized() {
    let (base, spec) = lowered("mips_subset.casp", "disp_mips.casp");
    let opts = Options { timeout: Some(Duration::from_secs(600)), ..Options::default() };
    let (r, stats) = synth::run(&base, &spec, &opts);
    println!("{stats:?}");
    let Outcome::Found(p) = r else { panic!("{r:?}") };
    println!("{}", p.iter().map(|i| spec.machine.show_inst(i)).collect::<Vec<_>>().join("\n"));
    assert_eq!(synth::verify_program(&spec, &p, &Default::default()), Verdict::Verified);
}

#[test]
fn mips_dispatch_check_without_decomposition() {
    let (base, spec) = lowered("mips_subset.casp", "disp_mips.casp");
    let opts = Options { decompose: false, timeout: Some(Duration::from_secs(600)), ..Options::default() };
    let (r, stats) = synth::run(&base, &spec, &opts);
    println!("{stats:?}");
    let Outcome::Found(p) = r else { panic!("{r:?}") };
    assert_eq!(p.len(), 2);
    assert_eq!(synth::verify_program(&spec, &p, &Default::default()), Verdict::Verified);
}

#[test]
fn arm_dispatch_check_is_synthesized() {
    let (base, spec) = lowered("arm_subset.casp", "disp_arm.casp");
    let opts = Options { timeout: Some(Duration::from_secs(600)), ..Options::default() };
    let (r, stats) = synth::run(&base, &spec, &opts);
    println!("{stats:?}");
    let Outcome::Found(p) = r else { panic!("{r:?}") };
    println!("{}", p.iter().map(|i| spec.machine.show_inst(i)).collect::<Vec<_>>().join("\n"));
    assert_eq!(synth::verify_program(&spec, &p, &Default::default()), Verdict::Verified);
}
