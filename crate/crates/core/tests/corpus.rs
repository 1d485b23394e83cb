use blocksynth::interp::{check_program, pre_holds, run_program};
use blocksynth::lower::lower_spec;
use blocksynth::machine::Machine;
use blocksynth::syntax::loader::*;
use rand::SeedableRng;
use std::path::PathBuf;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn machine(name: &str) -> (Machine, Vec<blocksynth::lang::Decl>) {
    let src = load_machine(&corpus(name)).unwrap_or_else(|e| panic!("{e}"));
    (Machine::from_source(&src).unwrap_or_else(|e| panic!("{e}")), src.ast.decls)
}

#[test]
fn machines_typecheck() {
    for m in ["mips_core.casp", "mips_subset.casp", "arm_subset.casp"] {
        machine(m);
    }
}

#[test]
fn disp_check_witnesses_hold() {
    for (m, l, p) in [("mips_subset.casp", "disp_mips.casp", "disp_mips.prog"), ("arm_subset.casp", "disp_arm.casp", "disp_arm.prog")] {
        let (mach, decls) = machine(m);
        let mods = load_lowerings(&corpus(l)).unwrap();
        let ale = load_alewife(&corpus("disp_check.ale")).unwrap();
        let low = lower_spec(&mach, &decls, &mods, &ale).unwrap_or_else(|e| panic!("{e}"));
        println!("{}", blocksynth::syntax::pretty::spec(&low.ast));
        let prog = mach.program(&load_program(&corpus(p)).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let spec = &low.spec;
        let mut tested = 0;
        for _ in 0..200 {
            let mut st = spec.machine.shape.random_state(&mut rng);
            let disp = spec.machine.shape.reg_by_name(if m.starts_with("mips") { "r6" } else { "r2" }).unwrap();
            st.set_reg(disp, blocksynth::lang::Value::Ptr(spec.machine.shape.base_pointer(blocksynth::lang::RegionId(0))));
            let r0 = spec.machine.shape.reg_by_name("r0").unwrap();
            if m.starts_with("mips") {
                st.set_reg(r0, blocksynth::lang::Value::bits(32, 0));
            }
            assert!(pre_holds(spec, &st));
            tested += 1;
            assert!(check_program(spec, &st, &prog), "{:?}", run_program(&spec.machine, &st, &prog).map(|x| x.1));
        }
        assert_eq!(tested, 200);
    }
}
