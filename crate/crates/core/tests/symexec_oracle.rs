mod common;

use blocksynth::interp::run_program;
use blocksynth::sample::{random_program, random_state_with_pointers};
use blocksynth::symexec::exec::{assignment_of, concretize_outcome};
use blocksynth::symexec::{SymExec, SymInst, SymState, Terms};
use common::*;
use rand::SeedableRng;

#[test]
fn symbolic_runs_concretize_to_interpreter_runs() {
    let m = toy();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let (mut crashes, mut exits) = (0, 0);
    for k in 0..1000 {
        let prog = random_program(&m, 3, &mut rng);
        let st = random_state_with_pointers(&m.shape, &mut rng, 0.4);
        let mut terms = Terms::new();
        let init = SymState::fresh(&mut terms, &m.shape, &|_| true);
        let insts: Vec<SymInst> = prog.iter().map(|i| SymInst::concrete(&mut terms, i)).collect();
        let out = SymExec::new(&mut terms, &m).exec_program(&init, &insts).unwrap();
        let sym = concretize_outcome(&terms, &m.shape, &out, &assignment_of(&m.shape, &st));
        let conc = run_program(&m, &st, &prog).ok();
        crashes += conc.is_none() as usize;
        exits += conc.as_ref().is_some_and(|c| c.1) as usize;
        assert_eq!(sym, conc, "case {k}: {}\nstate {}", m.show_program(&prog), m.shape.state_to_json(&st));
    }
    assert!(crashes > 50 && crashes < 700 && exits > 0, "weak coverage: {crashes} crashes, {exits} exits");
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
    #[test]
    fn symbolic_and_concrete_runs_agree_for_any_seed(seed: u64) {
        proptest::prop_assert!(oracle_equivalence(16, seed).is_ok());
    }
}
